"""Discrete rough singular integrals, Riesz potentials, heat semigroup and maximal function.

Every volume quadrature here is a polar rule (log-radial Gauss-Legendre per
dyadic annulus times the sphere nodes of the kernel) applied to the
multilinear interpolant of the field.  Because the output points are grid
points and the grid is uniform, interpolating ``f(x - y)`` for a fixed offset
``y`` is the same linear combination of lattice shifts at every ``x``.  Each
rule is therefore splatted once onto a lattice kernel and applied with an FFT
convolution; the result equals the point-by-point quadrature up to rounding.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import integrate

from .balls import BallFamily, ball_averages, credit_max, linear_convolve
from .grid import GridError, GridSpec, SampledField
from .sphere import SphereKernel

MEAN_TOL = 1e-12
RADIAL_NODES = 12
HEAT_TRUNCATION = 8.0  # standard deviations
NET_PER_DECADE = 40


class OperatorError(ValueError):
    pass


# -- quadrature ---------------------------------------------------------------


@dataclass(frozen=True)
class AnnularQuadrature:
    """Dyadic annuli ``2^{k-1} < |y| <= 2^k`` for ``k_min <= k <= k_max``.

    The core ``|y| <= 2^{k_min - 1}`` lies inside the cells adjacent to the
    output point, where the interpolant is a polynomial in ``|y|`` along each
    ray; it is integrated exactly by ``core_rule``.
    """

    k_min: int
    k_max: int
    radial_nodes_per_annulus: int = RADIAL_NODES
    dim: int = 2

    @classmethod
    def for_grid(cls, spec: GridSpec, radial_nodes: int = RADIAL_NODES) -> "AnnularQuadrature":
        h, L, n = spec.spacing, spec.halfwidth, spec.dim
        k_min = math.floor(math.log2(h))
        k_max = math.ceil(math.log2(2 * math.sqrt(n) * L))
        return cls(k_min, k_max, radial_nodes, spec.dim)

    @property
    def core_radius(self) -> float:
        return 2.0 ** (self.k_min - 1)

    @property
    def outer_radius(self) -> float:
        return 2.0**self.k_max

    def edges(self) -> np.ndarray:
        return 2.0 ** np.arange(self.k_min - 1, self.k_max + 1)

    def radial_rule(self, a: float, b: float, power: float):
        """Nodes/weights on ``[a, b]`` for ``int g(r) r^power dr``, Gauss-Legendre in ``log r``."""
        x, w = _leggauss(self.radial_nodes_per_annulus)
        la, lb = math.log(a), math.log(b)
        s = 0.5 * (lb - la) * x + 0.5 * (lb + la)
        r = np.exp(s)
        return r, 0.5 * (lb - la) * w * r ** (power + 1.0)

    def annuli(self) -> list:
        e = self.edges()
        return list(zip(e[:-1], e[1:]))


@lru_cache(maxsize=None)
def _leggauss(m: int):
    return np.polynomial.legendre.leggauss(m)


def core_rule(r0: float, t: float, power: float, dim: int):
    """Nodes ``r0 * (1, 1/2, ..., 1/dim)`` integrating ``r^m r^power`` over ``[t, r0]`` exactly, m = 1..dim.

    Along a ray inside the cells adjacent to a grid point the multilinear
    interpolant minus its centre value is a polynomial of degree ``dim`` in
    ``r`` with no constant term.
    """
    nodes = r0 / np.arange(1, dim + 1)
    m = np.arange(1, dim + 1)
    V = nodes[None, :] ** m[:, None]
    e = m + power + 1.0
    rhs = (r0**e - t**e) / e
    return nodes, np.linalg.solve(V, rhs)


# -- splatting ------------------------------------------------------------------


def _splat(spec: GridSpec, omega: SphereKernel, radii: np.ndarray, rweights: np.ndarray) -> np.ndarray:
    """Lattice kernel ``K`` (extent ``2N-1`` per axis) with ``sum_k K[k] f[i-k]`` equal to
    ``sum_{r,j} c_{rj} (f_I(x_i - r xi_j) - f(x_i))``, ``c_{rj} = rweight_r * w_j * Omega_j``.
    """
    N, n, h = spec.points_per_axis, spec.dim, spec.spacing
    ext = 2 * N - 1
    K = np.zeros(ext**n)
    coef_ang = omega.weights * omega.values
    live = coef_ang != 0.0
    xi = omega.nodes[live]
    ca = coef_ang[live]
    if radii.size == 0 or ca.size == 0:
        return K.reshape((ext,) * n)
    strides = np.array([ext ** (n - 1 - d) for d in range(n)])
    chunk = max(1, 400_000 // max(1, ca.size))
    for i0 in range(0, radii.size, chunk):
        r = radii[i0 : i0 + chunk]
        c = (rweights[i0 : i0 + chunk, None] * ca[None, :]).ravel()
        u = (r[:, None, None] * xi[None, :, :] / h).reshape(-1, n)
        m = np.floor(u)
        phi = u - m
        m = m.astype(np.int64)
        for corner in itertools.product((0, 1), repeat=n):
            e = np.array(corner)
            wgt = c.copy()
            for d in range(n):
                wgt *= phi[:, d] if corner[d] else 1.0 - phi[:, d]
            k = m + e
            ok = np.all(np.abs(k) <= N - 1, axis=1)
            flat = (k[ok] + (N - 1)) @ strides
            K += np.bincount(flat, weights=wgt[ok], minlength=K.size)
    # cancellation term -f(x) * sum c (vanishes up to rounding for mean-zero Omega)
    K[(N - 1) * strides.sum()] -= rweights.sum() * ca.sum()
    return K.reshape((ext,) * n)


def _check_inputs(omega: SphereKernel, f: SampledField) -> None:
    if omega.dim != f.spec.dim:
        raise OperatorError("kernel and field dimensions differ")
    scale = max(1.0, float(np.max(np.abs(omega.values))) if omega.size else 1.0)
    if abs(omega.mean()) > MEAN_TOL * scale:
        raise OperatorError(f"kernel mean {omega.mean():.3e} is not zero; project it first")
    band = np.zeros(f.spec.shape, dtype=bool)
    for d in range(f.spec.dim):
        sl = [slice(None)] * f.spec.dim
        sl[d] = slice(0, 2)
        band[tuple(sl)] = True
        sl[d] = slice(-2, None)
        band[tuple(sl)] = True
    if np.any(f.values[band] != 0.0):
        raise GridError("field does not vanish on the two-cell guard band")


class _Plan:
    """FFT of a field reused across several lattice kernels."""

    def __init__(self, values: np.ndarray):
        self.shape = values.shape
        N = values.shape[0]
        ext = 2 * N - 1
        self.fshape = [sfft.next_fast_len(N + ext - 1, real=True)] * values.ndim
        self.axes = tuple(range(values.ndim))
        self.F = sfft.rfftn(values, self.fshape, axes=self.axes)
        self.offset = N - 1

    def kernel_fft(self, K: np.ndarray) -> np.ndarray:
        return sfft.rfftn(K, self.fshape, axes=self.axes)

    def apply_fft(self, KF: np.ndarray) -> np.ndarray:
        full = sfft.irfftn(self.F * KF, self.fshape, axes=self.axes)
        sl = tuple(slice(self.offset, self.offset + n) for n in self.shape)
        return full[sl]


def _quadrature(spec: GridSpec, quad: Optional[AnnularQuadrature]) -> AnnularQuadrature:
    q = quad or AnnularQuadrature.for_grid(spec)
    return AnnularQuadrature(q.k_min, q.k_max, q.radial_nodes_per_annulus, spec.dim)


class TruncationSweep:
    """``T^t`` for any ``t >= 0`` from per-annulus lattice kernels.

    The kernel for ``|y| > t`` is the running sum of whole annuli, accumulated
    from the outermost inwards in a fixed order, plus one partial annulus (or
    the exact core when ``t`` is below the innermost edge).  The result for a
    given ``t`` is therefore the same floating-point computation whichever
    other radii are requested.
    """

    def __init__(self, omega: SphereKernel, f: SampledField, power: float = -1.0, quad=None):
        self.omega, self.f, self.power = omega, f, power
        self.q = _quadrature(f.spec, quad)
        self.annuli = self.q.annuli()
        self.trivial = omega.is_zero() or not np.any(f.values)
        self._plan = None if self.trivial else _Plan(f.values)

    def _kernel(self, r, w) -> np.ndarray:
        return _splat(self.f.spec, self.omega, r, w)

    def _partial(self, t: float) -> Optional[np.ndarray]:
        r0 = self.q.core_radius
        if t < r0:
            return self._kernel(*core_rule(r0, t, self.power, self.q.dim))
        for a, b in self.annuli:
            if a < t < b:
                return self._kernel(*self.q.radial_rule(t, b, self.power))
        return None

    def sweep(self, ts: Iterable[float]):
        """Yield ``(t, values)`` for ``ts`` in decreasing order."""
        shape = self.f.spec.shape
        ts = sorted((float(t) for t in ts), reverse=True)
        S = None
        j = len(self.annuli)  # annuli[j:] are already in S
        for t in ts:
            if self.trivial or t >= self.q.outer_radius:
                yield t, np.zeros(shape)
                continue
            while j > 0 and self.annuli[j - 1][0] >= t:
                j -= 1
                Kj = self._kernel(*self.q.radial_rule(*self.annuli[j], self.power))
                S = Kj if S is None else S + Kj
            P = self._partial(t)
            if S is None:
                K = P
            else:
                K = S if P is None else S + P
            yield t, self._plan.apply_fft(self._plan.kernel_fft(K))

    def values(self, t: float) -> np.ndarray:
        return next(self.sweep([t]))[1]


def generalized_singular_integral(
    omega: SphereKernel, f: SampledField, alpha: float, quad: Optional[AnnularQuadrature] = None
) -> SampledField:
    """p.v. integral of ``Omega(y/|y|) / |y|^(n+1-alpha) * f(x-y)``, ``0 < alpha <= 1``."""
    if not 0 < alpha <= 1:
        raise OperatorError("alpha must lie in (0, 1]")
    _check_inputs(omega, f)
    return f.with_values(TruncationSweep(omega, f, alpha - 2.0, quad).values(0.0))


def singular_integral(omega: SphereKernel, f: SampledField, quad: Optional[AnnularQuadrature] = None) -> SampledField:
    """``T_Omega f`` in cancellation form on every annulus."""
    return generalized_singular_integral(omega, f, 1.0, quad)


def truncated_integral(
    omega: SphereKernel, f: SampledField, t: float, quad: Optional[AnnularQuadrature] = None
) -> SampledField:
    """``T^t_Omega f``: the same rule restricted to ``|y| > t``."""
    if not t > 0:
        raise OperatorError("truncation radius must be positive")
    _check_inputs(omega, f)
    return f.with_values(TruncationSweep(omega, f, -1.0, quad).values(float(t)))


def log_net(lo: float, hi: float, per_decade: int = NET_PER_DECADE) -> np.ndarray:
    """Log-spaced net on ``[lo, hi]`` with ``per_decade`` points per decade, endpoints included."""
    count = max(2, int(math.ceil(per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, count)


def truncation_net(spec: GridSpec, per_decade: int = NET_PER_DECADE) -> np.ndarray:
    return log_net(spec.spacing / 4, 4 * spec.halfwidth, per_decade)


def heat_time_net(spec: GridSpec, per_decade: int = NET_PER_DECADE) -> np.ndarray:
    return log_net(spec.spacing**2 / 4, (4 * spec.halfwidth) ** 2, per_decade)


def maximal_truncated(
    omega: SphereKernel, f: SampledField, t_grid: Sequence[float], quad: Optional[AnnularQuadrature] = None
) -> SampledField:
    """``T*_Omega f`` approximated by the max of ``|T^t f|`` over ``t_grid``.

    ``T^t`` depends only on ``t`` (never on the rest of the net), so enlarging
    the net can only increase the result.
    """
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size == 0:
        raise OperatorError("t_grid must be nonempty")
    if np.any(t_grid <= 0) or np.any(np.diff(t_grid) < 0):
        raise OperatorError("t_grid must be positive and sorted")
    _check_inputs(omega, f)
    out = np.zeros(f.spec.shape)
    for _, vals in TruncationSweep(omega, f, -1.0, quad).sweep(t_grid):
        np.maximum(out, np.abs(vals), out=out)
    return f.with_values(out)


# -- Riesz potential --------------------------------------------------------------


@lru_cache(maxsize=None)
def cell_singular_integral(dim: int, alpha: float) -> float:
    """``int_{[-1/2,1/2]^n} |z|^(alpha-n) dz`` by polar integration over the cube faces.

    Each of the ``2n`` faces contributes ``int_face (1/2) d^(alpha-n) / alpha du``
    with ``d`` the distance from the origin to the face point ``u``.
    """
    def face(*u):
        d2 = 0.25 + sum(x * x for x in u)
        return 0.5 * d2 ** ((alpha - dim) / 2) / alpha

    if dim == 2:
        val, _ = integrate.quad(face, -0.5, 0.5, epsabs=1e-14, epsrel=1e-13)
    elif dim == 3:
        val, _ = integrate.dblquad(face, -0.5, 0.5, -0.5, 0.5, epsabs=1e-13, epsrel=1e-12)
    else:
        raise OperatorError("dim must be 2 or 3")
    return 2 * dim * val


def riesz_kernel(spec: GridSpec, alpha: float) -> np.ndarray:
    N, n, h = spec.points_per_axis, spec.dim, spec.spacing
    ax = np.arange(-(N - 1), N) * h
    grids = np.meshgrid(*([ax] * n), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    centre = (N - 1,) * n
    r[centre] = 1.0
    K = r ** (alpha - n) * h**n
    K[centre] = h**alpha * cell_singular_integral(n, float(alpha))
    return K


def riesz_potential(g: SampledField, alpha: float) -> SampledField:
    """``I_alpha g(x) = int g(y) |x-y|^(alpha-n) dy`` (normalising constant 1).

    Off-diagonal cells use the midpoint rule; the cell containing ``x``
    contributes ``g(x)`` times the exact integral of the kernel over that cell.
    """
    n = g.spec.dim
    if not 0 < alpha < n:
        raise OperatorError(f"alpha must lie in (0, {n})")
    if not np.any(g.values):
        return g.with_values(np.zeros(g.spec.shape))
    return g.with_values(linear_convolve(g.values, riesz_kernel(g.spec, alpha)))


# -- heat semigroup -----------------------------------------------------------------


def _heat_kernel_1d(spec: GridSpec, t: float) -> np.ndarray:
    h, N = spec.spacing, spec.points_per_axis
    sigma = math.sqrt(2.0 * t)
    J = max(1, int(math.ceil(HEAT_TRUNCATION * sigma / h)))
    j = np.arange(-J, J + 1)
    k = np.exp(-((j * h) ** 2) / (4.0 * t))
    k /= k.sum()
    if J > N - 1:
        k = k[J - (N - 1) : J + N]
    return k


def _convolve_axis(values: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    if k.size == 1:
        return values * k[0]
    n = values.shape[axis]
    L = sfft.next_fast_len(n + k.size - 1, real=True)
    F = sfft.rfft(values, L, axis=axis)
    kf = sfft.rfft(k, L)
    shape = [1] * values.ndim
    shape[axis] = kf.size
    full = sfft.irfft(F * kf.reshape(shape), L, axis=axis)
    start = k.size // 2
    return np.take(full, np.arange(start, start + n), axis=axis)


def heat_values(values: np.ndarray, spec: GridSpec, t: float) -> np.ndarray:
    out = values
    k = _heat_kernel_1d(spec, t)
    for ax in range(spec.dim):
        out = _convolve_axis(out, k, ax)
    return out


def heat_at_points(values: np.ndarray, spec: GridSpec, t: float, points: Sequence[tuple]) -> np.ndarray:
    """``h_t * g`` at a few grid indices, with the same 1-D kernel as ``heat_values``."""
    k = _heat_kernel_1d(spec, t)
    J = k.size // 2
    N = spec.points_per_axis
    out = []
    for idx in points:
        acc = values
        for i in idx:
            # weight of sample j is k[J + i - j]
            j = np.arange(N)
            off = J + i - j
            wts = np.where((off >= 0) & (off < k.size), k[np.clip(off, 0, k.size - 1)], 0.0)
            acc = np.tensordot(wts, acc, axes=(0, 0))
        out.append(float(acc))
    return np.array(out)


def heat_convolve(g: SampledField, t: float) -> SampledField:
    """``h_t * g`` with the Gaussian truncated at 8 standard deviations and renormalised.

    The Gaussian factorises, so the convolution runs axis by axis with a
    unit-mass 1-D kernel.
    """
    if not t > 0:
        raise OperatorError("heat time must be positive")
    if not np.any(g.values):
        return g.with_values(np.zeros(g.spec.shape))
    return g.with_values(heat_values(g.values, g.spec, float(t)))


# -- maximal function -----------------------------------------------------------------


def maximal_values(values: np.ndarray, spec: GridSpec, family: Optional[BallFamily] = None) -> np.ndarray:
    fam = family or BallFamily.default(spec)
    a = np.abs(values)
    out = np.zeros(spec.shape)
    if not np.any(a):
        return out
    for rc in fam.radii_cells:
        avg = ball_averages(a, spec, rc)
        np.maximum(out, credit_max(avg, fam.center_mask(rc), rc), out=out)
    return out


def maximal_function(g: SampledField, family: Optional[BallFamily] = None) -> SampledField:
    """Uncentred Hardy-Littlewood maximal function over a ball family.

    Every ball average is credited to all grid points inside that ball.
    """
    fam = family or BallFamily.default(g.spec)
    if not fam.radii_cells:
        raise OperatorError("ball family has no radii")
    return g.with_values(maximal_values(g.values, g.spec, fam))
