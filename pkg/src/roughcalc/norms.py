"""Function-space norms of sampled fields.

Sums that several norms must agree on exactly (Lebesgue, weighted Lebesgue
with unit weight, classical Lorentz with unit weight, the rearrangement mass)
use ``math.fsum``, which is correctly rounded and hence order independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .balls import BallFamily, ball_counts, ball_sums
from .grid import SampledField
from .operators import heat_time_net, heat_values
from .weights import Weight, WeightError

ArrayLike = Union[SampledField, np.ndarray]


class NormError(ValueError):
    pass


def _abs_values(g: SampledField) -> np.ndarray:
    return np.abs(g.values)


def _check_p(p: float) -> None:
    if not p >= 1:
        raise NormError(f"exponent must be >= 1, got {p}")


def lp_norm(g: SampledField, p: float) -> float:
    """``(sum |g|^p h^n)^(1/p)``."""
    _check_p(p)
    s = math.fsum((_abs_values(g) ** p).ravel())
    return (s * g.spec.cell_volume) ** (1.0 / p)


def weighted_lp_norm(g: SampledField, w: Union[Weight, np.ndarray], p: float) -> float:
    """``(sum |g|^p w h^n)^(1/p)``; ``w`` is a grid Weight or an array of samples."""
    _check_p(p)
    ws = w.samples(g.spec) if isinstance(w, Weight) else np.asarray(w, dtype=float)
    if ws.shape != g.spec.shape or np.any(ws <= 0):
        raise NormError("weight samples must be positive on the grid")
    s = math.fsum((_abs_values(g) ** p * ws).ravel())
    return (s * g.spec.cell_volume) ** (1.0 / p)


# -- Morrey ------------------------------------------------------------------


@dataclass(frozen=True)
class MorreyResult:
    value: float
    center: tuple
    radius: float


def morrey_detail(g: SampledField, p: float, q: float, family: Optional[BallFamily] = None) -> MorreyResult:
    """sup over balls ``B`` of ``(|B|^(p/q - 1) int_B |g|^p)^(1/p)``.

    ``|B|`` is the measure of the discrete (domain-clipped) ball, so each term
    is ``|B|^(1/q)`` times the ``L^p`` ball mean and Jensen holds ball by ball.
    """
    _check_p(p)
    if q < p:
        raise NormError("Morrey norm needs p <= q")
    spec = g.spec
    fam = family or BallFamily.default(spec)
    a = _abs_values(g) ** p
    best, where, rad = 0.0, (0,) * spec.dim, 0.0
    if not np.any(a):
        return MorreyResult(0.0, where, rad)
    vol = spec.cell_volume
    for rc in fam.radii_cells:
        mu = ball_counts(spec, rc) * vol
        s = np.maximum(ball_sums(a, rc), 0.0) * vol
        term = np.where(fam.center_mask(rc), mu ** (p / q - 1.0) * s, 0.0)
        k = int(np.argmax(term))
        if term.flat[k] > best:
            best, where, rad = float(term.flat[k]), np.unravel_index(k, spec.shape), rc * spec.spacing
    return MorreyResult(best ** (1.0 / p), tuple(int(i) for i in where), rad)


def morrey_norm(g: SampledField, p: float, q: float, family: Optional[BallFamily] = None) -> float:
    return morrey_detail(g, p, q, family).value


# -- thermic Besov -------------------------------------------------------------


def besov_thermic_norm(g: SampledField, beta: float, t_grid: Optional[Sequence[float]] = None) -> float:
    """sup over ``t_grid`` of ``t^(beta/2) max_x |h_t * g|``."""
    if not beta > 0:
        raise NormError("beta must be positive")
    ts = heat_time_net(g.spec) if t_grid is None else np.asarray(list(t_grid), dtype=float)
    if not np.any(g.values):
        return 0.0
    best = 0.0
    for t in ts:
        v = float(np.max(np.abs(heat_values(g.values, g.spec, float(t)))))
        best = max(best, t ** (beta / 2.0) * v)
    return best


# -- distribution-based norms ----------------------------------------------------


def weak_lorentz_norm(g: SampledField, p: float) -> float:
    """sup over levels ``lam`` of ``lam * |{|g| > lam}|^(1/p)``.

    The supremum at a sample level ``v`` is approached from below, where the
    distribution function equals the measure of ``{|g| >= v}``.
    """
    _check_p(p)
    a = np.sort(_abs_values(g).ravel())[::-1]
    if a.size == 0 or a[0] == 0:
        return 0.0
    count = np.arange(1, a.size + 1)
    last = np.r_[a[1:] != a[:-1], True] & (a > 0)
    cand = a[last] * (count[last] * g.spec.cell_volume) ** (1.0 / p)
    return float(cand.max())


@dataclass(frozen=True)
class RearrangedProfile:
    """Piecewise-constant ``f*``: ``levels[i]`` on ``[breakpoints[i-1], breakpoints[i])``, ``breakpoints[-1] = 0``.

    Every sample is its own piece of measure ``cell`` (no merging of equal
    levels), so maps applied to the levels commute with rearrangement exactly.
    """

    breakpoints: np.ndarray
    levels: np.ndarray
    cell: float

    def __post_init__(self):
        for name in ("breakpoints", "levels"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.levels.size and np.any(np.diff(self.levels) > 0):
            raise NormError("levels must be nonincreasing")

    def mass(self, p: float = 1.0) -> float:
        return math.fsum((self.levels**p).ravel()) * self.cell

    def __call__(self, t) -> np.ndarray:
        """``f*(t)`` (right-continuous, zero past the last breakpoint)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        lv = np.r_[self.levels, 0.0]
        return lv[np.minimum(idx, self.levels.size)]


def rearrangement(g: SampledField) -> RearrangedProfile:
    a = np.sort(_abs_values(g).ravel())[::-1]
    cell = g.spec.cell_volume
    breaks = np.arange(1, a.size + 1) * cell
    return RearrangedProfile(breaks, a, cell)


def classical_lorentz_norm(g: Union[SampledField, RearrangedProfile], p: float, w: Weight) -> float:
    """``(int_0^inf f*(t)^p w(t) dt)^(1/p)`` with exact per-piece integrals of ``w``."""
    _check_p(p)
    if w.domain != "halfline":
        raise WeightError("classical Lorentz norms need a halfline weight")
    prof = g if isinstance(g, RearrangedProfile) else rearrangement(g)
    lv = prof.levels ** p
    if w.is_constant():
        # same correctly rounded sum as lp_norm
        return (math.fsum(lv.ravel()) * (prof.cell * w.scale)) ** (1.0 / p)
    pieces = w.uniform_pieces(prof.cell, lv.size)
    return math.fsum((lv * pieces).ravel()) ** (1.0 / p)


# -- Young functions and Orlicz norms ----------------------------------------------

YOUNG_NET = np.geomspace(1e-6, 1e6, 1000)


class YoungError(ValueError):
    pass


@dataclass(frozen=True)
class YoungFunction:
    """``A(t) = B(t^sigma)`` with ``B(u) = u^q`` (``power``) or ``u^q log(e + u)`` (``powerlog``).

    ``sigma`` records rescalings ``A_sigma(t) = A(t^sigma)``.  The generator
    is ``a = A'``.
    """

    kind: str = "power"
    q: float = 2.0
    sigma: float = 1.0
    nabla2_constant: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("power", "powerlog"):
            raise YoungError(f"unknown Young kind {self.kind!r}")
        if not (self.q > 0 and self.sigma > 0):
            raise YoungError("q and sigma must be positive")
        if not self.is_convex():
            raise YoungError(f"{self.label} is not convex on the test net")
        if self.nabla2_constant is not None and not nabla2_holds(self, self.nabla2_constant):
            raise YoungError(f"nabla_2 fails for {self.label} with C = {self.nabla2_constant}")

    @property
    def label(self) -> str:
        base = f"t^{self.q:g}" if self.kind == "power" else f"t^{self.q:g}log(e+t)"
        return base if self.sigma == 1 else f"{base}∘t^{self.sigma:g}"

    @property
    def effective_power(self) -> float:
        return self.q * self.sigma

    def __call__(self, t):
        u = np.asarray(t, dtype=float) ** self.sigma
        out = u**self.q
        if self.kind == "powerlog":
            out = out * np.log(math.e + u)
        return out

    def generator(self, s):
        """``a(s) = A'(s)``."""
        s = np.asarray(s, dtype=float)
        u = s**self.sigma
        du = self.sigma * s ** (self.sigma - 1.0)
        if self.kind == "power":
            return self.q * u ** (self.q - 1.0) * du
        return (self.q * u ** (self.q - 1.0) * np.log(math.e + u) + u**self.q / (math.e + u)) * du

    def is_convex(self, net: np.ndarray = YOUNG_NET) -> bool:
        if self.kind == "power":
            return self.effective_power >= 1.0
        # nondecreasing generator on the net is convexity of A
        a = self.generator(net)
        return bool(np.all(np.diff(a) >= -1e-12 * np.abs(a[1:])))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "sigma": self.sigma}


def rescaled_young(A: YoungFunction, sigma: float) -> YoungFunction:
    """``A_sigma(t) = A(t^sigma)``; raises YoungError when the rescaling is not convex."""
    if not sigma > 0:
        raise YoungError("sigma must be positive")
    return YoungFunction(A.kind, A.q, A.sigma * sigma)


def young_from_record(record: dict) -> YoungFunction:
    return YoungFunction(record.get("kind", "power"), float(record["q"]), float(record.get("sigma", 1.0)))


def nabla2_holds(A: YoungFunction, C: float, net: np.ndarray = YOUNG_NET) -> bool:
    """``A(r) <= A(C r) / (2 C)`` at every net point."""
    if not C > 1:
        return False
    return bool(np.all(A(net) * (2.0 * C) <= A(C * net) * (1.0 + 1e-13)))


def nabla2_search(A: YoungFunction, c_max: float = 1e6, net: np.ndarray = YOUNG_NET, rtol: float = 1e-12):
    """Smallest ``C`` on ``(1, c_max]`` passing the net check, or None.

    For convex ``A`` with ``A(0) = 0``, ``A(Cr)/C`` grows with ``C``, so the
    passing set is an interval ``[C_min, inf)`` and bisection applies.
    """
    if not nabla2_holds(A, c_max, net):
        return None
    lo, hi = 1.0, float(c_max)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if nabla2_holds(A, mid, net):
            hi = mid
        else:
            lo = mid
    return hi


def nabla2_closed_form(A: YoungFunction) -> Optional[float]:
    """Power case: ``C^P <= ... `` reduces to ``C^(P-1) >= 2``."""
    if A.kind != "power":
        raise YoungError("closed form only for power Young functions")
    P = A.effective_power
    return None if P <= 1 else 2.0 ** (1.0 / (P - 1.0))


def _modular(a: np.ndarray, A: YoungFunction, lam: float, vol: float) -> float:
    return float(np.sum(A(a / lam))) * vol


def luxemburg_norm(g: SampledField, A: YoungFunction, rtol: float = 1e-12) -> float:
    """``inf{lam > 0 : sum A(|g|/lam) h^n <= 1}`` by bisection in ``log lam``.

    Returns the upper end of the final bracket, so the modular there is at
    most 1.
    """
    a = _abs_values(g)
    a = a[a > 0]
    if a.size == 0:
        return 0.0
    vol = g.spec.cell_volume
    hi = float(a.max())
    while _modular(a, A, hi, vol) > 1.0:
        hi *= 2.0
    lo = hi
    while _modular(a, A, lo, vol) <= 1.0:
        lo *= 0.5
    # invariant: modular(lo) > 1 >= modular(hi)
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if _modular(a, A, mid, vol) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def luxemburg_modular(g: SampledField, A: YoungFunction, lam: float) -> float:
    return _modular(_abs_values(g), A, lam, g.spec.cell_volume)
