"""Kernels on the unit sphere S^{n-1}: quadrature, zero-mean projection and norms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .grid import sphere_area

DEFAULT_NODES = 4096
POWER_CAP = 1e8


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class SphereKernel:
    """Values of a function on S^{n-1} at quadrature nodes.

    For ``dim == 2`` the nodes are the equispaced angles ``2*pi*j/M``; for
    ``dim == 3`` they form a Gauss-Legendre (in ``cos`` of the polar angle) by
    uniform-longitude product grid of shape ``lattice``.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    lattice: tuple = ()
    label: str = "custom"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("nodes", "weights", "values"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.values.shape != self.weights.shape:
            raise KernelError("values and weights disagree in length")
        if abs(self.weights.sum() - sphere_area(self.dim)) > 1e-10:
            raise KernelError("quadrature weights must sum to the sphere area")

    @property
    def size(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(np.sum(self.weights * self.values) / sphere_area(self.dim))

    def with_values(self, values, label=None, **meta) -> "SphereKernel":
        m = dict(self.meta)
        m.update(meta)
        return replace(self, values=np.asarray(values, dtype=float), label=label or self.label, meta=m)

    def scaled(self, c: float) -> "SphereKernel":
        return replace(self, values=c * self.values)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __call__(self, xi) -> np.ndarray:
        """Evaluate at unit vectors ``xi`` (shape ``(..., dim)``) by (bi)linear interpolation."""
        xi = np.asarray(xi, dtype=float)
        if self.dim == 2:
            M = self.size
            t = np.mod(np.arctan2(xi[..., 1], xi[..., 0]), 2 * np.pi) * M / (2 * np.pi)
            j = np.floor(t).astype(int)
            frac = t - j
            j %= M
            return (1 - frac) * self.values[j] + frac * self.values[(j + 1) % M]
        n_lat, n_lon = self.lattice
        vals = self.values.reshape(n_lat, n_lon)
        z_nodes = self.nodes.reshape(n_lat, n_lon, 3)[:, 0, 2]
        z = np.clip(xi[..., 2], -1.0, 1.0)
        lon = np.mod(np.arctan2(xi[..., 1], xi[..., 0]), 2 * np.pi) * n_lon / (2 * np.pi)
        k = np.floor(lon).astype(int)
        fl = lon - k
        k %= n_lon
        # z_nodes ascending; clamp outside the outermost latitude rings
        i = np.clip(np.searchsorted(z_nodes, z) - 1, 0, n_lat - 2)
        fz = np.clip((z - z_nodes[i]) / (z_nodes[i + 1] - z_nodes[i]), 0.0, 1.0)
        k1 = (k + 1) % n_lon
        lo = (1 - fl) * vals[i, k] + fl * vals[i, k1]
        hi = (1 - fl) * vals[i + 1, k] + fl * vals[i + 1, k1]
        return (1 - fz) * lo + fz * hi


def circle_quadrature(M: int = DEFAULT_NODES):
    theta = 2 * np.pi * np.arange(M) / M
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return nodes, np.full(M, 2 * np.pi / M), theta


def sphere_quadrature(n_lat: int = 48, n_lon: int = 96):
    z, wz = np.polynomial.legendre.leggauss(n_lat)
    phi = 2 * np.pi * np.arange(n_lon) / n_lon
    Z, P = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1 - Z**2)
    nodes = np.stack([s * np.cos(P), s * np.sin(P), Z], axis=-1).reshape(-1, 3)
    weights = np.repeat(wz, n_lon) * (2 * np.pi / n_lon)
    return nodes, weights


def kernel_from_function(dim: int, func, resolution=None, label="custom", **meta) -> SphereKernel:
    """Sample ``func(unit_vectors)`` on the default quadrature for ``dim``."""
    if dim == 2:
        nodes, weights, _ = circle_quadrature(resolution or DEFAULT_NODES)
        lattice = ()
    elif dim == 3:
        n_lat, n_lon = resolution or (48, 96)
        nodes, weights = sphere_quadrature(n_lat, n_lon)
        lattice = (n_lat, n_lon)
    else:
        raise KernelError("only S^1 and S^2 are supported")
    return SphereKernel(dim, nodes, weights, func(nodes), lattice, label, dict(meta))


def project_zero_mean(omega: SphereKernel) -> SphereKernel:
    """Subtract the quadrature mean so that the cancellation formula for T_Omega applies."""
    centred = omega.values - omega.mean()
    out = replace(omega, values=centred)
    # a second pass removes the rounding left by the first
    return replace(out, values=out.values - out.mean())


def sphere_lp_norm(omega: SphereKernel, rho: float) -> float:
    if rho < 1:
        raise KernelError("rho must be >= 1")
    return float(np.sum(omega.weights * np.abs(omega.values) ** rho) ** (1.0 / rho))


def sphere_weak_norm(omega: SphereKernel, p: float) -> float:
    """sup over lambda of lambda * sigma(|Omega| > lambda)^(1/p), exact for node-wise constants.

    The supremum at a level ``v`` is approached from below, so each distinct
    value is paired with the measure of ``{|Omega| >= v}``.
    """
    if p < 1:
        raise KernelError("p must be >= 1")
    a = np.abs(omega.values)
    order = np.argsort(-a, kind="stable")
    a_sorted = a[order]
    cum = np.cumsum(omega.weights[order])
    # last index of each tie group carries the full measure of {|Omega| >= v}
    last = np.r_[a_sorted[1:] != a_sorted[:-1], True]
    cand = a_sorted[last] * cum[last] ** (1.0 / p)
    return float(cand.max()) if cand.size else 0.0


def _circle_angle(kernel_nodes: np.ndarray) -> np.ndarray:
    return np.mod(np.arctan2(kernel_nodes[:, 1], kernel_nodes[:, 0]), 2 * np.pi)


def make_rough_kernel(kind: str, dim: int = 2, resolution=None, **params) -> SphereKernel:
    """Mean-zero test kernels.

    kinds
        ``harmonic``: ``cos(k theta)`` or ``sin(k theta)`` (``k``, ``phase``);
        ``sign``: +1/-1 on ``arcs`` equal arcs;
        ``power``: ``|theta - theta0|^(-a)`` minus its mean, with ``rho`` used to
        reject kernels outside ``L^rho`` (``a * rho >= 1``);
        ``zero``: identically zero.
    """
    kind = kind.lower()
    if dim == 2:
        M = resolution or DEFAULT_NODES
        nodes, weights, theta = circle_quadrature(M)
        lattice = ()
    elif dim == 3:
        n_lat, n_lon = resolution or (48, 96)
        nodes, weights = sphere_quadrature(n_lat, n_lon)
        theta = _circle_angle(nodes)
        lattice = (n_lat, n_lon)
    else:
        raise KernelError("only S^1 and S^2 are supported")

    if kind == "harmonic":
        k = int(params.get("k", 1))
        phase = params.get("phase", "cos")
        if k < 1:
            raise KernelError("harmonic order must be >= 1")
        trig = np.cos if phase == "cos" else np.sin
        if dim == 2:
            values = trig(k * theta)
        else:
            # Re/Im of (xi_1 + i xi_2)^k restricted to the sphere
            values = trig(k * theta) * np.hypot(nodes[:, 0], nodes[:, 1]) ** k
        label = f"harmonic-{phase}{k}"
    elif kind == "sign":
        arcs = int(params.get("arcs", 2))
        if arcs < 2 or arcs % 2:
            raise KernelError("sign pattern needs an even number of arcs >= 2")
        idx = np.floor(theta * arcs / (2 * np.pi) + 1e-12).astype(int) % arcs
        values = np.where(idx % 2 == 0, 1.0, -1.0)
        label = f"sign-{arcs}"
    elif kind == "power":
        if dim != 2:
            raise KernelError("power-singular kernels are generated on S^1 only")
        a = float(params["a"])
        rho = float(params.get("rho", 1.0))
        if not a > 0:
            raise KernelError("power exponent must be positive")
        if a * rho >= 1:
            raise KernelError(f"a*rho = {a * rho:g} >= 1: kernel not in L^rho")
        M = theta.size
        # singularity sits half a node off the lattice so no node lands on it
        theta0 = float(params.get("theta0", math.pi)) + math.pi / M
        d = np.abs(theta - theta0)
        d = np.minimum(d, 2 * np.pi - d)
        with np.errstate(divide="ignore"):
            values = np.minimum(d ** (-a), POWER_CAP)
        label = f"power-{a:g}"
    elif kind == "zero":
        values = np.zeros_like(theta)
        label = "zero"
    else:
        raise KernelError(f"unknown kernel kind {kind!r}")

    scale = float(params.get("scale", 1.0))
    kern = SphereKernel(dim, nodes, weights, scale * values, lattice, label, {"kind": kind, **params})
    return project_zero_mean(kern)


def kernel_from_record(record: dict, dim: int = 2) -> SphereKernel:
    rec = dict(record)
    kind = rec.pop("kind")
    rec.pop("id", None)
    resolution = rec.pop("resolution", None)
    if isinstance(resolution, list):
        resolution = tuple(resolution)
    return make_rough_kernel(kind, dim=dim, resolution=resolution, **rec)
