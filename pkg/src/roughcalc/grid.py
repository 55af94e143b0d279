"""Uniform cell-centred grids on [-L, L]^n and smooth compactly supported test fields."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class GridError(ValueError):
    """Raised when a field or grid violates its construction contract."""


@dataclass(frozen=True)
class GridSpec:
    dim: int
    halfwidth: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise GridError(f"dim must be 2 or 3, got {self.dim}")
        if not self.halfwidth > 0:
            raise GridError("halfwidth must be positive")
        if self.points_per_axis < 16 or self.points_per_axis % 2:
            raise GridError("points_per_axis must be even and >= 16")

    @property
    def spacing(self) -> float:
        return 2.0 * self.halfwidth / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    def axis(self) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        N, h = self.points_per_axis, self.spacing
        return -self.halfwidth + (np.arange(N) + 0.5) * h

    def coords(self) -> list:
        """Coordinate arrays, one per axis, each of full grid shape (ij indexing)."""
        ax = self.axis()
        return np.meshgrid(*([ax] * self.dim), indexing="ij")

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.coords()))

    def refined(self, points_per_axis: int) -> "GridSpec":
        return GridSpec(self.dim, self.halfwidth, points_per_axis)

    def nearest_index(self, point: Sequence[float]) -> tuple:
        ax = self.axis()
        return tuple(int(np.argmin(np.abs(ax - p))) for p in point)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SampledField:
    """Scalar samples on a GridSpec, with an optional gradient (one array per axis)."""

    spec: GridSpec
    values: np.ndarray
    gradient: Optional[tuple] = None
    support_radius: Optional[float] = None

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != self.spec.shape:
            raise GridError(f"values shape {vals.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("field values must be finite")
        object.__setattr__(self, "values", vals)
        if self.gradient is not None:
            grad = tuple(_frozen(g) for g in self.gradient)
            if len(grad) != self.spec.dim or any(g.shape != vals.shape for g in grad):
                raise GridError("gradient must hold one array of grid shape per axis")
            object.__setattr__(self, "gradient", grad)
        if self.support_radius is not None:
            outside = self.spec.radius() > self.support_radius
            if np.any(vals[outside] != 0.0):
                raise GridError("nonzero samples outside the declared support radius")

    def with_values(self, values: np.ndarray, gradient=None, support_radius=None) -> "SampledField":
        return SampledField(self.spec, values, gradient, support_radius)

    def scaled(self, c: float) -> "SampledField":
        grad = None if self.gradient is None else tuple(c * g for g in self.gradient)
        return SampledField(self.spec, c * self.values, grad, self.support_radius)

    def gradient_magnitude(self) -> np.ndarray:
        if self.gradient is None:
            raise GridError("field carries no gradient; call numeric_gradient first")
        return np.sqrt(sum(g * g for g in self.gradient))


def _check_guard(spec: GridSpec, center: np.ndarray, radius: float) -> None:
    limit = spec.halfwidth - 2.0 * spec.spacing
    if np.any(np.abs(center) + radius > limit):
        raise GridError(
            f"bump B({center.tolist()}, {radius}) leaves the guard band [-{limit:.6g}, {limit:.6g}]^n"
        )


def _bump_profile(spec: GridSpec, center: np.ndarray, radius: float, amplitude: float):
    X = spec.coords()
    d = [x - c for x, c in zip(X, center)]
    s2 = sum(di * di for di in d) / radius**2
    inside = s2 < 1.0
    one_minus = np.where(inside, 1.0 - s2, 1.0)
    with np.errstate(over="ignore", under="ignore"):
        prof = np.where(inside, np.exp(-1.0 / one_minus), 0.0)
        # d/dx exp(-1/(1-s^2)) = -2 (x-c) / (r^2 (1-s^2)^2) * exp(...)
        factor = np.where(inside, -2.0 * prof / (radius**2 * one_minus**2), 0.0)
    values = amplitude * prof
    grad = tuple(amplitude * factor * di for di in d)
    return values, grad


def make_bump(spec: GridSpec, center: Sequence[float], radius: float, amplitude: float) -> SampledField:
    """Mollifier ``amplitude * exp(-1/(1 - |x-c|^2/r^2))`` with its analytic gradient."""
    center = np.asarray(center, dtype=float)
    if center.shape != (spec.dim,):
        raise GridError("center dimension does not match the grid")
    if not radius > 0:
        raise GridError("radius must be positive")
    _check_guard(spec, center, radius)
    values, grad = _bump_profile(spec, center, radius, amplitude)
    return SampledField(spec, values, grad, float(np.linalg.norm(center) + radius))


def make_bump_sum(spec: GridSpec, bumps: Sequence) -> SampledField:
    """Pointwise sum of bumps given as ``(center, radius, amplitude)`` triples or dicts."""
    values = np.zeros(spec.shape)
    grad = [np.zeros(spec.shape) for _ in range(spec.dim)]
    support = 0.0
    for b in bumps:
        if isinstance(b, dict):
            center, radius, amplitude = b["center"], b["radius"], b["amplitude"]
        else:
            center, radius, amplitude = b
        one = make_bump(spec, center, radius, amplitude)
        values += one.values
        for g, og in zip(grad, one.gradient):
            g += og
        support = max(support, one.support_radius)
    if not bumps:
        return SampledField(spec, values, tuple(grad), None)
    return SampledField(spec, values, tuple(grad), support)


def numeric_gradient(f: SampledField) -> SampledField:
    """Central differences in the interior, one-sided first order at the boundary."""
    h = f.spec.spacing
    grads = np.gradient(f.values, h, edge_order=1)
    if f.spec.dim == 1:  # pragma: no cover - dims are 2 or 3
        grads = [grads]
    return SampledField(f.spec, f.values, tuple(grads), f.support_radius)


def field_from_spec(entry: dict, points_per_axis: Optional[int] = None) -> SampledField:
    """Build a bump-sum field from a corpus ``field`` record."""
    spec = GridSpec(
        int(entry["dim"]),
        float(entry["halfwidth"]),
        int(points_per_axis or entry["points_per_axis"]),
    )
    return make_bump_sum(spec, entry.get("bumps", []))


@dataclass(frozen=True)
class InequalityParams:
    """Exponents (rho, alpha, beta, p) of the pointwise and Sobolev estimates; q is derived."""

    rho: float
    alpha: float
    beta: float
    p: float
    dim: int = 2

    def __post_init__(self):
        n, rho, a, b, p = self.dim, self.rho, self.alpha, self.beta, self.p
        if not 1.0 < rho < n:
            raise GridError(f"rho must lie in (1, {n}), got {rho}")
        lo = self.alpha_threshold
        if not (1.0 < lo <= a < b < n):
            raise GridError(f"need 1 < {lo:.6g} <= alpha={a} < beta={b} < {n}")
        if not p > a:
            raise GridError(f"need p > alpha, got p={p}, alpha={a}")
        if abs(self.q * (1.0 / a - 1.0 / b) - p / a) > 1e-12 * max(1.0, p / a):
            raise GridError("inconsistent q")  # pragma: no cover

    @property
    def alpha_threshold(self) -> float:
        n, rho = self.dim, self.rho
        return n * rho / (n * rho + rho - n)

    @property
    def q(self) -> float:
        return self.p / (1.0 - self.alpha / self.beta)

    @property
    def morrey_q(self) -> float:
        return self.alpha * self.dim / self.beta

    def as_dict(self) -> dict:
        return {"rho": self.rho, "alpha": self.alpha, "beta": self.beta, "p": self.p, "dim": self.dim}

    def key(self) -> str:
        return f"rho={self.rho:g},alpha={self.alpha:g},beta={self.beta:g},p={self.p:g}"


# -- flat binary field I/O -------------------------------------------------


def save_field(values: np.ndarray, spec: GridSpec, path) -> None:
    """Write ``path`` (row-major float64) and ``path.json`` header ``{dim, N, L}``."""
    path = Path(path)
    np.ascontiguousarray(values, dtype="<f8").tofile(path)
    header = {"dim": spec.dim, "N": spec.points_per_axis, "L": spec.halfwidth}
    path.with_name(path.name + ".json").write_text(json.dumps(header, sort_keys=True))


def load_field(path) -> tuple:
    path = Path(path)
    header = json.loads(path.with_name(path.name + ".json").read_text())
    spec = GridSpec(int(header["dim"]), float(header["L"]), int(header["N"]))
    values = np.fromfile(path, dtype="<f8").reshape(spec.shape)
    return values, spec


def ball_volume(dim: int, r: float) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * r**dim


def sphere_area(dim: int) -> float:
    """Surface measure of S^{dim-1}."""
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2)
