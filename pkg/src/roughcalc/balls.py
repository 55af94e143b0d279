"""Ball families shared by the maximal function, Morrey norms and A_p constants.

A ball is a (center, radius) pair with the center on a grid point; it contains
every grid cell whose centre lies within the radius.  Balls clipped by the
domain boundary average over the cells that remain inside the domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import fft as sfft
from scipy.ndimage import maximum_filter1d

from .grid import GridSpec


def linear_convolve(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """``out[i] = sum_k kernel[k] values[i - k]`` with ``kernel`` centred and values zero-extended.

    ``kernel`` has odd extent ``2K+1`` per axis; the output has the shape of
    ``values``.
    """
    shape = [a + b - 1 for a, b in zip(values.shape, kernel.shape)]
    fshape = [sfft.next_fast_len(s, real=True) for s in shape]
    axes = tuple(range(values.ndim))
    F = sfft.rfftn(values, fshape, axes=axes)
    F *= sfft.rfftn(kernel, fshape, axes=axes)
    full = sfft.irfftn(F, fshape, axes=axes)
    sl = tuple(slice(k // 2, k // 2 + n) for k, n in zip(kernel.shape, values.shape))
    return full[sl]


@lru_cache(maxsize=64)
def ball_offsets(dim: int, radius_cells: float) -> np.ndarray:
    """Boolean footprint of lattice offsets ``k`` with ``|k| <= radius_cells``."""
    R = int(np.floor(radius_cells + 1e-9))
    ax = np.arange(-R, R + 1)
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    r2 = sum(g * g for g in grids)
    fp = r2 <= radius_cells**2 * (1 + 1e-12) + 1e-9
    fp.setflags(write=False)
    return fp


@dataclass(frozen=True)
class BallFamily:
    """Dyadic radii ``h, 2h, ..., >= 2L`` with centres at ``stride``; radius ``h`` also at stride 1."""

    spec: GridSpec
    radii_cells: tuple
    stride: int = 1

    @classmethod
    def default(cls, spec: GridSpec, stride: Optional[int] = None, extra_levels: int = 0) -> "BallFamily":
        N = spec.points_per_axis
        if stride is None:
            stride = max(1, N // 128)
        radii = [1.0]
        while radii[-1] * spec.spacing < 2 * spec.halfwidth - 1e-12:
            radii.append(radii[-1] * 2.0)
        if extra_levels:
            # geometric sub-levels between dyadic radii (refined family)
            fine = []
            for r in radii[:-1]:
                fine.extend(r * 2.0 ** (i / (extra_levels + 1)) for i in range(extra_levels + 1))
            radii = fine + [radii[-1]]
        return cls(spec, tuple(radii), int(stride))

    @property
    def radii(self) -> tuple:
        return tuple(r * self.spec.spacing for r in self.radii_cells)

    def center_mask(self, radius_cells: float) -> np.ndarray:
        shape = self.spec.shape
        if self.stride == 1 or radius_cells == 1.0:
            return np.ones(shape, dtype=bool)
        mask = np.zeros(shape, dtype=bool)
        mask[(slice(None, None, self.stride),) * self.spec.dim] = True
        return mask

    def metadata(self) -> dict:
        return {"ball_stride": self.stride, "ball_radii_cells": list(self.radii_cells)}


def ball_sums(values: np.ndarray, radius_cells: float) -> np.ndarray:
    """Sum of ``values`` over the ball of the given radius around every grid point."""
    fp = ball_offsets(values.ndim, radius_cells).astype(float)
    out = linear_convolve(values, fp)
    return out


_count_cache: dict = {}


def ball_counts(spec: GridSpec, radius_cells: float) -> np.ndarray:
    """Number of in-domain cells in every ball (the clipped-ball denominator).

    Left unrounded: it is the same convolution applied to ones, so a constant
    field averages to exactly that constant.
    """
    key = (spec.dim, spec.points_per_axis, radius_cells)
    c = _count_cache.get(key)
    if c is None:
        c = ball_sums(np.ones(spec.shape), radius_cells)
        c.setflags(write=False)
        if len(_count_cache) > 128:
            _count_cache.clear()
        _count_cache[key] = c
    return c


def ball_averages(values: np.ndarray, spec: GridSpec, radius_cells: float) -> np.ndarray:
    """Clipped ball averages of nonnegative ``values`` (rounding residue clipped at zero)."""
    s = np.maximum(ball_sums(values, radius_cells), 0.0)
    return s / ball_counts(spec, radius_cells)


def credit_max(avg: np.ndarray, center_mask: np.ndarray, radius_cells: float) -> np.ndarray:
    """``out[x] = max over centres c with |x - c| <= r of avg[c]`` (``avg >= 0``)."""
    a = np.where(center_mask, avg, 0.0)
    dim = a.ndim
    R = int(np.floor(radius_cells + 1e-9))
    if R == 0:
        return a
    fp = ball_offsets(dim, radius_cells)
    out = np.zeros_like(a)
    # decompose the footprint into lines along the last axis
    lead = fp.shape[:-1]
    half_widths = {}
    for idx in np.ndindex(*lead):
        row = fp[idx]
        if not row.any():
            continue
        w = int(row.sum() // 2)
        half_widths.setdefault(w, []).append(tuple(i - R for i in idx))
    pad = [(R, R)] * (dim - 1) + [(0, 0)]
    for w, shifts in half_widths.items():
        line = maximum_filter1d(a, size=2 * w + 1, axis=-1, mode="constant", cval=0.0)
        padded = np.pad(line, pad)
        for s in shifts:
            sl = tuple(slice(R + d, R + d + n) for d, n in zip(s, a.shape[:-1])) + (slice(None),)
            np.maximum(out, padded[sl], out=out)
    return out
