"""Closed-form weights and their A_p / B_p characteristic constants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .balls import BallFamily, ball_averages
from .grid import GridSpec

AP_SCREEN_GROWTH = 1.25


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class Weight:
    """Positive weight given by a named closed form.

    ``domain='rn'``: ``power`` is ``scale * |x|^exponent``, ``plateau`` is
    ``scale * max(|x|, core)^exponent``, ``const`` is ``scale``.
    ``domain='halfline'``: ``power`` is ``scale * t^exponent`` (exponent > -1),
    ``const`` is ``scale``.
    """

    domain: str = "rn"
    form: str = "const"
    exponent: float = 0.0
    scale: float = 1.0
    core: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.domain not in ("rn", "halfline"):
            raise WeightError(f"unknown weight domain {self.domain!r}")
        if self.form not in ("power", "const", "plateau"):
            raise WeightError(f"unknown weight form {self.form!r}")
        if not self.scale > 0:
            raise WeightError("weight scale must be positive")
        if self.domain == "halfline":
            if self.form == "plateau":
                raise WeightError("plateau weights live on R^n only")
            if self.gamma <= -1:
                raise WeightError(f"halfline power exponent {self.gamma} <= -1 is not locally integrable")
        if self.form == "plateau" and not self.core > 0:
            raise WeightError("plateau weights need a positive core radius")
        if not self.label:
            object.__setattr__(self, "label", self._auto_label())

    def _auto_label(self) -> str:
        if self.form == "const":
            return f"{self.domain}-const"
        if self.form == "plateau":
            return f"{self.domain}-plateau{self.exponent:g}@{self.core:g}"
        return f"{self.domain}-power{self.exponent:g}"

    @property
    def gamma(self) -> float:
        return 0.0 if self.form == "const" else float(self.exponent)

    def is_constant(self) -> bool:
        return self.form == "const" or self.exponent == 0.0

    # -- R^n ----------------------------------------------------------------

    def samples(self, spec: GridSpec, normalized: bool = False) -> np.ndarray:
        """Values at the grid points; ``normalized`` divides out ``scale``."""
        if self.domain != "rn":
            raise WeightError("halfline weights have no grid samples")
        c = 1.0 if normalized else self.scale
        if self.is_constant():
            return np.full(spec.shape, c)
        r = spec.radius()
        if self.form == "plateau":
            r = np.maximum(r, self.core)
        w = c * r**self.exponent
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise WeightError("weight is not strictly positive and finite on the grid")
        return w

    # -- R^+ ----------------------------------------------------------------

    def _half(self):
        if self.domain != "halfline":
            raise WeightError("this operation needs a halfline weight")

    def density(self, t):
        self._half()
        return self.scale * np.asarray(t, dtype=float) ** self.gamma

    def antiderivative(self, t):
        """``int_0^t w``."""
        self._half()
        g = self.gamma
        return self.scale * np.asarray(t, dtype=float) ** (g + 1) / (g + 1)

    def tail_integral(self, r, p: float):
        """``int_r^inf w(t) t^(-p) dt``."""
        self._half()
        g = self.gamma
        if g >= p - 1:
            raise WeightError(f"tail integral diverges: exponent {g} >= p - 1 = {p - 1}")
        return self.scale * np.asarray(r, dtype=float) ** (g - p + 1) / (p - 1 - g)

    def uniform_pieces(self, mu: float, count: int) -> np.ndarray:
        """``int_{i mu}^{(i+1) mu} w`` for ``i = 0..count-1`` without cancellation."""
        self._half()
        if self.is_constant():
            return np.full(count, self.scale * mu)
        e = self.gamma + 1.0
        i = np.arange(count, dtype=float)
        base = self.scale * mu**e / e
        out = np.empty(count)
        out[0] = base
        if count > 1:
            ii = i[1:]
            # (i+1)^e - i^e = i^e * expm1(e * log1p(1/i))
            out[1:] = base * ii**e * np.expm1(e * np.log1p(1.0 / ii))
        return out

    def as_dict(self) -> dict:
        d = {"domain": self.domain, "form": self.form, "scale": self.scale}
        if self.form != "const":
            d["exponent"] = self.exponent
        if self.form == "plateau":
            d["core"] = self.core
        return d


def weight_from_record(record: dict) -> Weight:
    rec = dict(record)
    return Weight(
        domain=rec.get("domain", "rn"),
        form=rec.get("form", "const"),
        exponent=float(rec.get("exponent", 0.0)),
        scale=float(rec.get("scale", 1.0)),
        core=float(rec.get("core", 0.0)),
        label=rec.get("id", ""),
    )


def ap_constant(w: Weight, P: float, spec: GridSpec, family: Optional[BallFamily] = None) -> float:
    """sup over the ball family of ``avg(w) * avg(w^(-1/(P-1)))^(P-1)``.

    The product is invariant under ``w -> c w``, so it is evaluated on
    ``w / scale``; constant weights then give exactly 1.
    """
    if not P > 1:
        raise WeightError("A_p needs p > 1")
    fam = family or BallFamily.default(spec)
    ws = w.samples(spec, normalized=True)
    if w.is_constant():
        return 1.0
    dual = ws ** (-1.0 / (P - 1.0))
    best = 0.0
    for rc in fam.radii_cells:
        mask = fam.center_mask(rc)
        prod = ball_averages(ws, spec, rc) * ball_averages(dual, spec, rc) ** (P - 1.0)
        best = max(best, float(prod[mask].max()))
    return best


@dataclass(frozen=True)
class APScreen:
    constant: float
    coarse_constant: float
    growth: float
    admissible: bool

    def as_dict(self) -> dict:
        return {
            "ap_constant": self.constant,
            "ap_constant_coarse": self.coarse_constant,
            "ap_growth": self.growth,
            "ap_admissible": self.admissible,
        }


def ap_refinement_screen(w: Weight, P: float, spec: GridSpec, threshold: float = AP_SCREEN_GROWTH) -> APScreen:
    """Compare ``[w]_{A_P}`` at ``N`` and ``N/2``; growth above ``threshold`` marks a divergent constant."""
    fine = ap_constant(w, P, spec)
    coarse_N = max(16, spec.points_per_axis // 2)
    coarse_N += coarse_N % 2
    coarse = ap_constant(w, P, spec.refined(coarse_N))
    growth = fine / coarse
    return APScreen(fine, coarse, growth, bool(np.isfinite(fine) and growth <= threshold))


def default_r_grid() -> np.ndarray:
    return np.geomspace(1e-3, 1e3, 241)


def bp_constant(w: Weight, p: float, r_grid: Optional[Sequence[float]] = None) -> float:
    """sup over ``r_grid`` of ``r^p * int_r^inf w t^-p dt / int_0^r w dt``."""
    if p < 1:
        raise WeightError("B_p needs p >= 1")
    r = np.asarray(default_r_grid() if r_grid is None else r_grid, dtype=float)
    if r.size == 0 or np.any(r <= 0):
        raise WeightError("r_grid must hold positive radii")
    if w.is_constant():
        # r^p * r^(1-p)/(p-1) / r, evaluated without the cancelling powers
        if p <= 1:
            raise WeightError("tail integral diverges for p = 1")
        return 1.0 / (p - 1.0)
    g = w.gamma
    if g >= p - 1:
        raise WeightError(f"tail integral diverges: exponent {g} >= p - 1 = {p - 1}")
    vals = r**p * w.tail_integral(r, p) / w.antiderivative(r)
    return float(np.max(vals))
