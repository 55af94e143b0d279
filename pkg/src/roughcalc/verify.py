"""Inequality harness: left- and right-hand sides of every estimate on corpus entries.

Each check returns an InequalityReport whose ``ratio`` is the empirical
constant (pointwise checks: the sup over grid points of LHS/RHS).  The suite
runner evaluates checks per (entry, grid level), caching the expensive
operator outputs in a Workspace, and judges refinement stability from the
ratio drift between consecutive levels.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .balls import BallFamily, ball_counts, ball_offsets, ball_sums
from .grid import GridSpec, InequalityParams, SampledField, field_from_spec, numeric_gradient
from .norms import (
    YoungError,
    YoungFunction,
    classical_lorentz_norm,
    lp_norm,
    luxemburg_norm,
    morrey_detail,
    morrey_norm,
    nabla2_search,
    rescaled_young,
    weighted_lp_norm,
)
from .operators import (
    heat_at_points,
    heat_time_net,
    heat_values,
    log_net,
    maximal_truncated,
    maximal_values,
    riesz_potential,
    singular_integral,
    truncation_net,
)
from .sphere import SphereKernel, kernel_from_record, make_rough_kernel, sphere_lp_norm
from .weights import Weight, WeightError, ap_refinement_screen, bp_constant, weight_from_record

CHECK_IDS = (
    "check_pointwise_theorem1",
    "check_intermediate_riesz",
    "check_hedberg_split",
    "check_sobolev_theorem2",
    "check_weighted_corollary",
    "check_orlicz_theorem",
    "check_lorentz_theorem",
    "check_poincare_sobolev",
    "check_besov_morrey_equivalence",
    "check_maximal_domination",
)

PV_TOL = 1e-8  # times ||f||_{L^2}
DRIFT_BOUNDS = (0.5, 2.0)
KERNEL_FLAG = 0.05
HEDBERG_POINTS = 5
OK, SKIP, REJECTED, FALSIFIED, ERROR = "ok", "skip", "rejected", "falsified", "error"


@dataclass
class InequalityReport:
    check_id: str
    entry_id: str
    params: dict
    grid: tuple
    lhs: float = 0.0
    rhs: float = 0.0
    ratio: float = 0.0
    kernel_id: Optional[str] = None
    weight_id: Optional[str] = None
    sup_point: Optional[list] = None
    runtime_ms: float = 0.0
    net_metadata: dict = field(default_factory=dict)
    status: str = OK
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return int(self.grid[1])

    def params_hash(self) -> str:
        key = {"params": self.params, "kernel": self.kernel_id, "weight": self.weight_id}
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["params_hash"] = self.params_hash()
        return d

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        d = dict(d)
        d.pop("params_hash", None)
        d["grid"] = tuple(d["grid"])
        return cls(**d)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def safe_ratio(lhs: float, rhs: float) -> float:
    """``lhs/rhs`` with ``0/0 = 0`` and ``x/0 = inf``."""
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


# -- cached per-(field, kernel) quantities --------------------------------------------


class Workspace:
    """Lazily computed operator outputs for one field ``f`` and kernel ``Omega``."""

    def __init__(
        self,
        f: SampledField,
        omega: Optional[SphereKernel] = None,
        entry_id: str = "adhoc",
        kernel_id: Optional[str] = None,
        kernel_record: Optional[dict] = None,
        seed: int = 0,
    ):
        self.f = f if f.gradient is not None else numeric_gradient(f)
        self.spec = f.spec
        self.omega = omega
        self.entry_id = entry_id
        self.kernel_id = kernel_id or (omega.label if omega is not None else None)
        self.kernel_record = kernel_record
        self.seed = seed
        self.family = BallFamily.default(self.spec)
        self._cache: Dict[tuple, object] = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def grid(self) -> tuple:
        s = self.spec
        return (s.dim, s.points_per_axis, s.halfwidth)

    def grad(self) -> SampledField:
        return self._get(("grad",), lambda: self.f.with_values(self.f.gradient_magnitude()))

    def grad_pow(self, alpha: float) -> SampledField:
        return self._get(("gpow", alpha), lambda: self.f.with_values(self.grad().values ** alpha))

    def T(self) -> np.ndarray:
        return self._get(("T",), lambda: singular_integral(self.omega, self.f).values)

    def tstar(self) -> np.ndarray:
        return self._get(("T*",), lambda: maximal_truncated(self.omega, self.f, truncation_net(self.spec)).values)

    def T_field(self) -> SampledField:
        return self.f.with_values(self.T())

    def omega_norm(self, rho: float) -> float:
        return self._get(("Onorm", rho), lambda: sphere_lp_norm(self.omega, rho))

    def kernel_drift(self, rho: float) -> Optional[float]:
        """Relative change of ``||Omega||_rho`` between half and full sphere resolution."""
        def compute():
            rec = self.kernel_record
            if rec is None or self.omega.dim != 2 or self.omega.is_zero():
                return None
            half = kernel_from_record({**rec, "resolution": self.omega.size // 2}, 2)
            full = self.omega_norm(rho)
            coarse = sphere_lp_norm(half, rho)
            return abs(full - coarse) / full if full > 0 else 0.0

        return self._get(("Kdrift", rho), compute)

    def maximal_grad(self, alpha: float) -> np.ndarray:
        return self._get(("Mg", alpha), lambda: maximal_values(self.grad_pow(alpha).values, self.spec, self.family))

    def riesz_grad(self, alpha: float) -> np.ndarray:
        return self._get(("Ig", alpha), lambda: np.maximum(riesz_potential(self.grad_pow(alpha), alpha).values, 0.0))

    def morrey_grad(self, alpha: float, beta: float) -> float:
        n = self.spec.dim
        return self._get(("K", alpha, beta), lambda: morrey_norm(self.grad(), alpha, alpha * n / beta, self.family))

    def heat_sweep(self):
        """``(times, max_x |h_t * f|, sup_t |h_t * f|)`` over the shared heat-time net."""
        def compute():
            ts = heat_time_net(self.spec)
            maxima = np.zeros(ts.size)
            sup = np.zeros(self.spec.shape)
            for i, t in enumerate(ts):
                H = np.abs(heat_values(self.f.values, self.spec, float(t)))
                maxima[i] = float(np.max(H))
                np.maximum(sup, H, out=sup)
            return ts, maxima, sup

        return self._get(("heat",), compute)

    def f_maximal(self) -> np.ndarray:
        return self._get(("Mf",), lambda: maximal_values(self.f.values, self.spec, self.family))

    def pv_tol(self) -> float:
        return PV_TOL * lp_norm(self.f, 2)

    def net_metadata(self, *which) -> dict:
        s = self.spec
        meta = {"ball_stride": self.family.stride, "ball_levels": len(self.family.radii_cells)}
        if "trunc" in which:
            net = truncation_net(s)
            meta["truncation_net"] = {"lo": float(net[0]), "hi": float(net[-1]), "count": int(net.size), "per_decade": 40}
        if "heat" in which:
            net = heat_time_net(s)
            meta["heat_net"] = {"lo": float(net[0]), "hi": float(net[-1]), "count": int(net.size), "per_decade": 40}
        if self.omega is not None and "kernel" in which:
            meta["sphere_nodes"] = int(self.omega.size)
        return meta


def _kernel_rejection(ws: Workspace, rho: float) -> Optional[str]:
    om = ws.omega
    if om is None:
        return "check needs a kernel"
    if om.meta.get("kind") == "power":
        a = float(om.meta["a"])
        if a * rho >= 1:
            return f"power kernel a={a:g} is not in L^{rho:g} (a*rho >= 1)"
    return None


def _kernel_extra(ws: Workspace, rho: float) -> dict:
    d = ws.kernel_drift(rho)
    if d is None:
        return {"omega_norm": ws.omega_norm(rho)}
    return {"omega_norm": ws.omega_norm(rho), "kernel_lp_drift": d, "kernel_flagged": bool(d > KERNEL_FLAG)}


def _report(ws: Workspace, check_id: str, params: dict, **kw) -> InequalityReport:
    return InequalityReport(check_id=check_id, entry_id=ws.entry_id, params=params, grid=ws.grid, **kw)


def _pointwise(ws: Workspace, rep: InequalityReport, lhs: np.ndarray, rhs: np.ndarray) -> InequalityReport:
    """Fill ``rep`` with the sup of ``lhs/rhs``; zero-RHS points with large LHS falsify."""
    tol = ws.pv_tol()
    pos = rhs > 0
    bad = (~pos) & (lhs > tol)
    q = np.zeros_like(lhs)
    q[pos] = lhs[pos] / rhs[pos]
    k = int(np.argmax(q))
    idx = np.unravel_index(k, q.shape)
    rep.ratio = float(q.flat[k])
    rep.lhs = float(lhs.flat[k])
    rep.rhs = float(rhs.flat[k])
    rep.sup_point = [int(i) for i in idx]
    rep.extra["skipped_zero_rhs"] = int(np.count_nonzero(~pos & ~bad))
    if np.any(bad):
        rep.status = FALSIFIED
        rep.extra["falsifying_points"] = int(np.count_nonzero(bad))
        rep.message = "RHS vanishes where |LHS| exceeds the p.v. tolerance"
    return rep


def _P(params) -> InequalityParams:
    if isinstance(params, InequalityParams):
        return params
    return InequalityParams(params["rho"], params["alpha"], params["beta"], params["p"], params.get("dim", 2))


def _pdict(P: InequalityParams) -> dict:
    return {"rho": P.rho, "alpha": P.alpha, "beta": P.beta, "p": P.p, "q": P.q}


# -- the checks -----------------------------------------------------------------------


def _theorem1(ws: Workspace, params) -> InequalityReport:
    P = _P(params)
    rep = _report(ws, "check_pointwise_theorem1", _pdict(P), kernel_id=ws.kernel_id,
                  net_metadata=ws.net_metadata("kernel"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    a, b = P.alpha, P.beta
    K = ws.morrey_grad(a, b)
    rhs = ws.omega_norm(P.rho) * ws.maximal_grad(a) ** (1 / a - 1 / b) * K ** (a / b)
    rep.extra.update(_kernel_extra(ws, P.rho))
    rep.extra["morrey_grad"] = K
    return _pointwise(ws, rep, np.abs(ws.T()), rhs)


def _intermediate(ws: Workspace, params) -> InequalityReport:
    P = _P(params)
    rep = _report(ws, "check_intermediate_riesz", _pdict(P), kernel_id=ws.kernel_id,
                  net_metadata=ws.net_metadata("kernel", "trunc"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    a = P.alpha
    rhs = ws.omega_norm(P.rho) * ws.riesz_grad(a) ** (1 / a)
    rep.extra.update(_kernel_extra(ws, P.rho))
    T = np.abs(ws.T())
    _pointwise(ws, rep, T, rhs)
    if rep.status == OK:
        ts = ws.tstar()
        star = _report(ws, rep.check_id, rep.params)
        _pointwise(ws, star, ts, rhs)
        rep.extra["tstar_ratio"] = star.ratio
        rep.extra["tstar_sup_point"] = star.sup_point
        # T* is a sup over truncations; its deficit below |T f| is the p.v. truncation error
        scale = float(T.max()) if T.max() > 0 else 1.0
        rep.extra["tstar_deficit"] = float(max(0.0, np.max(T - ts)) / scale)
        if star.status != OK:
            rep.status, rep.message = star.status, "T* variant: " + star.message
    return rep


def subordination_constant(n: int, alpha: float) -> float:
    """``I_alpha g = c int_0^inf t^(alpha/2 - 1) h_t * g dt`` for the unit-normalised Riesz kernel."""
    return math.pi ** (n / 2) * 2.0**alpha / math.gamma((n - alpha) / 2)


def _time_integral(ws: Workspace, g: np.ndarray, point, t_lo: float, t_hi: float, alpha: float) -> float:
    """``int_{t_lo}^{t_hi} t^(alpha/2 - 1) (h_t * g)(x) dt`` by Gauss-Legendre panels in ``log t``."""
    if t_hi <= t_lo:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(8)
    panels = max(1, int(math.ceil(4 * math.log10(t_hi / t_lo))))
    edges = np.geomspace(t_lo, t_hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        la, lb = math.log(a), math.log(b)
        ts = np.exp(0.5 * (lb - la) * x + 0.5 * (lb + la))
        H = np.array([heat_at_points(g, ws.spec, float(t), [point])[0] for t in ts])
        total += 0.5 * (lb - la) * float(np.sum(w * ts ** (alpha / 2) * H))
    return total


def _hedberg(ws: Workspace, params) -> InequalityReport:
    P = _P(params)
    a, b, n = P.alpha, P.beta, ws.spec.dim
    rep = _report(ws, "check_hedberg_split", {"alpha": a, "beta": b}, net_metadata=ws.net_metadata())
    g = ws.grad_pow(a).values
    K = ws.morrey_grad(a, b)
    Mg = ws.maximal_grad(a)
    lhs = ws.riesz_grad(a)
    rhs = Mg ** (1 - a / b) * (K**a) ** (a / b)
    _pointwise(ws, rep, lhs, rhs)
    if not np.any(g):
        return rep
    # the two branches of the time split at sampled points
    rng = np.random.default_rng([ws.seed, 7919])
    support = np.flatnonzero(ws.f.values != 0)
    picks = rng.choice(support, size=min(HEDBERG_POINTS, support.size), replace=False)
    picks = np.sort(picks)
    c = subordination_constant(n, a)
    h = ws.spec.spacing
    mass = float(np.sum(g)) * ws.spec.cell_volume
    t_small, t_big = (h / 8) ** 2, (16 * ws.spec.halfwidth) ** 2
    r1 = r2 = sub = 0.0
    pts = []
    for k in picks:
        idx = tuple(int(i) for i in np.unravel_index(int(k), ws.spec.shape))
        m = float(Mg[idx])
        T = (K**a / m) ** (2 / b)
        gx = float(g[idx])
        lo = min(T, t_small)
        first = gx * lo ** (a / 2) / (a / 2) + _time_integral(ws, g, idx, lo, T, a)
        hi = max(T, t_big)
        tail = mass * (4 * math.pi) ** (-n / 2) * hi ** ((a - n) / 2) / ((n - a) / 2)
        second = _time_integral(ws, g, idx, T, hi, a) + tail
        r1 = max(r1, first / (T ** (a / 2) * m))
        r2 = max(r2, second / (T ** ((a - b) / 2) * K**a))
        direct = float(lhs[idx])
        if direct > 0:
            sub = max(sub, abs(c * (first + second) - direct) / direct)
        pts.append(list(idx))
    rep.extra.update({"branch_small_time_ratio": r1, "branch_large_time_ratio": r2,
                      "subordination_rel_err": sub, "sampled_points": pts})
    return rep


def _norm_level(ws, rep, P, lhs, gpart):
    a, b = P.alpha, P.beta
    K = ws.morrey_grad(a, b)
    rhs = ws.omega_norm(P.rho) * K ** (a / b) * gpart ** (1 - a / b)
    rep.lhs, rep.rhs, rep.ratio = float(lhs), float(rhs), safe_ratio(float(lhs), float(rhs))
    rep.extra.update(_kernel_extra(ws, P.rho))
    rep.extra["morrey_grad"] = K
    return rep


def _sobolev(ws: Workspace, params) -> InequalityReport:
    P = _P(params)
    rep = _report(ws, "check_sobolev_theorem2", _pdict(P), kernel_id=ws.kernel_id,
                  net_metadata=ws.net_metadata("kernel"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    gp = lp_norm(ws.grad(), P.p)
    _norm_level(ws, rep, P, lp_norm(ws.T_field(), P.q), gp)
    if abs(P.p - P.alpha * ws.spec.dim / P.beta) <= 1e-12 * P.p:
        rep.extra["classical_sobolev_ratio"] = safe_ratio(rep.lhs, ws.omega_norm(P.rho) * gp)
    return rep


def _weighted(ws: Workspace, params, w: Weight) -> InequalityReport:
    P = _P(params)
    rep = _report(ws, "check_weighted_corollary", _pdict(P), kernel_id=ws.kernel_id, weight_id=w.label,
                  net_metadata=ws.net_metadata("kernel"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    Pw = P.p / P.alpha
    screen = ws._get(("ap", w, Pw), lambda: ap_refinement_screen(w, Pw, ws.spec))
    rep.extra.update(screen.as_dict())
    if not screen.admissible:
        rep.status = REJECTED
        rep.message = f"[w]_A{Pw:g} grew by {screen.growth:.3g} under refinement"
        return rep
    gp = weighted_lp_norm(ws.grad(), w, P.p)
    return _norm_level(ws, rep, P, weighted_lp_norm(ws.T_field(), w, P.q), gp)


def _orlicz(ws: Workspace, params, young: dict) -> InequalityReport:
    P = _P(params)
    kind = young.get("kind", "power")
    rep = _report(ws, "check_orlicz_theorem", _pdict(P), kernel_id=ws.kernel_id,
                  weight_id=young.get("id", kind), net_metadata=ws.net_metadata("kernel"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    a, b = P.alpha, P.beta
    try:
        A = YoungFunction(kind, P.q)
        A_max = rescaled_young(A, 1 / a - 1 / b)
        A_rhs = rescaled_young(A, 1 - a / b)
    except YoungError as exc:
        rep.status, rep.message = REJECTED, str(exc)
        return rep
    C = nabla2_search(A_max)
    rep.extra["nabla2_constant"] = C
    rep.extra["young"] = A.as_dict()
    if C is None:
        rep.status, rep.message = REJECTED, f"{A_max.label} fails the nabla_2 net check"
        return rep
    gp = luxemburg_norm(ws.grad(), A_rhs)
    return _norm_level(ws, rep, P, luxemburg_norm(ws.T_field(), A), gp)


def _lorentz(ws: Workspace, params, w: Weight) -> InequalityReport:
    P = _P(params)
    rep = _report(ws, "check_lorentz_theorem", _pdict(P), kernel_id=ws.kernel_id, weight_id=w.label,
                  net_metadata=ws.net_metadata("kernel"))
    why = _kernel_rejection(ws, P.rho)
    if why:
        rep.status, rep.message = REJECTED, why
        return rep
    try:
        bp = bp_constant(w, P.p / P.alpha)
    except WeightError as exc:
        rep.status, rep.message = REJECTED, str(exc)
        return rep
    rep.extra["bp_constant"] = bp
    gp = classical_lorentz_norm(ws.grad(), P.p, w)
    return _norm_level(ws, rep, P, classical_lorentz_norm(ws.T_field(), P.q, w), gp)


def _poincare(ws: Workspace, alpha: float, q: Optional[float] = None) -> InequalityReport:
    n = ws.spec.dim
    if not 1 <= alpha < n:
        raise ValueError("Poincare-Sobolev needs 1 <= alpha < n")
    q_max = n * alpha / (n - alpha)
    q = q_max if q is None else float(q)
    if q > q_max * (1 + 1e-12):
        raise ValueError(f"q={q} exceeds n*alpha/(n-alpha)={q_max}")
    rep = _report(ws, "check_poincare_sobolev", {"alpha": alpha, "q": q}, net_metadata=ws.net_metadata())
    f = ws.f.values
    G = ws.grad().values ** alpha
    outside = (f == 0).astype(float)
    spec, h = ws.spec, ws.spec.spacing
    best = (0.0, 0.0, 0.0, None, 0.0)
    shape = np.array(spec.shape)
    for rc in ws.family.radii_cells:
        fp = ball_offsets(n, rc)
        full = int(fp.sum())
        counts = ball_counts(spec, rc)
        # discrete ball entirely in the domain and inside supp f
        zeros = ball_sums(outside, rc)
        ok = ws.family.center_mask(rc) & (counts > full - 0.5) & (zeros < 0.5)
        centres = np.argwhere(ok)
        if centres.size == 0:
            continue
        offs = np.argwhere(fp) - (np.array(fp.shape) // 2)
        r = rc * h
        chunk = max(1, 2_000_000 // offs.shape[0])
        for c0 in range(0, centres.shape[0], chunk):
            cc = centres[c0 : c0 + chunk]
            idx = cc[:, None, :] + offs[None, :, :]
            flat = np.ravel_multi_index(tuple(np.moveaxis(idx, -1, 0)), tuple(shape))
            F = f.ravel()[flat]
            fB = F.mean(axis=1, keepdims=True)
            lhs = np.mean(np.abs(F - fB) ** q, axis=1) ** (1 / q)
            rhs = r * np.mean(G.ravel()[flat], axis=1) ** (1 / alpha)
            with np.errstate(divide="ignore", invalid="ignore"):
                rat = np.where(rhs > 0, lhs / rhs, 0.0)
            k = int(np.argmax(rat))
            if best[3] is None or rat[k] > best[0]:
                best = (float(rat[k]), float(lhs[k]), float(rhs[k]), [int(i) for i in cc[k]], r)
    rep.ratio, rep.lhs, rep.rhs, rep.sup_point = best[0], best[1], best[2], best[3]
    rep.extra["sup_radius"] = best[4]
    if best[3] is None:
        rep.status, rep.message = SKIP, "no ball of the family lies inside supp f"
    return rep


def _besov_from_maxima(ts: np.ndarray, maxima: np.ndarray, beta: float) -> float:
    return float(np.max(ts ** (beta / 2.0) * maxima)) if ts.size else 0.0


def _besov_morrey(ws: Workspace, s: float) -> InequalityReport:
    n = ws.spec.dim
    if not 0 < s <= n:
        raise ValueError("s must lie in (0, n]")
    rep = _report(ws, "check_besov_morrey_equivalence", {"s": s}, net_metadata=ws.net_metadata("heat"))
    g = ws.f.values
    if np.any(g < 0):
        rep.status, rep.message = REJECTED, "field has negative samples"
        return rep
    if not np.any(g):
        rep.status, rep.message = SKIP, "zero field"
        return rep
    ts, maxima, _ = ws.heat_sweep()
    besov = _besov_from_maxima(ts, maxima, s)
    morrey = morrey_norm(ws.f, 1.0, n / s, ws.family)
    rep.lhs, rep.rhs, rep.ratio = besov, morrey, safe_ratio(besov, morrey)
    rep.extra["reciprocal_ratio"] = safe_ratio(morrey, besov)
    return rep


def _max_domination(ws: Workspace) -> InequalityReport:
    rep = _report(ws, "check_maximal_domination", {}, net_metadata=ws.net_metadata("heat"))
    _, _, sup = ws.heat_sweep()
    return _pointwise(ws, rep, sup, ws.f_maximal())


# -- public single-instance entry points ----------------------------------------------


def _ws(f, omega=None, **kw) -> Workspace:
    return Workspace(f, omega, **kw)


def check_pointwise_theorem1(f, omega, params, **kw) -> InequalityReport:
    return _theorem1(_ws(f, omega, **kw), params)


def check_intermediate_riesz(f, omega, params, **kw) -> InequalityReport:
    return _intermediate(_ws(f, omega, **kw), params)


def check_hedberg_split(f, params, **kw) -> InequalityReport:
    return _hedberg(_ws(f, None, **kw), params)


def check_sobolev_theorem2(f, omega, params, **kw) -> InequalityReport:
    return _sobolev(_ws(f, omega, **kw), params)


def check_weighted_corollary(f, omega, params, w: Weight, **kw) -> InequalityReport:
    return _weighted(_ws(f, omega, **kw), params, w)


def check_orlicz_theorem(f, omega, params, young, **kw) -> InequalityReport:
    rec = young.as_dict() if isinstance(young, YoungFunction) else dict(young)
    return _orlicz(_ws(f, omega, **kw), params, rec)


def check_lorentz_theorem(f, omega, params, w: Weight, **kw) -> InequalityReport:
    return _lorentz(_ws(f, omega, **kw), params, w)


def check_poincare_sobolev(f, alpha: float, q: Optional[float] = None, **kw) -> InequalityReport:
    return _poincare(_ws(f, None, **kw), alpha, q)


def check_besov_morrey_equivalence(g, s: float, **kw) -> InequalityReport:
    return _besov_morrey(_ws(g, None, **kw), s)


def check_maximal_domination(g, **kw) -> InequalityReport:
    return _max_domination(_ws(g, None, **kw))


# -- suite ------------------------------------------------------------------------------


def _expand(check_id: str, corpus: dict):
    """Argument tuples (after the workspace) for one check on one entry, in corpus order."""
    exps = [_P(e) for e in corpus.get("exponents", [])]
    rn = [weight_from_record(w) for w in corpus.get("weights", []) if w.get("domain", "rn") == "rn"]
    half = [weight_from_record(w) for w in corpus.get("weights", []) if w.get("domain") == "halfline"]
    if check_id in ("check_pointwise_theorem1", "check_intermediate_riesz", "check_sobolev_theorem2"):
        return [(P,) for P in exps]
    if check_id == "check_hedberg_split":
        seen, out = set(), []
        for P in exps:
            if (P.alpha, P.beta) not in seen:
                seen.add((P.alpha, P.beta))
                out.append((P,))
        return out
    if check_id == "check_weighted_corollary":
        return [(P, w) for P in exps for w in rn]
    if check_id == "check_orlicz_theorem":
        return [(P, y) for P in exps for y in corpus.get("young", [])]
    if check_id == "check_lorentz_theorem":
        return [(P, w) for P in exps for w in half]
    if check_id == "check_poincare_sobolev":
        return [(a,) for a in corpus.get("poincare_alphas", [])]
    if check_id == "check_besov_morrey_equivalence":
        return [(s,) for s in corpus.get("besov_s", [])]
    if check_id == "check_maximal_domination":
        return [()]
    raise KeyError(check_id)


RUNNERS: Dict[str, Callable] = {
    "check_pointwise_theorem1": _theorem1,
    "check_intermediate_riesz": _intermediate,
    "check_hedberg_split": _hedberg,
    "check_sobolev_theorem2": _sobolev,
    "check_weighted_corollary": _weighted,
    "check_orlicz_theorem": _orlicz,
    "check_lorentz_theorem": _lorentz,
    "check_poincare_sobolev": _poincare,
    "check_besov_morrey_equivalence": _besov_morrey,
    "check_maximal_domination": _max_domination,
}


def entry_workspace(entry: dict, N: int, seed: int = 0, index: int = 0) -> Workspace:
    f = field_from_spec(entry["field"], N)
    rec = dict(entry["kernel"])
    omega = kernel_from_record(rec, f.spec.dim)
    return Workspace(f, omega, entry_id=entry["id"], kernel_id=rec.get("id"), kernel_record=rec,
                     seed=int(seed) * 1_000_003 + index)


def run_entry(corpus: dict, index: int, N: int, checks: Sequence[str], seed: int = 0) -> List[InequalityReport]:
    entry = corpus["entries"][index]
    try:
        ws = entry_workspace(entry, N, seed, index)
    except Exception as exc:
        grid = (entry["field"]["dim"], N, entry["field"]["halfwidth"])
        msg = f"{type(exc).__name__}: {exc}"
        return [InequalityReport(c, entry["id"], {"args": repr(args)}, grid, status=ERROR, message=msg)
                for c in checks for args in _expand(c, corpus)]
    out = []
    for cid in checks:
        for args in _expand(cid, corpus):
            out.append(_run_one(RUNNERS[cid], cid, ws, args))
    return out


def _run_one(fn, cid, ws, args) -> InequalityReport:
    t0 = time.perf_counter()
    try:
        rep = fn(ws, *args)
    except Exception as exc:
        rep = _report(ws, cid, {"args": repr(args)}, status=ERROR, message=f"{type(exc).__name__}: {exc}")
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def _task(payload):
    corpus, index, N, checks, seed = payload
    return [r.to_dict() for r in run_entry(corpus, index, N, checks, seed)]


@dataclass
class DriftRow:
    entry_id: str
    check_id: str
    params_hash: str
    N: int
    ratio: float
    drift: Optional[float]
    status: str


@dataclass
class SuiteResult:
    reports: List[InequalityReport]
    drifts: List[DriftRow]

    @property
    def failures(self) -> List[str]:
        out = []
        for r in self.reports:
            if r.status in (FALSIFIED, ERROR):
                out.append(f"{r.entry_id} {r.check_id} N={r.N}: {r.status} {r.message}")
            elif r.status == OK and not math.isfinite(r.ratio):
                out.append(f"{r.entry_id} {r.check_id} N={r.N}: non-finite ratio")
        for d in self.drifts:
            if d.status == "fail":
                out.append(f"{d.entry_id} {d.check_id} {d.params_hash} N={d.N}: drift {d.drift:.4g}")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures


def compute_drifts(reports: Sequence[InequalityReport]) -> List[DriftRow]:
    groups: Dict[tuple, List[InequalityReport]] = {}
    for r in reports:
        groups.setdefault((r.entry_id, r.check_id, r.params_hash()), []).append(r)
    rows = []
    for (eid, cid, ph), reps in groups.items():
        reps = sorted(reps, key=lambda r: r.N)
        prev = None
        for r in reps:
            drift, status = None, "first"
            if prev is not None:
                if r.status != OK or prev.status != OK:
                    status = "skip"
                elif r.ratio == 0 and prev.ratio == 0:
                    status = "skip"  # 0/0
                else:
                    drift = safe_ratio(r.ratio, prev.ratio)
                    lo, hi = DRIFT_BOUNDS
                    status = "ok" if lo <= drift <= hi else "fail"
            rows.append(DriftRow(eid, cid, ph, r.N, r.ratio, drift, status))
            prev = r
    return rows


def run_suite(
    corpus: dict,
    checks: Optional[Sequence[str]] = None,
    levels: Sequence[int] = (128, 256),
    threads: int = 1,
    seed: int = 0,
) -> SuiteResult:
    """Every (entry, check, parameter combo, level); reports in corpus order, then check, combo, level."""
    checks = list(CHECK_IDS if checks is None else checks)
    unknown = [c for c in checks if c not in RUNNERS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}")
    levels = sorted(int(N) for N in levels)
    entries = corpus.get("entries", [])
    tasks = [(corpus, i, N, checks, seed) for i in range(len(entries)) for N in levels]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    by_key = {}
    for (_, i, N, _, _), res in zip(tasks, results):
        by_key[(i, N)] = [InequalityReport.from_dict(d) for d in res]
    reports = []
    for i in range(len(entries)):
        per_level = [by_key[(i, N)] for N in levels]
        # per_level lists share their ordering (same checks and combos)
        for row in zip(*per_level):
            reports.extend(row)
    return SuiteResult(reports, compute_drifts(reports))
