"""Deviation profiles sup_x |<f^n(x) - x, v> - n rho_v| and boundedness verdicts.

For the identity class the integrand is periodic, so the sup over the plane is
a sup over D. One forward pass tracks the extrema of the projected
displacement for any number of directions at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClassMismatch, HorizonTooLarge, InvalidInput, RotlabError
from .geometry import RationalDirection, primitive_vectors
from .lifts import LiftMap, detect_homotopy_class
from .orbit import OVERFLOW, domain_grid


@dataclass
class Verdict:
    kind: str  # Bounded | Unbounded | Inconclusive
    parameters: dict
    sup: Optional[float] = None
    exponent: Optional[float] = None
    slope: Optional[float] = None

    @property
    def bounded(self) -> bool:
        return self.kind == "Bounded"

    def to_dict(self):
        d = {"kind": self.kind, "parameters": self.parameters, "slope": self.slope}
        if self.sup is not None:
            d["sup"] = self.sup
        if self.exponent is not None:
            d["exponent"] = self.exponent
        return d


@dataclass
class DeviationProfile:
    v: np.ndarray
    rho_component: float
    dev: np.ndarray
    verdict: Optional[Verdict] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    @property
    def N(self) -> int:
        return len(self.dev) - 1

    def rows(self):
        return [(n, float(x)) for n, x in enumerate(self.dev)]


@dataclass
class ScanRow:
    direction: RationalDirection
    verdict: Optional[Verdict] = None
    profile: Optional[DeviationProfile] = None
    error: Optional[str] = None

    def to_dict(self):
        d = {"p": self.direction.p, "q": self.direction.q}
        if self.error is not None:
            d["error"] = self.error
        else:
            d["rho_component"] = self.profile.rho_component
            d["dev_N"] = float(self.profile.dev[-1])
            d["verdict"] = self.verdict.to_dict()
        return d


@dataclass
class ScanTable:
    rows: list
    parameters: dict = field(default_factory=dict)

    @property
    def exists_bounded(self) -> bool:
        return any(r.verdict is not None and r.verdict.bounded for r in self.rows)

    def bounded_directions(self) -> list:
        return [r.direction for r in self.rows if r.verdict is not None and r.verdict.bounded]

    def verdict_for(self, p: int, q: int) -> Optional[Verdict]:
        for r in self.rows:
            if (r.direction.p, r.direction.q) in ((p, q), (-p, -q)):
                return r.verdict
        return None

    def to_dict(self):
        return {"parameters": self.parameters, "exists_bounded": self.exists_bounded,
                "rows": [r.to_dict() for r in self.rows]}


def displacement_extrema(m: LiftMap, grid_res: int, N: int, V) -> tuple[np.ndarray, np.ndarray]:
    """Per-step min and max over the grid of <f^n(x) - x, v> for each row v of V."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    x = domain_grid(grid_res)
    w0 = x @ V.T
    lo = np.zeros((N + 1, len(V)))
    hi = np.zeros((N + 1, len(V)))
    for n in range(1, N + 1):
        x = m.forward(x)
        if np.max(np.abs(x)) > OVERFLOW or not np.all(np.isfinite(x)):
            raise HorizonTooLarge(f"{m.label}: coordinates exceed {OVERFLOW:g} at n = {n}", n - 1)
        w = x @ V.T - w0
        lo[n] = w.min(axis=0)
        hi[n] = w.max(axis=0)
    return lo, hi


def _check_direction(m: LiftMap, v: np.ndarray):
    hc = detect_homotopy_class(m)
    if hc.variant == "Identity":
        return
    if hc.variant == "DehnTwistConjugate":
        u = hc.transverse
        if abs(u[0] * v[1] - u[1] * v[0]) > 1e-12 * np.hypot(*u):
            raise ClassMismatch(f"Dehn class: only the transverse direction {u.tolist()} is meaningful")
        return
    raise ClassMismatch(f"deviation is undefined for the {hc.variant} class")


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(2)
    r = np.hypot(*v)
    if r == 0:
        raise InvalidInput("zero direction")
    return v / r


def _profile(lo, hi, v, rho_component) -> DeviationProfile:
    N = len(lo) - 1
    if rho_component is None:
        rho_component = 0.0 if N == 0 else float(lo[-1] + hi[-1]) / (2.0 * N)
    shift = np.arange(N + 1) * rho_component
    dev = np.maximum(np.abs(hi - shift), np.abs(lo - shift))
    dev[0] = 0.0
    return DeviationProfile(v, float(rho_component), dev, lo=lo, hi=hi)


def deviation_profile(m: LiftMap, grid_res: int, N: int, v, rho_component: Optional[float] = None,
                      window: float = 0.5, **verdict_kw) -> DeviationProfile:
    v = _unit(v)
    _check_direction(m, v)
    lo, hi = displacement_extrema(m, grid_res, N, v[None, :])
    p = _profile(lo[:, 0], hi[:, 0], v, rho_component)
    p.verdict = boundedness_verdict(p, window, **verdict_kw)
    return p


def _fit_slope(n, y) -> float:
    if len(n) < 2 or np.ptp(np.log(n)) == 0:
        return 0.0
    return float(np.polyfit(np.log(n), np.log(y), 1)[0])


def boundedness_verdict(p: DeviationProfile, window: float = 0.5, unbounded_slope: float = 0.25,
                        growth_ratio: float = 2.0, bounded_slope: float = 0.05, bounded_ratio: float = 2.0,
                        noise_floor: float = 1e-7, min_N: int = 64) -> Verdict:
    """Finite-horizon surrogate for bounded deviation.

    A log-log fit on the last `window` of the horizon decides between growth
    and saturation; profiles that never leave rounding level are bounded.
    """
    params = {"window": window, "unbounded_slope": unbounded_slope, "growth_ratio": growth_ratio,
              "bounded_slope": bounded_slope, "bounded_ratio": bounded_ratio,
              "noise_floor": noise_floor, "min_N": min_N}
    if not 0 < window <= 1:
        raise InvalidInput("window must be in (0, 1]")
    dev = np.asarray(p.dev if isinstance(p, DeviationProfile) else p, dtype=float)
    N = len(dev) - 1
    if N < min_N:
        return Verdict("Inconclusive", params)
    sup = float(dev.max())
    if sup <= noise_floor:
        return Verdict("Bounded", params, sup=sup, slope=0.0)
    start = max(1, int(math.floor(N * (1 - window))))
    n = np.arange(start, N + 1)
    y = dev[start:]
    keep = y > 1e-9
    slope = _fit_slope(n[keep], y[keep])
    dN, dq = dev[N], dev[max(1, N // 4)]
    if slope >= unbounded_slope and dN >= growth_ratio * dq:
        return Verdict("Unbounded", params, exponent=slope, slope=slope)
    if dN <= bounded_ratio * float(np.median(y)) and slope <= bounded_slope:
        return Verdict("Bounded", params, sup=sup, slope=slope)
    return Verdict("Inconclusive", params, slope=slope)


def rational_deviation_scan(m: LiftMap, q_max: int = 3, grid_res: int = 64, N: int = 256,
                            window: float = 0.5, **verdict_kw) -> ScanTable:
    """Verdicts for every primitive (p, q) with |p|, |q| <= q_max, from a single pass."""
    pairs = primitive_vectors(q_max)
    dirs = [RationalDirection(p, q) for p, q in pairs]
    params = {"q_max": q_max, "grid_res": grid_res, "N": N, "window": window, **verdict_kw}
    hc = detect_homotopy_class(m)
    if hc.variant != "Identity":
        msg = f"ClassMismatch: rational scan needs the Identity class, got {hc.variant}"
        return ScanTable([ScanRow(d, error=msg) for d in dirs], params)
    V = np.array([_unit(pq) for pq in pairs])
    try:
        lo, hi = displacement_extrema(m, grid_res, N, V)
    except RotlabError as exc:
        return ScanTable([ScanRow(d, error=f"{type(exc).__name__}: {exc}") for d in dirs], params)
    rows = []
    for j, d in enumerate(dirs):
        prof = _profile(lo[:, j], hi[:, j], V[j], None)
        prof.verdict = boundedness_verdict(prof, window, **verdict_kw)
        rows.append(ScanRow(d, prof.verdict, prof))
    return ScanTable(rows, params)
