"""Intersection counts of iterated straight loops with the lifts of a loop.

The model loop of class (p, q) runs along (q, -p); its lifts are exactly the
lines <x, (p, q)> = j for integers j (gcd(p, q) = 1). The number of lifts met by
one lift of f^n(alpha) is the number of integers in the range of
s(t) = <f^n(t (q, -p)), (p, q)> over t in [0, 1], and that count plus one
bounds the fine-curve-graph distance between alpha and f^n(alpha).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .deviation import Verdict, boundedness_verdict
from .errors import InvalidInput, NonInvariantLoop
from .lifts import LiftMap, detect_homotopy_class

GRAZE = 1e-9


@dataclass(frozen=True)
class LoopClass:
    p: int
    q: int

    def __post_init__(self):
        if (self.p, self.q) == (0, 0) or math.gcd(self.p, self.q) != 1:
            raise InvalidInput(f"loop class ({self.p}, {self.q}) must be primitive")

    @property
    def tangent(self) -> np.ndarray:
        return np.array([self.q, -self.p], dtype=float)

    @property
    def covector(self) -> np.ndarray:
        return np.array([self.p, self.q], dtype=float)


@dataclass
class IntersectionRecord:
    n: int
    count: int
    s_min: float
    s_max: float
    periodic: bool
    drift: int = 0

    def to_dict(self):
        return {"n": self.n, "count": self.count, "s_min": self.s_min, "s_max": self.s_max,
                "periodic": self.periodic, "drift": self.drift}


@dataclass
class OrbitBound:
    sup_bound: int
    bounded_flag: bool
    records: list = field(default_factory=list)
    verdict: Optional[Verdict] = None

    def __iter__(self):
        yield self.sup_bound
        yield self.bounded_flag

    def rows(self):
        return [(r.n, r.count, distance_upper_bound(r)) for r in self.records]

    def to_dict(self):
        return {"sup_bound": self.sup_bound, "bounded_flag": self.bounded_flag,
                "verdict": None if self.verdict is None else self.verdict.to_dict(),
                "periodic": all(r.periodic for r in self.records),
                "counts": [r.count for r in self.records]}


def loop_drift(A, loop: LoopClass, n: int) -> int:
    """<A^n (q, -p), (p, q)>; the level function is periodic iff this vanishes."""
    M = np.linalg.matrix_power(np.asarray(A, dtype=object), n) if n else np.eye(2, dtype=object)
    w = M.dot(np.array([loop.q, -loop.p], dtype=object))
    return int(w[0] * loop.p + w[1] * loop.q)


def count_levels(s_min: float, s_max: float) -> int:
    """Integers in [s_min, s_max], counting a level grazed within GRAZE."""
    return max(0, math.floor(s_max + GRAZE) - math.ceil(s_min - GRAZE) + 1)


def _level(m: LiftMap, n: int, t: np.ndarray, loop: LoopClass, offset) -> np.ndarray:
    pts = offset + t[:, None] * loop.tangent
    for _ in range(n):
        pts = m.forward(pts)
    return pts @ loop.covector


def _refine(m, n, loop, offset, t, s, rounds=3, width=16):
    """Zoom around the sampled extrema of s to tighten s_min and s_max."""
    lo, hi = float(s.min()), float(s.max())
    for pick in (np.argmin, np.argmax):
        tt, ss = t, s
        for _ in range(rounds):
            i = int(pick(ss))
            a, b = tt[max(i - 1, 0)], tt[min(i + 1, len(tt) - 1)]
            if b <= a:
                break
            tt = np.linspace(a, b, width + 1)
            ss = _level(m, n, tt, loop, offset)
            lo, hi = min(lo, float(ss.min())), max(hi, float(ss.max()))
    return lo, hi


def intersection_count(m: LiftMap, n: int, loop: LoopClass, samples: int = 1024,
                       offset=(0.0, 0.0), refine: bool = True,
                       require_invariant: bool = False) -> IntersectionRecord:
    """Number of lifts of the loop met by the lift of f^n(alpha) starting at ``offset``.

    When the loop class is not invariant under A^n the level function is not
    periodic; the count over one fundamental segment is still returned, with
    periodic=False, unless require_invariant asks for NonInvariantLoop.
    """
    if n < 0 or samples < 2:
        raise InvalidInput("need n >= 0 and samples >= 2")
    hc = detect_homotopy_class(m)
    drift = loop_drift(hc.matrix, loop, n)
    if drift != 0 and require_invariant:
        raise NonInvariantLoop(f"loop ({loop.p}, {loop.q}) drifts by {drift} under A^{n}", drift)
    offset = np.asarray(offset, dtype=float)
    t = np.linspace(0.0, 1.0, samples + 1)
    s = _level(m, n, t, loop, offset)
    lo, hi = _refine(m, n, loop, offset, t, s) if refine else (float(s.min()), float(s.max()))
    return IntersectionRecord(n, count_levels(lo, hi), lo, hi, drift == 0, drift)


def distance_upper_bound(r: IntersectionRecord) -> int:
    return r.count + 1


def graph_orbit_bound(m: LiftMap, loop: LoopClass, N: int, samples: int = 256, refine: bool = True,
                      require_invariant: bool = False, **verdict_kw) -> OrbitBound:
    """sup over n <= N of the distance bound, and whether the bounds stay bounded.

    The sample curve is advanced one step at a time; refinement near the
    extrema re-evaluates f^n at a few new parameters.
    """
    hc = detect_homotopy_class(m)
    t = np.linspace(0.0, 1.0, samples + 1)
    pts = t[:, None] * loop.tangent
    offset = np.zeros(2)
    records = []
    for n in range(N + 1):
        if n:
            pts = m.forward(pts)
        drift = loop_drift(hc.matrix, loop, n)
        if drift != 0 and require_invariant:
            raise NonInvariantLoop(f"loop ({loop.p}, {loop.q}) drifts by {drift} under A^{n}", drift)
        s = pts @ loop.covector
        lo, hi = _refine(m, n, loop, offset, t, s) if refine else (float(s.min()), float(s.max()))
        records.append(IntersectionRecord(n, count_levels(lo, hi), lo, hi, drift == 0, drift))
    bounds = np.array([distance_upper_bound(r) for r in records], dtype=float)
    verdict = boundedness_verdict(bounds, **verdict_kw)
    return OrbitBound(int(bounds.max()), verdict.bounded, records, verdict)
