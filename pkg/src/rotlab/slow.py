"""Normalized image shapes A_n, good limit candidates, main directions,
excursions and the renormalized blow-up search.

A_n = (hull_n - base_n) / d_n always has unit diameter and contains the origin.
Limits along subsequences with d_n -> infinity are approximated by clustering
the shapes observed at large d_n.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateImage
from .geometry import (ConvexPolygon, Direction, RationalDirection, best_rational_direction,
                       chebyshev_center, convex_hull, diameter, diameter_pair, hausdorff_distance,
                       points_to_convex_distance)
from .orbit import DomainImageSeries, quasiconvexity_report

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass
class NormalizedShape:
    n: int
    shape: ConvexPolygon
    d_n: float


@dataclass
class GoodLimitCandidate:
    shape: ConvexPolygon
    n: int
    subsequence: list  # [(n, d_n), ...] with strictly increasing d_n
    cluster_radius: float
    convexity_defect: float
    members: int = 1

    def to_dict(self):
        return {"n": self.n, "shape": self.shape.to_list(),
                "subsequence": [[int(k), float(d)] for k, d in self.subsequence],
                "cluster_radius": self.cluster_radius, "convexity_defect": self.convexity_defect,
                "members": self.members}


@dataclass(frozen=True)
class ExcursionRecord:
    n1: int
    n2: int
    R: float


@dataclass
class DichotomyVerdict:
    variant: str  # IrrationalSegment | SingleRationalLine | MultipleRationalLines | Inconclusive
    parameters: dict
    direction: Optional[Direction] = None
    rational: Optional[RationalDirection] = None
    candidate: Optional[int] = None
    defects: list = field(default_factory=list)
    warning: Optional[str] = None

    def to_dict(self):
        return {"variant": self.variant, "parameters": self.parameters,
                "direction": None if self.direction is None else self.direction.angle,
                "rational": None if self.rational is None else self.rational.to_dict(),
                "candidate": self.candidate, "defects": self.defects, "warning": self.warning}


@dataclass
class RenormalizedCandidate:
    shape: ConvexPolygon
    subsequence: list
    b: list
    a_k: list
    w_k: list
    contains_unit_disk: bool
    escapes_window: bool
    inradius: float
    parameters: dict

    def to_dict(self):
        return {"shape": self.shape.to_list(), "subsequence": self.subsequence, "b": self.b,
                "a_k": self.a_k, "w_k": self.w_k, "contains_unit_disk": self.contains_unit_disk,
                "escapes_window": self.escapes_window, "inradius": self.inradius,
                "parameters": self.parameters}


def normalized_shape(s: DomainImageSeries, n: int) -> NormalizedShape:
    s.check_n(n)
    d = float(s.d[n])
    if d <= 0.0:
        raise DegenerateImage(f"d_{n} = 0")
    return NormalizedShape(n, s.hulls[n].translate(-s.bases[n]).scale(1.0 / d), d)


def shape_invariant_residuals(a: NormalizedShape) -> dict:
    """How far A_n is from containing 0, sitting in the unit disk and having diameter 1."""
    v = a.shape.vertices
    return {"origin": float(points_to_convex_distance(np.zeros((1, 2)), a.shape)[0]),
            "disk": max(0.0, float(np.hypot(v[:, 0], v[:, 1]).max()) - 1.0),
            "diameter": abs(diameter(a.shape) - 1.0)}


def _records(ns: Sequence[int], vals: Sequence[float]) -> list:
    """Running-maximum records (strictly increasing values) in n order."""
    out, best = [], -math.inf
    for k, v in sorted(zip(ns, vals)):
        if v > best:
            out.append((int(k), float(v)))
            best = v
    return out


def good_limit_candidates(s: DomainImageSeries, R_min: float = 20.0, cluster_eps: float = 0.05,
                          scale_fraction: float = 0.5) -> list:
    """Cluster the shapes A_n with d_n >= R_min and return one candidate per persistent cluster.

    Shapes are visited by decreasing d_n; each joins the first leader within
    cluster_eps or starts a new cluster. A cluster is kept when its largest d_n
    is at least scale_fraction of the largest observed d_n, so that transient
    shapes seen only at moderate scale are not reported as limits.
    """
    idx = [n for n in range(s.N + 1) if s.d[n] >= R_min]
    if not idx:
        return []
    d_top = float(max(s.d[n] for n in idx))
    order = sorted(idx, key=lambda n: (-s.d[n], n))
    shapes = {n: normalized_shape(s, n) for n in order}
    leaders: list[int] = []
    members: dict[int, list] = {}
    radius: dict[int, float] = {}
    for n in order:
        for L in leaders:
            h = hausdorff_distance(shapes[L].shape, shapes[n].shape)
            if h <= cluster_eps:
                members[L].append(n)
                radius[L] = max(radius[L], h)
                break
        else:
            leaders.append(n)
            members[n] = [n]
            radius[n] = 0.0
    out = []
    for L in leaders:
        if s.d[L] < scale_fraction * d_top:
            continue
        d_rep = float(s.d[L])
        if L in s.boundaries:
            defect, slack = quasiconvexity_report(s, L)
            defect = (defect + slack) / d_rep
        else:
            defect = SQRT2 / d_rep + s.grid_diagonal
        if defect > cluster_eps:
            log.info("dropping cluster at n=%d: convexity defect %.3g > %.3g", L, defect, cluster_eps)
            continue
        sub = _records(members[L], [s.d[k] for k in members[L]])
        out.append(GoodLimitCandidate(shapes[L].shape, L, sub, radius[L], defect, len(members[L])))
    return out


def main_direction(a: Union[NormalizedShape, ConvexPolygon]) -> tuple[Direction, float]:
    """Line through the origin closest to the shape in the sup-distance sense.

    max_v |<v, nu>| is the support function of K = conv(V u -V) at the normal
    nu, which is minimized at an edge normal of K. The result is exact up to
    rounding.
    """
    poly = a.shape if isinstance(a, NormalizedShape) else a
    V = poly.vertices
    K = convex_hull(np.vstack([V, -V]))
    if K.is_point:
        return Direction(0.0), 0.0
    if K.is_segment:
        return Direction.from_vector(*(K.vertices[1] - K.vertices[0])), 0.0
    p, q = K.edges()
    e = q - p
    dist = np.abs(e[:, 0] * p[:, 1] - e[:, 1] * p[:, 0]) / np.hypot(e[:, 0], e[:, 1])
    k = int(np.argmin(dist))
    return Direction.from_vector(*e[k]), float(dist[k])


def main_direction_rows(s: DomainImageSeries, R_min: float = 0.0) -> list:
    """(n, d_n, theta, defect) for every n with d_n >= max(R_min, tiny)."""
    rows = []
    for n in range(s.N + 1):
        if s.d[n] > 0 and s.d[n] >= R_min:
            th, df = main_direction(normalized_shape(s, n))
            rows.append((n, float(s.d[n]), th.angle, df))
    return rows


def excursions_from_values(d, R: float) -> list:
    """Maximal runs of consecutive indices with d[n] >= R."""
    d = np.asarray(d, dtype=float)
    above = np.concatenate([[False], d >= R, [False]])
    edges = np.flatnonzero(np.diff(above.astype(np.int8)))
    return [ExcursionRecord(int(a), int(b) - 1, float(R)) for a, b in zip(edges[::2], edges[1::2])]


def excursions(s: DomainImageSeries, R: float) -> list:
    return excursions_from_values(s.d, R)


def dichotomy_report(cands: Sequence[GoodLimitCandidate], tol_angle: float = 0.01, q_max: int = 5,
                     tol: float = 0.05) -> DichotomyVerdict:
    """Irrational segment versus a single rational line, read off the main directions."""
    params = {"tol_angle": tol_angle, "q_max": q_max, "tol": tol}
    if not cands:
        return DichotomyVerdict("Inconclusive", params, warning="no good limit candidates")
    mains = [main_direction(c.shape) for c in cands]
    defects = [d for _, d in mains]
    rats = []
    for i, (th, df) in enumerate(mains):
        if df > tol:
            return DichotomyVerdict("IrrationalSegment", params, direction=th, candidate=i, defects=defects,
                                    warning="candidate has two-dimensional extent")
        r = best_rational_direction(th, q_max)
        if r.error > tol_angle:
            return DichotomyVerdict("IrrationalSegment", params, direction=th, candidate=i, defects=defects)
        rats.append(r)
    first = rats[0]
    if all(first.same_line(r) for r in rats):
        return DichotomyVerdict("SingleRationalLine", params, direction=first.direction, rational=first,
                                candidate=0, defects=defects)
    return DichotomyVerdict("MultipleRationalLines", params, defects=defects,
                            warning="limits along distinct rational lines: numerical noise or wrong class")


def _loglog_slope(ns, vals) -> float:
    ns, vals = np.asarray(ns, float), np.asarray(vals, float)
    ok = (ns > 0) & (vals > 0)
    if ok.sum() < 2 or np.ptp(np.log(ns[ok])) == 0:
        return 0.0
    return float(np.polyfit(np.log(ns[ok]), np.log(vals[ok]), 1)[0])


def chord_heights(hull: ConvexPolygon):
    """(b, foot): largest distance of a vertex to the diameter line, and that vertex's foot point."""
    x, y, L = diameter_pair(hull)
    if L == 0.0:
        return 0.0, x.copy()
    u = (y - x) / L
    r = hull.vertices - x
    h = np.abs(r[:, 0] * u[1] - r[:, 1] * u[0])
    k = int(np.argmax(h))
    return float(h[k]), x + (r[k] @ u) * u


def blowup_search(s: DomainImageSeries, R_min: float = 20.0, growth: float = 10.0, slope: float = 0.2,
                  window: float = 10.0, disk_points: int = 64) -> Optional[RenormalizedCandidate]:
    """Look for unbounded chord heights b_n and renormalize by sqrt(b_n) around the chord foot."""
    params = {"R_min": R_min, "growth": growth, "slope": slope, "window": window}
    idx = [n for n in range(s.N + 1) if s.d[n] >= R_min]
    if len(idx) < 2:
        return None
    hb = {n: chord_heights(s.hulls[n]) for n in idx}
    b = [hb[n][0] for n in idx]
    if b[0] <= 0.0 or b[-1] < growth * b[0] or _loglog_slope(idx, b) <= slope:
        return None
    sub = _records(idx, b)
    a_k, w_k = [], []
    for n, bn in sub:
        a = math.sqrt(bn)
        a_k.append(a)
        w_k.append(((s.bases[n] - hb[n][1]) / a).tolist())
    n_last = sub[-1][0]
    shape = s.hulls[n_last].translate(-hb[n_last][1]).scale(1.0 / a_k[-1])
    ang = 2 * np.pi * np.arange(disk_points) / disk_points
    circle = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    inside = bool(np.all(shape.contains(circle, tol=1e-12)))
    _, inr = chebyshev_center(shape)
    escapes = bool(np.any(np.abs(shape.vertices) > window))
    return RenormalizedCandidate(shape, [int(n) for n, _ in sub], [float(v) for _, v in sub], a_k, w_k,
                                 inside, escapes, inr, params)
