"""Rotation set estimates and their shape (point, segment, or with interior)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import ClassMismatch, InvalidInput
from .geometry import (ConvexPolygon, Direction, RationalDirection, best_rational_direction,
                       diameter, diameter_pair, hausdorff_distance, min_width_direction)
from .orbit import DomainImageSeries


@dataclass
class RotationSetEstimate:
    kind: str  # "identity" or "dehn"
    n_used: int
    convergence_gap: float
    hull: Optional[ConvexPolygon] = None
    interval: Optional[tuple[float, float]] = None
    grid_res: int = 0

    def to_dict(self):
        d = {"kind": self.kind, "n_used": self.n_used, "convergence_gap": self.convergence_gap}
        if self.hull is not None:
            d["hull"] = self.hull.to_list()
        if self.interval is not None:
            d["interval"] = list(self.interval)
        return d


@dataclass
class RotationSetShape:
    variant: str  # Point | Segment | Interior
    tol: float
    q_max: int
    tol_angle: float
    center: Optional[tuple[float, float]] = None
    rational: Optional[tuple[Fraction, Fraction]] = None
    direction: Optional[Direction] = None
    rational_direction: Optional[RationalDirection] = None
    passes_rational_point: bool = False
    rational_point: Optional[tuple[Fraction, Fraction]] = None
    endpoints: Optional[list] = None
    area: float = 0.0

    def to_dict(self):
        d = {"variant": self.variant, "tol": self.tol, "q_max": self.q_max, "tol_angle": self.tol_angle}
        if self.variant == "Point":
            d["center"] = list(self.center)
            d["rational"] = None if self.rational is None else [str(c) for c in self.rational]
        elif self.variant == "Segment":
            d["direction"] = self.direction.angle
            d["rational_direction"] = None if self.rational_direction is None else self.rational_direction.to_dict()
            d["passes_rational_point"] = self.passes_rational_point
            d["rational_point"] = None if self.rational_point is None else [str(c) for c in self.rational_point]
            d["endpoints"] = self.endpoints
        else:
            d["area"] = self.area
        return d


def _require(s: DomainImageSeries, variant: str):
    if s.homotopy.variant != variant:
        raise ClassMismatch(f"{s.map_label} is in class {s.homotopy.variant}, expected {variant}")


def rotation_set_estimate(s: DomainImageSeries, n: Optional[int] = None) -> RotationSetEstimate:
    """hull_n / n, with the Hausdorff gap to the estimate at n // 2."""
    _require(s, "Identity")
    n = s.N if n is None else n
    s.check_n(n)
    if n < 1:
        raise InvalidInput("n must be >= 1")
    est = s.hulls[n].scale(1.0 / n)
    half = max(1, n // 2)
    gap = hausdorff_distance(est, s.hulls[half].scale(1.0 / half))
    return RotationSetEstimate("identity", n, gap, hull=est, grid_res=s.grid_res)


def dehn_rotation_interval(s: DomainImageSeries, n: Optional[int] = None) -> RotationSetEstimate:
    """[min, max] of the transverse displacement over samples, divided by n."""
    _require(s, "DehnTwistConjugate")
    n = s.N if n is None else n
    s.check_n(n)
    if n < 1:
        raise InvalidInput("n must be >= 1")
    lo, hi = s.transverse[n] / n
    half = max(1, n // 2)
    hlo, hhi = s.transverse[half] / half
    gap = max(abs(lo - hlo), abs(hi - hhi))
    return RotationSetEstimate("dehn", n, float(gap), interval=(float(lo), float(hi)), grid_res=s.grid_res)


def default_tol(e: RotationSetEstimate) -> float:
    return 5.0 * (math.sqrt(2.0) / e.n_used + e.convergence_gap)


def _nearest_rational(x: float, q_max: int) -> Fraction:
    return Fraction(x).limit_denominator(q_max)


def _rational_point_near_segment(a, b, tol, q_max, budget=2_000_000):
    """A point with coordinates of denominator <= q_max within tol of segment [a, b], or None.

    Searches lattices (1/q) Z^2 in increasing q, so the witness has minimal denominator.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    d = b - a
    L = float(np.hypot(*d))
    u = d / L if L > 0 else np.array([1.0, 0.0])
    nrm = np.array([-u[1], u[0]])
    lo = np.minimum(a, b) - tol
    hi = np.maximum(a, b) + tol
    for q in range(1, q_max + 1):
        i0, i1 = math.ceil(lo[0] * q), math.floor(hi[0] * q)
        j0, j1 = math.ceil(lo[1] * q), math.floor(hi[1] * q)
        if i1 < i0 or j1 < j0:
            continue
        if (i1 - i0 + 1) * (j1 - j0 + 1) > budget:
            raise InvalidInput("rational point search box too large; lower q_max")
        I, J = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
        P = np.stack([I.ravel(), J.ravel()], axis=1) / q
        r = P - a
        along = r @ u
        across = np.abs(r @ nrm)
        ok = (across <= tol) & (along >= -tol) & (along <= L + tol)
        if ok.any():
            k = int(np.argmin(np.where(ok, across, np.inf)))
            ii, jj = int(I.ravel()[k]), int(J.ravel()[k])
            return Fraction(ii, q), Fraction(jj, q)
    return None


def shape_classify(e: RotationSetEstimate, tol: Optional[float] = None, q_max: int = 32,
                   tol_angle: float = 0.01) -> RotationSetShape:
    """Discrete shape of an identity-class estimate at the given tolerances."""
    if e.kind != "identity" or e.hull is None:
        raise ClassMismatch("shape_classify needs an identity-class estimate")
    if tol is None:
        tol = default_tol(e)
    if tol <= 0 or q_max < 1 or tol_angle <= 0:
        raise InvalidInput("tolerances must be positive")
    hull = e.hull
    if diameter(hull) <= tol:
        c = hull.center
        r = (_nearest_rational(c[0], q_max), _nearest_rational(c[1], q_max))
        if math.hypot(float(r[0]) - c[0], float(r[1]) - c[1]) > tol:
            r = None
        return RotationSetShape("Point", tol, q_max, tol_angle, center=(float(c[0]), float(c[1])), rational=r)
    area = hull.area
    # thickness, not area: a sliver of length L and thickness ~1/n has area ~L/n >> tol^2
    if min_width_direction(hull)[1] >= tol:
        return RotationSetShape("Interior", tol, q_max, tol_angle, area=area)
    a, b, _ = diameter_pair(hull)
    direction = Direction.from_vector(*(b - a))
    rd = best_rational_direction(direction, q_max)
    if rd.error > tol_angle:
        rd = None
    witness = _rational_point_near_segment(a, b, tol, q_max)
    return RotationSetShape("Segment", tol, q_max, tol_angle, direction=direction, rational_direction=rd,
                            passes_rational_point=witness is not None, rational_point=witness,
                            endpoints=[a.tolist(), b.tolist()], area=area)
