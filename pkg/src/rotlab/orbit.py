"""Iteration of the fundamental domain D = [0, 1]^2 on a sample grid.

Every sample is pushed forward one application per step. Only hulls, base
points, diameters and (optionally subsampled) boundary curves are kept, so
long horizons on fine grids stay within memory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClassMismatch, HorizonTooLarge, InvalidInput
from .geometry import convex_hull, diameter, points_to_segments_distance
from .lifts import HomotopyClass, LiftMap, detect_homotopy_class

OVERFLOW = 1e12
# stored boundary floats across all steps before the boundary is subsampled in n
BOUNDARY_BUDGET = 20_000_000


@dataclass
class DomainImageSeries:
    map_label: str
    grid_res: int
    x0: np.ndarray
    N: int
    homotopy: HomotopyClass
    hulls: list
    bases: np.ndarray
    d: np.ndarray
    sample_count: int
    boundaries: dict = field(default_factory=dict)
    clouds: dict = field(default_factory=dict)
    # Dehn class: per-step [min, max] of the transverse displacement
    transverse: Optional[np.ndarray] = None

    @property
    def grid_diagonal(self) -> float:
        return math.sqrt(2.0) / self.grid_res

    def check_n(self, n: int):
        if not 0 <= n <= self.N:
            raise InvalidInput(f"n = {n} outside [0, {self.N}]")

    def summary_rows(self):
        """(n, d_n, base_x, base_y) rows for the series CSV."""
        return [(n, float(self.d[n]), float(self.bases[n, 0]), float(self.bases[n, 1]))
                for n in range(self.N + 1)]

    def truncated(self, n: int) -> "DomainImageSeries":
        return DomainImageSeries(
            self.map_label, self.grid_res, self.x0, n, self.homotopy, self.hulls[:n + 1],
            self.bases[:n + 1].copy(), self.d[:n + 1].copy(), self.sample_count,
            {k: v for k, v in self.boundaries.items() if k <= n},
            {k: v for k, v in self.clouds.items() if k <= n},
            None if self.transverse is None else self.transverse[:n + 1].copy())


def domain_grid(grid_res: int) -> np.ndarray:
    """(grid_res + 1)^2 lattice on D; i / g is exact, so doubling the grid gives a superset."""
    t = np.arange(grid_res + 1) / grid_res
    X, Y = np.meshgrid(t, t, indexing="xy")
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def boundary_indices(grid_res: int) -> np.ndarray:
    """Indices of the grid points on the boundary of D, counterclockwise from (0, 0)."""
    g = grid_res
    i = np.arange(g)
    bottom = i
    right = (i * (g + 1)) + g
    top = g * (g + 1) + (g - i)
    left = (g - i) * (g + 1)
    return np.concatenate([bottom, right, top, left])


def iterate_domain(m: LiftMap, grid_res: int, N: int, x0=(0.5, 0.5),
                   keep_clouds=None, boundary_every: Optional[int] = None) -> DomainImageSeries:
    """Push the sampled domain forward N times, recording hulls and diameters."""
    if grid_res < 8:
        raise InvalidInput(f"grid_res must be >= 8, got {grid_res}")
    if N < 0:
        raise InvalidInput("N must be >= 0")
    x0 = np.asarray(x0, dtype=float).reshape(2)
    if not (0 < x0[0] < 1 and 0 < x0[1] < 1):
        raise InvalidInput("x0 must lie in the interior of D")
    hc = detect_homotopy_class(m)
    grid = domain_grid(grid_res)
    # x0 rides along as the last sample, so base_n always lies in hull_n
    pts = np.vstack([grid, x0[None, :]])
    bidx = boundary_indices(grid_res)
    if boundary_every is None:
        boundary_every = max(1, math.ceil((N + 1) * len(bidx) * 2 / BOUNDARY_BUDGET))
    keep = set(keep_clouds or ())
    u = hc.transverse if hc.variant == "DehnTwistConjugate" else None
    u_start = pts @ u if u is not None else None

    hulls, bases, ds, trans = [], [], [], []
    boundaries, clouds = {}, {}

    def record(n, x):
        h = convex_hull(x)
        hulls.append(h)
        bases.append(x[-1].copy())
        ds.append(diameter(h))
        if n % boundary_every == 0 or n == N:
            boundaries[n] = x[bidx].copy()
        if n in keep:
            clouds[n] = x.copy()
        if u is not None:
            w = x @ u - u_start
            trans.append((float(w.min()), float(w.max())))

    def series(n_last):
        return DomainImageSeries(m.label, grid_res, x0, n_last, hc, hulls, np.array(bases),
                                 np.array(ds), len(pts), boundaries, clouds,
                                 np.array(trans) if u is not None else None)

    x = pts
    record(0, x)
    for n in range(1, N + 1):
        x = m.forward(x)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > OVERFLOW:
            raise HorizonTooLarge(f"{m.label}: coordinates exceed {OVERFLOW:g} at n = {n}",
                                  n - 1, series(n - 1))
        record(n, x)
    return series(N)


def directional_width(s: DomainImageSeries, v, n: int) -> float:
    s.check_n(n)
    v = np.asarray(v, dtype=float)
    if abs(np.hypot(*v) - 1.0) > 1e-9:
        raise InvalidInput("v must be a unit vector")
    return s.hulls[n].width(v)


def quasiconvexity_report(s: DomainImageSeries, n: int, samples: int = 2048) -> tuple[float, float]:
    """(defect, slack) for hull_n against the sampled image.

    The image of D is a closed disk bounded by the image of the boundary of D,
    and a hull boundary point lying in the image lies on that boundary curve.
    So the distance from hull boundary points to the image is measured as the
    distance to the boundary polyline. The slack is half the spacing of the
    hull boundary samples (the distance function is 1-Lipschitz).
    """
    s.check_n(n)
    if n not in s.boundaries:
        raise InvalidInput(f"boundary of step {n} was not retained (retained every few steps)")
    hull = s.hulls[n]
    poly = s.boundaries[n]
    if hull.is_point:
        return 0.0, 0.0
    a, b = hull.edges()
    perim = float(np.hypot(*(b - a).T).sum()) / (2.0 if hull.is_segment else 1.0)
    spacing = max(perim / samples, 1e-12)
    probe = hull.boundary_samples(spacing, max_per_edge=samples)
    seg_a, seg_b = poly, np.roll(poly, -1, axis=0)
    dist = points_to_segments_distance(probe, seg_a, seg_b)
    return float(dist.max()), spacing / 2.0


def quasiconvexity_defect(s: DomainImageSeries, n: int) -> float:
    return quasiconvexity_report(s, n)[0]


def displacement_range(s: DomainImageSeries, n: int) -> tuple[float, float]:
    """[min, max] of the transverse displacement at step n (Dehn class)."""
    if s.transverse is None:
        raise ClassMismatch("transverse displacement is only tracked for the Dehn twist class")
    s.check_n(n)
    lo, hi = s.transverse[n]
    return float(lo), float(hi)


def dn_statistics(s: DomainImageSeries, tail: float = 0.5) -> dict:
    """Observed lim inf / lim sup proxies of d_n over the last ``tail`` of the horizon."""
    start = int(s.N * (1 - tail))
    d = s.d[start:]
    return {"d_min_tail": float(d.min()), "d_max_tail": float(d.max()),
            "d_last": float(s.d[-1]), "d_max": float(s.d.max()), "tail_start": start}
