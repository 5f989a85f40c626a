"""Planar geometry: hulls, diameters, Hausdorff distances and line directions.

Orientation tests are exact: a floating-point evaluation is trusted only when
it clears a forward error bound, otherwise the determinant is recomputed in
rational arithmetic. Everything else is plain double precision.

Directions are points of the projective line, stored as an angle in
``[0, pi)``; all angular tolerances in this package are in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidInput

_EPS = 2.0**-53
# forward error bound for the 2x2 orientation determinant
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


def orient(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the turn a -> b -> c: +1 counterclockwise, -1 clockwise, 0 collinear."""
    detl = (bx - ax) * (cy - ay)
    detr = (by - ay) * (cx - ax)
    det = detl - detr
    bound = _CCW_ERRBOUND * (abs(detl) + abs(detr))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    # doubles are dyadic rationals: scale to a common power of two and use ints
    ratios = [float(c).as_integer_ratio() for c in (ax, ay, bx, by, cx, cy)]
    den = max(r[1] for r in ratios)
    ax, ay, bx, by, cx, cy = [n * (den // d) for n, d in ratios]
    exact = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (exact > 0) - (exact < 0)


@dataclass(frozen=True)
class Direction:
    """A line direction through the origin, i.e. a point of the projective line."""

    angle: float

    def __post_init__(self):
        a = math.fmod(float(self.angle), math.pi)
        if a < 0.0:
            a += math.pi
        if a >= math.pi:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @classmethod
    def from_vector(cls, dx, dy) -> "Direction":
        if dx == 0 and dy == 0:
            raise InvalidInput("zero vector has no direction")
        return cls(math.atan2(dy, dx))

    @classmethod
    def from_slope(cls, slope) -> "Direction":
        return cls(math.atan(slope))

    @property
    def unit(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    @property
    def normal(self) -> np.ndarray:
        return np.array([-math.sin(self.angle), math.cos(self.angle)])

    @property
    def slope(self) -> float:
        c = math.cos(self.angle)
        return math.inf if c == 0.0 else math.tan(self.angle)

    def rotated(self, theta) -> "Direction":
        return Direction(self.angle + theta)


@dataclass(frozen=True)
class RationalDirection:
    """Direction of the integer vector (p, q), with the angular error it was matched at."""

    p: int
    q: int
    error: float = 0.0

    def __post_init__(self):
        if (self.p, self.q) == (0, 0):
            raise InvalidInput("(0, 0) is not a direction")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidInput(f"({self.p}, {self.q}) is not primitive")
        if self.error < 0:
            raise InvalidInput("error must be nonnegative")

    @property
    def direction(self) -> Direction:
        return Direction.from_vector(self.p, self.q)

    def same_line(self, other: "RationalDirection") -> bool:
        return self.p * other.q - self.q * other.p == 0

    def to_dict(self):
        return {"p": self.p, "q": self.q, "error": self.error}


def canonical_pair(p: int, q: int) -> tuple[int, int]:
    """Sign-normalize a primitive vector so that q > 0, or q == 0 and p > 0."""
    if q < 0 or (q == 0 and p < 0):
        return -p, -q
    return p, q


def primitive_vectors(q_max: int) -> list[tuple[int, int]]:
    """All primitive integer directions with |p|, |q| <= q_max, one per line, sorted by height."""
    out = set()
    for p in range(-q_max, q_max + 1):
        for q in range(-q_max, q_max + 1):
            if (p, q) != (0, 0) and math.gcd(p, q) == 1:
                out.add(canonical_pair(p, q))
    return sorted(out, key=lambda pq: (max(abs(pq[0]), abs(pq[1])), abs(pq[0]) + abs(pq[1]), pq))


class ConvexPolygon:
    """Strictly convex polygon with counterclockwise vertices.

    A single vertex is a point and two vertices a segment; both are valid
    values, since rotation sets and limit shapes are frequently degenerate.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(v) == 0:
            raise InvalidInput("a polygon needs at least one vertex")
        v.setflags(write=False)
        self.vertices = v

    def __repr__(self):
        return f"ConvexPolygon({self.vertices.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    __hash__ = None

    def __len__(self):
        return len(self.vertices)

    @property
    def is_point(self) -> bool:
        return len(self.vertices) == 1

    @property
    def is_segment(self) -> bool:
        return len(self.vertices) == 2

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def edges(self):
        """(start, end) arrays of the boundary edges; a segment yields both orientations."""
        v = self.vertices
        if len(v) == 1:
            return v, v
        return v, np.roll(v, -1, axis=0)

    def support(self, u) -> float:
        return float(np.max(self.vertices @ np.asarray(u, dtype=float)))

    def width(self, u) -> float:
        proj = self.vertices @ np.asarray(u, dtype=float)
        return float(proj.max() - proj.min())

    def translate(self, v) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(v, dtype=float))

    def scale(self, s) -> "ConvexPolygon":
        if s <= 0:
            raise InvalidInput("scale factor must be positive")
        return ConvexPolygon(self.vertices * float(s))

    def contains(self, points, tol=0.0) -> np.ndarray:
        """Boolean mask of points lying in the closed polygon thickened by ``tol``."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return points_to_convex_distance(pts, self) <= tol

    def boundary_samples(self, spacing, max_per_edge=256) -> np.ndarray:
        """Points along the boundary, at most ``spacing`` apart unless capped per edge."""
        v = self.vertices
        if len(v) == 1:
            return v.copy()
        a, b = (v[:1], v[1:]) if len(v) == 2 else self.edges()
        out = []
        for p, r in zip(a, b):
            length = float(np.hypot(*(r - p)))
            k = int(min(max_per_edge, max(1, math.ceil(length / spacing))))
            t = np.arange(k)[:, None] / k
            out.append(p + t * (r - p))
        if len(v) == 2:
            out.append(v[1:])
        return np.concatenate(out)

    def to_list(self):
        return self.vertices.tolist()


def _as_points(points) -> np.ndarray:
    if isinstance(points, ConvexPolygon):
        return points.vertices
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise InvalidInput("empty point set")
    pts = pts.reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise InvalidInput("non-finite coordinates")
    return pts


def _monotone_chain(pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain on lexicographically sorted, distinct points."""
    if len(pts) <= 2:
        return list(pts)

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and orient(*chain[-2], *chain[-1], *p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull


def _prune_interior(pts: np.ndarray, n_dirs: int) -> np.ndarray:
    """Drop points certified strictly inside the hull of directional extremes.

    The certificate uses the same forward error bound as ``orient``, so only
    points that cannot be hull vertices are removed.
    """
    ang = np.arange(n_dirs) * (2.0 * math.pi / n_dirs)
    dirs = np.stack([np.cos(ang), np.sin(ang)])
    # spread the probe directions evenly in the whitened frame so that long
    # thin clouds still get a fat probe polygon; extremality is affine invariant
    evals, evecs = np.linalg.eigh(np.cov(pts.T))
    if not evals[0] > 0.0:
        return pts
    dirs = evecs @ (dirs / np.sqrt(evals)[:, None])
    idx = np.unique(np.argmax(pts @ dirs, axis=0))
    ext = np.unique(pts[idx], axis=0)
    poly = _monotone_chain([tuple(p) for p in ext.tolist()])
    if len(poly) < 3:
        return pts
    a = np.array(poly)
    e = np.roll(a, -1, axis=0) - a
    keep = np.zeros(len(pts), dtype=bool)
    for (ax, ay), (ex, ey) in zip(a, e):
        detl = ex * (pts[:, 1] - ay)
        detr = ey * (pts[:, 0] - ax)
        det = detl - detr
        keep |= det <= _CCW_ERRBOUND * (np.abs(detl) + np.abs(detr))
    return pts[keep]


def _certified_left(ax, ay, bx, by, px, py) -> np.ndarray:
    """Vectorized orient(a, b, p) > 0, true only where the float sign is certain."""
    detl = (bx - ax) * (py - ay)
    detr = (by - ay) * (px - ax)
    det = detl - detr
    return det > _CCW_ERRBOUND * (np.abs(detl) + np.abs(detr))


def _prune_qhull(pts: np.ndarray) -> np.ndarray:
    """Drop points certified strictly inside a Qhull probe polygon.

    Qhull only proposes the polygon. A point is dropped when float tests with
    a forward error bound certify that it lies strictly inside the wedge from
    an interior center between two consecutive probe vertices and strictly
    left of the edge joining them; everything else goes to the exact chain.
    """
    from scipy.spatial import ConvexHull, QhullError

    try:
        poly = pts[ConvexHull(pts).vertices]  # counterclockwise in 2-d
    except (QhullError, ValueError):
        return pts
    if len(poly) < 3:
        return pts
    c = poly.mean(axis=0)
    ang = np.arctan2(poly[:, 1] - c[1], poly[:, 0] - c[0])
    r = int(np.argmin(ang))
    poly, ang = np.roll(poly, -r, axis=0), np.roll(ang, -r)
    if np.any(np.diff(ang) <= 0):
        return pts
    k = len(poly)
    i = (np.searchsorted(ang, np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]), side="right") - 1) % k
    a, b = poly[i], poly[(i + 1) % k]
    px, py = pts[:, 0], pts[:, 1]
    inside = (_certified_left(c[0], c[1], a[:, 0], a[:, 1], px, py)
              & _certified_left(px, py, b[:, 0], b[:, 1], c[0], c[1])
              & _certified_left(a[:, 0], a[:, 1], b[:, 0], b[:, 1], px, py))
    return pts[~inside]


def convex_hull(points) -> ConvexPolygon:
    """Convex hull of a finite planar point set (exact orientation predicates)."""
    pts = _as_points(points)
    if len(pts) > 256:
        pts = _prune_qhull(pts)
    if len(pts) > 256:
        pts = _prune_interior(pts, 8)
    if len(pts) > 256:
        pts = _prune_interior(pts, 64)
    uniq = np.unique(pts, axis=0)
    hull = _monotone_chain([tuple(p) for p in uniq.tolist()])
    return ConvexPolygon(hull)


def diameter_pair(points) -> tuple[np.ndarray, np.ndarray, float]:
    """Endpoints and length of a diameter, found by rotating calipers on the hull."""
    hull = points if isinstance(points, ConvexPolygon) else convex_hull(points)
    v = hull.vertices
    n = len(v)
    if n == 1:
        return v[0], v[0], 0.0
    if n <= 64:
        return _diameter_allpairs(v)
    # Antipodal pairs: vertex k supports the outward normals between those of
    # edges k-1 and k. Sweeping all normal breakpoints and their opposites
    # visits every antipodal pair, and the diameter is one of them.
    e = np.roll(v, -1, axis=0) - v
    phi = np.arctan2(e[:, 1], e[:, 0]) - math.pi / 2
    two_pi = 2 * math.pi
    psi = phi[0] + np.mod(phi - phi[0], two_pi)
    if np.any(np.diff(psi) < 0):
        return _diameter_allpairs(v)
    brk = np.sort(np.concatenate([psi, phi[0] + np.mod(psi + math.pi - phi[0], two_pi)]))
    mid = (brk + np.append(brk[1:], brk[0] + two_pi)) / 2

    def support(theta):
        t = phi[0] + np.mod(theta - phi[0], two_pi)
        return np.searchsorted(psi, t) % n

    i, j = support(mid), support(mid + math.pi)
    # neighbours absorb angle rounding near breakpoints
    off = np.array([-1, 0, 1])
    I = ((i[:, None, None] + off[None, :, None]) % n).ravel()
    J = ((j[:, None, None] + off[None, None, :]) % n).ravel()
    d = np.hypot(*(v[I] - v[J]).T)
    k = int(np.argmax(d))
    return v[I[k]], v[J[k]], float(d[k])


def _diameter_allpairs(v):
    d = np.hypot(*(v[:, None, :] - v[None, :, :]).transpose(2, 0, 1))
    i, j = np.unravel_index(np.argmax(d), d.shape)
    return v[i], v[j], float(d[i, j])


def diameter(points) -> float:
    """Largest pairwise distance of a nonempty point set or polygon."""
    return diameter_pair(points)[2]


def points_to_segments_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest of the segments [a_i, b_i]."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    best = np.full(len(pts), np.inf)
    chunk = max(1, 2_000_000 // max(1, len(a)))
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd_safe = np.where(dd > 0, dd, 1.0)
    for s in range(0, len(pts), chunk):
        p = pts[s:s + chunk, None, :] - a[None, :, :]
        t = np.clip(np.einsum("pij,ij->pi", p, d) / dd_safe, 0.0, 1.0)
        t = np.where(dd > 0, t, 0.0)
        r = p - t[..., None] * d[None, :, :]
        best[s:s + chunk] = np.sqrt(np.einsum("pij,pij->pi", r, r)).min(axis=1)
    return best


def points_to_convex_distance(pts, poly: ConvexPolygon) -> np.ndarray:
    """Distance from points to the closed filled polygon (0 inside)."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    v = poly.vertices
    if len(v) == 1:
        return np.hypot(*(pts - v[0]).T)
    a, b = poly.edges()
    dist = points_to_segments_distance(pts, a, b)
    if len(v) >= 3:
        e = b - a
        cross = e[None, :, 0] * (pts[:, None, 1] - a[None, :, 1]) - e[None, :, 1] * (pts[:, None, 0] - a[None, :, 0])
        dist = np.where((cross >= 0).all(axis=1), 0.0, dist)
    return dist


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between point sets and/or filled convex polygons.

    Two finite point sets are compared as finite sets. When a polygon is
    involved it is treated as a filled convex set, and a point set on the
    other side is replaced by its convex hull.
    """
    a_poly = isinstance(a, ConvexPolygon)
    b_poly = isinstance(b, ConvexPolygon)
    if not a_poly and not b_poly:
        pa, pb = _as_points(a), _as_points(b)
        da = cKDTree(pb).query(pa)[0].max()
        db = cKDTree(pa).query(pb)[0].max()
        return float(max(da, db))
    pa = a if a_poly else convex_hull(a)
    pb = b if b_poly else convex_hull(b)
    # the farthest point of a convex set from another convex set is a vertex
    da = points_to_convex_distance(pa.vertices, pb).max()
    db = points_to_convex_distance(pb.vertices, pa).max()
    return float(max(da, db))


def projective_distance(a: Direction, b: Direction) -> float:
    """Angular metric on line directions, with values in [0, pi/2]."""
    d = abs(a.angle - b.angle)
    return min(d, math.pi - d)


def _farey_neighbours(t: Fraction, n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two fractions of denominator <= n adjacent to t in the Farey sequence of order n."""
    if t.denominator <= n:
        pair = (t.numerator, t.denominator)
        return pair, pair
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = t.numerator, t.denominator
    while True:
        a = num // den
        q2 = q0 + a * q1
        if q2 > n:
            break
        p0, q0, p1, q1 = p1, q1, p0 + a * p1, q2
        num, den = den, num - a * den
    k = (n - q0) // q1
    return (p0 + k * p1, q0 + k * q1), (p1, q1)


def best_rational_direction(d: Direction, q_max: int) -> RationalDirection:
    """Closest direction of a primitive (p, q) with |p|, |q| <= q_max.

    The angle is folded into the first octant, where the constraint becomes
    a bound on the denominator of the slope; the optimum is then one of the
    two Farey neighbours of the slope, found by a Stern-Brocot descent.
    """
    if q_max < 1:
        raise InvalidInput("q_max must be >= 1")
    theta = d.angle
    mirror = theta > math.pi / 2
    if mirror:
        theta = math.pi - theta
    swap = theta > math.pi / 4
    if swap:
        theta = math.pi / 2 - theta
    t = Fraction(min(1.0, max(0.0, math.tan(theta))))
    best = None
    for num, den in _farey_neighbours(t, q_max):
        x, y = den, num
        if swap:
            x, y = y, x
        if mirror:
            x = -x
        p, q = canonical_pair(x, y)
        err = projective_distance(d, Direction.from_vector(p, q))
        if best is None or err < best[2]:
            best = (p, q, err)
    return RationalDirection(*best)


def min_width_direction(poly: ConvexPolygon) -> tuple[Direction, float]:
    """Edge direction along which the polygon is thinnest, and that width."""
    v = poly.vertices
    if len(v) == 1:
        return Direction(0.0), 0.0
    if len(v) == 2:
        return Direction.from_vector(*(v[1] - v[0])), 0.0
    a, b = poly.edges()
    e = b - a
    le = np.hypot(e[:, 0], e[:, 1])
    n = np.stack([-e[:, 1], e[:, 0]], axis=1) / le[:, None]
    h = (v @ n.T)  # (vertex, edge)
    widths = h.max(axis=0) - h.min(axis=0)
    k = int(np.argmin(widths))
    return Direction.from_vector(*e[k]), float(widths[k])


def chebyshev_center(poly: ConvexPolygon) -> tuple[np.ndarray, float]:
    """Center and radius of the largest disk inside the polygon."""
    from scipy.optimize import linprog

    v = poly.vertices
    if len(v) < 3:
        return poly.center, 0.0
    a, b = poly.edges()
    e = b - a
    le = np.hypot(e[:, 0], e[:, 1])
    # inward normal for a counterclockwise polygon is (-ey, ex)
    nin = np.stack([-e[:, 1], e[:, 0]], axis=1) / le[:, None]
    # n_in . x - r >= n_in . a   <=>   -n_in . x + r <= -n_in . a
    A = np.hstack([-nin, np.ones((len(v), 1))])
    rhs = -np.einsum("ij,ij->i", nin, a)
    res = linprog(c=[0, 0, -1], A_ub=A, b_ub=rhs, bounds=[(None, None)] * 2 + [(0, None)], method="highs")
    if not res.success:
        return poly.center, 0.0
    return np.array(res.x[:2]), float(res.x[2])
