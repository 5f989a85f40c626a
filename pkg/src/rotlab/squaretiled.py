"""Square-tiled surfaces and exact straight-line flow.

A surface with k unit squares is given by two permutations: right[i] is the
square glued to the right edge of square i, up[i] the one glued on top. Lines
are traced with rational arithmetic; a float slope is promoted to the exact
dyadic it denotes, so the coordinate carried across an edge never drifts.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .errors import CornerHit, InvalidInput, InvalidSlope
from .geometry import Direction, best_rational_direction

HALF = Fraction(1, 2)


def _check_perm(p, k, name):
    if sorted(p) != list(range(k)):
        raise InvalidInput(f"{name} is not a permutation of 0..{k - 1}")


@dataclass(frozen=True)
class SquareTiledSurface:
    k: int
    right: tuple
    up: tuple

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput("need at least one square")
        object.__setattr__(self, "right", tuple(int(i) for i in self.right))
        object.__setattr__(self, "up", tuple(int(i) for i in self.up))
        _check_perm(self.right, self.k, "right")
        _check_perm(self.up, self.k, "up")
        # connectivity of the graph generated by right and up
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for j in (self.right[i], self.up[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != self.k:
            raise InvalidInput("surface is not connected")

    @property
    def down(self) -> tuple:
        inv = [0] * self.k
        for i, j in enumerate(self.up):
            inv[j] = i
        return tuple(inv)

    @classmethod
    def from_json(cls, text_or_obj) -> "SquareTiledSurface":
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        try:
            return cls(int(obj["k"]), obj["right"], obj["up"])
        except KeyError as exc:
            raise InvalidInput(f"surface JSON lacks {exc}") from None

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "right": list(self.right), "up": list(self.up)})


def horizontal_curves(s: SquareTiledSurface) -> list:
    """Cycles of ``right``; cycle j is the horizontal core curve at height 1/2 through its squares."""
    seen, out = set(), []
    for i in range(s.k):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = s.right[j]
        out.append(cyc)
    return out


def _cycle_index(s: SquareTiledSurface) -> list:
    idx = [0] * s.k
    for c, cyc in enumerate(horizontal_curves(s)):
        for i in cyc:
            idx[i] = c
    return idx


@dataclass
class FlowTrace:
    start: tuple
    slope: Fraction
    length: float
    visited_horizontal_cycles: set = field(default_factory=set)
    crossings: list = field(default_factory=list)  # (length along the line, cycle id, square)
    end: Optional[tuple] = None
    edge_crossings: int = 0
    transitions: Optional[list] = None  # (edge, square, next square, kept coordinate, horizontal distance)


def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    f = float(v)
    if not math.isfinite(f):
        raise InvalidInput("non-finite value")
    return Fraction(f)


def trace_line(s: SquareTiledSurface, start, slope, length, record_transitions: bool = False,
               stop_when_all_visited: bool = False) -> FlowTrace:
    """Follow the line of the given slope in the +x direction for the given Euclidean length.

    ``start`` is (square, (x, y)) with x, y in [0, 1). Crossings of the core
    lines y = 1/2 are recorded with the cycle of ``right`` they belong to.
    Hitting a square corner before the end raises CornerHit with the partial
    trace.
    """
    sq, (x, y) = start
    sq = int(sq)
    if not 0 <= sq < s.k:
        raise InvalidInput(f"square {sq} out of range")
    xi = _exact(slope)
    if xi == 0:
        raise InvalidSlope("slope must be nonzero")
    x, y = _exact(x), _exact(y)
    if not (0 <= x < 1 and 0 <= y < 1):
        raise InvalidInput("start point must lie in [0, 1)^2")
    if length < 0:
        raise InvalidInput("length must be nonnegative")
    stretch = math.sqrt(1.0 + float(xi) ** 2)
    remaining = _exact(float(length) / stretch)  # horizontal extent still to cover
    cyc = _cycle_index(s)
    n_cycles = max(cyc) + 1
    down = s.down
    tr = FlowTrace((sq, (x, y)), xi, float(length), transitions=[] if record_transitions else None)
    travelled = Fraction(0)

    def cross(at):
        c = cyc[sq]
        tr.crossings.append((float(at) * stretch, c, sq))
        tr.visited_horizontal_cycles.add(c)

    if y == HALF:
        cross(travelled)
    while remaining > 0:
        if stop_when_all_visited and len(tr.visited_horizontal_cycles) == n_cycles:
            break
        to_right = 1 - x
        if xi > 0:
            to_edge = (1 - y) / xi
            if y < HALF:
                c_at = (HALF - y) / xi
                if c_at <= min(to_right, to_edge, remaining):
                    cross(travelled + c_at)
        else:
            if y == 0:
                to_edge = Fraction(0)
            else:
                to_edge = y / -xi
            if y > HALF:
                c_at = (y - HALF) / -xi
                if c_at <= min(to_right, to_edge, remaining):
                    cross(travelled + c_at)
        step = min(to_right, to_edge, remaining)
        if to_right == to_edge == step and step < remaining:
            tr.end = (sq, (x + step, y + xi * step))
            raise CornerHit(f"line hits a corner of square {sq} after length "
                            f"{float(travelled + step) * stretch:.6g}", tr)
        travelled += step
        remaining -= step
        if step == to_right and to_right < to_edge:
            nxt, y = s.right[sq], y + xi * step
            if tr.transitions is not None:
                tr.transitions.append(("right", sq, nxt, y, travelled))
            sq, x = nxt, Fraction(0)
            tr.edge_crossings += 1
        elif step == to_edge and to_edge < to_right:
            x = x + step
            if xi > 0:
                nxt, y, edge = s.up[sq], Fraction(0), "up"
            else:
                nxt, y, edge = down[sq], Fraction(1), "down"
            if tr.transitions is not None:
                tr.transitions.append((edge, sq, nxt, x, travelled))
            sq = nxt
            tr.edge_crossings += 1
        else:
            x, y = x + step, y + xi * step
    tr.end = (sq, (x, y))
    return tr


@dataclass
class CrossingLength:
    l_prime: float
    l_double: float
    corner_hits: int
    trials: int
    per_trial: list

    def __float__(self):
        return self.l_prime

    def to_dict(self):
        return {"l_prime": self.l_prime, "l_double": self.l_double, "corner_hits": self.corner_hits,
                "trials": self.trials}


def first_full_visit(s: SquareTiledSurface, start, slope, max_length: float = 1e4) -> float:
    """Length after which the line from ``start`` has met every horizontal core curve."""
    tr = trace_line(s, start, slope, max_length, stop_when_all_visited=True)
    need = len(horizontal_curves(s))
    seen = set()
    for at, c, _ in tr.crossings:
        seen.add(c)
        if len(seen) == need:
            return at
    return math.inf


def min_crossing_length(s: SquareTiledSurface, slope, trials: int = 64, seed: int = 0,
                        max_length: float = 1e4, max_resample: int = 1000) -> CrossingLength:
    """Largest first-full-visit length over random starts, an empirical lower bound for L'.

    The set of visited curves only grows with the length, so the minimal length
    visiting all of them is the length of the last first visit; no bisection is
    needed. Starts are a scrambled Halton sequence: well spread in height, and
    the first ``trials`` points do not depend on how many are drawn, so more
    trials never lower the max. Starts hitting a corner are resampled and counted.
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    xi = float(slope)
    if xi == 0 or not math.isfinite(xi):
        raise InvalidSlope("slope must be finite and nonzero")
    near = best_rational_direction(Direction.from_slope(xi), 100)
    if near.error < 1e-6:
        warnings.warn(f"slope {xi} is within {near.error:.2g} rad of the rational direction "
                      f"({near.p}, {near.q}); crossing lengths may be unbounded", RuntimeWarning)
    u = qmc.Halton(d=3, seed=seed).random(trials)
    rng = np.random.default_rng(seed + 1)
    hits, lengths = 0, []
    for row in u:
        sq, x, y = min(int(row[0] * s.k), s.k - 1), row[1], row[2]
        for _ in range(max_resample):
            try:
                lengths.append(first_full_visit(s, (sq, (x, y)), xi, max_length))
                break
            except CornerHit:
                hits += 1
                sq, x, y = int(rng.integers(s.k)), rng.random(), rng.random()
        else:
            raise InvalidInput("too many corner hits; slope is probably rational")
    lp = max(lengths)
    return CrossingLength(lp, 2 * lp, hits, trials, lengths)
