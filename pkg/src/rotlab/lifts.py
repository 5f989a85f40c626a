"""Lifts of torus homeomorphisms to the plane.

A lift is stored as a vectorized evaluator on arrays of shape (..., 2). The
homotopy matrix A is the linear part: f(x + v) = f(x) + A v for integer v.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInput, NotALift

log = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


class FourierSeries:
    """Real trigonometric polynomial of period 1: const + sum a_j cos(2 pi j t) + b_j sin(2 pi j t)."""

    def __init__(self, const=0.0, cos: Sequence[float] = (), sin: Sequence[float] = ()):
        self.const = float(const)
        self.cos = tuple(float(a) for a in cos)
        self.sin = tuple(float(b) for b in sin)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.const)
        for j, a in enumerate(self.cos, start=1):
            if a:
                out = out + a * np.cos(2 * np.pi * j * t)
        for j, b in enumerate(self.sin, start=1):
            if b:
                out = out + b * np.sin(2 * np.pi * j * t)
        return out

    def bounds(self, samples=4096) -> tuple[float, float]:
        v = self(np.arange(samples) / samples)
        return float(v.min()), float(v.max())

    def __repr__(self):
        return f"FourierSeries(const={self.const}, cos={list(self.cos)}, sin={list(self.sin)})"


@dataclass
class LiftMap:
    forward: Evaluator
    inverse: Optional[Evaluator] = None
    homotopy_matrix: Optional[np.ndarray] = None
    label: str = "lift"

    def __post_init__(self):
        if self.homotopy_matrix is not None:
            A = np.array(self.homotopy_matrix, dtype=np.int64).reshape(2, 2)
            if abs(round(np.linalg.det(A))) != 1:
                raise InvalidInput(f"homotopy matrix must have det +-1, got {A.tolist()}")
            self.homotopy_matrix = A

    def __call__(self, pts) -> np.ndarray:
        return self.forward(np.asarray(pts, dtype=float))

    def inv(self, pts) -> np.ndarray:
        if self.inverse is None:
            raise InvalidInput(f"{self.label} has no inverse")
        return self.inverse(np.asarray(pts, dtype=float))

    def iterate(self, pts, n: int) -> np.ndarray:
        x = np.asarray(pts, dtype=float)
        for _ in range(n):
            x = self.forward(x)
        return x


@dataclass(frozen=True)
class HomotopyClass:
    variant: str  # Identity | DehnTwistConjugate | Anosov | Other
    matrix: np.ndarray = field(compare=False)
    k: Optional[int] = None
    conjugator: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def transverse(self) -> np.ndarray:
        """Covector measuring displacement across the invariant direction (Dehn class)."""
        if self.conjugator is None:
            raise InvalidInput("only defined for the Dehn twist class")
        P = self.conjugator
        # second row of P^-1 for det P = 1
        return np.array([-P[1, 0], P[0, 0]], dtype=float)

    @property
    def invariant(self) -> Optional[tuple[int, int]]:
        if self.conjugator is None:
            return None
        return int(self.conjugator[0, 0]), int(self.conjugator[1, 0])

    def to_dict(self):
        d = {"variant": self.variant, "matrix": np.asarray(self.matrix).tolist()}
        if self.k is not None:
            d["k"] = self.k
            d["conjugator"] = np.asarray(self.conjugator).tolist()
        return d


def _periodic_check(phi, name):
    t = np.array([0.0, 0.137, 0.5, 0.731])
    a, b = np.asarray(phi(t), dtype=float), np.asarray(phi(t + 1.0), dtype=float)
    if a.shape != t.shape or not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} must map arrays to finite arrays of the same shape")
    if np.max(np.abs(a - b)) > 1e-9:
        raise InvalidInput(f"{name} is not 1-periodic (phi(0) = {a[0]}, phi(1) = {b[0]})")


def _wrap(fn):
    def ev(p):
        p = np.asarray(p, dtype=float)
        return fn(p[..., 0], p[..., 1])
    return ev


def make_translation(rho) -> LiftMap:
    r = np.asarray(rho, dtype=float).reshape(2)
    if not np.all(np.isfinite(r)):
        raise InvalidInput("translation vector must be finite")
    return LiftMap(lambda p: np.asarray(p, dtype=float) + r,
                   lambda p: np.asarray(p, dtype=float) - r,
                   np.eye(2, dtype=np.int64), f"translation({r[0]:.6g},{r[1]:.6g})")


def make_shear_x(phi) -> LiftMap:
    """(x, y) -> (x + phi(y), y)."""
    _periodic_check(phi, "phi")
    fwd = _wrap(lambda x, y: np.stack([x + phi(y), y], axis=-1))
    inv = _wrap(lambda x, y: np.stack([x - phi(y), y], axis=-1))
    return LiftMap(fwd, inv, np.eye(2, dtype=np.int64), "shear_x")


def make_shear_y(phi) -> LiftMap:
    """(x, y) -> (x, y + phi(x))."""
    _periodic_check(phi, "phi")
    fwd = _wrap(lambda x, y: np.stack([x, y + phi(x)], axis=-1))
    inv = _wrap(lambda x, y: np.stack([x, y - phi(x)], axis=-1))
    return LiftMap(fwd, inv, np.eye(2, dtype=np.int64), "shear_y")


def make_twist(k: int, alpha: float, psi=None) -> LiftMap:
    """(x, y) -> (x + k y + psi(y), y + alpha), homotopic to [[1, k], [0, 1]]."""
    if int(k) != k:
        raise InvalidInput("k must be an integer")
    k = int(k)
    if k == 0:
        raise InvalidInput("k = 0 is not a twist; use make_shear_x")
    if psi is None:
        psi = lambda t: np.zeros_like(t)
    else:
        _periodic_check(psi, "psi")
    alpha = float(alpha)

    def fwd(x, y):
        return np.stack([x + k * y + psi(y), y + alpha], axis=-1)

    def inv(x, y):
        y0 = y - alpha
        return np.stack([x - k * y0 - psi(y0), y0], axis=-1)

    return LiftMap(_wrap(fwd), _wrap(inv), np.array([[1, k], [0, 1]], dtype=np.int64),
                   f"twist(k={k},alpha={alpha:.6g})")


def make_linear(A) -> LiftMap:
    M = np.asarray(A)
    if M.shape != (2, 2) or not np.all(M == np.round(M)):
        raise InvalidInput("A must be a 2x2 integer matrix")
    M = M.astype(np.int64)
    det = int(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if abs(det) != 1:
        raise InvalidInput(f"|det A| must be 1, got {det}")
    Minv = det * np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=np.int64)
    Mf, Mif = M.astype(float), Minv.astype(float)
    return LiftMap(lambda p: np.asarray(p, dtype=float) @ Mf.T,
                   lambda p: np.asarray(p, dtype=float) @ Mif.T,
                   M, f"linear({M.tolist()})")


def compose(*maps: LiftMap) -> LiftMap:
    """compose(f, g, h) = f o g o h, i.e. the rightmost map is applied first."""
    if not maps:
        raise InvalidInput("nothing to compose")
    seq = list(maps)

    def fwd(p):
        for m in reversed(seq):
            p = m.forward(p)
        return p

    inv = None
    if all(m.inverse is not None for m in seq):
        def inv(p):
            for m in seq:
                p = m.inverse(p)
            return p

    A = None
    if all(m.homotopy_matrix is not None for m in seq):
        A = np.eye(2, dtype=np.int64)
        for m in seq:
            A = A @ m.homotopy_matrix
    return LiftMap(fwd, inv, A, " o ".join(m.label for m in seq))


def shift_lift(m: LiftMap, v) -> LiftMap:
    """The other lift f + v of the same torus map (v integer)."""
    w = np.asarray(v, dtype=float).reshape(2)
    if not np.all(w == np.round(w)):
        raise InvalidInput("lift shifts must be integer vectors")
    inv = None
    if m.inverse is not None:
        inv = lambda p: m.inverse(np.asarray(p, dtype=float) - w)
    return LiftMap(lambda p: m.forward(p) + w, inv, m.homotopy_matrix,
                   f"{m.label}+({int(w[0])},{int(w[1])})")


def power(m: LiftMap, k: int) -> LiftMap:
    """k-th iterate as a single lift (k >= 1)."""
    if k < 1:
        raise InvalidInput("power must be >= 1")
    return compose(*([m] * k))


def equivariance_residual(m: LiftMap, A=None, samples=1000, seed=0,
                          shifts=((1, 0), (0, 1), (2, -3))) -> float:
    """max |f(x + v) - f(x) - A v| over random x in [-2, 2]^2 and the given shifts."""
    if A is None:
        A = m.homotopy_matrix if m.homotopy_matrix is not None else detect_homotopy_class(m).matrix
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2, 2, size=(samples, 2))
    fx = m(x)
    worst = 0.0
    for v in shifts:
        v = np.asarray(v, dtype=float)
        r = m(x + v) - fx - np.asarray(A, dtype=float) @ v
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, s, t = _ext_gcd(b, a % b)
    return g, t, s - (a // b) * t


def _dehn_normal_form(A: np.ndarray) -> tuple[int, np.ndarray]:
    """k and P (det 1) with P^-1 A P = [[1, k], [0, 1]]."""
    N = A - np.eye(2, dtype=np.int64)
    row = N[0] if np.any(N[0]) else N[1]
    a1, a2 = -int(row[1]), int(row[0])
    g = math.gcd(a1, a2)
    a1, a2 = a1 // g, a2 // g
    if a1 < 0 or (a1 == 0 and a2 < 0):
        a1, a2 = -a1, -a2
    _, s, t = _ext_gcd(a1, a2)  # s a1 + t a2 = 1
    P = np.array([[a1, -t], [a2, s]], dtype=np.int64)
    Pinv = np.array([[s, t], [-a2, a1]], dtype=np.int64)
    J = Pinv @ A @ P
    assert J[0, 0] == 1 and J[1, 0] == 0 and J[1, 1] == 1, J
    return int(J[0, 1]), P


def classify_matrix(A) -> HomotopyClass:
    A = np.asarray(A, dtype=np.int64).reshape(2, 2)
    det = int(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    tr = int(A[0, 0] + A[1, 1])
    if np.array_equal(A, np.eye(2, dtype=np.int64)):
        return HomotopyClass("Identity", A)
    if det == 1 and tr == 2:
        k, P = _dehn_normal_form(A)
        return HomotopyClass("DehnTwistConjugate", A, k, P)
    if np.max(np.abs(np.linalg.eigvals(A.astype(float)))) > 1 + 1e-12:
        return HomotopyClass("Anosov", A)
    return HomotopyClass("Other", A)


def detect_homotopy_class(m: LiftMap, tol=1e-6) -> HomotopyClass:
    """Read A from f(e_i) - f(0) and classify it."""
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    img = m(pts)
    cols = np.stack([img[1] - img[0], img[2] - img[0]], axis=1)
    A = np.round(cols)
    resid = float(np.max(np.abs(cols - A)))
    if resid > tol or not np.all(np.isfinite(cols)):
        raise NotALift(f"{m.label}: rounding residue {resid:.3g} of the homotopy matrix exceeds {tol:g}")
    A = A.astype(np.int64)
    det = int(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    if abs(det) != 1:
        raise NotALift(f"{m.label}: detected matrix {A.tolist()} has det {det}")
    if m.homotopy_matrix is not None and not np.array_equal(A, m.homotopy_matrix):
        raise NotALift(f"{m.label}: detected {A.tolist()} but declared {m.homotopy_matrix.tolist()}")
    return classify_matrix(A)


def _grid(grid_res: int) -> np.ndarray:
    t = np.arange(grid_res + 1) / grid_res  # nested under doubling
    X, Y = np.meshgrid(t, t, indexing="xy")
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def displacement_constant(m: LiftMap, grid_res: int = 256) -> tuple[float, bool]:
    """(K_f, two_sided): twice the sup displacement of f and f^-1, after removing A x.

    The displacement is periodic, so the sup over the plane is a sup over D.
    Without an inverse only the forward half is measured and two_sided is False.
    """
    A = detect_homotopy_class(m).matrix.astype(float)
    x = _grid(grid_res)
    disp = np.hypot(*(m(x) - x @ A.T).T).max()
    two_sided = m.inverse is not None
    if two_sided:
        Ainv = np.linalg.inv(A)
        disp = max(disp, np.hypot(*(m.inv(x) - x @ Ainv.T).T).max())
    return 2.0 * float(disp), two_sided


def estimate_K_f(m: LiftMap, grid_res: int = 256) -> float:
    K, two_sided = displacement_constant(m, grid_res)
    if not two_sided:
        log.warning("%s: no inverse, K_f is a one-sided estimate", m.label)
    return K
