from fractions import Fraction

import numpy as np
import pytest

from rotlab.errors import InvalidInput, NonInvariantLoop
from rotlab.finecurve import (IntersectionRecord, LoopClass, count_levels, distance_upper_bound, graph_orbit_bound,
                              intersection_count, loop_drift)
from rotlab.fixtures import builtin_map
from rotlab.lifts import FourierSeries, make_linear, make_shear_x, make_translation, make_twist

PHI = FourierSeries(0.25, [-0.25])
H, V = LoopClass(0, 1), LoopClass(1, 0)  # horizontal loop, vertical loop


def twist_count_oracle(n, alpha):
    """Exact count for make_twist(1, alpha) and the vertical loop.

    The lift t -> (0, -t) maps to first coordinate -n t + alpha n (n - 1) / 2,
    an interval of length n whose endpoints are integers iff c is.
    """
    c = Fraction(alpha) * n * (n - 1) / 2
    return n + (1 if c.denominator == 1 else 0)


def test_loop_class():
    assert np.array_equal(LoopClass(2, 3).tangent, [3, -2])
    assert np.array_equal(LoopClass(2, 3).covector, [2, 3])
    for bad in ((0, 0), (2, 4)):
        with pytest.raises(InvalidInput):
            LoopClass(*bad)


def test_identity_count_one():
    r = intersection_count(make_translation((0, 0)), 5, H)
    assert r.count == 1 and r.periodic and r.s_min == r.s_max == 0.0


def test_translation_counts_zero_or_one():
    m = make_translation((0.5, np.sqrt(2) - 1))
    ob = graph_orbit_bound(m, H, 120)
    assert all(r.count in (0, 1) for r in ob.records)
    assert ob.sup_bound <= 2 and ob.bounded_flag


def test_count_levels():
    assert count_levels(0.2, 0.8) == 0
    assert count_levels(-0.5, 2.5) == 3
    assert count_levels(0.0, 0.0) == 1
    # grazing within 1e-9 counts
    assert count_levels(0.1, 1 - 5e-10) == 1
    assert count_levels(0.1, 1 - 1e-6) == 0


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 7, 16, 40])
def test_twist_count_matches_closed_form(n):
    r = intersection_count(make_twist(1, 0.3), n, V)
    assert r.count == twist_count_oracle(n, Fraction(3, 10))
    r0 = intersection_count(make_twist(1, 0.0), n, V)
    assert r0.count == n + 1


def test_twist_orbit_oracle_all_n():
    ob = graph_orbit_bound(make_twist(1, 0.3), V, 100)
    assert [r.count for r in ob.records] == [twist_count_oracle(n, Fraction(3, 10)) for n in range(101)]
    assert not ob.bounded_flag and ob.verdict.kind == "Unbounded"


def test_distance_upper_bound():
    mk = lambda c: IntersectionRecord(0, c, 0.0, 0.0, True)
    assert [distance_upper_bound(mk(c)) for c in (0, 1, 7)] == [1, 2, 8]


def test_shear_horizontal_loop_bounded():
    ob = graph_orbit_bound(make_shear_x(PHI), H, 100)
    assert ob.sup_bound <= 2 and ob.bounded_flag


def test_shear_vertical_loop_grows():
    ob = graph_orbit_bound(make_shear_x(PHI), V, 100)
    # s(t) = n phi(-t) sweeps [0, n/2]
    assert ob.records[100].count >= 50 and not ob.bounded_flag


def test_drift_and_noninvariant_loop():
    assert loop_drift([[1, 1], [0, 1]], V, 3) == -3
    assert loop_drift([[1, 1], [0, 1]], H, 3) == 0
    A = make_linear([[2, 1], [1, 1]])
    with pytest.raises(NonInvariantLoop) as ei:
        intersection_count(A, 1, H, require_invariant=True)
    assert ei.value.drift == loop_drift([[2, 1], [1, 1]], H, 1)
    r = intersection_count(A, 1, H)
    assert not r.periodic
    with pytest.raises(NonInvariantLoop):
        graph_orbit_bound(make_twist(1, 0.3), V, 5, require_invariant=True)
    # the invariant loop of a twist passes
    graph_orbit_bound(make_twist(1, 0.3), H, 5, require_invariant=True)


@pytest.mark.parametrize("name", ["shear", "interior", "translation"])
def test_offset_invariance(name):
    m = builtin_map(name)
    for loop in (H, V, LoopClass(1, 1)):
        for n in (1, 5, 20):
            a = intersection_count(m, n, loop)
            b = intersection_count(m, n, loop, offset=(1.0, 0.0))
            assert a.count == b.count


@pytest.mark.parametrize("name", ["shear", "interior", "translation", "twist"])
def test_refinement_stability(name):
    m = builtin_map(name)
    loop = H
    changed = 0
    for n in range(101):
        a = intersection_count(m, n, loop, samples=256)
        b = intersection_count(m, n, loop, samples=512)
        changed += a.count != b.count
    assert changed <= 1  # at most 1% of n <= 100


def test_refinement_never_lowers_count():
    m = builtin_map("interior")
    for n in (3, 10, 30):
        raw = intersection_count(m, n, V, samples=64, refine=False)
        ref = intersection_count(m, n, V, samples=64, refine=True)
        assert ref.s_min <= raw.s_min and ref.s_max >= raw.s_max and ref.count >= raw.count


def test_orbit_bound_rows_and_dict():
    ob = graph_orbit_bound(make_twist(1, 0.0), V, 10)
    assert ob.rows()[10] == (10, 11, 12)
    sup, flag = ob
    d = ob.to_dict()
    assert d["sup_bound"] == sup == 12 and d["bounded_flag"] == flag and d["counts"][:3] == [1, 2, 3]
