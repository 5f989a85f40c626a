import math

import numpy as np
import pytest

from rotlab.errors import ClassMismatch, HorizonTooLarge, InvalidInput
from rotlab.fixtures import builtin_map
from rotlab.geometry import convex_hull, diameter, hausdorff_distance
from rotlab.lifts import estimate_K_f, make_linear, make_translation, shift_lift
from rotlab.orbit import (boundary_indices, directional_width, displacement_range, dn_statistics, domain_grid,
                          iterate_domain, quasiconvexity_report)

SQ = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def test_grid_and_boundary():
    g = domain_grid(8)
    assert g.shape == (81, 2) and g.min() == 0 and g.max() == 1
    b = g[boundary_indices(8)]
    assert len(b) == 32 and len({tuple(p) for p in b}) == 32
    assert np.all(np.any((b == 0) | (b == 1), axis=1))
    # counterclockwise: positive shoelace area equal to the square's
    area = 0.5 * np.sum(b[:, 0] * np.roll(b[:, 1], -1) - np.roll(b[:, 0], -1) * b[:, 1])
    assert area == pytest.approx(1.0)
    # nested lattices
    assert {tuple(p) for p in domain_grid(8)} <= {tuple(p) for p in domain_grid(16)}


def test_preconditions():
    m = make_translation((0.1, 0.2))
    with pytest.raises(InvalidInput):
        iterate_domain(m, 4, 10)
    with pytest.raises(InvalidInput):
        iterate_domain(m, 8, 10, x0=(0.0, 0.5))


def test_translation_series(get_series):
    s = get_series("translation", 128, 512)
    assert np.allclose(s.d, math.sqrt(2))
    for n in (0, 1, 17, 512):
        expect = convex_hull(SQ + n * np.array([0.5, 1 / 3]))
        assert hausdorff_distance(s.hulls[n], expect) <= 1e-9
    assert directional_width(s, (0, 1), 300) == pytest.approx(1.0)
    assert np.allclose(s.bases[-1], [0.5 + 256, 0.5 + 512 / 3])


def test_anosov_exact_image():
    A = np.array([[2, 1], [1, 1]])
    s = iterate_domain(make_linear(A), 16, 5)
    img = SQ @ np.linalg.matrix_power(A, 5).T
    assert hausdorff_distance(s.hulls[5], convex_hull(img)) <= 1e-9
    assert s.d[5] == pytest.approx(diameter(img), abs=1e-9)


def test_shear_closed_form(get_series):
    s = get_series("shear", 64, 100)
    for n in (1, 20, 100):
        # samples with phi(y) = 1/2 (y = 1/2) against y = 0, 1 where phi = 0
        assert directional_width(s, (1, 0), n) == pytest.approx(1 + n / 2, abs=0.05)
        assert directional_width(s, (0, 1), n) == pytest.approx(1.0)
        a, b = s.hulls[n].vertices[:, 0].min(), s.hulls[n].vertices[:, 0].max()
        assert b - a == pytest.approx(1 + n / 2, abs=1e-9)


def test_base_in_hull_and_d0(get_series):
    for name, g, N in (("shear", 64, 100), ("twist", 64, 60), ("interior", 64, 60)):
        s = get_series(name, g, N)
        assert s.d[0] == pytest.approx(math.sqrt(2))
        for n in range(0, N + 1, 7):
            assert s.hulls[n].contains(s.bases[n][None, :], tol=1e-9)[0]


@pytest.mark.parametrize("name", ["translation", "shear", "interior"])
def test_increment_bound(get_series, name):
    s = get_series(name, 64, 60)
    K = estimate_K_f(builtin_map(name), 256)
    assert np.all(np.abs(np.diff(s.d)) <= K + 2 * s.grid_diagonal)


def test_refinement_never_shrinks():
    m = builtin_map("interior")
    a, b = iterate_domain(m, 16, 20), iterate_domain(m, 32, 20)
    assert np.all(b.d >= a.d - 1e-9)


def test_equivariance_of_series():
    m = builtin_map("interior")
    s = iterate_domain(m, 32, 3)
    # the image of D + (1, 0) is the image of D shifted by A (1, 0) = (1, 0)
    pts = domain_grid(32) + [1, 0]
    assert hausdorff_distance(convex_hull(m.iterate(pts, 3)), s.hulls[3].translate((1, 0))) <= 1e-9


def test_horizon_guard_partial():
    with pytest.raises(HorizonTooLarge) as ei:
        iterate_domain(make_linear([[2, 1], [1, 1]]), 8, 200)
    exc = ei.value
    assert exc.last_safe_n >= 20 and exc.partial.N == exc.last_safe_n
    assert np.max(np.abs(exc.partial.hulls[-1].vertices)) <= 1e12


def test_quasiconvexity():
    s = iterate_domain(make_translation((0.3, 0.1)), 32, 5)
    defect, slack = quasiconvexity_report(s, 5)
    assert defect <= 1e-9
    s = iterate_domain(make_linear([[2, 1], [1, 1]]), 32, 6)
    assert quasiconvexity_report(s, 6)[0] <= 1e-6


def test_quasiconvexity_shear(get_series):
    s = get_series("shear", 64, 100)
    for n in (10, 50, 100):
        defect, slack = quasiconvexity_report(s, n)
        assert defect <= math.sqrt(2) + 2 * s.grid_diagonal


def test_displacement_range_dehn_only(get_series):
    s = iterate_domain(builtin_map("twist"), 16, 10)
    lo, hi = displacement_range(s, 10)
    assert lo == pytest.approx(3.0) and hi == pytest.approx(3.0)
    with pytest.raises(ClassMismatch):
        displacement_range(get_series("shear", 64, 100), 3)


def test_dn_statistics(get_series):
    st = dn_statistics(get_series("translation", 128, 512))
    assert st["d_min_tail"] == pytest.approx(math.sqrt(2)) and st["d_max_tail"] == pytest.approx(math.sqrt(2))


def test_lift_change_translates_series():
    m = builtin_map("interior")
    a = iterate_domain(m, 16, 10)
    b = iterate_domain(shift_lift(m, (2, -1)), 16, 10)
    assert hausdorff_distance(b.hulls[10], a.hulls[10].translate((20, -10))) <= 1e-9
