"""This module contains the tests for the Condition 1 verification and the localization constants."""
from fractions import Fraction

import numpy as np
import pytest

from rational_points_near_manifolds.backend.curvature.box_sampling import (
    box_boundary_samples, box_samples, cube_boundary_samples
)
from rational_points_near_manifolds.backend.curvature.curvature_verifier import (
    compute_localization, hessian_determinant_range, pencil_hessian_det, pencil_signature, separation_radius,
    verify_condition1
)
from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.errors import CurvatureError, DimensionMismatchError


def make_chart(texts, n=2, x0=None, eps0=Fraction(1, 4)):
    """Creates a chart from expression strings.

    Args:
        texts: The map expressions.
        n: The dimension.
        x0: The center (origin if omitted).
        eps0: The radius.

    Returns:
        The chart.
    """
    x0 = x0 if x0 is not None else (0,) * n
    return ManifoldChart(x0, eps0, [SmoothMap(text, n) for text in texts])


@pytest.fixture
def saddle_chart():
    """Creates the chart f1 = (x^2 - y^2)/2, f2 = xy.

    Returns:
        The chart.
    """
    return make_chart(["(x1^2 - x2^2)/2", "x1*x2"])


@pytest.fixture
def degenerate_chart():
    """Creates the chart f1 = (x^2 + y^2)/2, f2 = xy whose pencil degenerates at t = (1, 1).

    Returns:
        The chart.
    """
    return make_chart(["(x1^2 + x2^2)/2", "x1*x2"])


###############
# Box samples #
###############
def test_cube_boundary_samples(subtests):
    for dimension in [1, 2, 3]:
        with subtests.test(dimension=dimension):
            samples = cube_boundary_samples(dimension, 8)
            assert np.allclose(np.max(np.abs(samples), axis=1), 1.0)
    samples = cube_boundary_samples(2, 8)
    assert any(np.array_equal(s, [1.0, 0.0]) for s in samples)
    assert np.array_equal(cube_boundary_samples(1, 8), [[-1.0], [1.0]])


def test_box_samples_stay_in_box():
    points = box_samples((0.5, -0.5), 0.25, 5)
    assert points.shape == (25, 2)
    assert np.max(np.abs(points - np.array([0.5, -0.5]))) <= 0.25
    boundary = box_boundary_samples((0, 0, 0), 0.1, 600)
    assert np.allclose(np.max(np.abs(boundary), axis=1), 0.1)


#######################
# Pencil determinants #
#######################
def test_pencil_det_examples(saddle_chart, subtests):
    for x in [(0, 0), (Fraction(1, 7), Fraction(-1, 5)), (0.1, 0.2)]:
        with subtests.test(x=x):
            assert pencil_hessian_det(saddle_chart, (1, 0), x) == pytest.approx(-1)
            assert pencil_hessian_det(saddle_chart, (0, 1), x) == pytest.approx(-1)
    assert pencil_hessian_det(saddle_chart, (3, 4), (0, 0)) == -25


def test_pencil_det_scaling(saddle_chart, subtests):
    t = (Fraction(2, 3), Fraction(-1, 5))
    base = pencil_hessian_det(saddle_chart, t, (0, 0))
    for factor in [Fraction(1, 2), 3, Fraction(-7, 4)]:
        with subtests.test(factor=factor):
            scaled = pencil_hessian_det(saddle_chart, tuple(factor * v for v in t), (0, 0))
            assert scaled == factor ** 2 * base
    chart = make_chart(["exp(x1)*cos(x2) + x1^2", "sin(x1*x2) + x2^2/2"])
    base = pencil_hessian_det(chart, (0.3, 0.7), (0.1, -0.2))
    assert pencil_hessian_det(chart, (0.6, 1.4), (0.1, -0.2)) == pytest.approx(4 * base, rel=1e-9)


def test_pencil_det_errors(saddle_chart):
    with pytest.raises(DimensionMismatchError):
        pencil_hessian_det(saddle_chart, (1, 0, 0), (0, 0))
    with pytest.raises(DimensionMismatchError):
        pencil_hessian_det(saddle_chart, (1, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        pencil_hessian_det(saddle_chart, (0, 0), (0, 0))


###############
# Condition 1 #
###############
def test_condition1_holds_for_saddle_pencil(saddle_chart):
    report = verify_condition1(saddle_chart, t_grid_density=16)
    assert report.condition1_holds
    assert report.c1 == pytest.approx(1.0, abs=1e-6)
    assert report.c2 == pytest.approx(2.0, abs=1e-9)
    assert report.c1 <= report.c2
    assert report.signature == 0
    assert report.signature_constant


def test_condition1_fails_for_degenerate_pencil(degenerate_chart):
    report = verify_condition1(degenerate_chart, t_grid_density=8)
    assert not report.condition1_holds
    t, _ = report.min_witness
    assert abs(abs(t[0]) - abs(t[1])) < 1e-9
    assert t[0] == pytest.approx(t[1])
    with pytest.raises(CurvatureError):
        compute_localization(degenerate_chart, report)


def test_condition1_codimension_one():
    curved = make_chart(["(x1^2 + 2*x2^2)/2 + x1^3/10"], x0=(Fraction(1, 2), 0), eps0=Fraction(1, 10))
    report = verify_condition1(curved, t_grid_density=8)
    assert report.condition1_holds
    # det H_f(x) = 2(1 + 3 x1/5) on x1 in [0.4, 0.6]
    assert report.c1 == pytest.approx(2 * (1 + 0.6 * 0.4), rel=1e-6)
    assert report.c2 == pytest.approx(2 * (1 + 0.6 * 0.6), rel=1e-6)
    flat = make_chart(["x1 + x2"])
    assert not verify_condition1(flat, t_grid_density=8).condition1_holds


def test_condition1_invariant_under_permutation_and_negation(saddle_chart, subtests):
    base = verify_condition1(saddle_chart, t_grid_density=8)
    for variant in [saddle_chart.permuted([1, 0]), saddle_chart.negated(0), saddle_chart.negated(1)]:
        with subtests.test(variant=repr(variant)):
            report = verify_condition1(variant, t_grid_density=8)
            assert report.condition1_holds == base.condition1_holds
            assert report.c1 == pytest.approx(base.c1, abs=1e-9)


def test_condition1_rejects_coarse_grid(saddle_chart):
    with pytest.raises(ValueError):
        verify_condition1(saddle_chart, t_grid_density=4)


def test_signature_is_constant_over_pencil(saddle_chart):
    rng = np.random.default_rng(11)
    signatures = {pencil_signature(saddle_chart, t, (0.0, 0.0)) for t in rng.normal(size=(50, 2))}
    assert signatures == {0}


################
# Localization #
################
def test_localization_quadratic_keeps_eps0(saddle_chart):
    report = compute_localization(saddle_chart, verify_condition1(saddle_chart, t_grid_density=8))
    assert report.tau == pytest.approx(0.25)
    assert report.kappa == pytest.approx(0.125)
    assert report.rho > 0
    assert report.rho_prime == pytest.approx(0.0625)


def test_localization_shrinks_tau_for_curved_chart():
    chart = make_chart(["(x1^2 - x2^2)/2 + x1^3", "x1*x2"], eps0=Fraction(1, 2))
    report = verify_condition1(chart, t_grid_density=8, x_radius=0.05)
    assert report.condition1_holds
    assert report.c1 == pytest.approx(0.7, rel=1e-6)
    localized = compute_localization(chart, report)
    assert 0 < localized.kappa < localized.tau < 0.5
    assert localized.rho > 0


def test_separation_radius():
    assert separation_radius(0.2, 0.1) == pytest.approx(0.05)


def test_hessian_determinant_range():
    low, high = hessian_determinant_range([SmoothMap("x1^2/2 + x2^2", 2)], [1], (0, 0), 1)
    assert low == pytest.approx(2.0)
    assert high == pytest.approx(2.0)
