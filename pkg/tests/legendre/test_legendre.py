"""This module contains the tests for the numerical Legendre transform."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.backend.legendre.legendre_chart import (
    LegendreChart, biconjugate_chart, bilipschitz_ratios, round_trip_statistics
)
from rational_points_near_manifolds.errors import (
    ConvergenceError, CurvatureError, IllConditionedError, OutsideImageError
)

A = np.array([[2.0, 1.0], [1.0, 3.0]])

CHART_MAPS = {
    "identity": "(x1^2 + x2^2)/2",
    "quadratic": "x1^2 + x1*x2 + 3*x2^2/2",
    "saddle": "(x1^2 - x2^2)/2",
    "perturbed-saddle": "(x1^2 - x2^2)/2 + 0.01*x1^4",
    "perturbed-convex": "x1^2/2 + x2^2 + x1*x2/4 + x2^3/20",
}


def make_chart(text, radius=0.5, **kwargs):
    """Creates a Legendre chart centered at the origin.

    Args:
        text: The expression of F.
        radius: The box radius.
        **kwargs: Further chart options.

    Returns:
        The Legendre chart.
    """
    return LegendreChart(SmoothMap(text, 2), (0, 0), radius, **kwargs)


@pytest.fixture
def quadratic_chart():
    """Creates the chart of x^T A x / 2.

    Returns:
        The Legendre chart.
    """
    return make_chart(CHART_MAPS["quadratic"])


######################
# Gradient inversion #
######################
def test_invert_gradient_identity():
    chart = make_chart(CHART_MAPS["identity"])
    y = np.array([0.1, -0.3])
    assert np.allclose(chart.invert_gradient(y), y, atol=1e-14)


def test_invert_gradient_quadratic(quadratic_chart):
    y = np.array([0.4, -0.2])
    assert np.allclose(quadratic_chart.invert_gradient(y), np.linalg.solve(A, y), atol=1e-12)


def test_invert_gradient_perturbed_residual():
    chart = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.25)
    smooth_map = chart.source
    for x in [(0.1, 0.2), (-0.2, 0.05), (0.24, -0.24)]:
        y = smooth_map.gradient(x)
        preimage = chart.invert_gradient(y)
        assert np.max(np.abs(smooth_map.gradient(preimage) - y)) <= 1e-10


def test_invert_gradient_outside_image():
    chart = make_chart(CHART_MAPS["identity"], radius=1)
    with pytest.raises(OutsideImageError):
        chart.invert_gradient((5.0, 0.0))
    assert np.allclose(chart.invert_gradient((5.0, 0.0), strict=False), (5.0, 0.0))
    with pytest.raises(OutsideImageError):
        chart.invert_gradient((5.0, 0.0))


def test_invert_gradient_non_convergence():
    chart = LegendreChart(SmoothMap("exp(x1)", 1), (0,), 1, max_iterations=1)
    with pytest.raises(ConvergenceError) as excinfo:
        chart.invert_gradient((np.exp(0.9),))
    assert excinfo.value.best_residual > 0


def test_singular_hessian_is_refused():
    with pytest.raises(CurvatureError):
        make_chart("x1^2/2 + x1*x2 + x2^2/2")


######################
# Legendre transform #
######################
def test_legendre_value_examples(quadratic_chart):
    identity = make_chart(CHART_MAPS["identity"])
    y = np.array([0.3, 0.2])
    assert identity.legendre_value(y) == pytest.approx(np.dot(y, y) / 2, abs=1e-14)
    assert quadratic_chart.legendre_value(y) == pytest.approx(y @ np.linalg.solve(A, y) / 2, abs=1e-13)


def test_legendre_hessian_examples(quadratic_chart):
    identity = make_chart(CHART_MAPS["identity"])
    assert np.allclose(identity.legendre_hessian((0.1, 0.1)), np.eye(2), atol=1e-14)
    assert np.allclose(quadratic_chart.legendre_hessian((0.1, 0.1)), np.linalg.inv(A), atol=1e-14)
    x = np.array([0.2, -0.1])
    product = quadratic_chart.legendre_hessian(quadratic_chart.source.gradient(x)) @ quadratic_chart.source.hessian(x)
    assert np.allclose(product, np.eye(2), atol=1e-6)


def test_legendre_hessian_ill_conditioned():
    chart = make_chart("x1^2/2 + 0.0000000000001*x2^2/2")
    with pytest.raises(IllConditionedError):
        chart.legendre_hessian((0.1, 0.0))


def test_duality_identities(subtests):
    for name, text in CHART_MAPS.items():
        with subtests.test(chart=name):
            chart = make_chart(text, radius=0.25)
            stats = round_trip_statistics(chart, density=10)
            assert stats["max_round_trip_error"] <= 1e-8 * chart.diameter
            assert stats["max_hessian_product_error"] <= 1e-6
            assert stats["max_biconjugate_error"] <= 1e-8


@pytest.mark.slow
def test_duality_identities_dense_grid(subtests):
    for name in ["saddle", "perturbed-convex"]:
        with subtests.test(chart=name):
            stats = round_trip_statistics(make_chart(CHART_MAPS[name], radius=0.25), density=32)
            assert stats["points"] >= 1000
            assert stats["max_round_trip_error"] <= 5e-9
            assert stats["max_biconjugate_error"] <= 1e-8


def test_biconjugate_gradient_is_identity_on_domain():
    chart = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.25)
    dual = biconjugate_chart(chart)
    x = np.array([0.1, -0.15])
    assert np.allclose(dual.legendre_gradient(x, strict=False), chart.source.gradient(x), atol=1e-8)


def test_bilipschitz_ratios_are_finite():
    report = bilipschitz_ratios(make_chart(CHART_MAPS["perturbed-convex"], radius=0.25), pairs=1000)
    assert 0 < report.lower <= report.upper < np.inf


def test_parallel_queries_match_sequential():
    targets = [np.array([0.05 * i, -0.03 * i]) for i in range(-5, 6)]
    sequential = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5)
    expected = [sequential.invert_gradient(y) for y in targets]
    parallel = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5)
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(parallel.invert_gradient, targets))
    for got, want in zip(results, expected):
        assert np.array_equal(got, want)


def test_warm_start_is_opt_in():
    targets = [np.array([0.05 * i, -0.03 * i]) for i in (5, -5, 1, -1, 3)]
    cold = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5)
    assert not cold.warm_start
    reordered = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5)
    for y in reversed(targets):
        reordered.invert_gradient(y)
    warm = make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5, warm_start=True)
    for y in targets:
        x = cold.invert_gradient(y)
        assert np.array_equal(x, make_chart(CHART_MAPS["perturbed-saddle"], radius=0.5).invert_gradient(y))
        assert np.array_equal(x, reordered.invert_gradient(y))
        assert np.allclose(warm.invert_gradient(y), x, atol=1e-9)
