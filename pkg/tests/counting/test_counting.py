"""This module contains the tests for the enumeration of rational points near and on manifold charts."""
from fractions import Fraction

import pytest

from rational_points_near_manifolds.backend.counting.count_query import CSV_HEADER, CountQuery
from rational_points_near_manifolds.backend.counting.random_chart_generator import RandomChartGenerator
from rational_points_near_manifolds.backend.counting.rational_point_counter import (
    EnumerationStrategy, RationalPointCounter, base_count_sigma, count_near, count_on, count_weighted
)
from rational_points_near_manifolds.backend.counting.reference_counter import reference_counts
from rational_points_near_manifolds.backend.counting.selberg_majorant_count import selberg_upper_bound_count
from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.backend.funcspace.weight_function import make_bump
from rational_points_near_manifolds.errors import NotPolynomialError, ScanBudgetError, SupportViolationError

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def make_chart(texts, x0, eps0):
    """Creates a chart from map expressions.

    Args:
        texts: The map expressions.
        x0: The chart center.
        eps0: The chart radius.

    Returns:
        The manifold chart.
    """
    return ManifoldChart(x0, eps0, [SmoothMap(text, len(x0)) for text in texts])


@pytest.fixture
def sphere_chart():
    """Creates the chart of f = (x1^2 + x2^2)/2 over the box of radius 1/4.

    Returns:
        The manifold chart.
    """
    return make_chart(["(x1^2 + x2^2)/2"], (0, 0), QUARTER)


@pytest.fixture
def suslin_chart():
    """Creates the chart of f1 = (x1^2 - x2^2)/2, f2 = x1*x2 over the box of radius 1/2.

    Returns:
        The manifold chart.
    """
    return make_chart(["(x1^2 - x2^2)/2", "x1*x2"], (0, 0), HALF)


@pytest.fixture
def random_charts():
    """Creates 20 random polynomial charts of dimension 1 and 2.

    Returns:
        The list of charts.
    """
    charts = []
    for seed in range(20):
        generator = RandomChartGenerator(n=1 + seed % 2, R=1 + (seed // 2) % 2, seed=seed)
        charts.append(generator.generate())
    return charts


###############
# Count Query #
###############
def test_count_query_validation():
    with pytest.raises(ValueError):
        CountQuery(Q=0, delta=0.1)
    with pytest.raises(ValueError):
        CountQuery(Q=10, delta=0.6)
    with pytest.raises(ValueError):
        CountQuery(Q=10, delta=-0.1)
    with pytest.raises(ValueError):
        CountQuery(Q=10, delta=0.1, weighted=True)
    assert CountQuery(Q=10.0, delta="1/4").Q == 10


def test_count_result_records(sphere_chart):
    result = count_near(sphere_chart, CountQuery(Q=10, delta=Fraction(1, 10)))
    row = result.csv_row()
    assert len(row) == len(CSV_HEADER)
    assert row[:3] == (10, 0.1, result.count)
    data = result.to_dict()
    assert data["count"] == result.count
    assert data["main_term"] == pytest.approx(0.2 * result.N0)
    assert data["ratio"] == pytest.approx(result.count / result.main_term)


##############
# Count Near #
##############
def test_count_near_half_counts_everything(sphere_chart, suslin_chart, subtests):
    for chart in (sphere_chart, suslin_chart):
        with subtests.test(chart=chart.name, R=chart.R):
            result = count_near(chart, CountQuery(Q=20, delta=HALF))
            assert result.count == result.points_scanned
            assert result.ratio == 1.0


def test_count_near_flat_chart(subtests):
    chart = make_chart(["0"], (0, 0), HALF)
    for delta in (0, Fraction(1, 10), HALF):
        with subtests.test(delta=delta):
            result = count_near(chart, CountQuery(Q=15, delta=delta))
            assert result.count == result.points_scanned


def test_count_near_reference_oracle(sphere_chart):
    reference = reference_counts(sphere_chart, 50, 0.1)
    result = count_near(sphere_chart, CountQuery(Q=50, delta=0.1))
    assert result.count == reference.count
    assert result.points_scanned == reference.scanned
    assert result.exact


def test_count_near_monotone(suslin_chart):
    counts_by_delta = [count_near(suslin_chart, CountQuery(Q=25, delta=delta)).count
                       for delta in (0, 0.05, 0.1, 0.2, 0.35, 0.5)]
    assert counts_by_delta == sorted(counts_by_delta)
    counts_by_Q = [count_near(suslin_chart, CountQuery(Q=Q, delta=0.1)).count for Q in (5, 10, 20, 30)]
    assert counts_by_Q == sorted(counts_by_Q)


def test_count_near_float_strategy(sphere_chart):
    query = CountQuery(Q=30, delta=0.123)
    exact = count_near(sphere_chart, query)
    approximate = count_near(sphere_chart, query, strategy=EnumerationStrategy.FLOAT)
    assert not approximate.exact
    assert approximate.count == exact.count
    assert approximate.near_threshold == 0


def test_count_near_non_polynomial():
    chart = make_chart(["exp(x1)"], (0,), HALF)
    result = count_near(chart, CountQuery(Q=20, delta=HALF))
    assert not result.exact
    assert result.count == result.points_scanned
    with pytest.raises(NotPolynomialError):
        RationalPointCounter(chart, strategy=EnumerationStrategy.EXACT)


def test_count_near_scan_budget(suslin_chart):
    with pytest.raises(ScanBudgetError):
        count_near(suslin_chart, CountQuery(Q=10, delta=0.1), scan_cap=10)


def test_count_near_workers(suslin_chart):
    query = CountQuery(Q=30, delta=0.2)
    assert count_near(suslin_chart, query, workers=4).count == count_near(suslin_chart, query).count


def test_time_measured_count(sphere_chart):
    counter = RationalPointCounter(sphere_chart)
    measured = counter.time_measured_count(CountQuery(Q=10, delta=0.1))
    assert measured["result"].count == counter.count_near(CountQuery(Q=10, delta=0.1)).count
    assert measured["measures"]["strategy"] == "EXACT"
    assert measured["measures"]["points_scanned"] == measured["result"].points_scanned


##################
# Count Weighted #
##################
def test_count_weighted_half_equals_base(suslin_chart):
    weight = make_bump((0, 0), QUARTER)
    result = count_weighted(suslin_chart, weight, 40, HALF)
    assert result.count == result.N0
    assert result.ratio == 1.0


def test_count_weighted_scaling(suslin_chart):
    weight = make_bump((0, 0), QUARTER)
    result = count_weighted(suslin_chart, weight, 40, 0.1)
    doubled = count_weighted(suslin_chart, weight.scaled(2), 40, 0.1)
    assert doubled.count == 2 * result.count
    assert doubled.N0 == 2 * result.N0


def test_count_weighted_below_unweighted(suslin_chart):
    weight = make_bump((0, 0), HALF)
    for delta in (0.05, 0.2):
        weighted = count_weighted(suslin_chart, weight, 20, delta)
        assert weighted.count <= count_near(suslin_chart, CountQuery(Q=20, delta=delta)).count


def test_count_weighted_reference_oracle(sphere_chart):
    weight = make_bump((0, 0), QUARTER)
    reference = reference_counts(sphere_chart, 30, 0.1, weight=weight)
    result = count_weighted(sphere_chart, weight, 30, 0.1)
    assert result.count == pytest.approx(reference.weighted, rel=1e-12, abs=1e-12)
    assert result.N0 == pytest.approx(reference.base_weighted, rel=1e-12, abs=1e-12)


def test_count_weighted_workers(suslin_chart):
    weight = make_bump((0, 0), Fraction(1, 3))
    assert count_weighted(suslin_chart, weight, 30, 0.2, workers=3).count == \
        count_weighted(suslin_chart, weight, 30, 0.2).count


def test_count_weighted_support_violation(sphere_chart):
    with pytest.raises(SupportViolationError):
        count_weighted(sphere_chart, make_bump((0, 0), HALF), 10, 0.1)
    with pytest.raises(SupportViolationError):
        count_weighted(sphere_chart, make_bump((Fraction(1, 8), 0), Fraction(1, 5)), 10, 0.1)


@pytest.mark.slow
def test_count_weighted_suslin_ratio_trend(suslin_chart):
    weight = make_bump((0, 0), HALF)
    deviations = []
    for Q in (100, 200, 400):
        result = count_weighted(suslin_chart, weight, Q, Q ** -0.25, workers=4)
        deviations.append(abs(result.ratio - 1))
    assert deviations[-1] <= 0.1
    assert deviations[-1] <= max(deviations[0], 0.05)


############
# Count On #
############
def test_count_on_examples():
    texts = ["(x1^2 - x2^2)/2", "x1*x2"]
    not_on = count_on(make_chart(texts, (Fraction(3, 5), Fraction(4, 5)), Fraction(1, 1000)), 5)
    assert (not_on.count, not_on.points_scanned) == (0, 1)
    on = count_on(make_chart(texts, (1, 1), Fraction(1, 1000)), 2)
    assert (on.count, on.points_scanned) == (2, 2)


def test_count_on_flat_chart():
    result = count_on(make_chart(["0", "0"], (0, 0), HALF), 12)
    assert result.count == result.points_scanned


def test_count_on_matches_count_near(suslin_chart, sphere_chart, subtests):
    for chart in (suslin_chart, sphere_chart):
        for Q in (10, 50):
            with subtests.test(R=chart.R, Q=Q):
                assert count_on(chart, Q).count == count_near(chart, CountQuery(Q=Q, delta=0)).count


def test_count_on_non_polynomial():
    with pytest.raises(NotPolynomialError):
        count_on(make_chart(["sin(x1)"], (0,), HALF), 10)


##############
# Base Count #
##############
def test_base_count_sigma_gap():
    results = [base_count_sigma(make_bump((0,), HALF), Q) for Q in (100, 200, 400)]
    gaps = [result.relative_gap for result in results]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= 0.05


@pytest.mark.slow
def test_base_count_sigma_gap_2d():
    results = [base_count_sigma(make_bump((0, 0), HALF), Q) for Q in (100, 200, 400)]
    differences = [abs(results[i + 1].sigma_estimate - results[i].sigma_estimate) for i in range(2)]
    assert differences[1] < differences[0]
    assert results[-1].relative_gap <= 0.05


def test_base_count_sigma_zero_weight():
    result = base_count_sigma(make_bump((0, 0), HALF).scaled(0), 20)
    assert result.N0 == 0.0
    with pytest.raises(ValueError):
        base_count_sigma(make_bump((0,), HALF), 0)


####################
# Reference Oracle #
####################
def test_random_charts_match_reference(random_charts, subtests):
    for index, chart in enumerate(random_charts):
        Q = 30 if chart.n == 1 else 16
        weight = make_bump(chart.x0, chart.eps0)
        for delta in (0, 0.1, 0.5):
            with subtests.test(chart=index, delta=delta):
                reference = reference_counts(chart, Q, delta, weight=weight)
                assert count_near(chart, CountQuery(Q=Q, delta=delta)).count == reference.count
                weighted = count_weighted(chart, weight, Q, delta)
                assert weighted.count == pytest.approx(reference.weighted, rel=1e-12, abs=1e-12)


def test_random_chart_generator_is_reproducible():
    first = RandomChartGenerator(n=2, R=2, seed=7).generate()
    second = RandomChartGenerator(n=2, R=2, seed=7).generate()
    assert first.x0 == second.x0 and first.eps0 == second.eps0
    assert [m.expression for m in first.maps] == [m.expression for m in second.maps]
    assert first.exact_rational


####################
# Selberg Majorant #
####################
def test_selberg_bound_sandwiches_count(subtests):
    chart = make_chart(["(x1^2 + x2^2)/2"], (0, 0), HALF)
    weight = make_bump((0, 0), HALF)
    for delta, J in [(0.1, 4), (0.1, 16), (0.25, 8)]:
        with subtests.test(delta=delta, J=J):
            bound = selberg_upper_bound_count(chart, weight, 30, delta, J)
            count = count_weighted(chart, weight, 30, delta)
            assert bound.lower_bound <= count.count + 1e-9 * count.N0
            assert count.count <= bound.upper_bound + 1e-9 * count.N0
            assert bound.N0 == pytest.approx(count.N0, rel=1e-12)
            assert bound.main_term == pytest.approx((2 * delta + 1 / (J + 1)) * count.N0, rel=1e-12)


def test_selberg_bound_codimension_two(suslin_chart):
    weight = make_bump((0, 0), Fraction(1, 3))
    bound = selberg_upper_bound_count(suslin_chart, weight, 20, 0.2, 6)
    assert bound.lower_bound is None
    assert count_weighted(suslin_chart, weight, 20, 0.2).count <= bound.upper_bound + 1e-9 * bound.N0
