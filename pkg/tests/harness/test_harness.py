"""This module contains the tests for the experiment harness: delta rules, configs, ladders, fits and records."""
import dataclasses
import json
import math
from fractions import Fraction

import pytest

from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.backend.harness.delta_rule import (
    DeltaRule, DeltaRuleKind, conjecture_exponent, critical_exponent, parse_delta_rule
)
from rational_points_near_manifolds.backend.harness.dimension_growth import (
    dimension_growth_check, dimension_growth_exponent, fit_growth_exponent
)
from rational_points_near_manifolds.backend.harness.envelope_fit import (
    envelope_delta_exponent, envelope_scale, fit_error_envelope, synthetic_envelope_record
)
from rational_points_near_manifolds.backend.harness.experiment_config import (
    ExperimentMode, experiment_config_from_dict, load_experiment_config
)
from rational_points_near_manifolds.backend.harness.experiment_runner import run_experiment
from rational_points_near_manifolds.backend.harness.run_record import (
    RUN_CSV_HEADER, RunRecord, RunRow, load_run_record
)
from rational_points_near_manifolds.backend.matfam.matrix_family import chart_from_family
from rational_points_near_manifolds.backend.matfam.suslin import suslin_family
from rational_points_near_manifolds.definitions import EXPERIMENT_DIR, MANIFOLD_DIR, RESULTS_DIR_ENV_VAR
from rational_points_near_manifolds.errors import (
    CurvatureError, DegenerateFitError, ExperimentConfigError, NotPolynomialError, ScanBudgetError
)


@pytest.fixture
def flat_config(tmp_path):
    """Creates an unverified ladder on the flat chart f = 0 with delta = Q^-1/4.

    Returns:
        The experiment config.
    """
    return experiment_config_from_dict({
        "name": "flat", "manifold": "flat.json", "q_list": [20, 40, 80], "delta_rule": "Q^-1/4",
        "require_curvature": False, "output_dir": str(tmp_path / "flat"),
    })


@pytest.fixture
def suslin_config(tmp_path):
    """Creates a weighted ladder on the chart (x1*x2, (x1^2 - x2^2)/2) with delta = Q^-1/4.

    Returns:
        The experiment config.
    """
    return experiment_config_from_dict({
        "name": "suslin", "manifold": "suslin2.json", "q_list": [10, 20, 40], "delta_rule": "Q^-1/4",
        "weight": {"center": ["0", "0"]}, "output_dir": str(tmp_path / "suslin"),
    })


def flat_chart(n):
    return ManifoldChart((0,) * n, Fraction(1, 2), [SmoothMap("0", n)])


##############
# Delta Rule #
##############
def test_parse_delta_rule(subtests):
    with subtests.test(rule="literal"):
        rule = parse_delta_rule("0.1")
        assert rule.kind == DeltaRuleKind.LITERAL
        assert rule.delta(1000) == Fraction(1, 10)
    with subtests.test(rule="power"):
        rule = parse_delta_rule("Q^-1/4")
        assert rule.kind == DeltaRuleKind.POWER
        assert rule.exponent == Fraction(1, 4)
        assert rule.delta(256) == pytest.approx(0.25)
    with subtests.test(rule="power with eps"):
        rule = parse_delta_rule("Q^-(1/2)+eps")
        assert rule.kind == DeltaRuleKind.POWER_EPSILON
        assert rule.epsilon == 0.05
        assert rule.delta(100) == pytest.approx(100 ** -0.45)
    with subtests.test(rule="power with explicit eps"):
        rule = parse_delta_rule("Q^-1/2+0.1", epsilon=0.2)
        assert rule.epsilon == pytest.approx(0.1)
    with subtests.test(rule="number"):
        assert parse_delta_rule(0.25).delta(10) == Fraction(1, 4)


def test_delta_rule_caps_at_one_half():
    assert parse_delta_rule("Q^-1/4").delta(2) == 0.5


def test_delta_rule_errors(subtests):
    for text in ("0.7", "-0.1", "Q^-2", "Q^-0", "Q^-1/4+0.3", "delta", "Q^-1/0"):
        with subtests.test(text=text):
            with pytest.raises(ExperimentConfigError):
                parse_delta_rule(text)


def test_critical_exponents():
    assert critical_exponent(2, 2) == Fraction(1, 2)
    assert critical_exponent(4, 3) == Fraction(1, 2)
    assert critical_exponent(3, 1) == 1
    assert conjecture_exponent(3) == Fraction(1, 3)
    rule = DeltaRule.critical(2, 2)
    assert str(rule) == "Q^-1/2+0.05"
    assert rule.delta(10000) == pytest.approx(10000 ** -0.45)


#####################
# Experiment Config #
#####################
def test_config_from_dict():
    config = experiment_config_from_dict({"manifold": "suslin2.json", "q_list": [10, 20], "delta_rule": "0.1"})
    assert config.manifold == MANIFOLD_DIR.joinpath("suslin2.json")
    assert config.mode == ExperimentMode.NEAR
    assert not config.weighted
    assert config.require_curvature
    assert config.to_dict()["delta_rule"] == "1/10"


def test_config_weight_implies_weighted():
    config = experiment_config_from_dict({"manifold": "suslin2.json", "q_list": [10], "delta_rule": "0.1",
                                          "weight": {"radius": "1/8"}})
    assert config.weighted


def test_config_errors(subtests):
    base = {"manifold": "suslin2.json", "q_list": [10, 20], "delta_rule": "0.1"}
    cases = {
        "missing key": {"manifold": "suslin2.json", "q_list": [10]},
        "empty ladder": {**base, "q_list": []},
        "not increasing": {**base, "q_list": [10, 10]},
        "zero Q": {**base, "q_list": [0, 5]},
        "unknown key": {**base, "colour": "red"},
        "unknown mode": {**base, "mode": "between"},
        "no workers": {**base, "workers": 0},
        "weight not a mapping": {**base, "weight": 0.25},
        "bad exponent": {**base, "delta_rule": "Q^-1.5"},
    }
    for name, data in cases.items():
        with subtests.test(case=name):
            with pytest.raises(ExperimentConfigError):
                experiment_config_from_dict(data)


def test_load_toml_config(tmp_path):
    path = tmp_path / "ladder.toml"
    path.write_text(f'manifold = "{MANIFOLD_DIR.joinpath("paraboloid.json").as_posix()}"\n'
                    'q_list = [8, 16, 32]\ndelta_rule = "Q^-1+eps"\nmode = "near"\nworkers = 2\n')
    config = load_experiment_config(path)
    assert config.name == "ladder"
    assert config.q_list == (8, 16, 32)
    assert config.delta_rule.kind == DeltaRuleKind.POWER_EPSILON
    assert config.workers == 2
    assert config.source == path


def test_load_config_errors(tmp_path):
    with pytest.raises(ExperimentConfigError):
        load_experiment_config(tmp_path / "missing.json")
    path = tmp_path / "ladder.yaml"
    path.write_text("q_list: [1]\n")
    with pytest.raises(ExperimentConfigError):
        load_experiment_config(path)
    path = tmp_path / "broken.json"
    path.write_text("{")
    with pytest.raises(ExperimentConfigError):
        load_experiment_config(path)


def test_load_bundled_experiments(subtests):
    for path in sorted(EXPERIMENT_DIR.iterdir()):
        with subtests.test(path=path.name):
            config = load_experiment_config(path)
            assert config.manifold.is_file()
            assert config.name == path.stem


##############
# Run Record #
##############
def test_run_record_validation():
    row_small = RunRow(Q=10, delta=0.1, count=5, N0=100, main_term=20.0, ratio=0.25)
    row_large = RunRow(Q=20, delta=0.1, count=50, N0=1000, main_term=200.0, ratio=0.25)
    with pytest.raises(ExperimentConfigError):
        RunRecord(config={}, n=2, R=1, rows=(row_large, row_small))
    with pytest.raises(ExperimentConfigError):
        RunRecord(config={}, n=2, R=1, rows=(dataclasses.replace(row_small, ratio=math.inf),))
    record = RunRecord(config={}, n=2, R=1, rows=(row_small, row_large))
    assert record.q_list == [10, 20]
    assert record.ratios == [0.25, 0.25]


def test_load_run_record_errors(tmp_path):
    with pytest.raises(ExperimentConfigError):
        load_run_record(tmp_path / "missing.json")
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"schema_version": 0, "rows": []}))
    with pytest.raises(ExperimentConfigError):
        load_run_record(path)


#####################
# Experiment Runner #
#####################
def test_flat_chart_ratio_exceeds_one_and_grows(flat_config):
    record = run_experiment(flat_config)
    ratios = record.ratios
    assert all(ratio > 1 for ratio in ratios)
    assert ratios == sorted(ratios)
    for row in record.rows:
        assert row.count == row.N0 == row.points_scanned
        assert row.ratio == pytest.approx(1 / (2 * row.delta))
    assert record.fitted_constant > 0
    assert all(row.fitted_ratio is not None for row in record.rows)


def test_flat_chart_refused_with_curvature(flat_config):
    config = dataclasses.replace(flat_config, require_curvature=True)
    with pytest.raises(CurvatureError) as exc_info:
        run_experiment(config, persist=False)
    assert exc_info.value.report is not None
    assert not exc_info.value.report.condition1_holds


def test_run_persists_record_and_csv(suslin_config):
    record = run_experiment(suslin_config)
    json_path = suslin_config.output_dir / "suslin.json"
    csv_path = suslin_config.output_dir / "suslin.csv"
    loaded = load_run_record(json_path)
    assert loaded.rows == record.rows
    assert loaded.fitted_constant == record.fitted_constant
    assert loaded.config == suslin_config.to_dict()
    assert loaded.curvature["condition1_holds"]
    assert loaded.extras["weight"]["radius"] == "1/4"
    assert loaded.finished_at >= loaded.started_at != ""
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(RUN_CSV_HEADER)
    assert len(lines) == 4

    run_experiment(suslin_config)
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 7
    assert lines[1:4] == lines[4:7]


def test_run_is_deterministic_across_workers(suslin_config, tmp_path):
    first = run_experiment(dataclasses.replace(suslin_config, output_dir=tmp_path / "one", workers=1))
    second = run_experiment(dataclasses.replace(suslin_config, output_dir=tmp_path / "three", workers=3))
    assert [row.count for row in first.rows] == [row.count for row in second.rows]
    assert (tmp_path / "one" / "suslin.csv").read_bytes() == (tmp_path / "three" / "suslin.csv").read_bytes()


def test_run_uses_results_dir_env(flat_config, tmp_path, monkeypatch):
    monkeypatch.setenv(RESULTS_DIR_ENV_VAR, str(tmp_path / "env"))
    run_experiment(dataclasses.replace(flat_config, output_dir=None, q_list=(20,)))
    assert (tmp_path / "env" / "flat.json").is_file()
    assert (tmp_path / "env" / "flat.csv").is_file()


def test_run_on_mode(tmp_path):
    config = experiment_config_from_dict({"manifold": "suslin3.json", "q_list": [4, 8], "delta_rule": "0",
                                          "mode": "on", "output_dir": str(tmp_path)})
    record = run_experiment(config)
    assert record.n == 4 and record.R == 3
    assert record.fitted_constant is None
    for row in record.rows:
        assert row.ratio is None
        assert 1 <= row.count <= row.points_scanned


def test_run_base_mode(tmp_path):
    config = experiment_config_from_dict({"manifold": "suslin2.json", "q_list": [20, 40, 80], "delta_rule": "1/2",
                                          "mode": "base", "output_dir": str(tmp_path)})
    record = run_experiment(config)
    gaps = [abs(row.ratio - 1) for row in record.rows]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 0.05
    assert len(record.extras["sigma_estimates"]) == 3


@pytest.mark.slow
def test_base_mode_sigma_stabilizes(tmp_path):
    config = experiment_config_from_dict({"manifold": "suslin2.json", "q_list": [100, 200, 400],
                                          "delta_rule": "1/2", "mode": "base", "output_dir": str(tmp_path)})
    sigmas = run_experiment(config).extras["sigma_estimates"]
    assert abs(sigmas[-1] - sigmas[-2]) / sigmas[-1] < 0.005


def decreasing_steps(ratios):
    deviations = [abs(ratio - 1) for ratio in ratios]
    return sum(later <= earlier for earlier, later in zip(deviations, deviations[1:]))


@pytest.fixture(scope="module")
def suslin_ladder_record(tmp_path_factory):
    """Runs the bundled weighted Suslin ladder Q = 100..1600 with delta = Q^-1/4.

    Returns:
        The run record.
    """
    config = load_experiment_config(EXPERIMENT_DIR.joinpath("suslin2_near.json"))
    return run_experiment(dataclasses.replace(config, output_dir=tmp_path_factory.mktemp("suslin2_near")))


@pytest.mark.slow
def test_suslin_ladder_ratio_trend(suslin_ladder_record):
    ratios = suslin_ladder_record.ratios
    assert suslin_ladder_record.q_list == [100, 200, 400, 800, 1600]
    assert 0.5 <= ratios[-1] <= 1.5
    assert decreasing_steps(ratios) >= 3


@pytest.mark.slow
def test_suslin_ladder_envelope_is_bounded(suslin_ladder_record):
    fit = fit_error_envelope(suslin_ladder_record)
    assert fit.form == "exp_sqrt_log"
    assert fit.bounded
    assert fit.spread <= 10


@pytest.mark.slow
def test_paraboloid_ladder_ratio_band(tmp_path):
    config = experiment_config_from_dict({"manifold": "paraboloid.json", "q_list": [100, 200, 400],
                                          "delta_rule": "Q^-1/4", "weighted": True, "workers": 4,
                                          "output_dir": str(tmp_path)})
    record = run_experiment(config)
    assert record.R == 1
    assert record.extras["weight"]["radius"] == "1/8"
    assert all(0.7 <= ratio <= 1.3 for ratio in record.ratios)
    assert decreasing_steps(record.ratios) == 2


def test_scan_budget_checked_before_first_rung(suslin_config):
    unweighted = dataclasses.replace(suslin_config, weight=None, weighted=False, scan_cap=10_000)
    with pytest.raises(ScanBudgetError):
        run_experiment(unweighted)
    assert not (suslin_config.output_dir / "suslin.json").exists()
    record = run_experiment(dataclasses.replace(suslin_config, scan_cap=10_000))
    assert record.rows[-1].points_scanned <= 10_000



################
# Envelope Fit #
################
def test_envelope_exponents():
    assert envelope_delta_exponent(2, 1) == 0
    assert envelope_delta_exponent(4, 3) == 1
    assert envelope_scale(2, 1, 100, 0.1) == pytest.approx(100 ** 2)
    assert envelope_scale(4, 3, 100, 0.5) == pytest.approx(0.5 * 100 ** 4)
    assert envelope_scale(3, 2, 100, 1e-6) == pytest.approx(100 ** 2.8)


def test_synthetic_envelope_recovered(subtests):
    for n, R in ((2, 2), (3, 2), (4, 3)):
        with subtests.test(n=n, R=R):
            rule = DeltaRule.critical(n, R)
            record = synthetic_envelope_record(n, R, (100, 200, 400, 800, 1600), rule, amplitude=3.0, exponent=0.7)
            fit = fit_error_envelope(record)
            assert fit.amplitude == pytest.approx(3.0, rel=0.05)
            assert fit.exponent == pytest.approx(0.7, rel=0.05)
            assert fit.bounded
            assert fit.form == ("exp_sqrt_log" if n == 2 else "log_power")


def test_envelope_fit_scale_equivariant():
    record = synthetic_envelope_record(2, 2, (50, 100, 200, 400), parse_delta_rule("Q^-1/4"), 2.0, 0.4)
    scaled = dataclasses.replace(record, rows=tuple(
        dataclasses.replace(row, count=7 * row.count, N0=7 * row.N0, main_term=7 * row.main_term)
        for row in record.rows))
    fit = fit_error_envelope(record)
    scaled_fit = fit_error_envelope(scaled)
    assert scaled_fit.amplitude == pytest.approx(7 * fit.amplitude, rel=1e-9)
    assert scaled_fit.exponent == pytest.approx(fit.exponent, abs=1e-9)


def test_envelope_fit_degenerate():
    record = synthetic_envelope_record(2, 1, (50, 100, 200, 400), parse_delta_rule("0.1"), 1.0, 0.5)
    with pytest.raises(DegenerateFitError):
        fit_error_envelope(dataclasses.replace(record, rows=record.rows[:3]))
    exact = dataclasses.replace(record, rows=tuple(
        dataclasses.replace(row, count=row.main_term, ratio=1.0) for row in record.rows))
    with pytest.raises(DegenerateFitError):
        fit_error_envelope(exact)


####################
# Dimension Growth #
####################
def test_dimension_growth_exponent():
    assert dimension_growth_exponent(4, 3) == pytest.approx(3.5)
    assert dimension_growth_exponent(3, 1) == 3
    assert dimension_growth_exponent(2, 5) == 2


def test_dimension_growth_suslin_family():
    chart = chart_from_family(suslin_family(3))
    report = dimension_growth_check(chart, (4, 8, 16))
    assert report.bound_exponent == pytest.approx(3.5)
    assert not report.vacuous
    assert report.passed
    assert report.fitted_exponent <= 3.65


def test_dimension_growth_flat_chart_fails():
    report = dimension_growth_check(flat_chart(3), (8, 16, 32))
    assert report.bound_exponent == 3
    assert 3.5 < report.fitted_exponent < 4
    assert not report.passed


def test_dimension_growth_vacuous_for_surfaces():
    report = dimension_growth_check(chart_from_family(suslin_family(2)), (10, 20))
    assert report.vacuous
    assert report.passed
    assert report.bound_exponent == 2
    assert report.counts == ()


def test_dimension_growth_errors():
    sphere = ManifoldChart((0, 0, 0), Fraction(1, 4), [SmoothMap("sqrt(1 - x1^2 - x2^2 - x3^2)", 3)])
    with pytest.raises(NotPolynomialError):
        dimension_growth_check(sphere, (4, 8))
    with pytest.raises(DegenerateFitError):
        fit_growth_exponent((4, 8), (3, 0))
    with pytest.raises(DegenerateFitError):
        fit_growth_exponent((4,), (3,))
