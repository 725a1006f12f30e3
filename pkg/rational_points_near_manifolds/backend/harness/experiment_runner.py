"""This module implements the execution of experiment ladders and the persistence of their run records."""
import logging
import math
import time
from fractions import Fraction

from rational_points_near_manifolds.backend.counting.count_query import CountQuery
from rational_points_near_manifolds.backend.counting.rational_point_counter import (
    RationalPointCounter, base_count_sigma
)
from rational_points_near_manifolds.backend.curvature.curvature_verifier import compute_localization, verify_condition1
from rational_points_near_manifolds.backend.funcspace.manifold_loader import load_manifold, weight_from_dict
from rational_points_near_manifolds.backend.funcspace.weight_function import make_bump
from rational_points_near_manifolds.backend.harness.experiment_config import ExperimentMode
from rational_points_near_manifolds.backend.harness.run_record import (
    RUN_CSV_HEADER, RunRecord, RunRow, append_csv_rows, timestamp, write_run_record
)
from rational_points_near_manifolds.definitions import results_dir
from rational_points_near_manifolds.errors import CurvatureError, ExperimentConfigError, ScanBudgetError

logger = logging.getLogger(__name__)

WEIGHT_RADIUS_GRID = 1024


def fit_asymptotic_constant(rows, n, R):
    """Fits c in count ~ c delta^R Q^(n+1) by least squares.

    Args:
        rows: The run rows.
        n: The manifold dimension.
        R: The codimension.

    Returns:
        The constant c (None if all models vanish).
    """
    models = [float(row.delta) ** R * float(row.Q) ** (n + 1) for row in rows]
    norm = math.fsum(m * m for m in models)
    if norm == 0:
        return None
    return math.fsum(float(row.count) * m for row, m in zip(rows, models)) / norm


#####################
# Experiment Runner #
#####################
class ExperimentRunner:
    """A runner of count ladders over the Q list of an experiment config."""

    def __init__(self, config, persist=True):
        """Initializes ExperimentRunner.

        Args:
            config: The experiment config.
            persist: Whether the run record and the CSV rows are written.
        """
        self.config = config
        self.persist = persist
        self.definition = load_manifold(config.manifold)
        self.chart = self.definition.chart
        self.curvature = None
        self.weight = None

    def verify_curvature(self):
        """Verifies Condition 1 and, for weighted counts, the localization constants.

        Returns:
            The curvature report.
        """
        report = verify_condition1(self.chart)
        if not report.condition1_holds:
            raise CurvatureError(f'Chart "{self.config.manifold}" fails Condition 1 (c1={report.c1:.3g}); '
                                 f'set require_curvature to false to count anyway.', report)
        if self.config.weighted or self.config.mode == ExperimentMode.BASE:
            report = compute_localization(self.chart, report)
        self.curvature = report
        return report

    def _default_radius(self):
        radius = self.chart.eps0
        if self.curvature is not None and self.curvature.localized:
            grid = Fraction(math.floor(self.curvature.kappa * WEIGHT_RADIUS_GRID), WEIGHT_RADIUS_GRID)
            radius = min(radius, grid)
        if radius <= 0:
            raise ExperimentConfigError(f'Localization radius {self.curvature.kappa:.3g} is below the weight grid '
                                        f'1/{WEIGHT_RADIUS_GRID}.')
        return radius

    def build_weight(self):
        """Builds the weight from the config, the manifold file, or the bump on the admissible box.

        Returns:
            The weight function.
        """
        if self.config.weight is not None:
            radius = None if "radius" in self.config.weight else self._default_radius()
            weight = weight_from_dict(self.config.weight, self.chart.x0, radius)
        elif self.definition.weight is not None:
            weight = self.definition.weight
        else:
            weight = make_bump(self.chart.x0, self._default_radius())
        self.weight = weight
        return weight

    def check_scan_budget(self, counter):
        """Checks the largest rung against the scan cap before any rung is counted.

        Unweighted rungs scan the whole chart box, weighted rungs only the open weight support.

        Args:
            counter: The counter of the ladder.

        Returns:
            The number of base points of the largest rung.
        """
        Q = max(self.config.q_list)
        if self.config.weighted and self.config.mode == ExperimentMode.NEAR:
            scan = counter.scan_size(Q, self.weight.center, self.weight.support_radius, open_box=True)
        else:
            scan = counter.scan_size(Q, self.chart.x0, self.chart.eps0)
        if scan > counter.scan_cap:
            raise ScanBudgetError(f'Rung Q={Q} of "{self.config.name}" scans {scan} base points, cap is '
                                  f'{counter.scan_cap}; raise scan_cap or count with a weight.')
        return scan

    def _rung(self, counter, Q):
        mode = self.config.mode
        if mode == ExperimentMode.ON:
            return RunRow.from_result(counter.count_on(Q))
        if mode == ExperimentMode.BASE:
            start_time = time.time()
            base = base_count_sigma(self.weight, Q)
            predicted = base.sigma_predicted * float(Q) ** (self.chart.n + 1)
            return RunRow(Q=Q, delta=0.5, count=base.N0, N0=base.N0, main_term=predicted,
                          ratio=base.N0 / predicted if predicted > 0 else None, wall_time=time.time() - start_time)
        delta = self.config.delta_rule.delta(Q)
        if self.config.weighted:
            return RunRow.from_result(counter.count_weighted(self.weight, Q, delta, curvature=self.curvature))
        return RunRow.from_result(counter.count_near(CountQuery(Q=Q, delta=delta)))

    def run(self):
        """Runs the ladder.

        Returns:
            The run record.
        """
        started_at = timestamp()
        if self.config.require_curvature:
            self.verify_curvature()
        else:
            logger.warning(f'Counting on "{self.config.manifold}" without verifying Condition 1.')
        if self.config.weighted or self.config.mode == ExperimentMode.BASE:
            self.build_weight()

        counter = RationalPointCounter(self.chart, workers=self.config.workers, scan_cap=self.config.scan_cap)
        if self.config.mode != ExperimentMode.BASE:
            self.check_scan_budget(counter)
        rows = []
        for Q in self.config.q_list:
            row = self._rung(counter, Q)
            rows.append(row)
            ratio = "-" if row.ratio is None else f'{row.ratio:.6g}'
            logger.info(f'[{self.config.name}] Q={Q}: count={row.count:.6g}, ratio={ratio} ({row.wall_time:.2f}s).')
            if self.persist:
                # Unfinished records keep an empty finished_at.
                write_run_record(self._record(rows, None, {}, started_at, ""), self._json_path())

        fitted = None
        if self.config.mode == ExperimentMode.NEAR:
            fitted = fit_asymptotic_constant(rows, self.chart.n, self.chart.R)
            if fitted:
                rows = [RunRow(**{**row.to_dict(), "fitted_ratio": float(row.count) / (
                    fitted * float(row.delta) ** self.chart.R * float(row.Q) ** (self.chart.n + 1))}) for row in rows]
        extras = {}
        if self.config.mode == ExperimentMode.BASE:
            extras["sigma_estimates"] = [row.N0 / float(row.Q) ** (self.chart.n + 1) for row in rows]
        if self.weight is not None:
            extras["weight"] = {"center": [str(c) for c in self.weight.center],
                                "radius": str(self.weight.support_radius), "scale": str(self.weight.scale)}
        record = self._record(rows, fitted, extras, started_at, timestamp())
        if self.persist:
            self.write(record)
        return record

    def _record(self, rows, fitted, extras, started_at, finished_at):
        return RunRecord(config=self.config.to_dict(), n=self.chart.n, R=self.chart.R, rows=tuple(rows),
                         fitted_constant=fitted, curvature=self.curvature.to_dict() if self.curvature else None,
                         started_at=started_at, finished_at=finished_at, extras=extras)

    def _json_path(self):
        return (self.config.output_dir or results_dir()).joinpath(f'{self.config.name}.json')

    def write(self, record):
        """Writes the record as JSON and appends its rows to the CSV file of the experiment.

        Args:
            record: The run record.

        Returns:
            The tuple (JSON path, CSV path).
        """
        json_path = write_run_record(record, self._json_path())
        csv_path = append_csv_rows(json_path.with_suffix(".csv"),
                                   [row.csv_row() for row in record.rows], header=RUN_CSV_HEADER)
        logger.info(f'Appended {len(record.rows)} rows to "{csv_path}".')
        return json_path, csv_path


def run_experiment(config, persist=True):
    """Runs an experiment ladder (see ExperimentRunner.run)."""
    return ExperimentRunner(config, persist=persist).run()
