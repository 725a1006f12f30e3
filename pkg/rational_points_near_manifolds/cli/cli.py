"""This module implements the command line interface of the rational points toolkit."""
import argparse
import cmd
import csv
import json
import logging
import shlex
import sys

import numpy as np
from colorama import Fore, Style

from rational_points_near_manifolds.backend.counting.count_query import CSV_HEADER, CountQuery
from rational_points_near_manifolds.backend.counting.rational_point_counter import (
    DEFAULT_SCAN_CAP, RationalPointCounter
)
from rational_points_near_manifolds.backend.curvature.curvature_verifier import compute_localization, verify_condition1
from rational_points_near_manifolds.backend.funcspace.manifold_loader import dump_manifold, load_manifold
from rational_points_near_manifolds.backend.harness.delta_rule import parse_delta_rule
from rational_points_near_manifolds.backend.harness.dimension_growth import DEFAULT_SLACK, dimension_growth_check
from rational_points_near_manifolds.backend.harness.envelope_fit import MAX_ENVELOPE_SPREAD, fit_error_envelope
from rational_points_near_manifolds.backend.harness.experiment_config import (
    ExperimentConfig, ExperimentMode, load_experiment_config
)
from rational_points_near_manifolds.backend.harness.experiment_runner import ExperimentRunner, run_experiment
from rational_points_near_manifolds.backend.harness.run_record import append_csv_rows, load_run_record, write_run_record
from rational_points_near_manifolds.backend.kernels.selberg_pair import chi, check_sandwich, sandwich_grid, selberg_pair
from rational_points_near_manifolds.backend.legendre.legendre_chart import (
    LegendreChart, bilipschitz_ratios, round_trip_statistics
)
from rational_points_near_manifolds.backend.matfam.matrix_family import certify_pencil, chart_from_family
from rational_points_near_manifolds.backend.matfam.suslin import suslin_family
from rational_points_near_manifolds.backend.oscillatory.oscillatory_integral import OscillatoryIntegralSpec
from rational_points_near_manifolds.backend.oscillatory.stationary_phase import (
    phase_legendre_chart, relative_error_trend, stationary_phase_leading
)
from rational_points_near_manifolds.errors import BudgetExceededError, CurvatureError, RationalPointsError
from rational_points_near_manifolds.version import __version__

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_CURVATURE = 2
EXIT_BUDGET = 3

ROUND_TRIP_TOLERANCE = 1e-8


def _verdict(passed, text):
    colour = Fore.GREEN if passed else Fore.RED
    return f'{colour}{"PASS" if passed else "FAIL"}{Style.RESET_ALL} {text}'


def _parser(prog, description):
    return argparse.ArgumentParser(prog=prog, description=description)


#######################
# Rational Points CLI #
#######################
class RationalPointsCLI(cmd.Cmd):
    """An interactive prompt (and one-shot runner) for the toolkit commands."""
    intro = f'Rational points near manifolds {__version__}. Type "help" for the list of commands.'
    prompt = "(rpnm) "

    def __init__(self, stdout=None):
        """Initializes RationalPointsCLI.

        Args:
            stdout: The output stream (sys.stdout if omitted).
        """
        super().__init__(stdout=stdout)
        self.last_exit_code = EXIT_PASS

    def _print(self, text=""):
        print(text, file=self.stdout or sys.stdout)

    def _print_json(self, data):
        self._print(json.dumps(data, indent=2))

    def _dispatch(self, name, args):
        """Parses the arguments of a command and runs it, mapping errors to exit codes.

        Args:
            name: The command name (with underscores).
            args: The argument list.

        Returns:
            The exit code.
        """
        parser = getattr(self, f'_parser_{name}')()
        try:
            options = parser.parse_args(args)
        except SystemExit as exc:
            return EXIT_PASS if exc.code == 0 else EXIT_FAILURE
        try:
            code = getattr(self, f'_run_{name}')(options)
        except CurvatureError as exc:
            self._print(_verdict(False, f'Curvature condition refused: {exc}'))
            code = EXIT_CURVATURE
        except BudgetExceededError as exc:
            self._print(_verdict(False, f'Budget exceeded: {exc}'))
            code = EXIT_BUDGET
        except (RationalPointsError, ValueError) as exc:
            self._print(_verdict(False, str(exc)))
            code = EXIT_FAILURE
        self.last_exit_code = code
        return code

    def run_command(self, argv):
        """Runs one command given as an argument list, e.g. ["count", "--manifold", "m.json", ...].

        Args:
            argv: The arguments; "--log-level LEVEL" may precede the command.

        Returns:
            The exit code.
        """
        parser = _parser("rational-points-near-manifolds", "Counting rational points near manifolds.")
        parser.add_argument("--log-level", default="WARNING",
                            choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
        parser.add_argument("command")
        parser.add_argument("args", nargs=argparse.REMAINDER)
        try:
            options = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_PASS if exc.code == 0 else EXIT_FAILURE
        logging.basicConfig(level=getattr(logging, options.log_level),
                            format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        name = options.command.replace("-", "_")
        if not hasattr(self, f'_run_{name}'):
            self._print(_verdict(False, f'Unknown command "{options.command}".'))
            return EXIT_FAILURE
        return self._dispatch(name, options.args)

    def emptyline(self):
        pass

    def do_exit(self, arg):
        """Leaves the prompt."""
        return True

    do_quit = do_exit

    #####################
    # Curvature Command #
    #####################
    @staticmethod
    def _parser_verify_curvature():
        parser = _parser("verify-curvature", "Verifies Condition 1 on samples and prints the report as JSON.")
        parser.add_argument("--manifold", required=True)
        parser.add_argument("--t-grid", type=int, default=16)
        parser.add_argument("--x-radius", type=float, default=None)
        parser.add_argument("--localize", action="store_true", help="also compute tau, kappa, rho, rho'")
        return parser

    def _run_verify_curvature(self, options):
        chart = load_manifold(options.manifold).chart
        report = verify_condition1(chart, t_grid_density=options.t_grid, x_radius=options.x_radius)
        if report.condition1_holds and options.localize:
            report = compute_localization(chart, report)
        self._print_json(report.to_dict())
        self._print(_verdict(report.condition1_holds, f'Condition 1 (c1={report.c1:.6g}, c2={report.c2:.6g})'))
        return EXIT_PASS if report.condition1_holds else EXIT_CURVATURE

    def do_verify_curvature(self, arg):
        """verify-curvature --manifold FILE [--t-grid N] [--x-radius r] [--localize]"""
        self._dispatch("verify_curvature", shlex.split(arg))

    ##################
    # Kernel Command #
    ##################
    @staticmethod
    def _parser_selberg():
        parser = _parser("selberg", "Builds the Selberg pair and checks S^- <= chi <= S^+.")
        parser.add_argument("--delta", type=float, required=True)
        parser.add_argument("--degree", type=int, required=True)
        parser.add_argument("--emit-csv", default=None, help="file receiving (theta, S-, chi, S+) samples")
        return parser

    def _run_selberg(self, options):
        pair = selberg_pair(options.delta, options.degree)
        report = check_sandwich(pair)
        if options.emit_csv:
            grid = sandwich_grid(pair.delta, pair.degree)
            rows = zip(grid.tolist(), pair.minus(grid).tolist(), chi(pair.delta, grid).tolist(),
                       pair.plus(grid).tolist())
            with open(options.emit_csv, "w", newline="", encoding="utf-8") as file:
                writer = csv.writer(file)
                writer.writerow(("theta", "minorant", "indicator", "majorant"))
                writer.writerows(rows)
            self._print(f'Wrote {report.grid_size} samples to "{options.emit_csv}".')
        self._print(_verdict(report.passed, f'Sandwich for delta={pair.delta:g}, J={pair.degree} '
                                            f'(margins {report.worst_lower_margin:.3g}, '
                                            f'{report.worst_upper_margin:.3g})'))
        return EXIT_PASS if report.passed else EXIT_FAILURE

    def do_selberg(self, arg):
        """selberg --delta d --degree J [--emit-csv FILE]"""
        self._dispatch("selberg", shlex.split(arg))

    ####################
    # Legendre Command #
    ####################
    @staticmethod
    def _parser_legendre_check():
        parser = _parser("legendre-check", "Measures the Legendre round trip of one map of a chart.")
        parser.add_argument("--manifold", required=True)
        parser.add_argument("--map-index", type=int, default=1, help="1-based index r of the map f_r")
        parser.add_argument("--density", type=int, default=10)
        parser.add_argument("--no-biconjugate", action="store_true")
        return parser

    def _run_legendre_check(self, options):
        chart = load_manifold(options.manifold).chart
        if not 1 <= options.map_index <= chart.R:
            raise ValueError(f'Map index must lie in 1..{chart.R}, got {options.map_index}.')
        legendre = LegendreChart(chart.maps[options.map_index - 1], chart.x0, chart.eps0)
        statistics = round_trip_statistics(legendre, density=options.density, biconjugate=not options.no_biconjugate)
        bilipschitz = bilipschitz_ratios(legendre)
        statistics["bilipschitz"] = {"lower": bilipschitz.lower, "upper": bilipschitz.upper}
        self._print_json(statistics)
        passed = statistics["max_round_trip_error"] <= ROUND_TRIP_TOLERANCE
        self._print(_verdict(passed, f'Round trip error {statistics["max_round_trip_error"]:.3g}'))
        return EXIT_PASS if passed else EXIT_FAILURE

    def do_legendre_check(self, arg):
        """legendre-check --manifold FILE [--map-index r] [--density N] [--no-biconjugate]"""
        self._dispatch("legendre_check", shlex.split(arg))

    #################
    # Phase Command #
    #################
    @staticmethod
    def _parser_phase_check():
        parser = _parser("phase-check", "Compares I(q; j; k) with its stationary-phase leading term as CSV.")
        parser.add_argument("--manifold", required=True)
        parser.add_argument("--lambda-list", type=int, nargs="+", required=True)
        parser.add_argument("--j", type=int, nargs="+", default=None, help="direction j with j_1 = 1 (default e_1)")
        parser.add_argument("--k", type=int, nargs="+", default=None, help="dual vector (default 0)")
        return parser

    def _run_phase_check(self, options):
        config = ExperimentConfig(manifold=options.manifold, q_list=tuple(options.lambda_list),
                                  delta_rule=parse_delta_rule("0"), weighted=True)
        runner = ExperimentRunner(config, persist=False)
        chart = runner.chart
        curvature = runner.verify_curvature()
        weight = runner.build_weight()
        j = tuple(options.j) if options.j else (1,) + (0,) * (chart.R - 1)
        if j[0] != 1:
            raise ValueError(f'The direction j must have j_1 = 1 so that lambda = q, got {j}.')
        k = tuple(options.k) if options.k else (0,) * chart.n
        results = []
        legendre = None
        self._print("lambda,abs_integral,leading,rel_err")
        for lam in options.lambda_list:
            spec = OscillatoryIntegralSpec.from_chart(chart, weight, j, k, lam)
            if legendre is None:
                legendre = phase_legendre_chart(spec)
            result = stationary_phase_leading(spec, curvature, legendre_chart=legendre)
            results.append(result)
            error = "" if result.relative_error is None else f'{result.relative_error:.6g}'
            self._print(f'{result.lam:g},{abs(result.quadrature):.6g},{abs(result.leading):.6g},{error}')
        if len(results) > 1 and all(r.relative_error for r in results):
            logger.info(f'Relative error ratios per rung: {np.round(relative_error_trend(results), 3).tolist()}.')
        return EXIT_PASS

    def do_phase_check(self, arg):
        """phase-check --manifold FILE --lambda-list L1 L2 ... [--j ...] [--k ...]"""
        self._dispatch("phase_check", shlex.split(arg))

    #################
    # Count Command #
    #################
    @staticmethod
    def _parser_count():
        parser = _parser("count", "Counts rational points a/q (q <= Q) near or on a manifold.")
        parser.add_argument("--manifold", required=True)
        parser.add_argument("--Q", type=int, required=True)
        parser.add_argument("--delta", default="0", help='literal, "Q^-a" or "Q^-a+eps"')
        parser.add_argument("--weighted", action="store_true")
        parser.add_argument("--on", action="store_true", help="count exactly on the manifold")
        parser.add_argument("--workers", type=int, default=1)
        parser.add_argument("--scan-cap", type=int, default=DEFAULT_SCAN_CAP)
        parser.add_argument("--csv", default=None, help="file the result row is appended to")
        return parser

    def _run_count(self, options):
        rule = parse_delta_rule(options.delta)
        config = ExperimentConfig(manifold=options.manifold, q_list=(options.Q,), delta_rule=rule,
                                  mode=ExperimentMode.ON if options.on else ExperimentMode.NEAR,
                                  weighted=options.weighted, workers=options.workers, scan_cap=options.scan_cap)
        runner = ExperimentRunner(config, persist=False)
        counter = RationalPointCounter(runner.chart, workers=options.workers, scan_cap=options.scan_cap)
        if options.on:
            result = counter.count_on(options.Q)
        elif options.weighted:
            runner.verify_curvature()
            result = counter.count_weighted(runner.build_weight(), options.Q, rule.delta(options.Q),
                                            curvature=runner.curvature)
        else:
            result = counter.count_near(CountQuery(Q=options.Q, delta=rule.delta(options.Q)))
        self._print_json(result.to_dict())
        if options.csv:
            append_csv_rows(options.csv, [result.csv_row()], header=CSV_HEADER)
        return EXIT_PASS

    def do_count(self, arg):
        """count --manifold FILE --Q N [--delta RULE] [--weighted | --on] [--workers N] [--csv FILE]"""
        self._dispatch("count", shlex.split(arg))

    ####################
    # Matrices Command #
    ####################
    @staticmethod
    def _parser_matrices():
        parser = _parser("matrices", "Builds the recursive family with A(t)^2 = |t|^2 I and certifies its pencil.")
        parser.add_argument("--suslin", type=int, required=True, metavar="R")
        parser.add_argument("--emit-manifold", default=None, help="JSON file receiving the induced chart")
        return parser

    def _run_matrices(self, options):
        family = suslin_family(options.suslin)
        certificate = certify_pencil(family)
        self._print_json(family.to_dict())
        if options.emit_manifold:
            chart = chart_from_family(family, name=f'suslin-{options.suslin}')
            path = dump_manifold(chart, options.emit_manifold)
            self._print(f'Wrote chart n={chart.n}, R={chart.R} to "{path}".')
        self._print(_verdict(certificate.holds, f'Pencil nonsingular (min |det|^(1/n) = '
                                                f'{certificate.min_det_root:.6g})'))
        return EXIT_PASS if certificate.holds else EXIT_FAILURE

    def do_matrices(self, arg):
        """matrices --suslin R [--emit-manifold FILE]"""
        self._dispatch("matrices", shlex.split(arg))

    #######################
    # Experiment Commands #
    #######################
    @staticmethod
    def _parser_experiment():
        parser = _parser("experiment", "Runs the count ladder of an experiment file and persists the run.")
        parser.add_argument("--config", required=True,
                            help="JSON or TOML experiment file; the largest rung must stay under its scan_cap "
                                 "(unweighted rungs scan the whole chart box, e.g. about 1.4e9 base points for "
                                 "suslin2 at Q=1600)")
        return parser

    def _run_experiment(self, options):
        config = load_experiment_config(options.config)
        record = run_experiment(config)
        self._print(f'{"Q":>8} {"delta":>12} {"count":>14} {"ratio":>10} {"fitted":>10}')
        for row in record.rows:
            ratio = "-" if row.ratio is None else f'{row.ratio:.6f}'
            fitted = "-" if row.fitted_ratio is None else f'{row.fitted_ratio:.6f}'
            self._print(f'{row.Q:>8} {row.delta:>12.6g} {row.count:>14.6g} {ratio:>10} {fitted:>10}')
        if record.fitted_constant is not None:
            self._print(f'Fitted constant c = {record.fitted_constant:.6g}')
        self._print(_verdict(True, f'Experiment "{config.name}" finished with {len(record.rows)} rungs.'))
        return EXIT_PASS

    def do_experiment(self, arg):
        """experiment --config FILE"""
        self._dispatch("experiment", shlex.split(arg))

    @staticmethod
    def _parser_report():
        parser = _parser("report", "Fits the error envelope or checks the dimension growth of a persisted run.")
        parser.add_argument("--run", required=True)
        parser.add_argument("--fit-envelope", action="store_true")
        parser.add_argument("--max-spread", type=float, default=MAX_ENVELOPE_SPREAD)
        parser.add_argument("--dimension-growth", action="store_true")
        parser.add_argument("--q-list", type=int, nargs="+", default=None, help="ladder of the growth check")
        parser.add_argument("--slack", type=float, default=DEFAULT_SLACK)
        return parser

    def _run_report(self, options):
        record = load_run_record(options.run)
        self._print(f'Run of {record.config.get("name", "?")} (n={record.n}, R={record.R}), '
                    f'{len(record.rows)} rungs, fitted constant {record.fitted_constant}.')
        passed = True
        if options.fit_envelope:
            fit = fit_error_envelope(record, max_spread=options.max_spread)
            write_run_record(record.with_envelope(fit.to_dict()), options.run)
            self._print_json(fit.to_dict())
            self._print(_verdict(fit.bounded, f'Envelope ratio spread {fit.spread:.3g} '
                                              f'(bound {options.max_spread:g})'))
            passed = passed and fit.bounded
        if options.dimension_growth:
            chart = load_manifold(record.config["manifold"]).chart
            q_list = options.q_list or record.q_list
            report = dimension_growth_check(chart, q_list, slack=options.slack,
                                            workers=int(record.config.get("workers", 1)))
            self._print_json(report.to_dict())
            if report.vacuous:
                self._print(_verdict(True, f'Dimension growth bound is vacuous (exponent n = {report.n}).'))
            else:
                self._print(_verdict(report.passed, f'Fitted exponent {report.fitted_exponent:.4g} against '
                                                    f'{report.bound_exponent:.4g} + {report.slack:g}'))
            passed = passed and report.passed
        return EXIT_PASS if passed else EXIT_FAILURE

    def do_report(self, arg):
        """report --run FILE [--fit-envelope] [--dimension-growth] [--q-list Q1 Q2 ...]"""
        self._dispatch("report", shlex.split(arg))
