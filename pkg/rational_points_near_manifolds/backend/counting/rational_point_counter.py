"""This module implements the enumeration of rational points a/q (q <= Q) near a manifold chart.

For every q the base points a in Z^n with a/q in the chart box are scanned, and (a, q) is counted when
||q f_r(a/q)|| <= delta for all r. The sweep is a reduction over q and may run on several threads; the per-q
partial results are combined in q order, so the totals do not depend on the number of workers.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from rational_points_near_manifolds.backend.counting.count_query import CountQuery, CountResult
from rational_points_near_manifolds.backend.counting.exact_height import (
    FLOAT_GUARD, ExactHeightForm, float_height_distances, float_within_delta, lattice_dtype,
    nearest_integer_residue, within_delta
)
from rational_points_near_manifolds.backend.funcspace.exact import as_fraction
from rational_points_near_manifolds.errors import NotPolynomialError, ScanBudgetError, SupportViolationError

logger = logging.getLogger(__name__)

DEFAULT_SCAN_CAP = 10 ** 9


class EnumerationStrategy(Enum):
    """An enum of possible height test strategies."""
    EXACT = 1  # Integer arithmetic (polynomial maps with rational coefficients)
    FLOAT = 2  # Double precision with a guard band


def lattice_ranges(center, radius, q, open_box=False):
    """Gets the integer ranges of the a with a/q in the box around the center.

    Args:
        center: The exact box center.
        radius: The exact box radius.
        q: The denominator.
        open_box: Whether the box is open (weight support) or closed (chart domain).

    Returns:
        The list of inclusive ranges (lo, hi) per axis.
    """
    radius = as_fraction(radius)
    ranges = []
    for c in center:
        lower = q * (as_fraction(c) - radius)
        upper = q * (as_fraction(c) + radius)
        if open_box:
            ranges.append((math.floor(lower) + 1, math.ceil(upper) - 1))
        else:
            ranges.append((math.ceil(lower), math.floor(upper)))
    return ranges


def lattice_size(ranges):
    return math.prod(max(0, hi - lo + 1) for lo, hi in ranges)


def lattice_points(ranges, dtype=np.int64):
    """Builds the integer points of a product of ranges.

    Args:
        ranges: The inclusive ranges per axis.
        dtype: np.int64 or object (Python integers).

    Returns:
        The array of shape (m, n).
    """
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ranges]
    if any(axis.size == 0 for axis in axes):
        return np.empty((0, len(ranges)), dtype=dtype)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(ranges))
    return grid if dtype is np.int64 else grid.astype(object)


@dataclass(frozen=True)
class _DenominatorPartial:
    """The contribution of a single denominator q."""
    q: int
    count: int
    weighted: float
    base: float
    scanned: int
    near_threshold: int


@dataclass(frozen=True)
class BaseCountResult:
    """The weighted base count N0 = sum_{q <= Q} sum_a w(a/q) and its density estimates."""
    Q: int
    N0: float
    sigma_estimate: float
    sigma_predicted: float
    relative_gap: Optional[float]


##########################
# Rational Point Counter #
##########################
class RationalPointCounter:
    """A counter of rational points near (or on) the manifold given by a chart."""

    def __init__(self, chart, strategy=None, workers=1, scan_cap=DEFAULT_SCAN_CAP, guard=FLOAT_GUARD):
        """Initializes RationalPointCounter.

        Args:
            chart: The manifold chart.
            strategy: The height test strategy (EXACT for rational polynomial charts, FLOAT otherwise).
            workers: The number of threads the sweep over q is split across.
            scan_cap: Cap on the total number of base points per sweep.
            guard: The guard band of float height decisions.
        """
        self.chart = chart
        self.forms = tuple(ExactHeightForm.from_map(m) for m in chart.maps) if chart.exact_rational else None
        if strategy is None:
            strategy = EnumerationStrategy.EXACT if self.forms is not None else EnumerationStrategy.FLOAT
        if strategy == EnumerationStrategy.EXACT and self.forms is None:
            raise NotPolynomialError("Exact enumeration needs polynomial maps with rational coefficients.")
        self.strategy = strategy
        self.workers = max(1, int(workers))
        self.scan_cap = scan_cap
        self.guard = guard

    def scan_size(self, Q, center, radius, open_box=False):
        """Gets the number of base points a sweep up to Q scans.

        Args:
            Q: The denominator bound.
            center: The box center.
            radius: The box radius.
            open_box: Whether the box is open.

        Returns:
            The number of base points.
        """
        return sum(lattice_size(lattice_ranges(center, radius, q, open_box)) for q in range(1, Q + 1))

    def _scan_denominator(self, q, delta, weight, center, radius, open_box, exact):
        ranges = lattice_ranges(center, radius, q, open_box)
        scanned = lattice_size(ranges)
        if scanned == 0:
            return _DenominatorPartial(q=q, count=0, weighted=0.0, base=0.0, scanned=0, near_threshold=0)

        near = 0
        if exact:
            max_abs = max(abs(v) for bounds in ranges for v in bounds)
            lattice = lattice_points(ranges, lattice_dtype(self.forms, q, max_abs))
            mask = np.ones(lattice.shape[0], dtype=bool)
            powers = {}
            for form in self.forms:
                denominator = form.q_denominator(q)
                _, residues = nearest_integer_residue(form.numerators(lattice, q, powers), denominator)
                mask &= within_delta(residues, denominator, delta)
        else:
            lattice = lattice_points(ranges)
            points = lattice / q
            mask = np.ones(lattice.shape[0], dtype=bool)
            for smooth_map in self.chart.maps:
                within, near_map = float_within_delta(
                    float_height_distances(q * smooth_map.evaluate_many(points)), delta, self.guard)
                mask &= within
                near += near_map

        count = int(np.count_nonzero(mask))
        if weight is None:
            return _DenominatorPartial(q=q, count=count, weighted=0.0, base=0.0, scanned=scanned,
                                       near_threshold=near)
        weights = weight.evaluate_many(lattice.astype(float) / q)
        return _DenominatorPartial(q=q, count=count, weighted=math.fsum(weights[mask].tolist()),
                                   base=math.fsum(weights.tolist()), scanned=scanned, near_threshold=near)

    def _sweep(self, Q, delta, weight, center, radius, open_box, exact):
        """Scans all q <= Q and returns the per-q partial results in q order."""
        scan = self.scan_size(Q, center, radius, open_box)
        if scan > self.scan_cap:
            raise ScanBudgetError(f'Sweep up to Q={Q} scans {scan} base points, cap is {self.scan_cap}.')

        def scan_q(q):
            return self._scan_denominator(q, delta, weight, center, radius, open_box, exact)

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                partials = list(pool.map(scan_q, range(1, Q + 1)))
        else:
            partials = [scan_q(q) for q in range(1, Q + 1)]
        for partial in partials:
            logger.debug(f'q={partial.q}: {partial.count} of {partial.scanned} base points counted.')
        near = sum(p.near_threshold for p in partials)
        if near:
            logger.warning(f'{near} float height decisions within {self.guard:g} of delta={float(delta):g}.')
        return partials

    def _result(self, query, partials, start_time, weighted, exact):
        scanned = sum(p.scanned for p in partials)
        near = sum(p.near_threshold for p in partials)
        if weighted:
            count = math.fsum(p.weighted for p in partials)
            base = math.fsum(p.base for p in partials)
        else:
            count = sum(p.count for p in partials)
            base = scanned
        return CountResult.build(query, self.chart.R, count, base, scanned, time.time() - start_time,
                                 exact=exact, near_threshold=near)

    def count_near(self, query):
        """Counts N(M; Q, delta) = #{(a, q) : q <= Q, a/q in the chart box, ||q f_r(a/q)|| <= delta}.

        Args:
            query: The unweighted count query.

        Returns:
            The count result (N0 is the number of base points scanned).
        """
        if query.weighted:
            raise ValueError("count_near answers unweighted queries; use count_weighted.")
        start_time = time.time()
        exact = self.strategy == EnumerationStrategy.EXACT
        partials = self._sweep(query.Q, query.delta, None, self.chart.x0, self.chart.eps0, False, exact)
        result = self._result(query, partials, start_time, weighted=False, exact=exact)
        logger.info(f'N(Q={query.Q}, delta={float(query.delta):g}) = {result.count} '
                    f'({result.points_scanned} base points, {result.wall_time:.2f}s).')
        return result

    def check_support(self, weight, curvature=None):
        """Checks that supp w lies in B_kappa(x0) (B_eps0(x0) without a localized curvature report).

        Args:
            weight: The weight function.
            curvature: The localized curvature report.
        """
        radius = self.chart.eps0
        if curvature is not None and curvature.localized:
            radius = as_fraction(curvature.kappa)
        lower, upper = weight.support_box()
        for lo, up, c in zip(lower, upper, self.chart.x0):
            if lo < c - radius or up > c + radius:
                raise SupportViolationError(f'Support of {weight} is not contained in the box of radius {radius}.')
        if weight.arity != self.chart.n:
            raise SupportViolationError(f'Weight dimension {weight.arity} differs from n={self.chart.n}.')

    def count_weighted(self, weight, Q, delta, curvature=None):
        """Computes N_w(Q, delta) = sum_{q <= Q} sum_a w(a/q) over the qualifying (a, q), and N0 in the same sweep.

        Args:
            weight: The weight function.
            Q: The denominator bound.
            delta: The height threshold.
            curvature: The localized curvature report bounding the support.

        Returns:
            The count result.
        """
        query = CountQuery(Q=Q, delta=delta, weighted=True, weight=weight)
        self.check_support(weight, curvature)
        start_time = time.time()
        exact = self.strategy == EnumerationStrategy.EXACT
        partials = self._sweep(Q, delta, weight, weight.center, weight.support_radius, True, exact)
        result = self._result(query, partials, start_time, weighted=True, exact=exact)
        logger.info(f'N_w(Q={Q}, delta={float(delta):g}) = {result.count:.6g}, N0 = {result.N0:.6g} '
                    f'({result.wall_time:.2f}s).')
        return result

    def count_on(self, Q):
        """Counts the (a, q) with q f_r(a/q) in Z for all r, decided in exact arithmetic.

        Args:
            Q: The denominator bound.

        Returns:
            The count result.
        """
        if self.forms is None:
            raise NotPolynomialError("Counting on the manifold needs polynomial maps with rational coefficients; "
                                     "use count_near with a small delta (approximate).")
        query = CountQuery(Q=Q, delta=Fraction(0))
        start_time = time.time()
        partials = self._sweep(Q, Fraction(0), None, self.chart.x0, self.chart.eps0, False, True)
        return self._result(query, partials, start_time, weighted=False, exact=True)

    def count(self, query, curvature=None):
        """Answers a weighted or unweighted query."""
        if query.weighted:
            return self.count_weighted(query.weight, query.Q, query.delta, curvature=curvature)
        return self.count_near(query)

    def time_measured_count(self, query, curvature=None):
        """Answers a query and measures the required time and the scan rate.

        Args:
            query: The count query.
            curvature: The localized curvature report (weighted queries).

        Returns:
            The result and the measures.
        """
        start_time = time.time()
        result = self.count(query, curvature=curvature)
        count_time = time.time() - start_time
        measures = {
            "count_time": count_time,
            "points_scanned": result.points_scanned,
            "points_per_second": result.points_scanned / count_time if count_time > 0 else float("inf"),
            "strategy": self.strategy.name,
            "workers": self.workers,
        }
        return {
            "result": result,
            "measures": measures
        }


def count_near(chart, query, **options):
    """Counts N(M; Q, delta) for a chart (see RationalPointCounter.count_near)."""
    return RationalPointCounter(chart, **options).count_near(query)


def count_weighted(chart, weight, Q, delta, curvature=None, **options):
    """Computes N_w(Q, delta) and N0 for a chart (see RationalPointCounter.count_weighted)."""
    return RationalPointCounter(chart, **options).count_weighted(weight, Q, delta, curvature=curvature)


def count_on(chart, Q, **options):
    """Counts N(M; Q, 0) exactly for a rational polynomial chart (see RationalPointCounter.count_on)."""
    return RationalPointCounter(chart, **options).count_on(Q)


def base_count_sigma(weight, Q):
    """Computes N0 = sum_{q <= Q} sum_a w(a/q), the estimate N0/Q^(n+1), and the prediction int w/(n+1).

    Args:
        weight: The weight function.
        Q: The denominator bound.

    Returns:
        The base count result.
    """
    if int(Q) != Q or Q < 1:
        raise ValueError(f'Q must be a positive integer, got {Q}.')
    partial_sums = []
    for q in range(1, Q + 1):
        lattice = lattice_points(lattice_ranges(weight.center, weight.support_radius, q, open_box=True))
        if lattice.shape[0]:
            partial_sums.append(math.fsum(weight.evaluate_many(lattice / q).tolist()))
    base = math.fsum(partial_sums)
    n = weight.arity
    estimate = base / Q ** (n + 1)
    predicted = weight.integral() / (n + 1)
    gap = abs(estimate - predicted) / predicted if predicted > 0 else None
    return BaseCountResult(Q=Q, N0=base, sigma_estimate=estimate, sigma_predicted=predicted, relative_gap=gap)
