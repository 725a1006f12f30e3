"""This module checks the growth of the number of rational points lying on the manifold.

For n >= 3, N(M; Q, 0) << Q^(n - (n-2)(R-1)/(n + 2(R-1))) (log Q)^c; the check fits the exponent of the counts
along a ladder and compares it with this bound.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from rational_points_near_manifolds.backend.counting.rational_point_counter import RationalPointCounter
from rational_points_near_manifolds.errors import DegenerateFitError, NotPolynomialError

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 0.15


def dimension_growth_exponent(n, R):
    """Gets n - (n-2)(R-1)/(n + 2(R-1)).

    Args:
        n: The manifold dimension.
        R: The codimension.

    Returns:
        The bound exponent.
    """
    return n - (n - 2) * (R - 1) / (n + 2 * (R - 1))


@dataclass(frozen=True)
class DimensionGrowthReport:
    """The fitted exponent of N(M; Q, 0) along a ladder against the bound exponent."""
    n: int
    R: int
    q_list: tuple
    counts: tuple
    fitted_exponent: Optional[float]
    bound_exponent: float
    slack: float
    vacuous: bool
    passed: bool

    def to_dict(self):
        return {
            "n": self.n, "R": self.R, "q_list": list(self.q_list), "counts": list(self.counts),
            "fitted_exponent": self.fitted_exponent, "bound_exponent": self.bound_exponent, "slack": self.slack,
            "vacuous": self.vacuous, "passed": self.passed,
        }


def fit_growth_exponent(q_list, counts):
    """Fits log(count) = e log(Q) + b by least squares.

    Args:
        q_list: The ladder.
        counts: The positive counts.

    Returns:
        The fitted exponent e.
    """
    if len(q_list) < 2 or any(c <= 0 for c in counts):
        raise DegenerateFitError("Growth fits need at least two rungs with positive counts.")
    slope, _ = np.polyfit(np.log(np.asarray(q_list, dtype=float)), np.log(np.asarray(counts, dtype=float)), 1)
    return float(slope)


def dimension_growth_check(chart, q_list, slack=DEFAULT_SLACK, workers=1, **options):
    """Counts N(M; Q, 0) along a ladder and compares the fitted exponent with the bound.

    Args:
        chart: The chart with rational polynomial maps.
        q_list: The increasing ladder.
        slack: The allowed excess of the fitted exponent.
        workers: The number of threads per count.
        **options: Further counter options (scan_cap).

    Returns:
        The report; for n <= 2 the bound is vacuous (exponent n) and nothing is counted.
    """
    if not chart.exact_rational:
        raise NotPolynomialError("Counting on the manifold needs polynomial maps with rational coefficients.")
    n, R = chart.n, chart.R
    q_list = tuple(int(Q) for Q in q_list)
    if n <= 2:
        logger.info(f'Dimension growth bound is vacuous for n={n} (exponent n).')
        return DimensionGrowthReport(n=n, R=R, q_list=q_list, counts=(), fitted_exponent=None, bound_exponent=float(n),
                                     slack=slack, vacuous=True, passed=True)
    counter = RationalPointCounter(chart, workers=workers, **options)
    counts = tuple(counter.count_on(Q).count for Q in q_list)
    fitted = fit_growth_exponent(q_list, counts)
    if not math.isfinite(fitted):
        raise DegenerateFitError(f'Fitted exponent is not finite ({fitted}).')
    bound = dimension_growth_exponent(n, R)
    passed = fitted <= bound + slack
    logger.info(f'Dimension growth: fitted exponent {fitted:.4g}, bound {bound:.4g} '
                f'({"pass" if passed else "fail"}, log factor ignored, Q up to {max(q_list)}).')
    return DimensionGrowthReport(n=n, R=R, q_list=q_list, counts=counts, fitted_exponent=fitted, bound_exponent=bound,
                                 slack=slack, vacuous=False, passed=passed)
