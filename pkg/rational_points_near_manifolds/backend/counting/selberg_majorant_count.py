"""This module bounds N_w(Q, delta) by the Selberg majorant,

    N_w(Q, delta) <= sum_{q <= Q} sum_a w(a/q) prod_r S_J^+(q f_r(a/q)),

whose constant Fourier term contributes the main term (2 delta + 1/(J+1))^R N0.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from rational_points_near_manifolds.backend.counting.rational_point_counter import lattice_points, lattice_ranges
from rational_points_near_manifolds.backend.kernels.selberg_pair import selberg_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelbergBound:
    """The majorant sum, its main term, and for R = 1 the minorant sum."""
    upper_bound: float
    main_term: float
    lower_bound: Optional[float]
    N0: float
    degree: int


def selberg_upper_bound_count(chart, weight, Q, delta, J):
    """Evaluates the Selberg majorant (and for R = 1 the minorant) sums of N_w(Q, delta).

    Args:
        chart: The manifold chart.
        weight: The weight function (support inside the chart box).
        Q: The denominator bound.
        delta: The height threshold, 0 < delta <= 1/2.
        J: The degree of the Selberg pair.

    Returns:
        The Selberg bound.
    """
    pair = selberg_pair(float(delta), J)
    upper_terms = []
    lower_terms = []
    base_terms = []
    for q in range(1, Q + 1):
        lattice = lattice_points(lattice_ranges(weight.center, weight.support_radius, q, open_box=True))
        if lattice.shape[0] == 0:
            continue
        points = lattice / q
        weights = weight.evaluate_many(points)
        plus = weights.copy()
        minus = weights.copy()
        for smooth_map in chart.maps:
            heights = q * smooth_map.evaluate_many(points)
            plus = plus * pair.plus(heights)
            minus = minus * pair.minus(heights)
        upper_terms.append(math.fsum(plus.tolist()))
        lower_terms.append(math.fsum(minus.tolist()))
        base_terms.append(math.fsum(weights.tolist()))
    base = math.fsum(base_terms)
    main_term = pair.coefficient(0, 1).real ** chart.R * base
    bound = SelbergBound(upper_bound=math.fsum(upper_terms), main_term=main_term,
                         lower_bound=math.fsum(lower_terms) if chart.R == 1 else None, N0=base, degree=J)
    logger.info(f'Selberg majorant sum {bound.upper_bound:.6g} (main term {main_term:.6g}, J={J}).')
    return bound
