"""This module implements a naive reference enumerator in exact rational arithmetic."""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction


@dataclass(frozen=True)
class ReferenceCounts:
    """Counts of the naive double loop over q and the base points of the closed chart box."""
    count: int
    weighted: float
    base_weighted: float
    scanned: int


def _height_distance(smooth_map, x, q):
    """Gets ||q f(x)||, exactly for rational polynomials."""
    if smooth_map.exact_rational:
        value = q * smooth_map.evaluate_exact(x)
        return abs(value - math.floor(value + Fraction(1, 2)))
    value = q * smooth_map.evaluate([float(c) for c in x])
    return abs(value - round(value))


def reference_counts(chart, Q, delta, weight=None):
    """Counts (a, q), q <= Q, a/q in the closed chart box, with ||q f_r(a/q)|| <= delta, one point at a time.

    Args:
        chart: The manifold chart.
        Q: The denominator bound.
        delta: The height threshold.
        weight: An optional weight summed over the counted and over all base points.

    Returns:
        The reference counts.
    """
    delta = as_fraction(delta)
    count = 0
    scanned = 0
    weighted = []
    base = []
    for q in range(1, Q + 1):
        ranges = [range(math.ceil(q * (c - chart.eps0)), math.floor(q * (c + chart.eps0)) + 1) for c in chart.x0]
        for a in product(*ranges):
            scanned += 1
            x = [Fraction(ai, q) for ai in a]
            w = weight.evaluate(x) if weight is not None else 0.0
            base.append(w)
            if all(_height_distance(m, x, q) <= delta for m in chart.maps):
                count += 1
                weighted.append(w)
    return ReferenceCounts(count=count, weighted=math.fsum(weighted), base_weighted=math.fsum(base), scanned=scanned)
