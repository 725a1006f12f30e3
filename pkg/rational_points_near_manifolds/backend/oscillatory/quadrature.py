"""This module implements composite tensor Gauss-Legendre quadrature on boxes with an embedded error estimate."""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from rational_points_near_manifolds.errors import QuadratureBudgetError

logger = logging.getLogger(__name__)

NODES_PER_PANEL = 20
ESTIMATE_NODES_PER_PANEL = 14
MIN_PANELS = 8
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_POINTS = 50_000_000
MAX_REFINEMENTS = 3
_CHUNK_POINTS = 1 << 20


@lru_cache(maxsize=8)
def gauss_legendre_rule(nodes):
    """Gets the Gauss-Legendre rule on [-1, 1].

    Args:
        nodes: The number of nodes.

    Returns:
        The tuple (points, weights).
    """
    points, weights = special.roots_legendre(nodes)
    return points, weights


def composite_rule(lower, upper, panels, nodes=NODES_PER_PANEL):
    """Builds the composite Gauss-Legendre rule over equal panels of [lower, upper].

    Args:
        lower: The lower interval bound.
        upper: The upper interval bound.
        panels: The number of panels.
        nodes: The nodes per panel.

    Returns:
        The tuple (points, weights) of length panels * nodes.
    """
    if panels < 1:
        raise ValueError(f'Panel count must be positive, got {panels}.')
    base_points, base_weights = gauss_legendre_rule(nodes)
    edges = np.linspace(lower, upper, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    points = (mid[:, None] + half[:, None] * base_points[None, :]).ravel()
    weights = (half[:, None] * base_weights[None, :]).ravel()
    return points, weights


def tensor_sum(integrand, axes, max_points=DEFAULT_MAX_POINTS):
    """Sums prod_i w_i * integrand(x) over the tensor product of 1-D rules.

    Args:
        integrand: Callable mapping an (m, n) point array to m (complex) values.
        axes: The 1-D rules (points, weights) per axis.
        max_points: Cap on the number of tensor points.

    Returns:
        The complex sum.
    """
    shape = tuple(len(points) for points, _ in axes)
    total = math.prod(shape)
    if total > max_points:
        raise QuadratureBudgetError(f'Tensor grid of {total} points exceeds the budget of {max_points}.')
    result = 0j
    for start in range(0, total, _CHUNK_POINTS):
        index = np.unravel_index(np.arange(start, min(start + _CHUNK_POINTS, total)), shape)
        points = np.stack([axes[i][0][index[i]] for i in range(len(axes))], axis=1)
        weights = np.prod([axes[i][1][index[i]] for i in range(len(axes))], axis=0)
        result += complex(np.sum(weights * integrand(points)))
    return result


@dataclass(frozen=True)
class QuadratureResult:
    """A quadrature value with the difference to the coarser embedded rule as error estimate."""
    value: complex
    error_estimate: float
    points: int
    panels: tuple


def box_quadrature(integrand, lower, upper, panels, axis_factors=None, tolerance=DEFAULT_TOLERANCE,
                   max_points=DEFAULT_MAX_POINTS, max_refinements=MAX_REFINEMENTS):
    """Integrates over a box with panel Gauss-Legendre rules, doubling the panels until the estimate meets tolerance.

    Args:
        integrand: Callable mapping an (m, n) point array to m (complex) values.
        lower: The lower box corner.
        upper: The upper box corner.
        panels: The initial panel count per axis.
        axis_factors: Optional callables g_i(t) folded into the 1-D weights (separable part of the integrand).
        tolerance: The absolute tolerance of the error estimate.
        max_points: Cap on the number of tensor points per rule.
        max_refinements: The maximal number of panel doublings.

    Returns:
        The quadrature result.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    panels = [max(MIN_PANELS, int(p)) for p in panels]

    def axis_rules(nodes):
        rules = []
        for i, count in enumerate(panels):
            points, weights = composite_rule(lower[i], upper[i], count, nodes)
            if axis_factors is not None:
                weights = weights * axis_factors[i](points)
            rules.append((points, weights))
        return rules

    for refinement in range(max_refinements + 1):
        fine = tensor_sum(integrand, axis_rules(NODES_PER_PANEL), max_points)
        coarse = tensor_sum(integrand, axis_rules(ESTIMATE_NODES_PER_PANEL), max_points)
        error = abs(fine - coarse)
        points = math.prod(panels) * NODES_PER_PANEL ** len(panels)
        logger.debug(f'Quadrature with panels {panels}: {points} points, error estimate {error:.3g}.')
        if error <= tolerance:
            return QuadratureResult(value=fine, error_estimate=error, points=points, panels=tuple(panels))
        if refinement < max_refinements:
            panels = [2 * p for p in panels]
    raise QuadratureBudgetError(
        f'Quadrature error estimate {error:.3g} above {tolerance:.3g} after {max_refinements} refinements.')
