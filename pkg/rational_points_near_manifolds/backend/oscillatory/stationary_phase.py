"""This module implements the leading stationary-phase term

    I(q; j; k) ~ w(x) |det H_{F_j}(x)|^{-1/2} lambda^{-n/2} e(lambda phi(x) + sigma/8),

at the stationary point x = x_{j;k} of phi = F_j - (k/j_1).x, where phi(x) = -F_j*(k/j_1).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from rational_points_near_manifolds.backend.curvature.curvature_verifier import signature_of
from rational_points_near_manifolds.backend.kernels.trig_poly import e
from rational_points_near_manifolds.backend.legendre.legendre_chart import LegendreChart
from rational_points_near_manifolds.backend.oscillatory.oscillatory_integral import quad_integral
from rational_points_near_manifolds.errors import ConvergenceError, CurvatureError, InversionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StationaryPhaseResult:
    """The leading term at the stationary point, and its relative error against the quadrature value."""
    quadrature: Optional[complex]
    leading: complex
    stationary_point: Optional[Tuple[float, ...]]
    signature: Optional[int]
    delta: Optional[float]
    lam: float
    relative_error: Optional[float]
    phase_value: Optional[float] = None
    phase_value_direct: Optional[float] = None

    @property
    def in_support(self):
        """Whether a stationary point was found in the weight support."""
        return self.stationary_point is not None


def phase_legendre_chart(spec, **kwargs):
    """Builds the Legendre chart of F_j over the support box of the weight.

    Args:
        spec: The integral spec (j in the normalized cone).
        **kwargs: Further LegendreChart options.

    Returns:
        The Legendre chart.
    """
    weight = spec.weight
    return LegendreChart(spec.pencil_map, [float(c) for c in weight.center], float(weight.support_radius), **kwargs)


def stationary_phase_leading(spec, curvature, legendre_chart=None, compare=True):
    """Computes the stationary point, signature, |det H| and the leading term of I(q; j; k).

    Args:
        spec: The integral spec; j must lie in the cone 0 <= j_r <= j_1, j_1 >= 1.
        curvature: The curvature report of the chart the maps come from.
        legendre_chart: A prebuilt chart of F_j on supp w (built if omitted).
        compare: Whether to compute the quadrature value and the relative error.

    Returns:
        The stationary-phase result; without a stationary point in supp w the leading term is 0.
    """
    if not curvature.condition1_holds:
        raise CurvatureError("Stationary phase requires a chart satisfying Condition 1.", curvature)
    if not spec.in_cone:
        raise ValueError(f'Frequency vector {spec.j} is not in the cone 0 <= j_r <= j_1, j_1 >= 1.')
    chart = phase_legendre_chart(spec) if legendre_chart is None else legendre_chart
    lam = float(spec.lam)
    quadrature = quad_integral(spec) if compare else None

    target = spec.stationary_target
    try:
        x = chart.invert_gradient(target)
    except InversionError as exc:
        if isinstance(exc, ConvergenceError):
            logger.warning(f'Stationary point search for k/j_1 = {target} did not converge: {exc}')
        else:
            logger.debug(f'No stationary point in supp w for k/j_1 = {target}.')
        return StationaryPhaseResult(quadrature=quadrature, leading=0j, stationary_point=None, signature=None,
                                     delta=None, lam=lam, relative_error=None)

    pencil = spec.pencil_map
    hess = pencil.hessian(x)
    signature = signature_of(hess)
    delta = abs(float(np.linalg.det(hess)))
    if delta < curvature.c1 * (1 - 1e-6):
        logger.warning(f'|det H| = {delta:.6g} at the stationary point is below c1 = {curvature.c1:.6g}.')

    phase_value = -chart.legendre_value(target)
    phase_value_direct = float(pencil.evaluate(x)) - float(np.dot(target, x))
    turns = lam * phase_value + signature / 8
    leading = complex(spec.weight.evaluate(x) * delta ** -0.5 * lam ** (-spec.n / 2) * e(turns - np.round(turns)))

    relative_error = None
    if quadrature is not None and leading != 0:
        relative_error = abs(quadrature - leading) / abs(leading)
    logger.debug(f'Stationary phase at lambda={lam:g}: x={x}, sigma={signature}, relative error {relative_error}.')
    return StationaryPhaseResult(quadrature=quadrature, leading=leading, stationary_point=tuple(float(v) for v in x),
                                 signature=signature, delta=delta, lam=lam, relative_error=relative_error,
                                 phase_value=phase_value, phase_value_direct=phase_value_direct)


def relative_error_trend(results):
    """Gets the ratios of consecutive relative errors (about 2 per doubling of lambda for an O(1/lambda) error).

    Args:
        results: Stationary-phase results ordered by lambda.

    Returns:
        The list of ratios.
    """
    errors = [r.relative_error for r in results]
    if any(err is None or err == 0 for err in errors):
        raise ValueError("Every result needs a nonzero relative error.")
    return [prev / cur for prev, cur in zip(errors, errors[1:])]
