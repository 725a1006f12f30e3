"""This module measures the decay |I(q; j; k)| <= c_l lambda^(-l+1) of oscillatory integrals without stationary
points."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from rational_points_near_manifolds.backend.curvature.box_sampling import box_samples
from rational_points_near_manifolds.backend.oscillatory.oscillatory_integral import quad_integral_result
from rational_points_near_manifolds.errors import DegenerateFitError, EvaluationError

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = tuple(2 ** m for m in range(4, 11))
NOISE_FLOOR = 1e-13
GRADIENT_SAMPLE_DENSITY = 33
STATIONARY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class DecayReport:
    """The fitted exponent of log|I| against log lambda and the implied constant c_l."""
    smoothness: int
    lambdas: Tuple[float, ...]
    magnitudes: Tuple[float, ...]
    fitted_lambdas: Tuple[float, ...]
    fitted_exponent: float
    implied_constant: float
    gradient_lower_bound: float
    nonstationary: bool

    @property
    def bound_satisfied(self):
        """Whether the fitted exponent is at most -(l-1)."""
        return self.fitted_exponent <= -(self.smoothness - 1)


def phase_gradient_lower_bound(spec, density=GRADIENT_SAMPLE_DENSITY):
    """Samples min |grad phi|_inf over supp w for phi = sum_r (j_r/j_1) f_r - (k/j_1).x.

    Args:
        spec: The integral spec.
        density: The sampling density per axis.

    Returns:
        The tuple (lower bound, upper bound) of the sampled gradient norms.
    """
    weight = spec.weight
    points = box_samples([float(c) for c in weight.center], float(weight.support_radius), density)
    grads = spec.phase_map.gradient_many(points) / abs(spec.j[0])
    if not np.all(np.isfinite(grads)):
        raise EvaluationError("Phase gradient is not finite on the weight support.")
    norms = np.max(np.abs(grads), axis=1)
    return float(np.min(norms)), float(np.max(norms))


def _tail_maxima(values):
    """Replaces each value by the maximum over itself and all later ones (the decreasing upper envelope)."""
    return np.maximum.accumulate(np.asarray(values)[::-1])[::-1]


def nonstationary_decay(spec, smoothness, lambdas=DEFAULT_LAMBDAS):
    """Fits the slope of log|I| against log lambda over a lambda ladder.

    The magnitudes are replaced by their decreasing upper envelope (the bound of the estimate is an upper bound
    for every larger lambda), and values below the quadrature noise floor are dropped.

    Args:
        spec: The integral spec; q is replaced by lambda/j_1 for every ladder value.
        smoothness: The smoothness l of the estimate.
        lambdas: The lambda ladder (multiples of j_1).

    Returns:
        The decay report.
    """
    if spec.j[0] == 0:
        raise ValueError("Decay is measured along lambda = q j_1, which needs j_1 != 0.")
    lower, upper = phase_gradient_lower_bound(spec)
    nonstationary = lower > STATIONARY_THRESHOLD * max(upper, 1.0)
    if not nonstationary:
        logger.warning(f'Phase has a (near) stationary point in the weight support (min |grad| = {lower:.3g}).')
    if spec.weight.is_zero():
        return DecayReport(smoothness=smoothness, lambdas=tuple(float(v) for v in lambdas),
                           magnitudes=(0.0,) * len(lambdas), fitted_lambdas=(), fitted_exponent=-np.inf,
                           implied_constant=0.0, gradient_lower_bound=lower, nonstationary=nonstationary)

    magnitudes = []
    floors = []
    for lam in lambdas:
        if lam % spec.j[0] != 0:
            raise ValueError(f'lambda = {lam} is not a multiple of j_1 = {spec.j[0]}.')
        result = quad_integral_result(spec.with_q(abs(lam // spec.j[0])))
        magnitudes.append(abs(result.value))
        floors.append(max(NOISE_FLOOR * spec.weight.integral(), 10 * result.error_estimate))

    lam_array = np.asarray(lambdas, dtype=float)
    envelope = _tail_maxima(magnitudes)
    keep = envelope > np.asarray(floors)
    if np.count_nonzero(keep) < 2:
        raise DegenerateFitError(f'Fewer than two magnitudes above the noise floor: {magnitudes}.')
    slope, intercept = np.polyfit(np.log(lam_array[keep]), np.log(envelope[keep]), 1)
    implied = float(np.max(envelope[keep] * lam_array[keep] ** (smoothness - 1)))
    logger.info(f'Non-stationary decay: fitted exponent {slope:.3f} over {np.count_nonzero(keep)} values.')
    return DecayReport(smoothness=smoothness, lambdas=tuple(float(v) for v in lam_array),
                       magnitudes=tuple(float(v) for v in magnitudes),
                       fitted_lambdas=tuple(float(v) for v in lam_array[keep]), fitted_exponent=float(slope),
                       implied_constant=implied, gradient_lower_bound=lower, nonstationary=nonstationary)
