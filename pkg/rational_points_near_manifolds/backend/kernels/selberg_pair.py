"""This module implements the Selberg majorant/minorant pair S_J^- <= chi_delta <= S_J^+ (Vaaler's closed form).

For the interval [-delta, delta] on R/Z and 0 < |m| <= J the coefficients are

    S^(+-)(m) = V(|m|/(J+1)) sin(2 pi m delta)/(pi m) +- (1 - |m|/(J+1)) cos(2 pi m delta)/(J+1),

with the sawtooth weights V(u) = pi u (1-u) cot(pi u) + u and S^(+-)(0) = 2 delta +- 1/(J+1).
"""
import logging
from dataclasses import dataclass

import numpy as np

from rational_points_near_manifolds.backend.kernels.trig_poly import eval_trig_poly
from rational_points_near_manifolds.errors import KernelError

logger = logging.getLogger(__name__)

UNIFORM_GRID_POINTS = 10_000
CLUSTERED_GRID_POINTS = 100
SANDWICH_TOLERANCE = 1e-12


def nearest_integer_distance(theta):
    """Computes ||theta|| = min_m |theta - m|.

    Args:
        theta: A scalar or array.

    Returns:
        The distance(s) in [0, 1/2].
    """
    theta = np.asarray(theta, dtype=float)
    return np.abs(theta - np.round(theta))


def chi(delta, theta):
    """Evaluates the indicator chi_delta(theta) = [||theta|| <= delta].

    Args:
        delta: The half width.
        theta: A scalar or array.

    Returns:
        Float 0/1 value(s).
    """
    return (nearest_integer_distance(theta) <= delta).astype(float)


def sawtooth_weight(u):
    """Evaluates Vaaler's weight V(u) = pi u (1-u) cot(pi u) + u for 0 < u < 1.

    Args:
        u: A scalar or array in (0, 1).

    Returns:
        The weight(s) in [0, 1].
    """
    u = np.asarray(u, dtype=float)
    return np.pi * u * (1.0 - u) / np.tan(np.pi * u) + u


@dataclass(frozen=True)
class SelbergPair:
    """The degree-J trigonometric polynomials sandwiching chi_delta, with the coefficient bounds b_j."""
    delta: float
    degree: int
    plus_coeffs: np.ndarray
    minus_coeffs: np.ndarray
    bound_array: np.ndarray

    def coefficient(self, j, sign=1):
        """Gets S^+(j) (sign > 0) or S^-(j) (sign < 0).

        Args:
            j: The frequency with |j| <= J.
            sign: The choice of majorant or minorant.

        Returns:
            The complex coefficient.
        """
        if abs(j) > self.degree:
            return 0j
        coeffs = self.plus_coeffs if sign > 0 else self.minus_coeffs
        return coeffs[j + self.degree]

    def bound(self, j):
        """Gets b_|j|.

        Args:
            j: The frequency.

        Returns:
            The bound.
        """
        return float(self.bound_array[abs(j)])

    def plus(self, theta):
        """Evaluates S_J^+."""
        return eval_trig_poly(self.plus_coeffs, theta)

    def minus(self, theta):
        """Evaluates S_J^-."""
        return eval_trig_poly(self.minus_coeffs, theta)


def selberg_pair(delta, J):
    """Constructs the Selberg majorant/minorant pair of chi_delta of degree J.

    Args:
        delta: The half width, 0 < delta <= 1/2.
        J: The degree, J >= 1.

    Returns:
        The Selberg pair.
    """
    delta = float(delta)
    if not 0.0 < delta <= 0.5:
        raise ValueError(f'delta must lie in (0, 1/2], got {delta}.')
    if int(J) != J or J < 1:
        raise ValueError(f'Degree J must be a positive integer, got {J}.')
    J = int(J)

    m = np.arange(1, J + 1)
    u = m / (J + 1)
    indicator_coeffs = np.sin(2 * np.pi * m * delta) / (np.pi * m)
    fejer_part = (1.0 - u) * np.cos(2 * np.pi * m * delta) / (J + 1)
    smoothed = sawtooth_weight(u) * indicator_coeffs

    plus = np.zeros(2 * J + 1, dtype=complex)
    minus = np.zeros(2 * J + 1, dtype=complex)
    plus[J] = 2 * delta + 1.0 / (J + 1)
    minus[J] = 2 * delta - 1.0 / (J + 1)
    plus[J + 1:] = smoothed + fejer_part
    minus[J + 1:] = smoothed - fejer_part
    plus[:J] = plus[J + 1:][::-1]
    minus[:J] = minus[J + 1:][::-1]

    bounds = np.empty(J + 1)
    bounds[0] = 1.0 / (J + 1) + 2 * delta
    bounds[1:] = 1.0 / (J + 1) + np.minimum(2 * delta, 1.0 / (np.pi * m))

    pair = SelbergPair(delta=delta, degree=J, plus_coeffs=plus, minus_coeffs=minus, bound_array=bounds)
    _check_coefficient_bounds(pair)
    return pair


def _check_coefficient_bounds(pair):
    """Asserts |S^(+-)(j)| <= b_j for all |j| <= J."""
    magnitudes = np.maximum(np.abs(pair.plus_coeffs), np.abs(pair.minus_coeffs))
    bounds = np.concatenate([pair.bound_array[::-1], pair.bound_array[1:]])
    if np.any(magnitudes > bounds):
        worst = int(np.argmax(magnitudes - bounds)) - pair.degree
        raise KernelError(f'Coefficient bound violated at j={worst} for delta={pair.delta}, J={pair.degree}.')


##################
# Sandwich check #
##################
def sandwich_grid(delta, J, uniform_points=UNIFORM_GRID_POINTS, clustered_points=CLUSTERED_GRID_POINTS):
    """Builds the check grid: uniform points on [-1/2, 1/2) plus points within 2/J of +-delta.

    Args:
        delta: The half width.
        J: The degree.
        uniform_points: The number of uniform points.
        clustered_points: The number of points clustered at the jumps.

    Returns:
        The sorted grid.
    """
    uniform = np.arange(uniform_points) / uniform_points - 0.5
    width = 2.0 / J
    half = clustered_points // 2
    clustered = np.concatenate([
        np.linspace(delta - width, delta + width, half),
        np.linspace(-delta - width, -delta + width, clustered_points - half),
        [delta, -delta],
    ])
    return np.sort(np.concatenate([uniform, clustered]))


@dataclass(frozen=True)
class SandwichReport:
    """Worst margins of S^- <= chi <= S^+ on a grid."""
    passed: bool
    worst_lower_margin: float
    worst_upper_margin: float
    worst_lower_theta: float
    worst_upper_theta: float
    grid_size: int


def check_sandwich(pair, grid=None, tolerance=SANDWICH_TOLERANCE):
    """Checks S^-(theta) <= chi_delta(theta) <= S^+(theta) on a grid.

    Args:
        pair: The Selberg pair.
        grid: The theta grid (sandwich_grid if omitted).
        tolerance: Allowed violation.

    Returns:
        The sandwich report.
    """
    grid = sandwich_grid(pair.delta, pair.degree) if grid is None else np.asarray(grid, dtype=float)
    indicator = chi(pair.delta, grid)
    upper = pair.plus(grid) - indicator
    lower = indicator - pair.minus(grid)
    i_up, i_low = int(np.argmin(upper)), int(np.argmin(lower))
    report = SandwichReport(
        passed=bool(upper[i_up] >= -tolerance and lower[i_low] >= -tolerance),
        worst_lower_margin=float(lower[i_low]), worst_upper_margin=float(upper[i_up]),
        worst_lower_theta=float(grid[i_low]), worst_upper_theta=float(grid[i_up]), grid_size=int(grid.size))
    if not report.passed:
        logger.warning(f'Selberg sandwich violated for delta={pair.delta}, J={pair.degree}: {report}')
    return report
