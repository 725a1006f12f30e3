"""This module implements the Fejer kernel F_D(theta) = (sin(pi D theta)/(D sin(pi theta)))^2 and its majorization
of short-interval indicators."""
import math
from dataclasses import dataclass

import numpy as np

from rational_points_near_manifolds.backend.kernels.selberg_pair import nearest_integer_distance
from rational_points_near_manifolds.backend.kernels.trig_poly import e, eval_trig_poly

MAJORIZATION_CONSTANT = math.pi ** 2 / 4
UNIFORM_GRID_POINTS = 10_000
CLUSTERED_GRID_POINTS = 100


@dataclass(frozen=True)
class FejerKernel:
    """The Fejer kernel of degree D, with Fourier coefficients (D - |d|)/D^2 for |d| <= D."""
    D: int

    def __post_init__(self):
        if int(self.D) != self.D or self.D < 1:
            raise ValueError(f'Fejer degree must be a positive integer, got {self.D}.')

    def coefficients(self):
        """Gets the centered coefficient array of length 2D+1.

        Returns:
            The coefficients (D - |d|)/D^2, d = -D..D.
        """
        d = np.arange(-self.D, self.D + 1)
        return ((self.D - np.abs(d)) / self.D ** 2).astype(complex)

    def __call__(self, theta):
        return fejer_eval(self.D, theta)


def fejer_eval(D, theta):
    """Evaluates the closed form (sin(pi D r)/(D sin(pi r)))^2 with r = theta - round(theta); the value at r = 0 is 1.

    Args:
        D: The degree (>= 1).
        theta: A scalar or array.

    Returns:
        The value(s).
    """
    if D < 1:
        raise ValueError(f'Fejer degree must be positive, got {D}.')
    scalar = np.ndim(theta) == 0
    r = np.atleast_1d(np.asarray(theta, dtype=float))
    r = r - np.round(r)
    out = np.ones_like(r)
    nonzero = r != 0.0
    rn = r[nonzero]
    out[nonzero] = (np.sin(np.pi * D * rn) / (D * np.sin(np.pi * rn))) ** 2
    return float(out[0]) if scalar else out


def fejer_eval_sum(D, theta):
    """Evaluates D^-2 |sum_{d=1}^D e(d theta)|^2.

    Args:
        D: The degree.
        theta: A scalar or array.

    Returns:
        The value(s).
    """
    scalar = np.ndim(theta) == 0
    r = np.atleast_1d(np.asarray(theta, dtype=float))
    r = r - np.round(r)
    d = np.arange(1, D + 1)
    phases = np.outer(r, d)
    values = np.abs(np.sum(e(phases - np.round(phases)), axis=1)) ** 2 / D ** 2
    return float(values[0]) if scalar else values


def fejer_eval_coefficients(D, theta):
    """Evaluates sum_{|d| <= D} (D - |d|)/D^2 e(d theta).

    Args:
        D: The degree.
        theta: A scalar or array.

    Returns:
        The value(s).
    """
    return eval_trig_poly(FejerKernel(D).coefficients(), theta)


################
# Majorization #
################
@dataclass(frozen=True)
class MajorizationReport:
    """The result of checking chi_{1/T}(theta) <= (pi^2/4) F_D(theta) on a grid."""
    passed: bool
    D: int
    T: float
    worst_margin: float
    worst_theta: float
    grid_size: int


def majorization_grid(T, uniform_points=UNIFORM_GRID_POINTS, clustered_points=CLUSTERED_GRID_POINTS):
    """Builds uniform points on [-1/2, 1/2) plus points clustered around +-1/T.

    Args:
        T: The inverse interval width.
        uniform_points: The number of uniform points.
        clustered_points: The number of clustered points.

    Returns:
        The sorted grid.
    """
    uniform = np.arange(uniform_points) / uniform_points - 0.5
    width = 0.1 / T
    half = clustered_points // 2
    clustered = np.concatenate([
        np.linspace(1.0 / T - width, 1.0 / T + width, half),
        np.linspace(-1.0 / T - width, -1.0 / T + width, clustered_points - half),
        [1.0 / T, -1.0 / T],
    ])
    return np.sort(np.concatenate([uniform, clustered]))


def fejer_majorizes_indicator(D, T, grid=None):
    """Checks chi_{1/T}(theta) <= (pi^2/4) F_D(theta) for D = floor(T/2) on a dense grid.

    Args:
        D: The Fejer degree, must equal floor(T/2).
        T: The inverse width, T >= 2.
        grid: The theta grid (majorization_grid if omitted).

    Returns:
        The majorization report with the worst margin.
    """
    if T < 2:
        raise ValueError(f'T must be at least 2, got {T}.')
    if D != math.floor(T / 2):
        raise ValueError(f'D must equal floor(T/2) = {math.floor(T / 2)}, got {D}.')
    grid = majorization_grid(T) if grid is None else np.asarray(grid, dtype=float)
    values = MAJORIZATION_CONSTANT * fejer_eval(D, grid)
    indicator = (nearest_integer_distance(grid) <= 1.0 / T).astype(float)
    margins = values - indicator
    worst = int(np.argmin(margins))
    return MajorizationReport(passed=bool(margins[worst] >= 0.0), D=D, T=T, worst_margin=float(margins[worst]),
                              worst_theta=float(grid[worst]), grid_size=int(grid.size))
