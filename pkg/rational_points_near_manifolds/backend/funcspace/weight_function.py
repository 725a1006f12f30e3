"""This module implements compactly supported bump weight functions."""
from functools import cached_property, lru_cache

import numpy as np
import sympy
from scipy import integrate

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction, to_sympy_number
from rational_points_near_manifolds.backend.funcspace.expression_parser import coordinate_symbols
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.errors import DimensionMismatchError


def bump_profile(u):
    """Evaluates the 1-D mollifier profile g(u) = exp(-1/(1-u^2)) for |u| < 1, else 0.

    Args:
        u: A scalar or array.

    Returns:
        The profile value(s).
    """
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def bump_profile_derivative(u):
    """Evaluates g'(u) = -2u/(1-u^2)^2 g(u) for |u| < 1, else 0.

    Args:
        u: A scalar or array.

    Returns:
        The derivative value(s).
    """
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    ui = u[inside]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out[inside] = -2.0 * ui / (1.0 - ui ** 2) ** 2 * np.exp(-1.0 / (1.0 - ui ** 2))
    return out


@lru_cache(maxsize=1)
def bump_profile_integral():
    """Gets I_1 = int_{-1}^{1} g(u) du (about 0.443994).

    Returns:
        The integral of the 1-D profile.
    """
    value, _ = integrate.quad(lambda u: float(bump_profile(u)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return value


###################
# Weight Function #
###################
class WeightFunction:
    """A nonnegative smooth weight w(x) = s * prod_i g((x_i - c_i)/r) supported on the box |x - c|_inf < r.

    Evaluation uses the vectorized profile g directly; smooth_map gives the same weight as a SmoothMap on the
    open support box.
    """

    def __init__(self, center, support_radius, scale=1):
        """Initializes WeightFunction.

        Args:
            center: The center c (length n).
            support_radius: The support radius r > 0.
            scale: A nonnegative constant factor s.
        """
        self.center = tuple(as_fraction(c) for c in center)
        if not self.center:
            raise DimensionMismatchError("Weight center must have at least one coordinate.")
        self.support_radius = as_fraction(support_radius)
        if self.support_radius <= 0:
            raise ValueError(f'Support radius must be positive, got {support_radius}.')
        self.scale = as_fraction(scale)
        if self.scale < 0:
            raise ValueError(f'Weight scale must be nonnegative, got {scale}.')
        self.arity = len(self.center)
        self._center_array = np.array([float(c) for c in self.center])
        self._radius = float(self.support_radius)

    def __repr__(self):
        return (f'WeightFunction(center={tuple(str(c) for c in self.center)}, '
                f'radius={self.support_radius}, scale={self.scale})')

    def _rescale(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.arity:
            raise DimensionMismatchError(f'Point has dimension {points.shape[-1]}, expected {self.arity}.')
        return (points - self._center_array) / self._radius

    def evaluate(self, x):
        """Evaluates w at a point; exactly 0 outside the open support box.

        Args:
            x: The point.

        Returns:
            The float weight value.
        """
        u = self._rescale(np.asarray(x, dtype=float).reshape(1, -1))
        return float(self.scale) * float(np.prod(bump_profile(u[0])))

    def evaluate_many(self, points):
        """Evaluates w at many points.

        Args:
            points: Array of shape (m, n).

        Returns:
            Float array of shape (m,).
        """
        u = self._rescale(np.atleast_2d(points))
        return float(self.scale) * np.prod(bump_profile(u), axis=1)

    def axis_factor(self, axis, t):
        """Evaluates the unscaled 1-D factor g((t - c_i)/r) of coordinate i.

        Args:
            axis: The coordinate index i.
            t: A scalar or array of coordinate values.

        Returns:
            The factor value(s); w(x) = s * prod_i axis_factor(i, x_i).
        """
        return bump_profile((np.asarray(t, dtype=float) - self._center_array[axis]) / self._radius)

    def gradient(self, x):
        """Evaluates the gradient of w at a point.

        Args:
            x: The point.

        Returns:
            Float array of shape (n,).
        """
        u = self._rescale(np.asarray(x, dtype=float).reshape(1, -1))[0]
        values = bump_profile(u)
        derivs = bump_profile_derivative(u)
        grad = np.empty(self.arity)
        for i in range(self.arity):
            grad[i] = derivs[i] * np.prod(np.delete(values, i)) / self._radius
        return float(self.scale) * grad

    @cached_property
    def smooth_map(self):
        """Gets w as a SmoothMap; the expression agrees with w on the open support box only.

        Returns:
            The smooth map s * prod_i exp(-1/(1 - u_i^2)) with u_i = (x_i - c_i)/r.
        """
        radius = to_sympy_number(self.support_radius)
        factors = [sympy.exp(-1 / (1 - ((x - to_sympy_number(c)) / radius) ** 2))
                   for x, c in zip(coordinate_symbols(self.arity), self.center)]
        return SmoothMap(to_sympy_number(self.scale) * sympy.Mul(*factors), self.arity)

    def in_support(self, x):
        """Checks whether |x - c|_inf < r.

        Args:
            x: The point (exact coordinates are compared exactly).

        Returns:
            True if the point lies in the open support box.
        """
        return all(abs(as_fraction(xi) - ci) < self.support_radius for xi, ci in zip(x, self.center))

    def support_box(self):
        """Gets the closed support box.

        Returns:
            The tuples (lower, upper) of exact coordinates.
        """
        lower = tuple(c - self.support_radius for c in self.center)
        upper = tuple(c + self.support_radius for c in self.center)
        return lower, upper

    def integral(self):
        """Computes int w dx = s * (r * I_1)^n by separability.

        Returns:
            The integral.
        """
        return float(self.scale) * (self._radius * bump_profile_integral()) ** self.arity

    def scaled(self, factor):
        """Builds the weight c*w.

        Args:
            factor: The constant c >= 0.

        Returns:
            The scaled weight.
        """
        return WeightFunction(self.center, self.support_radius, scale=self.scale * as_fraction(factor))

    def is_zero(self):
        """Whether w vanishes identically."""
        return self.scale == 0


def make_bump(center, radius):
    """Creates the standard product bump centered at a point.

    Args:
        center: The center point.
        radius: The support radius (> 0).

    Returns:
        The weight function.
    """
    radius = as_fraction(radius)
    if radius <= 0:
        raise ValueError(f'Bump radius must be positive, got {radius}.')
    return WeightFunction(center, radius)

