"""This module implements graph charts M = {(x, f_1(x), ..., f_R(x)) : x in B_eps0(x0)}."""
from fractions import Fraction

import numpy as np

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.errors import DimensionMismatchError


class ManifoldChart:
    """A graph parametrization of a manifold of dimension n and codimension R over the closed L-inf box."""

    def __init__(self, x0, eps0, maps, name=None):
        """Initializes ManifoldChart.

        Args:
            x0: The chart center (length n, exact rationals preferred).
            eps0: The chart radius (> 0).
            maps: The R smooth maps f_1..f_R of arity n.
            name: An optional chart name.
        """
        self.x0 = tuple(as_fraction(c) for c in x0)
        self.eps0 = as_fraction(eps0)
        self.maps = tuple(maps)
        self.name = name
        self.n = len(self.x0)
        self.R = len(self.maps)
        self.M = self.n + self.R
        if self.n < 1:
            raise DimensionMismatchError("Chart center must have at least one coordinate.")
        if self.R < 1:
            raise DimensionMismatchError("Chart needs at least one map.")
        if self.eps0 <= 0:
            raise ValueError(f'Chart radius must be positive, got {eps0}.')
        for r, smooth_map in enumerate(self.maps, start=1):
            if not isinstance(smooth_map, SmoothMap):
                raise TypeError(f'Map f{r} is not a SmoothMap.')
            if smooth_map.arity != self.n:
                raise DimensionMismatchError(f'Map f{r} has arity {smooth_map.arity}, chart has n={self.n}.')

    def __repr__(self):
        maps = ", ".join(str(m) for m in self.maps)
        return f'ManifoldChart(n={self.n}, R={self.R}, x0={tuple(map(str, self.x0))}, eps0={self.eps0}, maps=[{maps}])'

    @property
    def x0_array(self):
        return np.array([float(c) for c in self.x0])

    @property
    def exact_rational(self):
        """Whether all maps are polynomials with rational coefficients."""
        return all(m.exact_rational for m in self.maps)

    @property
    def smoothness(self):
        return min(m.smoothness for m in self.maps)

    def contains(self, x):
        """Checks membership in the closed box |x - x0|_inf <= eps0.

        Args:
            x: The point.

        Returns:
            True if the point lies in the chart domain.
        """
        if len(x) != self.n:
            raise DimensionMismatchError(f'Point has dimension {len(x)}, expected {self.n}.')
        return all(abs(as_fraction(xi) - ci) <= self.eps0 for xi, ci in zip(x, self.x0))

    def box(self, radius=None):
        """Gets the closed box of a radius around x0.

        Args:
            radius: The radius (eps0 if omitted).

        Returns:
            The float arrays (lower, upper).
        """
        radius = float(self.eps0 if radius is None else radius)
        center = self.x0_array
        return center - radius, center + radius

    def evaluate(self, x):
        """Evaluates all maps at a point.

        Args:
            x: The point.

        Returns:
            The list of values (exact Fractions where possible).
        """
        return [m.evaluate(x) for m in self.maps]

    def embed(self, x):
        """Lifts a base point to the manifold point (x, f(x)).

        Args:
            x: The base point.

        Returns:
            The tuple of M coordinates.
        """
        return tuple(x) + tuple(self.evaluate(x))

    def with_radius(self, eps0):
        """Builds the same chart over a different radius.

        Args:
            eps0: The new radius.

        Returns:
            The new chart.
        """
        return ManifoldChart(self.x0, eps0, self.maps, name=self.name)

    def permuted(self, order):
        """Builds the chart with the maps reordered.

        Args:
            order: A permutation of 0..R-1.

        Returns:
            The new chart.
        """
        if sorted(order) != list(range(self.R)):
            raise ValueError(f'{order} is not a permutation of the {self.R} maps.')
        return ManifoldChart(self.x0, self.eps0, [self.maps[i] for i in order], name=self.name)

    def negated(self, index):
        """Builds the chart with map f_index replaced by -f_index.

        Args:
            index: The zero-based map index.

        Returns:
            The new chart.
        """
        maps = list(self.maps)
        maps[index] = maps[index].scaled(Fraction(-1))
        return ManifoldChart(self.x0, self.eps0, maps, name=self.name)
