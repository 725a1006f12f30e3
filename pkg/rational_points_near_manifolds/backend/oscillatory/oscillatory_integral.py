"""This module implements the oscillatory integrals

    I(q; j; k) = int w(x) e(sum_r q j_r f_r(x) - q k.x) dx

and the Poisson-summation identity sum_a w(a/q) e(sum_r j_r q f_r(a/q)) = q^n sum_k I(q; j; k).
"""
import dataclasses
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from rational_points_near_manifolds.backend.curvature.box_sampling import box_samples
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.backend.kernels.trig_poly import e
from rational_points_near_manifolds.backend.oscillatory.quadrature import (
    DEFAULT_MAX_POINTS, DEFAULT_TOLERANCE, box_quadrature
)
from rational_points_near_manifolds.errors import DimensionMismatchError, QuadratureBudgetError

logger = logging.getLogger(__name__)

LAMBDA_LIMIT = 10 ** 4
FREQUENCY_SAMPLE_DENSITY = 17


def _int_tuple(values, name):
    values = tuple(values)
    if any(int(v) != v for v in values):
        raise ValueError(f'{name} must be an integer vector, got {values}.')
    return tuple(int(v) for v in values)


#############################
# Oscillatory Integral Spec #
#############################
@dataclass(frozen=True)
class OscillatoryIntegralSpec:
    """The data (w, f, j, k, q) of an oscillatory integral I(q; j; k), with lambda = q j_1."""
    weight: object
    maps: tuple
    j: tuple
    k: tuple
    q: int

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "j", _int_tuple(self.j, "j"))
        object.__setattr__(self, "k", _int_tuple(self.k, "k"))
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f'Modulus q must be a positive integer, got {self.q}.')
        object.__setattr__(self, "q", int(self.q))
        if not self.maps or len(self.j) != len(self.maps):
            raise DimensionMismatchError(f'Got {len(self.maps)} maps but frequency vector {self.j}.')
        if any(m.arity != self.weight.arity for m in self.maps):
            raise DimensionMismatchError("Map arity does not match the weight dimension.")
        if len(self.k) != self.weight.arity:
            raise DimensionMismatchError(f'Dual vector {self.k} does not have dimension {self.weight.arity}.')

    @classmethod
    def from_chart(cls, chart, weight, j, k, q):
        """Creates the integral spec for the maps of a chart.

        Args:
            chart: The manifold chart.
            weight: The weight function.
            j: The frequency vector.
            k: The dual vector.
            q: The modulus.

        Returns:
            The integral spec.
        """
        return cls(weight=weight, maps=chart.maps, j=j, k=k, q=q)

    @property
    def n(self):
        return self.weight.arity

    @property
    def lam(self):
        """The frequency lambda = q j_1."""
        return self.q * self.j[0]

    @property
    def in_cone(self):
        """Whether j_1 >= 1 and 0 <= j_r <= j_1 for r >= 2."""
        return self.j[0] >= 1 and all(0 <= jr <= self.j[0] for jr in self.j[1:])

    @cached_property
    def phase_map(self):
        """The map sum_r j_r f_r(x) - k.x; the integrand is w(x) e(q * phase_map(x))."""
        combined = SmoothMap.linear_combination(self.maps, list(self.j))
        return combined.minus_linear(list(self.k))

    @cached_property
    def pencil_map(self):
        """The map F_j = sum_r (j_r/j_1) f_r."""
        if not self.in_cone:
            raise ValueError(f'Frequency vector {self.j} is not in the cone 0 <= j_r <= j_1, j_1 >= 1.')
        return SmoothMap.linear_combination(self.maps, [Fraction(jr, self.j[0]) for jr in self.j])

    @property
    def stationary_target(self):
        """The gradient value k/j_1 at the stationary point of F_j(x) - (k/j_1).x."""
        return np.array([kr / self.j[0] for kr in self.k], dtype=float)

    def with_k(self, k):
        return dataclasses.replace(self, k=tuple(k))

    def with_q(self, q):
        return dataclasses.replace(self, q=q)

    def conjugate(self):
        """Gets the spec of I(q; -j; -k)."""
        return dataclasses.replace(self, j=tuple(-v for v in self.j), k=tuple(-v for v in self.k))


##############
# Quadrature #
##############
def phase_frequencies(spec, density=FREQUENCY_SAMPLE_DENSITY):
    """Estimates the number of oscillations of e(q * phase) along each axis of the weight support.

    Args:
        spec: The integral spec.
        density: The sampling density per axis.

    Returns:
        Float array of shape (n,).
    """
    lower, upper = spec.weight.support_box()
    lower = np.array([float(c) for c in lower])
    upper = np.array([float(c) for c in upper])
    center = (lower + upper) / 2
    points = box_samples(center, float(spec.weight.support_radius), density)
    slopes = np.max(np.abs(spec.phase_map.gradient_many(points)), axis=0)
    return spec.q * slopes * (upper - lower)


def quad_integral_result(spec, tolerance=DEFAULT_TOLERANCE, max_points=DEFAULT_MAX_POINTS,
                         lambda_limit=LAMBDA_LIMIT):
    """Computes I(q; j; k) with panels of 20 nodes per oscillation per axis over supp w.

    Args:
        spec: The integral spec.
        tolerance: The absolute tolerance of the quadrature error estimate.
        max_points: Cap on the tensor grid size.
        lambda_limit: Cap on |lambda|.

    Returns:
        The quadrature result.
    """
    if abs(spec.lam) > lambda_limit:
        raise QuadratureBudgetError(f'lambda = {spec.lam} exceeds the budget {lambda_limit}.')
    weight = spec.weight
    lower, upper = weight.support_box()
    if weight.is_zero():
        return None
    panels = [math.ceil(v) for v in phase_frequencies(spec)]
    phase = spec.phase_map
    q = spec.q

    def integrand(points):
        turns = q * phase.evaluate_many(points)
        return e(turns - np.round(turns))

    factors = [lambda t, axis=i: weight.axis_factor(axis, t) for i in range(spec.n)]
    result = box_quadrature(integrand, [float(c) for c in lower], [float(c) for c in upper], panels,
                            axis_factors=factors, tolerance=tolerance / float(weight.scale), max_points=max_points)
    scale = float(weight.scale)
    return dataclasses.replace(result, value=scale * result.value, error_estimate=scale * result.error_estimate)


def quad_integral(spec, tolerance=DEFAULT_TOLERANCE, max_points=DEFAULT_MAX_POINTS, lambda_limit=LAMBDA_LIMIT):
    """Computes I(q; j; k) = int w(x) e(sum_r q j_r f_r(x) - q k.x) dx.

    Args:
        spec: The integral spec.
        tolerance: The absolute tolerance of the quadrature error estimate.
        max_points: Cap on the tensor grid size.
        lambda_limit: Cap on |lambda|.

    Returns:
        The complex integral value.
    """
    result = quad_integral_result(spec, tolerance=tolerance, max_points=max_points, lambda_limit=lambda_limit)
    return 0j if result is None else result.value


#####################
# Poisson summation #
#####################
def weighted_exponential_sum(spec):
    """Computes sum_{a in Z^n} w(a/q) e(sum_r j_r q f_r(a/q)).

    Args:
        spec: The integral spec (k is irrelevant, e(q k.a/q) = 1).

    Returns:
        The complex sum.
    """
    q = spec.q
    lower, upper = spec.weight.support_box()
    ranges = [range(math.floor(lo * q), math.ceil(up * q) + 1) for lo, up in zip(lower, upper)]
    lattice = np.array(list(itertools.product(*ranges)), dtype=float) / q
    weights = spec.weight.evaluate_many(lattice)
    inside = weights > 0
    if not np.any(inside):
        return 0j
    combined = SmoothMap.linear_combination(spec.maps, list(spec.j))
    turns = q * combined.evaluate_many(lattice[inside])
    return complex(np.sum(weights[inside] * e(turns - np.round(turns))))


def poisson_dual_sum(spec, K, tolerance=DEFAULT_TOLERANCE):
    """Computes the truncated dual side q^n sum_{|k|_inf <= K} I(q; j; k).

    Args:
        spec: The integral spec.
        K: The truncation of the dual vectors.
        tolerance: The quadrature tolerance per term.

    Returns:
        The complex sum.
    """
    total = 0j
    for k in itertools.product(range(-K, K + 1), repeat=spec.n):
        total += quad_integral(spec.with_k(k), tolerance=tolerance)
    logger.debug(f'Poisson dual sum over {(2 * K + 1) ** spec.n} dual vectors.')
    return spec.q ** spec.n * total
