"""This module implements the numerical Legendre transform F*(y) = x.y - F(x) with grad F(x) = y on a box.

The preimage x = (grad F)^{-1}(y) is found by damped Newton iteration with the Hessian of F. F need not be convex,
only det H_F != 0 on the domain box.
"""
import logging
import threading
from dataclasses import dataclass

import numpy as np

from rational_points_near_manifolds.backend.curvature.box_sampling import box_samples
from rational_points_near_manifolds.backend.curvature.curvature_verifier import hessian_determinant_range
from rational_points_near_manifolds.errors import (
    ConvergenceError, CurvatureError, DimensionMismatchError, EvaluationError, IllConditionedError,
    OutsideImageError
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-11
MAX_HALVINGS = 30
CONDITION_LIMIT = 1e12


##################
# Legendre Chart #
##################
class LegendreChart:
    """A map F with nonsingular Hessian on the box U = {|x - c|_inf <= r}, and its Legendre transform on V = grad F(U)."""

    def __init__(self, source, center, radius, tolerance=DEFAULT_TOLERANCE, max_iterations=50, check_density=9,
                 warm_start=False):
        """Initializes LegendreChart.

        Args:
            source: The map F (a SmoothMap or ConjugateMap).
            center: The center c of the domain box U.
            radius: The radius r of U.
            tolerance: The residual tolerance |grad F(x) - y|_inf.
            max_iterations: The maximum number of Newton iterations.
            check_density: The grid density of the construction checks.
            warm_start: Whether Newton starts from the nearest cached preimage instead of the center.
        """
        self.source = source
        self.arity = source.arity
        self.center = np.asarray([float(c) for c in center])
        if self.center.shape != (self.arity,):
            raise DimensionMismatchError(f'Box center has dimension {self.center.shape[0]}, expected {self.arity}.')
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError(f'Box radius must be positive, got {radius}.')
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.warm_start = warm_start

        self._cache = {}
        self._lock = threading.Lock()

        det_min, det_max = hessian_determinant_range([source], [1.0], self.center, self.radius, density=check_density)
        if not det_min > 1e-12 * det_max:
            raise CurvatureError(f'det H_F vanishes on the domain box (min |det| = {det_min:.3g}).')
        self.det_range = (det_min, det_max)

        grid = box_samples(self.center, self.radius, check_density)
        grads = source.gradient_many(grid)
        self.image_lower = np.min(grads, axis=0)
        self.image_upper = np.max(grads, axis=0)
        self.image_bound = float(np.max(np.abs(np.concatenate([self.image_lower, self.image_upper]))))

    @property
    def diameter(self):
        return 2 * self.radius

    def _check_point(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.arity,):
            raise DimensionMismatchError(f'Point has dimension {y.shape}, expected {self.arity}.')
        return y

    def _inside(self, x):
        return bool(np.max(np.abs(x - self.center)) < self.radius)

    def _initial_guess(self, y):
        if self.warm_start:
            with self._lock:
                items = list(self._cache.items())
            if items:
                keys = np.array([k for k, _ in items])
                nearest = int(np.argmin(np.max(np.abs(keys - y), axis=1)))
                return items[nearest][1].copy()
        return self.center.copy()

    def invert_gradient(self, y, strict=True):
        """Solves grad F(x) = y by damped Newton iteration.

        Args:
            y: The target gradient value.
            strict: Whether a solution outside the open domain box raises OutsideImageError.

        Returns:
            The preimage x with |grad F(x) - y|_inf <= tolerance.
        """
        y = self._check_point(y)
        key = tuple(y.tolist())
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            if strict and not self._inside(cached):
                raise OutsideImageError(f'{y} is not in the gradient image of the open domain box.')
            return cached.copy()

        x = self._initial_guess(y)
        residual = self.source.gradient(x) - y
        norm = float(np.max(np.abs(residual)))
        iterations = 0
        while norm > self.tolerance and iterations < self.max_iterations:
            iterations += 1
            try:
                step = np.linalg.solve(self.source.hessian(x), residual)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceError(f'Singular Hessian at {x} while inverting {y}.', best_residual=norm) from exc
            damping = 1.0
            for _ in range(MAX_HALVINGS + 1):
                candidate = x - damping * step
                try:
                    candidate_residual = self.source.gradient(candidate) - y
                    candidate_norm = float(np.max(np.abs(candidate_residual)))
                except EvaluationError:
                    candidate_norm = np.inf
                if candidate_norm < norm:
                    break
                damping /= 2
            else:
                break
            x, residual, norm = candidate, candidate_residual, candidate_norm
        logger.debug(f'Newton inversion of {y}: {iterations} iterations, residual {norm:.3g}.')

        if norm > self.tolerance:
            raise ConvergenceError(
                f'Newton inversion of {y} did not converge (best residual {norm:.3g}).', best_residual=norm)
        if strict and not self._inside(x):
            raise OutsideImageError(f'{y} is not in the gradient image of the open domain box (preimage {x}).')
        with self._lock:
            self._cache[key] = x.copy()
        return x

    def legendre_value(self, y, strict=True):
        """Computes F*(y) = x.y - F(x) with x = (grad F)^{-1}(y).

        Args:
            y: The point.
            strict: See invert_gradient.

        Returns:
            The transform value.
        """
        x = self.invert_gradient(y, strict=strict)
        return float(np.dot(x, np.asarray(y, dtype=float)) - self.source.evaluate(x))

    def legendre_gradient(self, y, strict=True):
        """Computes grad F*(y) = (grad F)^{-1}(y).

        Args:
            y: The point.
            strict: See invert_gradient.

        Returns:
            The gradient.
        """
        return self.invert_gradient(y, strict=strict)

    def legendre_hessian(self, y, strict=True):
        """Computes H_{F*}(y) = H_F(x)^{-1} at the preimage x.

        Args:
            y: The point.
            strict: See invert_gradient.

        Returns:
            The Hessian of F*.
        """
        x = self.invert_gradient(y, strict=strict)
        hess = np.asarray(self.source.hessian(x), dtype=float)
        condition = np.linalg.cond(hess)
        if not condition <= CONDITION_LIMIT:
            raise IllConditionedError(f'Hessian at {x} has condition number {condition:.3g}.')
        return np.linalg.inv(hess)


#################
# Conjugate Map #
#################
class ConjugateMap:
    """The Legendre transform F* of a chart, exposed with the value/gradient/Hessian interface of a smooth map."""

    has_constant_hessian = False

    def __init__(self, chart):
        """Initializes ConjugateMap.

        Args:
            chart: The Legendre chart of F.
        """
        self.chart = chart
        self.arity = chart.arity

    def evaluate(self, y):
        return self.chart.legendre_value(y, strict=False)

    def gradient(self, y):
        return self.chart.legendre_gradient(y, strict=False)

    def hessian(self, y):
        return self.chart.legendre_hessian(y, strict=False)

    def gradient_many(self, points):
        return np.array([self.gradient(y) for y in np.asarray(points, dtype=float)])

    def hessian_many(self, points):
        return np.array([self.hessian(y) for y in np.asarray(points, dtype=float)])


def biconjugate_chart(chart, padding=0.05, **kwargs):
    """Builds the Legendre chart of F* over the cube containing the image bounding box of grad F.

    Args:
        chart: The Legendre chart of F.
        padding: Relative enlargement of the cube.
        **kwargs: Further LegendreChart options.

    Returns:
        The Legendre chart of F*, whose transform is F**.
    """
    center = (chart.image_lower + chart.image_upper) / 2
    radius = float(np.max(chart.image_upper - chart.image_lower)) / 2 * (1 + padding)
    kwargs.setdefault("tolerance", 100 * chart.tolerance)
    return LegendreChart(ConjugateMap(chart), center, max(radius, 1e-12), **kwargs)


##############
# Statistics #
##############
@dataclass(frozen=True)
class BiLipschitzReport:
    """Observed range of |x - y| / |grad F(x) - grad F(y)| over random pairs."""
    lower: float
    upper: float
    pairs: int


def bilipschitz_ratios(chart, pairs=1000, seed=0):
    """Samples |x - y|_inf / |grad F(x) - grad F(y)|_inf over random pairs in the domain box.

    Args:
        chart: The Legendre chart.
        pairs: The number of pairs.
        seed: The random seed.

    Returns:
        The bi-Lipschitz report; both bounds are finite and positive for a nonsingular Hessian.
    """
    rng = np.random.default_rng(seed)
    first = chart.center + rng.uniform(-chart.radius, chart.radius, size=(pairs, chart.arity))
    second = chart.center + rng.uniform(-chart.radius, chart.radius, size=(pairs, chart.arity))
    distances = np.max(np.abs(first - second), axis=1)
    grad_distances = np.max(np.abs(chart.source.gradient_many(first) - chart.source.gradient_many(second)), axis=1)
    ratios = distances / grad_distances
    return BiLipschitzReport(lower=float(np.min(ratios)), upper=float(np.max(ratios)), pairs=pairs)


def round_trip_statistics(chart, density=10, biconjugate=True):
    """Measures the duality identities on a grid strictly inside the domain box.

    Args:
        chart: The Legendre chart.
        density: The grid density per axis.
        biconjugate: Whether to also measure |F** - F|.

    Returns:
        A dict with the maximal round-trip, Hessian-product and biconjugate errors.
    """
    grid = box_samples(chart.center, 0.9 * chart.radius, density)
    identity = np.eye(chart.arity)
    round_trip = 0.0
    hessian_product = 0.0
    for x in grid:
        y = chart.source.gradient(x)
        round_trip = max(round_trip, float(np.max(np.abs(chart.invert_gradient(y) - x))))
        product = chart.legendre_hessian(y) @ chart.source.hessian(x)
        hessian_product = max(hessian_product, float(np.max(np.abs(product - identity))))
    result = {
        "points": int(len(grid)),
        "max_round_trip_error": round_trip,
        "max_hessian_product_error": hessian_product,
    }
    if biconjugate:
        dual = biconjugate_chart(chart)
        result["max_biconjugate_error"] = max(
            abs(dual.legendre_value(x, strict=False) - float(chart.source.evaluate(x))) for x in grid)
    return result
