"""This module implements smooth maps R^n -> R given by closed-form expression trees."""
import logging
import warnings
from fractions import Fraction

import numpy as np
import sympy

from rational_points_near_manifolds.backend.funcspace.exact import (
    as_fraction, is_rational_scalar, to_sympy_number
)
from rational_points_near_manifolds.backend.funcspace.expression_parser import (
    coordinate_symbols, parse_expression
)
from rational_points_near_manifolds.errors import (
    DimensionMismatchError, EvaluationError, SmoothnessError, SmoothnessWarning
)

logger = logging.getLogger(__name__)

# Expressions over {+,-,*,/,^,exp,sin,cos} are analytic on their domain of definition.
ANALYTIC_SMOOTHNESS = 10 ** 6
FD_STEP = 1e-5


def required_smoothness(arity):
    """Gets the smallest smoothness l with l > max{n+1, n/2+4} assumed by the counting estimate.

    Args:
        arity: The dimension n.

    Returns:
        The smallest admissible integer l.
    """
    bound = max(arity + 1, arity / 2 + 4)
    return int(np.floor(bound)) + 1


def _broadcast(value, shape):
    """Broadcasts a lambdified result (possibly a constant) to a float array."""
    return np.broadcast_to(np.asarray(value, dtype=float), shape).astype(float)


##############
# Smooth Map #
##############
class SmoothMap:
    """A C^l map R^n -> R stored as a sympy expression tree with symbolic derivatives.

    Instances are immutable after construction; evaluation is reentrant.
    """

    def __init__(self, expression, arity, smoothness=None):
        """Initializes SmoothMap.

        Args:
            expression: A sympy expression or an expression string of the manifold grammar.
            arity: The number of variables n.
            smoothness: The declared smoothness l (analytic if omitted).
        """
        if arity < 1:
            raise ValueError(f'Arity must be positive, got {arity}.')
        self.arity = int(arity)
        self.symbols = coordinate_symbols(self.arity)
        if isinstance(expression, str):
            expression = parse_expression(expression, self.arity)
        self.expression = sympy.sympify(expression)
        foreign = self.expression.free_symbols - set(self.symbols)
        if foreign:
            raise DimensionMismatchError(
                f'Expression uses symbols {sorted(map(str, foreign))} outside x1..x{self.arity}.')
        self.smoothness = ANALYTIC_SMOOTHNESS if smoothness is None else int(smoothness)
        if self.smoothness < 1:
            raise ValueError(f'Smoothness must be positive, got {self.smoothness}.')

        self.gradient_expressions = tuple(sympy.diff(self.expression, sym) for sym in self.symbols)
        hessian = [[None] * self.arity for _ in range(self.arity)]
        for i in range(self.arity):
            for j in range(i, self.arity):
                entry = sympy.diff(self.gradient_expressions[i], self.symbols[j])
                hessian[i][j] = entry
                hessian[j][i] = entry
        self.hessian_expressions = tuple(tuple(row) for row in hessian)

        self._value_func = sympy.lambdify(self.symbols, self.expression, modules="numpy")
        self._gradient_funcs = [sympy.lambdify(self.symbols, e, modules="numpy") for e in self.gradient_expressions]
        self._hessian_funcs = {
            (i, j): sympy.lambdify(self.symbols, self.hessian_expressions[i][j], modules="numpy")
            for i in range(self.arity) for j in range(i, self.arity)
        }

        self.poly_terms = None
        self.degree = None
        self._init_polynomial_data()

    def _init_polynomial_data(self):
        """Extracts exact rational monomial data if the expression is a rational polynomial."""
        if not self.expression.is_polynomial(*self.symbols):
            return
        poly = sympy.Poly(self.expression, *self.symbols)
        if not (poly.domain.is_ZZ or poly.domain.is_QQ):
            return
        terms = []
        for monom, coeff in poly.terms():
            frac = Fraction(str(coeff))
            if frac != 0:
                terms.append((frac, tuple(int(e) for e in monom)))
        self.poly_terms = tuple(terms)
        self.degree = max((sum(monom) for _, monom in terms), default=0)

    @property
    def exact_rational(self):
        """Whether the map is a polynomial with rational coefficients."""
        return self.poly_terms is not None

    def __repr__(self):
        return f'SmoothMap({self.expression}, n={self.arity})'

    def __str__(self):
        return str(self.expression)

    ################
    # Construction #
    ################
    @classmethod
    def linear_combination(cls, maps, coefficients):
        """Builds the map sum_r c_r f_r (e.g. a Hessian pencil member G_t or F_j).

        Args:
            maps: The maps f_r (common arity).
            coefficients: The coefficients c_r (ints/Fractions stay exact).

        Returns:
            The combined smooth map.
        """
        maps = list(maps)
        coefficients = list(coefficients)
        if not maps or len(maps) != len(coefficients):
            raise DimensionMismatchError(f'Got {len(maps)} maps but {len(coefficients)} coefficients.')
        arity = maps[0].arity
        if any(m.arity != arity for m in maps):
            raise DimensionMismatchError("All maps of a linear combination must share their arity.")
        expr = sympy.Add(*[to_sympy_number(c) * m.expression for c, m in zip(coefficients, maps)])
        return cls(expr, arity, smoothness=min(m.smoothness for m in maps))

    @classmethod
    def quadratic_form(cls, matrix):
        """Builds the map x -> 1/2 x^T A x.

        Args:
            matrix: A symmetric n x n matrix with rational (or integer) entries.

        Returns:
            The quadratic smooth map.
        """
        rows = [list(row) for row in matrix]
        arity = len(rows)
        symbols = coordinate_symbols(arity)
        terms = []
        for i in range(arity):
            if len(rows[i]) != arity:
                raise DimensionMismatchError("Quadratic form matrix must be square.")
            for j in range(arity):
                if rows[i][j] != 0:
                    terms.append(to_sympy_number(rows[i][j]) * symbols[i] * symbols[j])
        expr = sympy.Rational(1, 2) * sympy.Add(*terms)
        return cls(sympy.expand(expr), arity)

    def minus_linear(self, vector):
        """Builds the map x -> f(x) - v.x (a phase with its linear part removed).

        Args:
            vector: The vector v.

        Returns:
            The shifted smooth map.
        """
        vector = list(vector)
        self._check_dimension(vector)
        expr = self.expression - sympy.Add(*[to_sympy_number(v) * s for v, s in zip(vector, self.symbols)])
        return SmoothMap(expr, self.arity, smoothness=self.smoothness)

    def scaled(self, factor):
        """Builds the map c*f.

        Args:
            factor: The constant c.

        Returns:
            The scaled smooth map.
        """
        return SmoothMap(to_sympy_number(factor) * self.expression, self.arity, smoothness=self.smoothness)

    ##############
    # Evaluation #
    ##############
    def _check_dimension(self, x):
        if len(x) != self.arity:
            raise DimensionMismatchError(f'Point has dimension {len(x)}, expected {self.arity}.')

    def _call(self, func, x):
        """Evaluates a lambdified function at a single float point."""
        coords = [np.float64(float(c)) for c in x]
        try:
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                value = float(func(*coords))
        except (ZeroDivisionError, FloatingPointError) as exc:
            raise EvaluationError(f'Evaluation of {self.expression} at {tuple(x)} failed: {exc}') from exc
        if not np.isfinite(value):
            raise EvaluationError(f'Evaluation of {self.expression} at {tuple(x)} is not finite.')
        return value

    def evaluate(self, x):
        """Evaluates the map at a point.

        The value is an exact Fraction if the map is a rational polynomial and all coordinates are rational.

        Args:
            x: The point (length n).

        Returns:
            The map value (Fraction or float).
        """
        x = list(x)
        self._check_dimension(x)
        if self.exact_rational and all(is_rational_scalar(c) for c in x):
            return self.evaluate_exact(x)
        return self._call(self._value_func, x)

    def evaluate_exact(self, x):
        """Evaluates a rational polynomial map exactly.

        Args:
            x: The point with rational coordinates.

        Returns:
            The exact value as a Fraction.
        """
        if not self.exact_rational:
            raise EvaluationError(f'{self.expression} is not a rational polynomial.')
        x = [as_fraction(c) for c in x]
        self._check_dimension(x)
        total = Fraction(0)
        for coeff, monom in self.poly_terms:
            term = coeff
            for c, e in zip(x, monom):
                if e:
                    term *= c ** e
            total += term
        return total

    def evaluate_many(self, points):
        """Evaluates the map at many points.

        Args:
            points: Array of shape (m, n).

        Returns:
            Float array of shape (m,).
        """
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.arity:
            raise DimensionMismatchError(f'Points must have shape (m, {self.arity}), got {points.shape}.')
        with np.errstate(all="ignore"):
            values = _broadcast(self._value_func(*points.T), (points.shape[0],))
        if not np.all(np.isfinite(values)):
            raise EvaluationError(f'Evaluation of {self.expression} produced non-finite values.')
        return values

    def gradient(self, x):
        """Evaluates the gradient at a point.

        Args:
            x: The point (length n).

        Returns:
            Float array of shape (n,).
        """
        x = list(x)
        self._check_dimension(x)
        return np.array([self._call(func, x) for func in self._gradient_funcs])

    def gradient_many(self, points):
        """Evaluates the gradient at many points.

        Args:
            points: Array of shape (m, n).

        Returns:
            Float array of shape (m, n).
        """
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.arity:
            raise DimensionMismatchError(f'Points must have shape (m, {self.arity}), got {points.shape}.')
        out = np.empty(points.shape, dtype=float)
        with np.errstate(all="ignore"):
            for i, func in enumerate(self._gradient_funcs):
                out[:, i] = _broadcast(func(*points.T), (points.shape[0],))
        return out

    def hessian(self, x):
        """Evaluates the Hessian matrix at a point; symmetric by construction.

        Args:
            x: The point (length n).

        Returns:
            Float array of shape (n, n).
        """
        if self.smoothness < 2:
            raise SmoothnessError(f'Hessian requires smoothness >= 2, map has {self.smoothness}.')
        x = list(x)
        self._check_dimension(x)
        hess = np.empty((self.arity, self.arity), dtype=float)
        for (i, j), func in self._hessian_funcs.items():
            value = self._call(func, x)
            hess[i, j] = value
            hess[j, i] = value
        return hess

    def hessian_exact(self, x):
        """Evaluates the Hessian of a rational polynomial map exactly.

        Args:
            x: The point with rational coordinates.

        Returns:
            The n x n nested list of Fractions.
        """
        if not self.exact_rational:
            raise EvaluationError(f'{self.expression} is not a rational polynomial.')
        x = [as_fraction(c) for c in x]
        self._check_dimension(x)
        hess = [[Fraction(0)] * self.arity for _ in range(self.arity)]
        for coeff, monom in self.poly_terms:
            for i in range(self.arity):
                for j in range(i, self.arity):
                    exponents = list(monom)
                    factor = exponents[i]
                    exponents[i] -= 1
                    factor *= exponents[j]
                    exponents[j] -= 1
                    if factor == 0:
                        continue
                    term = coeff * factor
                    for c, e in zip(x, exponents):
                        if e:
                            term *= c ** e
                    hess[i][j] += term
        for i in range(self.arity):
            for j in range(i):
                hess[i][j] = hess[j][i]
        return hess

    @property
    def has_constant_hessian(self):
        """Whether the map is a rational polynomial of degree at most 2."""
        return self.exact_rational and self.degree <= 2

    def hessian_many(self, points):
        """Evaluates the Hessian at many points.

        Args:
            points: Array of shape (m, n).

        Returns:
            Float array of shape (m, n, n).
        """
        if self.smoothness < 2:
            raise SmoothnessError(f'Hessian requires smoothness >= 2, map has {self.smoothness}.')
        points = np.asarray(points, dtype=float)
        count = points.shape[0]
        out = np.empty((count, self.arity, self.arity), dtype=float)
        with np.errstate(all="ignore"):
            for (i, j), func in self._hessian_funcs.items():
                values = _broadcast(func(*points.T), (count,))
                out[:, i, j] = values
                out[:, j, i] = values
        return out

    ######################
    # Finite differences #
    ######################
    def finite_difference_gradient(self, x, scale=1.0):
        """Central-difference gradient of the value evaluator with step 1e-5 * scale.

        Args:
            x: The point.
            scale: The coordinate scale.

        Returns:
            Float array of shape (n,).
        """
        x = np.asarray(x, dtype=float)
        step = FD_STEP * scale
        grad = np.empty(self.arity)
        for i in range(self.arity):
            shift = np.zeros(self.arity)
            shift[i] = step
            grad[i] = (self._call(self._value_func, x + shift) - self._call(self._value_func, x - shift)) / (2 * step)
        return grad

    def finite_difference_hessian(self, x, scale=1.0):
        """Central differences of the analytic gradient with step 1e-5 * scale.

        Args:
            x: The point.
            scale: The coordinate scale.

        Returns:
            Float array of shape (n, n).
        """
        x = np.asarray(x, dtype=float)
        step = FD_STEP * scale
        hess = np.empty((self.arity, self.arity))
        for j in range(self.arity):
            shift = np.zeros(self.arity)
            shift[j] = step
            hess[:, j] = (self.gradient(x + shift) - self.gradient(x - shift)) / (2 * step)
        return hess

    #######################
    # Smoothness metadata #
    #######################
    def check_smoothness(self):
        """Checks the declared smoothness against l > max{n+1, n/2+4}; warns (does not raise) if too small.

        Returns:
            True if the requirement is met.
        """
        required = required_smoothness(self.arity)
        if self.smoothness >= required:
            return True
        message = (f'Smoothness {self.smoothness} of {self.expression} is below the required {required} '
                   f'for n={self.arity}; counts remain valid, the asymptotic estimate may not apply.')
        logger.warning(message)
        warnings.warn(message, SmoothnessWarning, stacklevel=2)
        return False


def eval_map(smooth_map, x):
    """Evaluates a smooth map at a point (exact for rational polynomials at rational points).

    Args:
        smooth_map: The map.
        x: The point.

    Returns:
        The value.
    """
    return smooth_map.evaluate(x)


def hessian(smooth_map, x):
    """Evaluates the Hessian of a smooth map at a point.

    Args:
        smooth_map: The map.
        x: The point.

    Returns:
        The symmetric n x n Hessian.
    """
    return smooth_map.hessian(x)
