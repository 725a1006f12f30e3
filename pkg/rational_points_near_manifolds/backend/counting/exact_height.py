"""This module implements the height test ||q f(a/q)|| <= delta on lattice points.

For a polynomial f = sum_m c_m x^m with rational coefficients, common denominator D and degree e,

    q f(a/q) = P(a, q) / N(q),  P = sum_m (D c_m) a^m q^(e - |m|),  N = D q^(e-1),

so the test is decided in integer arithmetic. Other maps use double precision with a guard band.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction
from rational_points_near_manifolds.errors import NotPolynomialError

logger = logging.getLogger(__name__)

INT64_SAFE = 2 ** 61
FLOAT_GUARD = 1e-12
_EXACT_RESOLVE_BAND = 1e-9


@dataclass(frozen=True)
class ExactHeightForm:
    """The integer data (D c_m, m) of a rational polynomial, with denominator D and degree e >= 1."""
    terms: Tuple[Tuple[int, Tuple[int, ...]], ...]
    denominator: int
    degree: int

    @classmethod
    def from_map(cls, smooth_map):
        """Extracts the integer form of a rational polynomial map.

        Args:
            smooth_map: The smooth map.

        Returns:
            The exact height form.
        """
        if not smooth_map.exact_rational:
            raise NotPolynomialError(f'{smooth_map.expression} is not a polynomial with rational coefficients.')
        denominator = math.lcm(*[coeff.denominator for coeff, _ in smooth_map.poly_terms]) \
            if smooth_map.poly_terms else 1
        terms = tuple((int(coeff * denominator), monom) for coeff, monom in smooth_map.poly_terms)
        return cls(terms=terms, denominator=denominator, degree=max(smooth_map.degree, 1))

    def q_denominator(self, q):
        """Gets N(q) = D q^(e-1)."""
        return self.denominator * q ** (self.degree - 1)

    def magnitude_bound(self, q, max_abs_a):
        """Bounds |P(a, q)| over base points with |a_i| <= max_abs_a."""
        return sum(abs(c) * max_abs_a ** sum(m) * q ** (self.degree - sum(m)) for c, m in self.terms)

    def numerators(self, lattice, q, powers=None):
        """Computes P(a, q) for all rows a of the lattice array.

        Args:
            lattice: Integer array of shape (m, n) (int64 or object).
            q: The denominator.
            powers: Optional cache {(i, k): a_i^k}.

        Returns:
            The integer array P of shape (m,).
        """
        powers = {} if powers is None else powers
        total = np.zeros(lattice.shape[0], dtype=lattice.dtype)
        for coeff, monom in self.terms:
            term = np.full(lattice.shape[0], coeff * q ** (self.degree - sum(monom)), dtype=lattice.dtype)
            for i, exponent in enumerate(monom):
                if exponent:
                    key = (i, exponent)
                    if key not in powers:
                        powers[key] = lattice[:, i] ** exponent
                    term = term * powers[key]
            total = total + term
        return total


def nearest_integer_residue(numerators, denominator):
    """Splits P/N = m + s with m the nearest integer (ties rounded up) and returns |P - m N|.

    Args:
        numerators: The integer array P.
        denominator: The positive integer N.

    Returns:
        The tuple (m, |P - m N|) of integer arrays.
    """
    nearest = (2 * numerators + denominator) // (2 * denominator)
    residue = numerators - nearest * denominator
    return nearest, np.abs(residue)


def within_delta(residues, denominator, delta):
    """Decides |P - m N| / N <= delta exactly.

    Args:
        residues: The integer residues |P - m N|.
        denominator: The positive integer N.
        delta: The threshold (float or Fraction); compared as its exact rational value.

    Returns:
        The boolean mask.
    """
    delta = as_fraction(delta)
    if delta == 0:
        return residues == 0
    if delta >= Fraction(1, 2):
        return np.ones(residues.shape, dtype=bool)
    ratio = residues.astype(float) / float(denominator)
    mask = ratio <= float(delta)
    ambiguous = np.nonzero(np.abs(ratio - float(delta)) <= _EXACT_RESOLVE_BAND * max(float(delta), 1e-300))[0]
    for index in ambiguous:
        mask[index] = int(residues[index]) * delta.denominator <= delta.numerator * denominator
    return mask


def float_height_distances(values):
    """Computes ||v|| = |v - round(v)| in double precision.

    Args:
        values: The float values q f(a/q).

    Returns:
        The distances in [0, 1/2].
    """
    values = np.asarray(values, dtype=float)
    return np.abs(values - np.round(values))


def float_within_delta(distances, delta, guard=FLOAT_GUARD):
    """Decides ||v|| <= delta in double precision and counts near-threshold decisions.

    Args:
        distances: The distances ||v||.
        delta: The threshold.
        guard: The guard band around delta.

    Returns:
        The tuple (mask, number of decisions within the guard band).
    """
    delta = float(delta)
    mask = distances <= delta
    near = int(np.count_nonzero(np.abs(distances - delta) <= guard))
    return mask, near


def lattice_dtype(forms, q, max_abs_a):
    """Chooses int64 when every numerator of every form stays below 2^61, object (Python ints) otherwise.

    Args:
        forms: The exact height forms.
        q: The denominator.
        max_abs_a: The largest |a_i| of the base points.

    Returns:
        The numpy dtype.
    """
    bound = max((max(f.magnitude_bound(q, max_abs_a), f.q_denominator(q)) for f in forms), default=0)
    return np.int64 if 4 * bound < INT64_SAFE else object
