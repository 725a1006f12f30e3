"""This module provides helpers for exact rational inputs."""
from fractions import Fraction
from numbers import Integral

import sympy


def as_fraction(value):
    """Converts a number or a rational literal string to a Fraction.

    Floats are converted exactly (binary value), strings like "1/4" or "0.25" are parsed as decimals/ratios.

    Args:
        value: An int, Fraction, float, sympy Rational, or string.

    Returns:
        The exact Fraction.
    """
    if isinstance(value, bool):
        raise ValueError(f'Boolean "{value}" is not a number.')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(float(value))


def is_rational_scalar(value):
    """Checks whether a value can take part in exact rational arithmetic.

    Args:
        value: The value.

    Returns:
        True for ints, Fractions and sympy Rationals.
    """
    if isinstance(value, bool):
        return False
    return isinstance(value, (Integral, Fraction, sympy.Rational))


def to_sympy_number(value):
    """Converts a coefficient to a sympy number, keeping rationals exact.

    Args:
        value: An int, Fraction, sympy number or float.

    Returns:
        The sympy number.
    """
    if isinstance(value, sympy.Basic):
        return value
    if is_rational_scalar(value):
        frac = as_fraction(value)
        return sympy.Rational(frac.numerator, frac.denominator)
    return sympy.Float(float(value))
