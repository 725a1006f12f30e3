"""This module provides exact integer/rational linear algebra for small dense matrices."""
from fractions import Fraction

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction

INT64_SAFE = 2 ** 62


def _is_integral(entries):
    return all(isinstance(e, (int, np.integer)) or (isinstance(e, Fraction) and e.denominator == 1)
               for e in entries)


def to_domain_matrix(matrix):
    """Converts a nested list or array of ints/Fractions to a sympy DomainMatrix over ZZ or QQ.

    Args:
        matrix: The square matrix.

    Returns:
        The domain matrix.
    """
    rows = [list(row) for row in matrix]
    flat = [e for row in rows for e in row]
    if _is_integral(flat):
        data = [[ZZ(int(e)) for e in row] for row in rows]
        return DomainMatrix(data, (len(rows), len(rows[0]) if rows else 0), ZZ)
    data = []
    for row in rows:
        converted = []
        for e in row:
            frac = as_fraction(e)
            converted.append(QQ(frac.numerator, frac.denominator))
        data.append(converted)
    return DomainMatrix(data, (len(rows), len(rows[0]) if rows else 0), QQ)


def exact_det(matrix):
    """Computes the determinant exactly (fraction-free elimination in sympy).

    Args:
        matrix: The square matrix with integer or rational entries.

    Returns:
        The determinant as int (integer input) or Fraction.
    """
    dm = to_domain_matrix(matrix)
    if dm.shape[0] != dm.shape[1]:
        raise ValueError(f'Determinant needs a square matrix, got shape {dm.shape}.')
    if dm.shape[0] == 0:
        return 1
    det = dm.det()
    if dm.domain == ZZ:
        return int(det)
    return Fraction(int(det.numerator), int(det.denominator))


def exact_rank(matrix):
    """Computes the rank exactly.

    Args:
        matrix: The matrix with integer or rational entries.

    Returns:
        The rank.
    """
    return int(to_domain_matrix(matrix).convert_to(QQ).rank())


def int_matmul(a, b):
    """Multiplies integer matrices, in int64 when safe and in Python integers otherwise.

    Args:
        a: The left integer array.
        b: The right integer array.

    Returns:
        The product (int64 or object dtype).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    max_a = int(np.max(np.abs(a.astype(object)))) if a.size else 0
    max_b = int(np.max(np.abs(b.astype(object)))) if b.size else 0
    inner = a.shape[-1]
    if max_a * max_b * max(inner, 1) < INT64_SAFE:
        return a.astype(np.int64) @ b.astype(np.int64)
    return a.astype(object) @ b.astype(object)


def int_combination(matrices, coefficients):
    """Forms sum_r c_r A_r exactly for integer or rational coefficients.

    Args:
        matrices: The integer matrices A_r (array of shape (R, n, n)).
        coefficients: The coefficients c_r.

    Returns:
        An int64 or object array for integer coefficients, a Fraction object array otherwise.
    """
    stack = np.asarray(matrices)
    coefficients = list(coefficients)
    if all(isinstance(c, (int, np.integer)) for c in coefficients):
        bound = sum(abs(int(c)) for c in coefficients) * (int(np.max(np.abs(stack.astype(object)))) if stack.size else 0)
        if bound < INT64_SAFE:
            return np.tensordot(np.asarray(coefficients, dtype=np.int64), stack.astype(np.int64), axes=1)
        return np.tensordot(np.asarray([int(c) for c in coefficients], dtype=object), stack.astype(object), axes=1)
    fracs = np.asarray([as_fraction(c) for c in coefficients], dtype=object)
    return np.tensordot(fracs, stack.astype(object), axes=1)
