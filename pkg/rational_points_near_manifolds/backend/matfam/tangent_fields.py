"""This module implements the vector fields on the unit sphere induced by a family with a nonsingular pencil.

With B_r = A_r A_1^(-1), the fields v_r(x) = B_r x - (x.B_r x) x (r = 2..R) are tangent at x, and a relation
sum_r c_r v_r(x) = 0 would make the pencil sum_r c_r A_r - mu A_1 singular, so they are independent.
"""
import logging

import numpy as np

from rational_points_near_manifolds.backend.matfam.exact_linalg import exact_det, exact_rank
from rational_points_near_manifolds.errors import CertificateError, DimensionMismatchError

logger = logging.getLogger(__name__)

TANGENCY_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-9


def field_operators(family):
    """Computes B_r = A_r A_1^(-1) for r = 2..R.

    Args:
        family: The matrix family with A_1 invertible.

    Returns:
        Array of shape (R - 1, n, n).
    """
    first = family.matrices[0]
    singular = exact_det(first.tolist()) == 0 if family.integral else abs(np.linalg.det(first.astype(float))) == 0.0
    if singular:
        raise CertificateError("A_1 is singular; the tangent fields need an invertible A_1.")
    stacked = family.stacked()
    # B_r = A_r A_1^(-1)  <=>  A_1 B_r^T = A_r^T = A_r (A_1 symmetric)
    return np.stack([np.linalg.solve(stacked[0], matrix).T for matrix in stacked[1:]]) if family.R > 1 \
        else np.empty((0, family.n, family.n))


def tangent_fields(family, x, operators=None):
    """Evaluates the R - 1 tangent fields at a unit vector.

    Args:
        family: The matrix family.
        x: The unit vector (length n).
        operators: Precomputed operators B_2..B_R.

    Returns:
        Array of shape (R - 1, n) with the fields v_2(x)..v_R(x).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (family.n,):
        raise DimensionMismatchError(f'Point has shape {x.shape}, expected ({family.n},).')
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise ValueError(f'Tangent fields are evaluated at unit vectors, |x| = {np.linalg.norm(x):.6g}.')
    operators = field_operators(family) if operators is None else operators
    images = operators @ x
    fields = images - np.outer(images @ x, x)
    if fields.shape[0] and np.max(np.abs(fields @ x)) > TANGENCY_TOLERANCE:
        raise CertificateError(f'Fields are not tangent at {x} (|x.v| = {np.max(np.abs(fields @ x)):.3g}).')
    if fields.shape[0] and np.linalg.matrix_rank(fields, tol=RANK_TOLERANCE) < family.R - 1:
        raise CertificateError(f'Tangent fields are dependent at {x}, contradicting the pencil certificate.')
    return fields


def independence_rank(family, x):
    """Computes rank [A_1 x | ... | A_R x], exactly for integer families and integer x.

    Args:
        family: The matrix family.
        x: The nonzero vector.

    Returns:
        The rank.
    """
    if family.integral and all(isinstance(c, (int, np.integer)) for c in x):
        columns = [(matrix @ np.asarray(x, dtype=np.int64)).tolist() for matrix in family.matrices]
        return exact_rank([list(row) for row in zip(*columns)])
    columns = family.stacked() @ np.asarray(x, dtype=float)
    return int(np.linalg.matrix_rank(columns.T, tol=RANK_TOLERANCE * max(1.0, float(np.max(np.abs(columns))))))


def random_unit_vectors(n, count, seed=0):
    """Draws seeded uniform points on the unit sphere in R^n.

    Args:
        n: The dimension.
        count: The number of points.
        seed: The random seed.

    Returns:
        Array of shape (count, n).
    """
    points = np.random.default_rng(seed).standard_normal((count, n))
    return points / np.linalg.norm(points, axis=1, keepdims=True)
