"""This module implements the recursive family with A(t)^2 = (t_1^2 + ... + t_R^2) I.

The base case is A_2(t_1, t_2) = [[t_2, t_1], [t_1, -t_2]], and

    A_R(t_1..t_R) = [[t_R I, A_{R-1}(t_1..t_{R-1})], [A_{R-1}(t_1..t_{R-1}), -t_R I]]

of dimension 2^(R-1). The family consists of the coefficient matrices of t_1..t_R.
"""
import logging

import numpy as np

from rational_points_near_manifolds.backend.matfam.exact_linalg import exact_det
from rational_points_near_manifolds.backend.matfam.matrix_family import FamilyProvenance, MatrixFamily
from rational_points_near_manifolds.errors import MatrixFamilyError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 1024


def _suslin_coefficients(R):
    if R == 2:
        return [np.array([[0, 1], [1, 0]], dtype=np.int64), np.array([[1, 0], [0, -1]], dtype=np.int64)]
    previous = _suslin_coefficients(R - 1)
    half = previous[0].shape[0]
    zero = np.zeros((half, half), dtype=np.int64)
    identity = np.eye(half, dtype=np.int64)
    coefficients = [np.block([[zero, matrix], [matrix, zero]]) for matrix in previous]
    coefficients.append(np.block([[identity, zero], [zero, -identity]]))
    return coefficients


def suslin_family(R, max_dimension=MAX_DIMENSION):
    """Builds the coefficient matrices A_1..A_R of the recursive family of dimension n = 2^(R-1).

    Args:
        R: The number of matrices (R >= 2).
        max_dimension: The cap on n.

    Returns:
        The matrix family.
    """
    if int(R) != R or R < 2:
        raise ValueError(f'The recursive family needs an integer R >= 2, got {R}.')
    R = int(R)
    if 2 ** (R - 1) > max_dimension:
        raise MatrixFamilyError(f'Dimension 2^{R - 1} exceeds the cap {max_dimension}.')
    family = MatrixFamily(_suslin_coefficients(R), provenance=FamilyProvenance.SUSLIN)
    logger.debug(f'Built recursive family with R={R}, n={family.n}.')
    return family


def determinant_identity_holds(family, t):
    """Checks (det sum_r t_r A_r)^2 = (sum_r t_r^2)^n exactly for integer t.

    Args:
        family: The matrix family.
        t: The integer coefficient vector.

    Returns:
        True if the identity holds.
    """
    det = exact_det(family.pencil([int(c) for c in t]).tolist())
    return det ** 2 == sum(int(c) ** 2 for c in t) ** family.n
