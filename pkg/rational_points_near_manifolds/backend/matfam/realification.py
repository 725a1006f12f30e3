"""This module implements the realification of Hermitian matrices M = P + iK to [[P, -K], [K, P]]."""
import logging

import numpy as np
import sympy

from rational_points_near_manifolds.backend.matfam.matrix_family import FamilyProvenance, MatrixFamily
from rational_points_near_manifolds.errors import NonHermitianError

logger = logging.getLogger(__name__)


def _split(matrix):
    """Splits a complex matrix into its real and imaginary parts, as integers for Gaussian-integer entries."""
    array = np.asarray(matrix, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise NonHermitianError(f'Hermitian matrix must be square, got shape {array.shape}.')
    real, imag = array.real, array.imag
    if np.all(real == np.round(real)) and np.all(imag == np.round(imag)):
        return np.round(real).astype(np.int64), np.round(imag).astype(np.int64)
    return real, imag


def realify_hermitian(matrix, tolerance=0.0):
    """Maps a Hermitian matrix M = P + iK to the real symmetric matrix [[P, -K], [K, P]].

    The result has twice the dimension of M and determinant |det M|^2.

    Args:
        matrix: The complex Hermitian matrix.
        tolerance: The tolerance of the Hermitian check (P symmetric, K antisymmetric).

    Returns:
        The real symmetric matrix (int64 for Gaussian-integer input).
    """
    real, imag = _split(matrix)
    if np.max(np.abs(real - real.T), initial=0) > tolerance or np.max(np.abs(imag + imag.T), initial=0) > tolerance:
        raise NonHermitianError("Matrix is not Hermitian (real part symmetric, imaginary part antisymmetric).")
    return np.block([[real, -imag], [imag, real]])


def hermitian_det(matrix):
    """Computes det M exactly for Gaussian-integer entries (a real integer for Hermitian M).

    Args:
        matrix: The complex matrix with integral real and imaginary parts.

    Returns:
        The exact determinant as a sympy number.
    """
    real, imag = _split(matrix)
    if not np.issubdtype(real.dtype, np.integer):
        raise ValueError("Exact determinants need Gaussian-integer entries.")
    entries = sympy.Matrix(real.shape[0], real.shape[1],
                           lambda i, j: sympy.Integer(int(real[i, j])) + sympy.I * int(imag[i, j]))
    return sympy.expand(entries.det(method="berkowitz"))


def realified_family(hermitian_matrices):
    """Realifies Hermitian matrices M_1..M_R into a real symmetric family H_1..H_R.

    Args:
        hermitian_matrices: The Hermitian matrices.

    Returns:
        The matrix family.
    """
    family = MatrixFamily([realify_hermitian(m) for m in hermitian_matrices], provenance=FamilyProvenance.REALIFIED)
    logger.debug(f'Realified {family.R} Hermitian matrices to dimension {family.n}.')
    return family
