"""This module implements families of symmetric matrices A_1..A_R and their pencils t_1 A_1 + ... + t_R A_R."""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from rational_points_near_manifolds.backend.curvature.box_sampling import cube_boundary_samples
from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap
from rational_points_near_manifolds.backend.matfam.exact_linalg import exact_det, int_combination, int_matmul
from rational_points_near_manifolds.errors import CertificateError, DimensionMismatchError, MatrixFamilyError

logger = logging.getLogger(__name__)

PENCIL_TOLERANCE = 1e-8
EXACT_PENCIL_SAMPLES = 100


class FamilyProvenance(Enum):
    """An enum of the origins of a matrix family."""
    SUSLIN = 1  # Recursive square-identity construction
    REALIFIED = 2  # Realification of Hermitian matrices
    USER = 3  # Given matrices


def _as_integer_array(matrix):
    """Converts a matrix with integral entries to an int64 (or Python integer) array, None otherwise."""
    array = np.asarray(matrix)
    if np.issubdtype(array.dtype, np.integer):
        return array.astype(np.int64)
    if array.dtype == object:
        if all(isinstance(e, (int, np.integer)) or (isinstance(e, Fraction) and e.denominator == 1)
               for e in array.ravel()):
            return np.vectorize(int, otypes=[object])(array)
        return None
    if np.issubdtype(array.dtype, np.floating) and np.all(np.isfinite(array)) and np.all(array == np.round(array)):
        return np.round(array).astype(np.int64)
    return None


#################
# Matrix Family #
#################
class MatrixFamily:
    """A family of R real symmetric n x n matrices A_1..A_R."""

    def __init__(self, matrices, provenance=FamilyProvenance.USER):
        """Initializes MatrixFamily.

        Args:
            matrices: The R matrices (integer entries are kept exact).
            provenance: The origin of the family.
        """
        if len(matrices) < 1:
            raise MatrixFamilyError("A matrix family needs at least one matrix.")
        converted = [_as_integer_array(m) for m in matrices]
        self.integral = all(m is not None for m in converted)
        if self.integral:
            self.matrices = tuple(converted)
        else:
            self.matrices = tuple(np.asarray(m, dtype=float) for m in matrices)
        self.R = len(self.matrices)
        self.n = self.matrices[0].shape[0]
        for r, matrix in enumerate(self.matrices, start=1):
            if matrix.shape != (self.n, self.n):
                raise DimensionMismatchError(f'A_{r} has shape {matrix.shape}, expected ({self.n}, {self.n}).')
            if not np.array_equal(matrix, matrix.T):
                raise MatrixFamilyError(f'A_{r} is not symmetric.')
        self.provenance = provenance

    def __repr__(self):
        return f'MatrixFamily(R={self.R}, n={self.n}, provenance={self.provenance.name.lower()})'

    def pencil(self, t):
        """Forms the pencil sum_r t_r A_r.

        Args:
            t: The coefficient vector (length R); exact for integer or rational entries of integer families.

        Returns:
            The pencil matrix (integer, Fraction object or float array).
        """
        t = list(t)
        if len(t) != self.R:
            raise DimensionMismatchError(f'Pencil vector has length {len(t)}, family has R={self.R}.')
        exact_t = all(isinstance(c, (int, np.integer, Fraction)) for c in t)
        if self.integral and exact_t:
            return int_combination(np.stack(self.matrices), t)
        return np.tensordot(np.asarray(t, dtype=float), np.stack(self.matrices).astype(float), axes=1)

    def squares_to_scalar(self, t):
        """Checks (sum_r t_r A_r)^2 = (sum_r t_r^2) I exactly for integer t.

        Args:
            t: The integer coefficient vector.

        Returns:
            True if the square identity holds at t.
        """
        if not self.integral:
            return False
        pencil = self.pencil([int(c) for c in t])
        square = int_matmul(pencil, pencil)
        norm = sum(int(c) ** 2 for c in t)
        return bool(np.array_equal(square, norm * np.eye(self.n, dtype=np.int64).astype(square.dtype)))

    def stacked(self):
        return np.stack(self.matrices).astype(float)

    def to_dict(self):
        """Converts the family to a JSON-compatible mapping.

        Returns:
            The mapping.
        """
        return {
            "R": self.R,
            "n": self.n,
            "provenance": self.provenance.name.lower(),
            "matrices": [[[int(e) if self.integral else float(e) for e in row] for row in m] for m in self.matrices],
        }


@dataclass(frozen=True)
class PencilCertificate:
    """The outcome of the pencil nonsingularity check det(sum_r t_r A_r) != 0 for t != 0.

    The determinant bounds are reported as |det|^(1/n) over the samples.
    """
    holds: bool
    min_det_root: float
    max_det_root: float
    samples: int
    exact_samples: int
    witness: tuple


def certify_pencil(family, t_grid_density=16, max_t_samples=2000, exact_samples=EXACT_PENCIL_SAMPLES, seed=0,
                   require=False):
    """Checks the pencil nonsingularity on the boundary of the unit cube in t and at random integer t.

    Args:
        family: The matrix family.
        t_grid_density: The grid density per free coordinate on each cube face.
        max_t_samples: Cap on the number of t samples on the cube boundary.
        exact_samples: The number of random nonzero integer t checked by exact determinants.
        seed: The random seed.
        require: Whether a failed check raises CertificateError.

    Returns:
        The pencil certificate.
    """
    t_samples = cube_boundary_samples(family.R, t_grid_density, max_samples=max_t_samples, seed=seed)
    signs, logs = np.linalg.slogdet(np.tensordot(t_samples, family.stacked(), axes=1))
    roots = np.where(signs == 0, 0.0, np.exp(logs / family.n))
    index = int(np.argmin(roots))
    min_root = float(roots[index])
    max_root = float(np.max(roots))
    holds = bool(max_root > 0 and min_root > PENCIL_TOLERANCE * max_root)
    witness = tuple(float(v) for v in t_samples[index])

    checked = 0
    if holds and family.integral:
        rng = np.random.default_rng(seed)
        for _ in range(exact_samples):
            t = [int(v) for v in rng.integers(-9, 10, size=family.R)]
            if not any(t):
                continue
            checked += 1
            if family.squares_to_scalar(t):
                continue
            if exact_det(family.pencil(t).tolist()) == 0:
                holds = False
                witness = tuple(float(v) for v in t)
                break

    certificate = PencilCertificate(holds=holds, min_det_root=min_root, max_det_root=max_root, samples=len(t_samples),
                                    exact_samples=checked, witness=witness)
    logger.info(f'Pencil of {family} {"is" if holds else "is not"} nonsingular on the samples '
                f'(min |det|^(1/n) = {min_root:.6g}).')
    if require and not holds:
        raise CertificateError(f'Pencil of {family} is singular near t = {witness}.')
    return certificate


def chart_from_family(family, eps0=Fraction(1, 2), name=None):
    """Builds the chart f_r(x) = 1/2 x^T A_r x around x0 = 0.

    Args:
        family: The matrix family (integer entries keep the maps exact).
        eps0: The chart radius.
        name: An optional chart name.

    Returns:
        The manifold chart.
    """
    maps = []
    for matrix in family.matrices:
        rows = [[int(e) if family.integral else float(e) for e in row] for row in matrix]
        maps.append(SmoothMap.quadratic_form(rows))
    return ManifoldChart((0,) * family.n, eps0, maps, name=name or f'{family.provenance.name.lower()}{family.R}')
