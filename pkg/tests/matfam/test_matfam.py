"""This module contains the tests for the matrix families, realification and the induced tangent fields."""
from fractions import Fraction

import numpy as np
import pytest

from rational_points_near_manifolds.backend.curvature.curvature_verifier import (
    compute_localization, verify_condition1
)
from rational_points_near_manifolds.backend.matfam.exact_linalg import exact_det, int_matmul
from rational_points_near_manifolds.backend.matfam.matrix_family import (
    FamilyProvenance, MatrixFamily, certify_pencil, chart_from_family
)
from rational_points_near_manifolds.backend.matfam.radon_hurwitz import radon_hurwitz
from rational_points_near_manifolds.backend.matfam.realification import (
    hermitian_det, realified_family, realify_hermitian
)
from rational_points_near_manifolds.backend.matfam.suslin import determinant_identity_holds, suslin_family
from rational_points_near_manifolds.backend.matfam.tangent_fields import (
    field_operators, independence_rank, random_unit_vectors, tangent_fields
)
from rational_points_near_manifolds.errors import (
    CertificateError, DimensionMismatchError, MatrixFamilyError, NonHermitianError
)


@pytest.fixture
def integer_vectors():
    """Draws 100 seeded nonzero integer vectors of length 8.

    Returns:
        The list of vectors.
    """
    rng = np.random.default_rng(11)
    vectors = []
    while len(vectors) < 100:
        t = [int(v) for v in rng.integers(-20, 21, size=8)]
        if any(t):
            vectors.append(t)
    return vectors


@pytest.fixture
def pauli_family():
    """Creates the Hermitian matrices [[1, 0], [0, -1]], [[0, 1], [1, 0]] and [[0, -i], [i, 0]].

    Returns:
        The list of complex matrices.
    """
    return [np.array([[1, 0], [0, -1]], dtype=complex), np.array([[0, 1], [1, 0]], dtype=complex),
            np.array([[0, -1j], [1j, 0]])]


#################
# Matrix Family #
#################
def test_family_validation():
    with pytest.raises(MatrixFamilyError):
        MatrixFamily([[[0, 1], [2, 0]]])
    with pytest.raises(DimensionMismatchError):
        MatrixFamily([np.eye(2, dtype=int), np.eye(3, dtype=int)])
    with pytest.raises(MatrixFamilyError):
        MatrixFamily([])
    family = MatrixFamily([[[1, 0], [0, 2]], [[Fraction(1, 2), 0], [0, 1]]])
    assert not family.integral
    assert family.provenance == FamilyProvenance.USER


def test_pencil_examples():
    family = suslin_family(2)
    assert np.array_equal(family.pencil([1, 0]), family.matrices[0])
    assert np.array_equal(family.pencil([0, 0]), np.zeros((2, 2), dtype=int))
    assert exact_det(family.pencil([3, 4]).tolist()) == -25
    assert family.pencil([Fraction(1, 2), 1])[0, 1] == Fraction(1, 2)
    assert family.pencil([0.5, 1.0])[0, 0] == 1.0
    with pytest.raises(DimensionMismatchError):
        family.pencil([1, 2, 3])


def test_certify_pencil():
    assert certify_pencil(suslin_family(3)).holds
    singular = MatrixFamily([np.eye(2, dtype=int), np.eye(2, dtype=int)])
    certificate = certify_pencil(singular)
    assert not certificate.holds
    assert certificate.min_det_root == 0.0
    with pytest.raises(CertificateError):
        certify_pencil(singular, require=True)


##########
# Suslin #
##########
def test_suslin_base_case():
    family = suslin_family(2)
    assert family.matrices[0].tolist() == [[0, 1], [1, 0]]
    assert family.matrices[1].tolist() == [[1, 0], [0, -1]]
    assert family.provenance == FamilyProvenance.SUSLIN


def test_suslin_square_at_ones():
    pencil = suslin_family(3).pencil([1, 1, 1])
    assert np.array_equal(int_matmul(pencil, pencil), 3 * np.eye(4, dtype=np.int64))


def test_suslin_square_identity(integer_vectors, subtests):
    for R in range(2, 9):
        family = suslin_family(R)
        assert family.n == 2 ** (R - 1)
        with subtests.test(R=R):
            assert all(family.squares_to_scalar(t[:R]) for t in integer_vectors)


def test_suslin_determinant_identity(integer_vectors, subtests):
    for R in range(2, 7):
        family = suslin_family(R)
        for t in integer_vectors[:20 if R > 4 else 100]:
            with subtests.test(R=R, t=t[:R]):
                assert determinant_identity_holds(family, t[:R])


def test_suslin_errors():
    with pytest.raises(ValueError):
        suslin_family(1)
    with pytest.raises(MatrixFamilyError):
        suslin_family(12)
    with pytest.raises(MatrixFamilyError):
        suslin_family(10, max_dimension=256)
    assert suslin_family(9, max_dimension=256).n == 256


#################
# Realification #
#################
def test_realify_real_symmetric():
    matrix = np.array([[2, 1], [1, 3]])
    realified = realify_hermitian(matrix)
    assert np.array_equal(realified, np.block([[matrix, np.zeros((2, 2))], [np.zeros((2, 2)), matrix]]))
    assert exact_det(realified.tolist()) == exact_det(matrix.tolist()) ** 2


def test_realify_imaginary_example():
    matrix = np.array([[0, 1j], [-1j, 0]])
    assert hermitian_det(matrix) == -1
    realified = realify_hermitian(matrix)
    assert np.array_equal(realified, realified.T)
    assert exact_det(realified.tolist()) == 1


def test_realify_determinant_relation(subtests):
    rng = np.random.default_rng(5)
    for index in range(10):
        real = rng.integers(-3, 4, size=(3, 3))
        imag = rng.integers(-3, 4, size=(3, 3))
        matrix = (real + real.T) + 1j * (imag - imag.T)
        with subtests.test(index=index):
            det = hermitian_det(matrix)
            assert exact_det(realify_hermitian(matrix).tolist()) == int(det) ** 2


def test_realify_non_hermitian():
    with pytest.raises(NonHermitianError):
        realify_hermitian(np.array([[0, 1j], [1j, 0]]))
    with pytest.raises(NonHermitianError):
        realify_hermitian(np.array([[1, 2], [3, 1]]))
    with pytest.raises(NonHermitianError):
        realify_hermitian(np.ones((2, 3)))


def test_realified_pencil_nonsingular(pauli_family):
    family = realified_family(pauli_family)
    assert (family.R, family.n) == (3, 4)
    assert family.provenance == FamilyProvenance.REALIFIED
    assert certify_pencil(family).holds
    rng = np.random.default_rng(3)
    for t in rng.normal(size=(50, 3)):
        assert abs(np.linalg.det(family.pencil(t))) == pytest.approx(np.dot(t, t) ** 2, rel=1e-9)


#################
# Radon-Hurwitz #
#################
def test_radon_hurwitz_values(subtests):
    for n, expected in [(1, 1), (3, 1), (15, 1), (2, 2), (4, 4), (8, 8), (16, 9), (32, 10), (12, 4), (48, 9)]:
        with subtests.test(n=n):
            assert radon_hurwitz(n) == expected
    with pytest.raises(ValueError):
        radon_hurwitz(0)


def test_radon_hurwitz_bounds_suslin(subtests):
    for R in range(2, 9):
        with subtests.test(R=R):
            assert radon_hurwitz(suslin_family(R).n) >= R


##################
# Tangent Fields #
##################
def test_tangent_field_example():
    fields = tangent_fields(suslin_family(2), [1.0, 0.0])
    assert fields.shape == (1, 2)
    assert np.allclose(fields[0], [0.0, -1.0])


def test_tangent_fields_on_random_points(subtests):
    for R in (2, 3, 4):
        family = suslin_family(R)
        operators = field_operators(family)
        with subtests.test(R=R):
            for x in random_unit_vectors(family.n, 1000, seed=R):
                fields = tangent_fields(family, x, operators=operators)
                assert np.max(np.abs(fields @ x)) <= 1e-10
                assert np.linalg.matrix_rank(fields) == R - 1


def test_independence_rank(subtests):
    rng = np.random.default_rng(2)
    for R in (2, 3, 4):
        family = suslin_family(R)
        with subtests.test(R=R):
            for x in rng.normal(size=(1000, family.n)):
                assert independence_rank(family, x) == R
            assert independence_rank(family, [1] + [0] * (family.n - 1)) == R


def test_tangent_fields_errors():
    family = MatrixFamily([[[1, 0], [0, 0]], [[0, 1], [1, 0]]])
    with pytest.raises(CertificateError):
        tangent_fields(family, [1.0, 0.0])
    with pytest.raises(ValueError):
        tangent_fields(suslin_family(2), [1.0, 1.0])


#########################
# Chart From The Family #
#########################
def test_chart_from_suslin_family():
    chart = chart_from_family(suslin_family(2))
    assert chart.evaluate([Fraction(1, 3), Fraction(1, 5)]) == [Fraction(1, 15), Fraction(8, 225)]
    assert chart.exact_rational
    assert chart.eps0 == Fraction(1, 2)


def test_chart_from_suslin_family_curvature():
    chart = chart_from_family(suslin_family(2), eps0=Fraction(1, 4))
    report = verify_condition1(chart)
    assert report.condition1_holds
    assert report.c1 == pytest.approx(1.0, rel=1e-6)
    assert compute_localization(chart, report).tau == pytest.approx(0.25)
