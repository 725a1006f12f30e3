"""This module defines the exceptions raised by the toolkit."""


class RationalPointsError(Exception):
    """Base class of all toolkit errors."""


class DimensionMismatchError(RationalPointsError):
    """A point or vector does not have the expected dimension."""


class ExpressionError(RationalPointsError):
    """An expression string violates the manifold expression grammar."""


class EvaluationError(RationalPointsError):
    """An expression could not be evaluated (e.g. division by zero)."""


class SmoothnessError(RationalPointsError):
    """A derivative was requested beyond the declared smoothness of a map."""


class ManifoldConfigError(RationalPointsError):
    """A manifold definition file is malformed."""


class CurvatureError(RationalPointsError):
    """Condition 1 does not hold (or was not verified) for a chart."""

    def __init__(self, message, report=None):
        """Initializes CurvatureError.

        Args:
            message: The error message.
            report: The curvature report that led to the refusal.
        """
        super().__init__(message)
        self.report = report


class LocalizationError(RationalPointsError):
    """No localization radius achieves the required determinant margin."""


class KernelError(RationalPointsError):
    """A trigonometric kernel evaluation violated its consistency checks."""


class InversionError(RationalPointsError):
    """The gradient map could not be inverted at a point."""


class ConvergenceError(InversionError):
    """Newton's method did not converge."""

    def __init__(self, message, best_residual=None):
        """Initializes ConvergenceError.

        Args:
            message: The error message.
            best_residual: The smallest residual reached.
        """
        super().__init__(message)
        self.best_residual = best_residual


class OutsideImageError(InversionError):
    """The point does not lie in the gradient image of the chart domain."""


class IllConditionedError(RationalPointsError):
    """A Hessian is too ill-conditioned to be inverted reliably."""


class BudgetExceededError(RationalPointsError):
    """A computation would exceed its configured budget."""


class QuadratureBudgetError(BudgetExceededError):
    """The quadrature grid needed for the requested frequency is too large."""


class ScanBudgetError(BudgetExceededError):
    """The number of lattice points to scan exceeds the configured cap."""


class NoStationaryPointError(RationalPointsError):
    """The phase has no stationary point in the chart domain."""


class CountingError(RationalPointsError):
    """A counting query cannot be answered as posed."""


class SupportViolationError(CountingError):
    """The weight support is not contained in the admissible box."""


class NotPolynomialError(CountingError):
    """Exact decisions require polynomial maps with rational coefficients."""


class MatrixFamilyError(RationalPointsError):
    """A matrix family is malformed."""


class NonHermitianError(MatrixFamilyError):
    """A matrix expected to be Hermitian is not."""


class CertificateError(MatrixFamilyError):
    """A pencil nonsingularity certificate failed."""


class ExperimentConfigError(RationalPointsError):
    """An experiment configuration is malformed."""


class DegenerateFitError(RationalPointsError):
    """A fit has no usable data (e.g. all residuals vanish)."""


class SmoothnessWarning(UserWarning):
    """The declared smoothness is below what the main counting estimate assumes."""
