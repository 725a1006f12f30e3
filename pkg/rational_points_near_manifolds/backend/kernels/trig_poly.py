"""This module implements evaluation of trigonometric polynomials sum_{|j| <= J} c_j e(j theta)."""
import numpy as np

from rational_points_near_manifolds.errors import KernelError

IMAGINARY_TOLERANCE = 1e-12
_CHUNK_ENTRIES = 1_000_000


def degree_of(coeffs):
    """Gets the degree J of a centered coefficient array of length 2J+1.

    Args:
        coeffs: The coefficients c_{-J}..c_J.

    Returns:
        The degree J.
    """
    length = len(coeffs)
    if length % 2 != 1:
        raise ValueError(f'Centered coefficient arrays have odd length, got {length}.')
    return (length - 1) // 2


def e(x):
    """Computes e(x) = exp(2 pi i x).

    Args:
        x: A scalar or array.

    Returns:
        The complex value(s).
    """
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


def eval_trig_poly(coeffs, theta):
    """Evaluates sum_j c_j e(j theta) and returns its real part.

    The imaginary part must stay below 1e-12 * (1 + sum |c_j|); the polynomial is meant to be real valued.

    Args:
        coeffs: The centered coefficients c_{-J}..c_J.
        theta: A scalar or array of angles.

    Returns:
        The real value(s) (scalar for scalar input).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    degree = degree_of(coeffs)
    scalar = np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
    if not np.any(coeffs):
        values = np.zeros(theta.shape, dtype=complex)
    else:
        freqs = np.arange(-degree, degree + 1)
        # Phases j*theta are reduced mod 1 before exponentiating.
        theta = theta - np.round(theta)
        values = np.empty(theta.shape, dtype=complex)
        chunk = max(1, _CHUNK_ENTRIES // len(freqs))
        for start in range(0, theta.shape[0], chunk):
            phases = np.outer(theta[start:start + chunk], freqs)
            phases -= np.round(phases)
            values[start:start + chunk] = e(phases) @ coeffs
    bound = IMAGINARY_TOLERANCE * (1.0 + float(np.sum(np.abs(coeffs))))
    worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if worst > bound:
        raise KernelError(f'Trigonometric polynomial is not real valued (imaginary part {worst:.3g}).')
    return float(values.real[0]) if scalar else values.real


def mean_value(coeffs, samples=None):
    """Computes int_0^1 P(theta) d theta by the uniform rule, which is exact for N > 2J nodes.

    Args:
        coeffs: The centered coefficients.
        samples: The number of nodes (4J + 8 if omitted).

    Returns:
        The mean value.
    """
    degree = degree_of(coeffs)
    samples = samples or 4 * degree + 8
    nodes = np.arange(samples) / samples
    return float(np.mean(eval_trig_poly(coeffs, nodes)))


def is_conjugate_symmetric(coeffs, tolerance=0.0):
    """Checks c_{-j} = conj(c_j).

    Args:
        coeffs: The centered coefficients.
        tolerance: The allowed deviation.

    Returns:
        True if the polynomial is real valued.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    return bool(np.max(np.abs(coeffs[::-1] - np.conj(coeffs))) <= tolerance)
