"""This module implements the sampled verification of Condition 1 and the localization constants.

Condition 1 asks det H_{t.f}(x) != 0 for all t != 0. The verification samples t on the boundary of the unit L-inf
cube (all 2R faces) and x on a grid in a box around x0, takes min/max of |det| as c1/c2, and refines the minimum by
a bounded Nelder-Mead descent from the best grid point. This is a heuristic check, not a proof.
"""
import logging
import time

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree

from rational_points_near_manifolds.backend.curvature.box_sampling import (
    box_boundary_samples, box_samples, cube_boundary_samples
)
from rational_points_near_manifolds.backend.curvature.curvature_report import CurvatureReport
from rational_points_near_manifolds.backend.funcspace.exact import is_rational_scalar
from rational_points_near_manifolds.backend.matfam.exact_linalg import exact_det
from rational_points_near_manifolds.errors import (
    CurvatureError, DimensionMismatchError, EvaluationError, LocalizationError
)

logger = logging.getLogger(__name__)

NONZERO_TOLERANCE = 1e-8
SIGNATURE_THRESHOLD = 1e-10
MIN_T_GRID_DENSITY = 8
_CHUNK_ENTRIES = 2_000_000


#######################
# Pencil determinants #
#######################
def _check_pencil_args(chart, t, x):
    if len(t) != chart.R:
        raise DimensionMismatchError(f'Pencil vector has length {len(t)}, chart has R={chart.R}.')
    if len(x) != chart.n:
        raise DimensionMismatchError(f'Point has dimension {len(x)}, chart has n={chart.n}.')
    if all(float(tr) == 0.0 for tr in t):
        raise ValueError("Pencil vector t must be nonzero.")


def pencil_hessian_matrix(chart, t, x):
    """Evaluates the pencil Hessian sum_r t_r H_{f_r}(x) in floating point.

    Args:
        chart: The manifold chart.
        t: The pencil vector (length R).
        x: The point (length n).

    Returns:
        The symmetric n x n matrix.
    """
    _check_pencil_args(chart, t, x)
    return sum(float(tr) * m.hessian(x) for tr, m in zip(t, chart.maps))


def pencil_hessian_det(chart, t, x):
    """Computes det H_{t_1 f_1 + ... + t_R f_R}(x).

    The value is exact (int or Fraction) when all maps are rational polynomials and t, x are rational.

    Args:
        chart: The manifold chart.
        t: The pencil vector (nonzero, length R).
        x: The point (length n).

    Returns:
        The determinant.
    """
    _check_pencil_args(chart, t, x)
    if chart.exact_rational and all(is_rational_scalar(c) for c in list(t) + list(x)):
        exact = None
        for tr, smooth_map in zip(t, chart.maps):
            hess = smooth_map.hessian_exact(x)
            scaled = [[tr * entry for entry in row] for row in hess]
            exact = scaled if exact is None else [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(exact, scaled)]
        return exact_det(exact)
    return float(np.linalg.det(pencil_hessian_matrix(chart, t, x)))


def _constant_hessians(chart):
    return all(m.has_constant_hessian for m in chart.maps)


def _stacked_hessians(chart, points):
    """Gets the Hessians of all maps at all points as an array of shape (R, m, n, n)."""
    return np.stack([m.hessian_many(points) for m in chart.maps])


def _abs_pencil_dets(t_samples, hessians):
    """Computes |det sum_r t_r H_r(x)| for all sampled t and x, chunked over t.

    Args:
        t_samples: Array of shape (m_t, R).
        hessians: Array of shape (R, m_x, n, n).

    Returns:
        Array of shape (m_t, m_x).
    """
    _, m_x, n, _ = hessians.shape
    chunk = max(1, _CHUNK_ENTRIES // max(1, m_x * n * n))
    out = np.empty((t_samples.shape[0], m_x))
    for start in range(0, t_samples.shape[0], chunk):
        block = t_samples[start:start + chunk]
        pencils = np.einsum("tr,rxij->txij", block, hessians)
        out[start:start + chunk] = np.abs(np.linalg.det(pencils))
    return out


def hessian_determinant_range(maps, coefficients, center, radius, density=9, max_points=4096):
    """Samples min and max of |det H_G(x)| for G = sum_r c_r f_r over a closed box.

    Args:
        maps: The smooth maps f_r.
        coefficients: The coefficients c_r.
        center: The box center.
        radius: The box radius.
        density: The grid density per axis.
        max_points: The sample cap.

    Returns:
        The tuple (min |det|, max |det|).
    """
    maps = list(maps)
    if all(m.has_constant_hessian for m in maps):
        points = np.asarray([center], dtype=float)
    else:
        points = box_samples(center, radius, density, max_points=max_points)
    hessians = np.stack([m.hessian_many(points) for m in maps])
    dets = _abs_pencil_dets(np.asarray([coefficients], dtype=float), hessians)
    return float(np.min(dets)), float(np.max(dets))


#############
# Signature #
#############
def signature_of(matrix, threshold=SIGNATURE_THRESHOLD):
    """Computes the signature (#positive - #negative eigenvalues) of a symmetric matrix.

    Args:
        matrix: The symmetric matrix.
        threshold: Eigenvalues with |e| <= threshold * ||H|| count as zero, which is an error.

    Returns:
        The signature.
    """
    eigenvalues = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    norm = np.max(np.abs(eigenvalues)) if eigenvalues.size else 0.0
    if norm == 0.0 or np.any(np.abs(eigenvalues) <= threshold * norm):
        raise CurvatureError(f'Matrix is (numerically) singular, eigenvalues {eigenvalues}.')
    return int(np.sum(eigenvalues > 0) - np.sum(eigenvalues < 0))


def pencil_signature(chart, t, x):
    """Computes the signature of H_{t.f}(x).

    Args:
        chart: The manifold chart.
        t: The pencil vector.
        x: The point.

    Returns:
        The signature.
    """
    return signature_of(pencil_hessian_matrix(chart, t, x))


def _signatures(chart, t_samples, x_samples):
    """Collects the signatures over a connected part of the sampled cube boundary."""
    if chart.R == 1:
        t_samples = np.array([[1.0]])
    hessians = _stacked_hessians(chart, x_samples)
    signatures = set()
    for t in t_samples:
        pencils = np.einsum("r,rxij->xij", t, hessians)
        eigenvalues = np.linalg.eigvalsh(pencils)
        signatures.update((np.sum(eigenvalues > 0, axis=1) - np.sum(eigenvalues < 0, axis=1)).tolist())
    return signatures


#########################
# Condition 1 (c1 / c2) #
#########################
def _refine_minimum(chart, t_star, x_star, x_radius):
    """Refines the minimum of |det| on the cube face of t_star by bounded Nelder-Mead.

    Returns:
        The tuple (value, t, x) of the refined minimum.
    """
    face = int(np.argmax(np.abs(t_star)))
    sign = float(np.sign(t_star[face]))
    free_t = [r for r in range(chart.R) if r != face]
    vary_x = not _constant_hessians(chart)
    center = chart.x0_array

    def unpack(z):
        t = np.empty(chart.R)
        t[face] = sign
        t[free_t] = z[:len(free_t)]
        x = z[len(free_t):] if vary_x else x_star
        return t, x

    def objective(z):
        t, x = unpack(z)
        try:
            return abs(float(np.linalg.det(sum(tr * m.hessian(x) for tr, m in zip(t, chart.maps)))))
        except EvaluationError:
            return np.inf

    start = list(np.asarray(t_star)[free_t])
    bounds = [(-1.0, 1.0)] * len(free_t)
    if vary_x:
        start += list(x_star)
        bounds += [(c - x_radius, c + x_radius) for c in center]
    if not start:
        return objective(np.empty(0)), np.asarray(t_star, dtype=float), np.asarray(x_star, dtype=float)
    result = optimize.minimize(objective, np.asarray(start), method="Nelder-Mead", bounds=bounds,
                               options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    t, x = unpack(result.x)
    return float(result.fun), t, np.asarray(x, dtype=float)


def verify_condition1(chart, t_grid_density=16, x_radius=None, x_grid_density=7, max_x_points=2048,
                      max_t_samples=20000, refine=True, seed=0):
    """Verifies Condition 1 on samples and returns the determinant bounds.

    Args:
        chart: The manifold chart.
        t_grid_density: Grid density per free coordinate on each cube face (>= 8).
        x_radius: Radius of the x box around x0 (eps0 if omitted).
        x_grid_density: Grid density per axis of the x box.
        max_x_points: Cap on the number of x samples.
        max_t_samples: Cap on the number of t samples.
        refine: Whether to refine the minimum by local descent.
        seed: Seed for random fallbacks in high dimension.

    Returns:
        The curvature report; a failed verification is reported by condition1_holds = False with the witness.
    """
    if t_grid_density < MIN_T_GRID_DENSITY:
        raise ValueError(f't grid density must be at least {MIN_T_GRID_DENSITY}, got {t_grid_density}.')
    x_radius = float(chart.eps0 if x_radius is None else x_radius)
    if x_radius < 0:
        raise ValueError(f'x radius must be nonnegative, got {x_radius}.')
    start_time = time.time()

    t_samples = cube_boundary_samples(chart.R, t_grid_density, max_samples=max_t_samples, seed=seed)
    if _constant_hessians(chart):
        x_samples = chart.x0_array.reshape(1, -1)
    else:
        x_samples = box_samples(chart.x0_array, x_radius, x_grid_density, max_points=max_x_points, seed=seed)
    dets = _abs_pencil_dets(t_samples, _stacked_hessians(chart, x_samples))

    t_min, x_min = np.unravel_index(np.argmin(dets), dets.shape)
    t_max, x_max = np.unravel_index(np.argmax(dets), dets.shape)
    c1 = float(dets[t_min, x_min])
    c2 = float(dets[t_max, x_max])
    min_witness = (t_samples[t_min], x_samples[x_min])
    notes = []

    if refine and c1 > 0:
        refined, t_ref, x_ref = _refine_minimum(chart, t_samples[t_min], x_samples[x_min], x_radius)
        if refined < c1:
            notes.append(f'minimum refined from {c1:.6g} to {refined:.6g}')
            c1 = refined
            min_witness = (t_ref, x_ref)

    tolerance = NONZERO_TOLERANCE * c2
    holds = bool(c2 > 0 and c1 > tolerance)

    signature = None
    signature_constant = None
    if holds:
        signatures = _signatures(chart, t_samples, x_samples)
        signature_constant = len(signatures) == 1
        signature = pencil_signature(chart, min_witness[0] if chart.R > 1 else [1.0], min_witness[1])

    report = CurvatureReport(
        condition1_holds=holds, c1=c1, c2=c2, t_grid_density=t_grid_density, x_grid_density=x_grid_density,
        x_radius=x_radius,
        min_witness=(tuple(float(v) for v in min_witness[0]), tuple(float(v) for v in min_witness[1])),
        max_witness=(tuple(float(v) for v in t_samples[t_max]), tuple(float(v) for v in x_samples[x_max])),
        tolerance=tolerance, samples=int(dets.size), signature=signature, signature_constant=signature_constant,
        notes=tuple(notes))
    logger.info(f'Condition 1 {"holds" if holds else "fails"}: c1={c1:.6g}, c2={c2:.6g} '
                f'({dets.size} samples, {time.time() - start_time:.2f}s).')
    return report


################
# Localization #
################
def separation_radius(tau, kappa):
    """Gets rho' = dist(boundary of B_tau, boundary of B_kappa)/2 = (tau - kappa)/2 in L-inf.

    Args:
        tau: The outer radius.
        kappa: The inner radius.

    Returns:
        The separation radius.
    """
    return (tau - kappa) / 2


def _min_abs_det(chart, t_samples, radius, x_grid_density):
    if _constant_hessians(chart):
        points = chart.x0_array.reshape(1, -1)
    else:
        points = box_samples(chart.x0_array, radius, x_grid_density)
    return float(np.min(_abs_pencil_dets(t_samples, _stacked_hessians(chart, points))))


def compute_localization(chart, report, boundary_samples=1000, t_samples=100, bisection_steps=30):
    """Computes tau, kappa = tau/2, rho and rho' for a chart passing Condition 1.

    Args:
        chart: The manifold chart.
        report: The curvature report from verify_condition1.
        boundary_samples: Number of samples per box boundary.
        t_samples: Number of pencil vectors used for the image separation.
        bisection_steps: Number of bisection steps for tau.

    Returns:
        The report with the localization constants filled in.
    """
    if not report.condition1_holds:
        raise CurvatureError("Localization requires a chart satisfying Condition 1.", report)
    margin = report.c1 / 2
    t_grid = cube_boundary_samples(chart.R, report.t_grid_density)
    eps0 = float(chart.eps0)

    if _min_abs_det(chart, t_grid, eps0, report.x_grid_density) >= margin:
        tau = eps0
    else:
        low, high = 0.0, eps0
        for _ in range(bisection_steps):
            mid = (low + high) / 2
            if _min_abs_det(chart, t_grid, mid, report.x_grid_density) >= margin:
                low = mid
            else:
                high = mid
        if low <= 0.0:
            raise LocalizationError(f'No radius tau > 0 keeps |det| >= c1/2 = {margin:.6g}.')
        tau = low
    kappa = tau / 2

    outer = box_boundary_samples(chart.x0_array, tau, boundary_samples)
    inner = box_boundary_samples(chart.x0_array, kappa, boundary_samples)
    outer_grads = np.stack([m.gradient_many(outer) for m in chart.maps])
    inner_grads = np.stack([m.gradient_many(inner) for m in chart.maps])
    indices = np.unique(np.linspace(0, len(t_grid) - 1, min(t_samples, len(t_grid))).astype(int))
    distances = []
    for t in t_grid[indices]:
        outer_image = np.tensordot(t, outer_grads, axes=1)
        inner_image = np.tensordot(t, inner_grads, axes=1)
        dist, _ = cKDTree(outer_image).query(inner_image, k=1, p=np.inf)
        distances.append(float(np.min(dist)))
    rho = 0.5 * min(distances)
    if not rho > 0:
        raise LocalizationError(f'Gradient images of the tau and kappa boundaries are not separated (rho={rho}).')

    logger.info(f'Localization: tau={tau:.6g}, kappa={kappa:.6g}, rho={rho:.6g}.')
    return report.with_localization(tau=tau, kappa=kappa, rho=rho, rho_prime=separation_radius(tau, kappa))
