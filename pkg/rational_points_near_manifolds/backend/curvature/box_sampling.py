"""This module provides sample sets on L-inf cubes, boxes and their boundaries."""
import itertools
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)


def _face_axis(density):
    """Gets the per-face grid linspace(-1, 1, d) with 0 added."""
    return np.unique(np.concatenate([np.linspace(-1.0, 1.0, density), [0.0]]))


def cube_boundary_samples(dimension, density, max_samples=20000, seed=0):
    """Samples the boundary of the unit L-inf cube {t : max_r |t_r| = 1}.

    Every one of the 2R faces gets the tensor grid of linspace(-1, 1, d) (plus 0) in the free coordinates.
    If that exceeds max_samples, each face gets seeded uniform samples (plus its center and corners) instead.

    Args:
        dimension: The cube dimension R.
        density: The grid density d per free coordinate.
        max_samples: The sample cap.
        seed: The seed for the random fallback.

    Returns:
        Array of shape (m, R).
    """
    if dimension == 1:
        return np.array([[-1.0], [1.0]])
    axis = _face_axis(density)
    free = dimension - 1
    per_face = len(axis) ** free
    faces = []
    if 2 * dimension * per_face <= max_samples:
        free_points = np.array(list(itertools.product(axis, repeat=free)))
    else:
        rng = np.random.default_rng(seed)
        count = max(1, max_samples // (2 * dimension))
        corners = np.array(list(itertools.product([-1.0, 1.0], repeat=free)))[:count // 2]
        free_points = np.vstack([np.zeros((1, free)), corners, rng.uniform(-1.0, 1.0, size=(count, free))])
        logger.warning(f'Cube boundary grid of {2 * dimension * per_face} points exceeds {max_samples}, '
                       f'sampling {len(free_points)} points per face instead.')
    for r in range(dimension):
        for sign in (-1.0, 1.0):
            face = np.insert(free_points, r, sign, axis=1)
            faces.append(face)
    samples = np.vstack(faces)
    return samples


def box_samples(center, radius, density, max_points=4096, seed=0):
    """Samples the closed box |x - center|_inf <= radius.

    Uses the tensor grid linspace(-r, r, d) per axis, or seeded uniform samples (plus the center) if the grid exceeds max_points.

    Args:
        center: The box center.
        radius: The box radius.
        density: The grid density per axis.
        max_points: The sample cap.
        seed: The seed for the random fallback.

    Returns:
        Array of shape (m, n).
    """
    center = np.asarray(center, dtype=float)
    dimension = center.shape[0]
    radius = float(radius)
    if density ** dimension <= max_points:
        axis = np.linspace(-radius, radius, density)
        offsets = np.array(list(itertools.product(axis, repeat=dimension)))
    else:
        rng = np.random.default_rng(seed)
        offsets = np.vstack([np.zeros((1, dimension)), rng.uniform(-radius, radius, size=(max_points - 1, dimension))])
    return center + offsets


def box_boundary_samples(center, radius, count, seed=0):
    """Samples the boundary of the box |x - center|_inf = radius with about count points (face grids, or seeded random face points in high dimension).

    Args:
        center: The box center.
        radius: The box radius.
        count: The targeted number of samples.
        seed: The seed for the random fallback.

    Returns:
        Array of shape (m, n).
    """
    center = np.asarray(center, dtype=float)
    dimension = center.shape[0]
    radius = float(radius)
    if dimension == 1:
        return center + np.array([[-radius], [radius]])
    free = dimension - 1
    per_axis = max(2, int(math.ceil((count / (2 * dimension)) ** (1.0 / free))))
    if 2 * dimension * per_axis ** free > 4 * count:
        rng = np.random.default_rng(seed)
        points = rng.uniform(-radius, radius, size=(count, dimension))
        axes = rng.integers(0, dimension, size=count)
        points[np.arange(count), axes] = np.where(rng.random(count) < 0.5, -radius, radius)
        return center + points
    axis = np.linspace(-radius, radius, per_axis)
    free_points = np.array(list(itertools.product(axis, repeat=free)))
    faces = []
    for r in range(dimension):
        for sign in (-radius, radius):
            faces.append(np.insert(free_points, r, sign, axis=1))
    return center + np.vstack(faces)
