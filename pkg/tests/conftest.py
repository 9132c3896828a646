"""Shared helpers: random points and datasets on each supported manifold."""

from __future__ import annotations

import numpy as np
import pytest

from manifold_plm import Cylinder, Dataset, Euclidean, Sphere


def random_sphere_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points on the unit sphere."""
    raw = rng.normal(size=(n, 3))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def random_cylinder_points(rng: np.random.Generator, n: int, lo=-2.0, hi=2.0) -> np.ndarray:
    angles = rng.uniform(0.0, 2.0 * np.pi, n)
    heights = rng.uniform(lo, hi, n)
    return np.column_stack([angles, heights])


def random_euclidean_points(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    return rng.normal(size=(n, d))


def random_points(manifold, rng: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(manifold, Sphere):
        return random_sphere_points(rng, n)
    if isinstance(manifold, Cylinder):
        return random_cylinder_points(rng, n, manifold.height_min, manifold.height_max)
    return random_euclidean_points(rng, n, manifold.d)


def make_dataset(manifold, rng: np.random.Generator, n: int, p: int = 1, noise=1.0) -> Dataset:
    """Generic synthetic dataset with smooth structure plus noise."""
    points = random_points(manifold, rng, n)
    x = rng.normal(size=(n, p))
    beta = np.arange(1, p + 1, dtype=float)
    g = np.sin(points @ rng.normal(size=points.shape[1]))
    y = x @ beta + g + noise * rng.normal(size=n)
    return Dataset(y, x, points, manifold)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


ALL_MANIFOLDS = [Euclidean(1), Euclidean(3), Sphere(), Cylinder(-2.0, 2.0)]
