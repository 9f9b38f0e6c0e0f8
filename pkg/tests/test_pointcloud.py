# tests/test_pointcloud.py
"""點雲取樣、子抽樣與擾動"""

import numpy as np
import pytest

from core.pointcloud import (as_metric_space, derive_seed, distance_matrix, perturb, restrict, sample_annulus,
                             sample_sphere, sample_torus, subsample)
from data.models import FiniteMetricSpace, PointCloud
from utils.errors import ArgumentError


def test_torus_points_lie_on_surface():
    cloud = sample_torus(4, 0.8, 0.3, seed=7)
    x, y, z = cloud.points.T
    assert cloud.points.shape == (4, 3)
    np.testing.assert_allclose((np.sqrt(x**2 + y**2) - 0.8)**2 + z**2, 0.09, atol=1e-12)


def test_torus_is_reproducible():
    assert sample_torus(50, 0.8, 0.3, seed=3).equals(sample_torus(50, 0.8, 0.3, seed=3))
    assert not sample_torus(50, 0.8, 0.3, seed=3).equals(sample_torus(50, 0.8, 0.3, seed=4))


@pytest.mark.parametrize("outer, inner", [(0.3, 0.8), (0.5, 0.0), (0.5, 0.5)])
def test_torus_rejects_invalid_radii(outer, inner):
    with pytest.raises(ArgumentError):
        sample_torus(10, outer, inner, seed=0)


def test_torus_rejects_zero_points():
    with pytest.raises(ArgumentError):
        sample_torus(0, 0.8, 0.3, seed=0)


def test_sphere_points_have_radius():
    cloud = sample_sphere(3, 0.5, 4, seed=1)
    assert cloud.points.shape == (3, 4)
    np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 0.5, atol=1e-12)


def test_single_point_on_circle():
    cloud = sample_sphere(1, 1.0, 2, seed=5)
    assert len(cloud) == 1
    assert np.linalg.norm(cloud.points[0]) == pytest.approx(1.0, abs=1e-12)


def test_annulus_radii_within_bounds():
    cloud = sample_annulus(500, 0.5, 0.2, seed=2)
    radii = np.linalg.norm(cloud.points, axis=1)
    assert np.all(radii >= 0.2) and np.all(radii <= 0.5)
    assert sample_annulus(20, 0.5, 0.2, seed=2).equals(sample_annulus(20, 0.5, 0.2, seed=2))


def test_subsample_without_replacement_is_permutation():
    cloud = sample_annulus(10, 0.5, 0.2, seed=0)
    indices = subsample(cloud, 10, seed=4)
    assert sorted(indices.tolist()) == list(range(10))


def test_subsample_with_replacement_allows_duplicates():
    cloud = sample_annulus(50, 0.5, 0.2, seed=0)
    indices = subsample(cloud, 200, seed=1, with_replacement=True)
    assert indices.shape == (200, )
    assert len(set(indices.tolist())) < 200


@pytest.mark.parametrize("n", [0, 11])
def test_subsample_rejects_invalid_size(n):
    cloud = sample_annulus(10, 0.5, 0.2, seed=0)
    with pytest.raises(ArgumentError):
        subsample(cloud, n, seed=0)


def test_derived_seeds_are_independent_streams():
    first = np.random.default_rng(derive_seed(9, 1, 0)).random(4)
    again = np.random.default_rng(derive_seed(9, 1, 0)).random(4)
    other = np.random.default_rng(derive_seed(9, 1, 1)).random(4)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)


def test_perturb_zero_sigma_returns_input():
    cloud = sample_annulus(10, 0.5, 0.2, seed=0)
    assert perturb(cloud, 0.0, seed=1) is cloud


def test_perturb_metric_space_keeps_invariants():
    metric = as_metric_space(sample_annulus(12, 0.5, 0.2, seed=0))
    noisy = perturb(metric, 0.5, seed=3)
    assert isinstance(noisy, FiniteMetricSpace)
    np.testing.assert_array_equal(noisy.dist, noisy.dist.T)
    assert np.all(np.diag(noisy.dist) == 0)
    assert np.all(noisy.dist >= 0)


def test_restrict_metric_space_takes_induced_submatrix():
    metric = FiniteMetricSpace(np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]], dtype=float))
    sub = restrict(metric, [2, 0])
    np.testing.assert_array_equal(sub.dist, [[0, 2], [2, 0]])


def test_distance_matrix_of_single_point():
    assert distance_matrix(PointCloud(np.array([[1.0, 2.0]]))).shape == (1, 1)
