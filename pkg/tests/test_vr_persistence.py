# tests/test_vr_persistence.py
"""VR 過濾與持續圖：手算範例、未最佳化化簡對照、穩定性"""

import math

import numpy as np
import pytest

from core.pointcloud import distance_matrix, sample_annulus
from core.transport import bottleneck
from core.vr_persistence import (build_vr_filtration, compute_persistence, enclosing_radius, filter_by_persistence,
                                 naive_reduction_oracle, truncate_essential, vr_diagrams)
from data.models import FilteredSimplex, FiniteMetricSpace, PersistenceDiagram, PointCloud
from utils.errors import ArgumentError, ContractError


def test_two_point_filtration():
    cloud = PointCloud(np.array([[0.0], [1.0]]))
    assert build_vr_filtration(cloud, 1) == [
        FilteredSimplex((0, ), 0.0),
        FilteredSimplex((1, ), 0.0),
        FilteredSimplex((0, 1), 1.0),
    ]


def test_equilateral_filtration(equilateral):
    filtration = build_vr_filtration(equilateral, 1)
    assert [s.dim for s in filtration] == [0, 0, 0, 1, 1, 1, 2]
    assert [s.filtration_value for s in filtration] == [0, 0, 0, 1, 1, 1, 1]


def test_simplex_count_at_infinite_scale():
    cloud = PointCloud(np.random.default_rng(0).random((10, 2)))
    assert len(build_vr_filtration(cloud, 1, math.inf)) == 10 + 45 + 120


def test_single_point():
    h0, h1 = vr_diagrams(PointCloud(np.array([[0.0, 0.0]])), 1)
    assert h0.points == [] and h0.essential == [0.0]
    assert h1.is_empty()


def test_unit_square(unit_square):
    expected_h0 = PersistenceDiagram(0, [(0.0, 1.0, 3)], [0.0])
    expected_h1 = PersistenceDiagram(1, [(1.0, math.sqrt(2), 1)])
    for diagrams in (vr_diagrams(unit_square, 1),
                     compute_persistence(build_vr_filtration(unit_square, 1), 1),
                     naive_reduction_oracle(build_vr_filtration(unit_square, 1), 1)):
        assert diagrams == [expected_h0, expected_h1]


def test_equilateral_triangle(equilateral):
    h0, h1 = vr_diagrams(equilateral, 1)
    assert h0 == PersistenceDiagram(0, [(0.0, 1.0, 2)], [0.0])
    assert h1.is_empty()


@pytest.mark.parametrize("ambient", [2, 3])
def test_fast_path_matches_reduction_oracle(ambient):
    rng = np.random.default_rng(2024 + ambient)
    for trial in range(200):
        cloud = PointCloud(rng.random((int(rng.integers(3, 13)), ambient)))
        filtration = build_vr_filtration(cloud, 1)
        oracle = naive_reduction_oracle(filtration, 1)
        assert compute_persistence(filtration, 1) == oracle, trial
        assert vr_diagrams(cloud, 1) == oracle, trial


def test_fast_path_handles_tied_distances():
    rng = np.random.default_rng(11)
    grid = np.array([[i, j] for i in range(3) for j in range(3)], dtype=float)
    for trial in range(60):
        cloud = PointCloud(grid[rng.choice(9, size=int(rng.integers(4, 9)), replace=False)])
        oracle = naive_reduction_oracle(build_vr_filtration(cloud, 1), 1)
        assert vr_diagrams(cloud, 1) == oracle, trial


def test_second_homology_matches_oracle():
    rng = np.random.default_rng(5)
    for trial in range(20):
        cloud = PointCloud(rng.random((6, 3)))
        filtration = build_vr_filtration(cloud, 2)
        oracle = naive_reduction_oracle(filtration, 2)
        assert compute_persistence(filtration, 2) == oracle, trial
        assert vr_diagrams(cloud, 2) == oracle, trial


def test_octahedron_has_a_two_cycle():
    vertices = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    h2 = vr_diagrams(PointCloud(vertices), 2, max_scale=math.inf)[2]
    assert h2 == PersistenceDiagram(2, [(math.sqrt(2), 2.0, 1)])


def test_permuting_points_leaves_diagrams_unchanged():
    rng = np.random.default_rng(8)
    points = rng.random((9, 2))
    permuted = points[rng.permutation(9)]
    assert vr_diagrams(PointCloud(points), 1) == vr_diagrams(PointCloud(permuted), 1)


def test_metric_space_input_matches_point_cloud(unit_square):
    metric = FiniteMetricSpace(distance_matrix(unit_square))
    assert vr_diagrams(metric, 1) == vr_diagrams(unit_square, 1)


def test_bottleneck_stability_under_perturbation():
    rng = np.random.default_rng(17)
    eps = 0.01
    for trial in range(20):
        points = sample_annulus(100, 1.0, 0.5, seed=trial).points
        # 每點位移的歐氏長度不超過 eps
        angles = rng.uniform(0.0, 2 * np.pi, len(points))
        lengths = eps * np.sqrt(rng.random(len(points)))
        noisy = points + lengths[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        shift = float(np.abs(distance_matrix(PointCloud(points)) - distance_matrix(PointCloud(noisy))).max())
        assert shift <= 2 * eps + 1e-12
        for D, E in zip(vr_diagrams(PointCloud(points), 1), vr_diagrams(PointCloud(noisy), 1)):
            distance = bottleneck(D, E, math.inf)[0]
            assert distance <= shift + 1e-12, trial
            assert distance <= 2 * eps + 1e-12, trial


def test_filter_by_persistence():
    D = PersistenceDiagram.from_pairs(1, [(0.0, 0.05), (1.0, 1.5)])
    assert filter_by_persistence(D, 0.0) is D
    assert filter_by_persistence(D, 0.1) == PersistenceDiagram.from_pairs(1, [(1.0, 1.5)])


def test_truncate_essential():
    D = PersistenceDiagram(0, [(0.0, 1.0, 2)], [0.0])
    assert truncate_essential(D, 2.0) == PersistenceDiagram(0, [(0.0, 1.0, 2), (0.0, 2.0, 1)])


def test_min_persistence_applied_in_vr_diagrams(unit_square):
    h1 = vr_diagrams(unit_square, 1, min_persistence=0.5)[1]
    assert h1.is_empty()


def test_enclosing_radius(unit_square):
    assert enclosing_radius(distance_matrix(unit_square)) == pytest.approx(math.sqrt(2))


def test_unsorted_filtration_is_contract_error():
    filtration = [FilteredSimplex((0, ), 0.0), FilteredSimplex((0, 1), 1.0), FilteredSimplex((1, ), 0.0)]
    with pytest.raises(ContractError):
        compute_persistence(filtration, 1)


def test_face_open_filtration_is_contract_error():
    filtration = [FilteredSimplex((0, ), 0.0), FilteredSimplex((0, 1), 1.0)]
    with pytest.raises(ContractError):
        naive_reduction_oracle(filtration, 1)


def test_negative_dimension_rejected(unit_square):
    with pytest.raises(ArgumentError):
        vr_diagrams(unit_square, -1)
