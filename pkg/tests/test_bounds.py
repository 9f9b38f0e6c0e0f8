# tests/test_bounds.py
"""標準假設下的偏差、尾機率與子樣本數界限"""

import math

import numpy as np
import pytest

from core.bounds import (bias_bound, bias_bound_curve, critical_radius, frechet_bias_bound, hausdorff_tail_bound,
                         optimal_subsample_count, rate_regime, variance_bound)
from core.pointcloud import subsample
from core.transport import p_hausdorff
from data.models import PointCloud, StandardAssumptionParams
from utils.errors import ArgumentError


def test_bias_bound_above_intrinsic_dimension():
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    assert bias_bound(params, 2, 10, 1) == pytest.approx(1.6)


def test_floor_term_from_r0():
    with_floor = StandardAssumptionParams(a=1.0, b=1.0, r0=0.1)
    without = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    assert bias_bound(with_floor, 2, 10, 3) - bias_bound(without, 2, 10, 3) == pytest.approx(4 * 3 * 0.01)


def test_doubling_n_divides_by_two_to_the_beta():
    params = StandardAssumptionParams(a=0.7, b=2.0, r0=0.0)
    beta = 3 / 2 - 1
    for n in (10, 50, 400):
        assert bias_bound(params, 3, 2 * n, 5) == pytest.approx(bias_bound(params, 3, n, 5) / 2**beta)


@pytest.mark.parametrize("p, b", [(2.0, 1.0), (2.0, 2.0), (1.0, 3.0)])
def test_bias_bound_non_increasing_in_n(p, b):
    params = StandardAssumptionParams(a=1.0, b=b, r0=0.0)
    values = [value for _, value in bias_bound_curve(params, p, range(3, 200), 4)]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))


def test_log_branch_needs_more_than_one_point():
    params = StandardAssumptionParams(a=1.0, b=2.0, r0=0.0)
    with pytest.raises(ArgumentError):
        bias_bound(params, 1, 1, 5)
    assert critical_radius(params, 1, 3, 5) > critical_radius(params, 1, 30, 5)


def test_tail_bound_value():
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    assert hausdorff_tail_bound(params, 1, 1, 1, 2.0) == pytest.approx(2 / math.e)


def test_tail_bound_clamped_and_decreasing():
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    assert hausdorff_tail_bound(params, 1, 1, 1, 0.01) == 1.0
    values = [hausdorff_tail_bound(params, 2, n, 4, 1.0) for n in range(1, 100)]
    assert all(later <= earlier for earlier, later in zip(values, values[1:]))


def test_tail_bound_requires_radius_above_floor():
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=1.0)
    with pytest.raises(ArgumentError):
        hausdorff_tail_bound(params, 1, 5, 1, 2.0)


@pytest.mark.parametrize("trials", [2000, pytest.param(10000, marks=pytest.mark.slow)])
def test_tail_bound_holds_on_uniform_grid(trials):
    N, n, p = 200, 20, 1
    cloud = PointCloud(np.linspace(0.0, 1.0, N).reshape(-1, 1))
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    distances = np.array([
        p_hausdorff(cloud.points[subsample(cloud, n, seed=trial, with_replacement=True)], cloud.points, p)[0]
        for trial in range(trials)
    ])
    for r in np.linspace(5.0, 100.0, 20):
        empirical = float(np.mean(distances > r))
        assert empirical <= hausdorff_tail_bound(params, p, n, N, float(r))


def test_optimal_subsample_count():
    assert optimal_subsample_count(100, 2, 1) == 10000
    assert optimal_subsample_count(100, 1, 2) == math.ceil(100 / math.log(100))
    with pytest.raises(ArgumentError):
        optimal_subsample_count(0, 2, 1)


def test_variance_bound():
    assert variance_bound(4) == pytest.approx(0.5)
    assert variance_bound(16, C=2.0) == pytest.approx(0.5)
    with pytest.raises(ArgumentError):
        variance_bound(0)


def test_frechet_bias_bound():
    params = StandardAssumptionParams(a=1.0, b=1.0, r0=0.0)
    assert frechet_bias_bound(params, 2, 10, 1) == {"value": pytest.approx(3.2), "offset": "+O(1)"}
    assert frechet_bias_bound(params, 2, 10, 1, sigma2=0.5)["value"] == pytest.approx(4.2)


def test_rate_regime():
    above = rate_regime(StandardAssumptionParams(a=1.0, b=1.0, r0=0.0), 2, 100)
    assert above["regime"] == "p>b" and above["bias_exponent"] == pytest.approx(1.0)
    below = rate_regime(StandardAssumptionParams(a=1.0, b=2.0, r0=0.0), 1, 100)
    assert below["log_factor"] and below["bias_exponent"] == pytest.approx(0.5)
    floored = rate_regime(StandardAssumptionParams(a=1.0, b=2.0, r0=10.0), 1, 100)
    assert floored["bias_exponent"] == pytest.approx(0.5)
    assert floored["regime"] != below["regime"]


def test_assumption_params_validated():
    with pytest.raises(ValueError):
        StandardAssumptionParams(a=0.0, b=1.0)
    with pytest.raises(ValueError):
        StandardAssumptionParams(a=1.0, b=1.0, r0=-0.1)
