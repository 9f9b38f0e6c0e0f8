# tests/test_pipeline.py
"""子抽樣近似與收斂實驗的整體流程"""

from pathlib import Path

import numpy as np
import pytest

from controller.analysis_controller import approximate_ph, export_ot_matrix, resolve_subsample_size
from controller.experiment_controller import bias_variance_check, compare_means, rate_experiment, variance_rate_check
from controller.input_controller import build_experiment_config, load_dataset, parse_dataset, reference_diagram
from core.diagram_measure import diagram_to_measure
from core.pointcloud import sample_annulus
from core.rate_fit import fit_rate
from core.vr_persistence import vr_diagrams
from data.input_data import (ApproximationOptions, BRule, DatasetKind, DatasetSpec, ExperimentConfig, FrechetConfig,
                             QuantizationConfig)
from utils.config import set_config
from utils.errors import ArgumentError, ConfigError

ANNULUS = DatasetSpec(DatasetKind.ANNULUS, N=30, outer_radius=0.5, inner_radius=0.2, seed=1)


@pytest.fixture
def annulus():
    return load_dataset(ANNULUS)


@pytest.fixture
def reference(annulus):
    return vr_diagrams(annulus, 1)[1]


def _config(**overrides) -> ExperimentConfig:
    n_grid = overrides.pop("n_grid", [10, 20])
    fields = dict(b_rule=BRule.EXPLICIT, b_values=[2, 3], repeats=2, master_seed=5)
    fields.update(overrides)
    return ExperimentConfig(ANNULUS, n_grid, **fields)


# ------ 子抽樣近似 ------


def test_full_subsample_reproduces_reference(annulus, reference):
    result = approximate_ph(annulus, len(annulus), 1, seed=0)
    assert result.diagrams == [reference]
    assert result.mean.equals(diagram_to_measure(reference))


def test_thread_count_does_not_change_result(annulus):
    serial = approximate_ph(annulus, 12, 6, seed=3, opts=ApproximationOptions(n_jobs=1))
    threaded = approximate_ph(annulus, 12, 6, seed=3, opts=ApproximationOptions(n_jobs=3))
    assert serial.diagrams == threaded.diagrams
    assert serial.mean.equals(threaded.mean)
    assert serial.mean.mass_denominator == 6


def test_subsamples_differ_but_are_reproducible(annulus):
    opts = ApproximationOptions(hom_dim=0)
    first = approximate_ph(annulus, 12, 4, seed=3, opts=opts)
    again = approximate_ph(annulus, 12, 4, seed=3, opts=opts)
    assert first.diagrams == again.diagrams
    assert len({tuple(D.points) for D in first.diagrams}) > 1


def test_optional_central_tendencies(annulus):
    opts = ApproximationOptions(hom_dim=0, frechet=FrechetConfig(), quantization=QuantizationConfig(k=2))
    result = approximate_ph(annulus, 10, 3, seed=2, opts=opts)
    assert result.frechet is not None and result.frechet.diagram.homology_dim == 0
    assert result.quantized is not None and len(result.quantized.measure) <= 2


def test_subsample_size_from_fraction(annulus):
    assert resolve_subsample_size(annulus, fraction=0.5) == 15
    assert resolve_subsample_size(annulus, n=7) == 7
    with pytest.raises(ArgumentError):
        resolve_subsample_size(annulus, fraction=1.5)


def test_invalid_subsample_count(annulus):
    with pytest.raises(ArgumentError):
        approximate_ph(annulus, 10, 0, seed=0)


def test_ot_matrix_of_identical_datasets(annulus):
    opts = ApproximationOptions(hom_dim=0)
    matrix = export_ot_matrix([annulus, annulus, sample_annulus(30, 0.6, 0.1, seed=9)], 2, seed=4, opts=opts, n=12)
    assert matrix.shape == (3, 3)
    assert matrix[0, 1] == 0.0
    assert matrix[0, 2] > 0
    np.testing.assert_array_equal(matrix, matrix.T)
    with pytest.raises(ArgumentError):
        export_ot_matrix([annulus], 2, seed=4, n=12)


# ------ 速率實驗 ------


def test_single_full_subsample_has_zero_loss(annulus, reference):
    curve = rate_experiment(_config(n_grid=[30], b_values=[1], repeats=1), annulus, reference)
    assert curve.rows[0].empirical_loss == 0.0
    assert curve.rows[0].B == 1


def test_rate_experiment_resumes_from_csv(annulus, reference):
    cfg = _config()
    csv_path = Path("rate.csv")
    first = rate_experiment(cfg, annulus, reference, str(csv_path))
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2 + 4
    assert lines[1] == "n,repeat,B,loss"

    again = rate_experiment(cfg, annulus, reference, str(csv_path))
    assert again == first
    assert csv_path.read_text(encoding="utf-8").splitlines() == lines

    # 中斷時留下殘缺列
    csv_path.write_text("\n".join(lines[:-1] + ["20,1,3"]) + "\n", encoding="utf-8")
    resumed = rate_experiment(cfg, annulus, reference, str(csv_path))
    assert resumed == first
    assert csv_path.read_text(encoding="utf-8").splitlines()[-1] == lines[-1]


def test_rate_experiment_rejects_changed_config(annulus, reference):
    rate_experiment(_config(), annulus, reference, "rate.csv")
    with pytest.raises(ConfigError):
        rate_experiment(_config(repeats=3), annulus, reference, "rate.csv")


def test_rate_experiment_thread_invariance(annulus, reference):
    assert rate_experiment(_config(), annulus, reference, n_jobs=1) == rate_experiment(_config(), annulus, reference,
                                                                                        n_jobs=3)


def test_rate_experiment_validates_grid(annulus, reference):
    with pytest.raises(ConfigError):
        rate_experiment(_config(n_grid=[10, 40], b_values=[1, 1]), annulus, reference)
    with pytest.raises(ConfigError):
        rate_experiment(_config(hom_dim=0), annulus, reference)


def test_loss_root_option(annulus, reference):
    power = rate_experiment(_config(), annulus, reference)
    root = rate_experiment(_config(loss_power=False), annulus, reference)
    assert root.rows[0].empirical_loss > 0
    assert root.rows[0].empirical_loss != power.rows[0].empirical_loss


@pytest.mark.slow
def test_loss_decreases_with_subsample_size():
    data = sample_annulus(150, 0.5, 0.2, seed=0)
    reference = vr_diagrams(data, 1)[1]
    cfg = ExperimentConfig(DatasetSpec(DatasetKind.ANNULUS, N=150, outer_radius=0.5, inner_radius=0.2),
                           [20, 40, 60, 80, 100], repeats=3, b_coef=0.1)
    curve = rate_experiment(cfg, data, reference, n_jobs=2)
    assert curve.rows[-1].empirical_loss < curve.rows[0].empirical_loss
    assert fit_rate(curve).c > 0


@pytest.mark.slow
def test_torus_rate_exponent():
    set_config("experiment.max_reference_points", 5000)
    spec = DatasetSpec(DatasetKind.TORUS, N=5000, outer_radius=0.8, inner_radius=0.3, seed=0)
    data = load_dataset(spec)
    reference = reference_diagram(data, 1)
    cfg = ExperimentConfig(spec, list(range(100, 501, 50)), p=3.0, q=3.0, b_rule=BRule.PROPORTIONAL, b_coef=0.1,
                           repeats=5, b=2.0)
    fit = fit_rate(rate_experiment(cfg, data, reference, n_jobs=4))
    assert fit.model == "free"
    assert 0.30 <= fit.c <= 0.70


# ------ 其他實驗 ------


def test_variance_check_uses_prefix_means(annulus):
    report = variance_rate_check(annulus, 15, [1, 2, 4, 8], seed=0)
    curve = report["curve"]
    assert curve.label == "proxy"
    assert [row.B for row in curve.rows] == [1, 2, 4, 8]
    assert curve.rows[-1].empirical_loss == 0.0
    assert all(row.empirical_loss >= 0 for row in curve.rows)
    assert report["fit"] is None
    assert report["reference_exponent"] == 0.5


def test_bias_variance_relation_holds(annulus, reference):
    report = bias_variance_check(annulus, 15, 3, 8, seed=1, reference=reference)
    assert report["holds"]
    assert report["loss"] <= report["bound"] + 1e-6
    with pytest.raises(ArgumentError):
        bias_variance_check(annulus, 15, 8, 3, seed=1, reference=reference)


def test_compare_means_rows(annulus, reference):
    rows = compare_means(annulus, [10, 15], 3, seed=2, reference=reference, sigma=0.01)
    assert [row.n for row in rows] == [10, 15]
    assert all(row.frechet_loss >= 0 and row.measure_loss >= 0 and row.sigma == 0.01 for row in rows)


# ------ 輸入 ------


def test_parse_dataset():
    spec = parse_dataset("torus:N=100,R=0.8,r=0.3,seed=7")
    assert spec.kind is DatasetKind.TORUS
    assert (spec.N, spec.outer_radius, spec.inner_radius, spec.seed) == (100, 0.8, 0.3, 7)
    assert parse_dataset("sphere:N=5,radius=1,dim=3").ambient_dim == 3
    assert parse_dataset("cloud.csv") == DatasetSpec(DatasetKind.POINTS, path="cloud.csv")
    assert parse_dataset("metric:d.csv").kind is DatasetKind.METRIC
    with pytest.raises(ArgumentError):
        parse_dataset("torus:N=100,colour=red")
    with pytest.raises(ArgumentError):
        parse_dataset("torus:N=ten")


def test_noise_is_reproducible():
    spec = DatasetSpec(DatasetKind.ANNULUS, N=20, outer_radius=0.5, inner_radius=0.2, noise=0.01)
    assert load_dataset(spec).equals(load_dataset(spec))
    assert not load_dataset(spec).equals(load_dataset(ANNULUS))


def test_build_experiment_config():
    cfg = build_experiment_config(ANNULUS, [10, 20], repeats=None, b_coef=0.2)
    assert cfg.repeats == 5 and cfg.b_coef == 0.2
    assert cfg.subsample_count(20) == 4
    with pytest.raises(ConfigError):
        build_experiment_config(ANNULUS, [20, 10])


def test_config_hash_tracks_settings():
    assert _config().config_hash() == _config().config_hash()
    assert _config().config_hash() != _config(master_seed=6).config_hash()


def test_reference_point_limit(annulus):
    set_config("experiment.max_reference_points", 10)
    with pytest.raises(ConfigError):
        reference_diagram(annulus, 1)
