# tests/test_file_manager.py
"""點雲、距離矩陣、持續圖與實驗紀錄的讀寫"""

import math
import struct

import numpy as np
import pytest

from data.file_manager import FileManager
from data.models import FiniteMetricSpace, PersistenceDiagram, PointCloud
from data.result_data import LossCurve, LossRow
from utils.errors import ParseError


@pytest.fixture
def fm() -> FileManager:
    return FileManager()


@pytest.fixture
def cloud() -> PointCloud:
    return PointCloud(np.random.default_rng(0).normal(size=(7, 3)))


def test_point_csv_round_trip(fm, cloud):
    fm.save_point_csv(cloud, "cloud.csv")
    assert fm.load_point_cloud("cloud.csv").equals(cloud)


def test_point_binary_round_trip(fm, cloud):
    fm.save_point_binary(cloud, "cloud.pcf")
    assert fm.load_point_cloud("cloud.pcf").equals(cloud)


def test_csv_comments_and_blank_lines(fm, tmp_path):
    (tmp_path / "c.csv").write_text("# header\n0,1\n\n2,3\n", encoding="utf-8")
    np.testing.assert_array_equal(fm.load_point_csv("c.csv").points, [[0, 1], [2, 3]])


def test_csv_column_mismatch_reports_line(fm, tmp_path):
    (tmp_path / "c.csv").write_text("0,1\n1,2,3\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        fm.load_point_csv("c.csv")
    assert info.value.line == 2


def test_csv_bad_number_reports_line(fm, tmp_path):
    (tmp_path / "c.csv").write_text("0,1\n1,2\nx,3\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        fm.load_point_csv("c.csv")
    assert info.value.line == 3


def test_truncated_binary(fm, tmp_path):
    payload = struct.pack("<4sQQ", b"PCF1", 2, 2) + struct.pack("<3d", 0.0, 1.0, 2.0)
    (tmp_path / "bad.pcf").write_bytes(payload)
    with pytest.raises(ParseError):
        fm.load_point_cloud("bad.pcf")


def test_missing_file(fm):
    with pytest.raises(FileNotFoundError):
        fm.load_point_cloud("nowhere.csv")


def test_metric_csv(fm, tmp_path):
    (tmp_path / "m.csv").write_text("0,1,2\n1,0,1\n2,1,0\n", encoding="utf-8")
    np.testing.assert_array_equal(fm.load_metric_csv("m.csv").dist, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.mark.parametrize("text, line", [
    ("0,1\n2,0\n", 2),
    ("0,1\n1,1\n", 2),
    ("0,-1\n-1,0\n", 1),
    ("0,1\n1,0,3\n", 2),
])
def test_invalid_metric_reports_line(fm, tmp_path, text, line):
    (tmp_path / "m.csv").write_text(text, encoding="utf-8")
    with pytest.raises(ParseError) as info:
        fm.load_metric_csv("m.csv")
    assert info.value.line == line


def test_matrix_csv_round_trip(fm):
    matrix = np.array([[0.0, 0.1 + 0.2], [0.1 + 0.2, 0.0]])
    fm.save_matrix_csv(matrix, "m.csv")
    np.testing.assert_array_equal(fm.load_metric_csv("m.csv").dist, matrix)


def test_metric_space_round_trip(fm):
    points = np.random.default_rng(1).normal(size=(5, 2))
    diff = points[:, None, :] - points[None, :, :]
    space = FiniteMetricSpace(np.sqrt((diff**2).sum(axis=-1)))
    fm.save_matrix_csv(space, "space.csv")
    assert fm.load_metric_csv("space.csv").equals(space)


def test_diagram_json(fm):
    D = PersistenceDiagram(0, [(0.0, 0.5, 2)], [0.0])
    fm.save_diagram(D, "d.json")
    assert fm.load_diagram("d.json") == D
    fm.save_json([D.to_dict(), D.to_dict()], "list.json")
    assert fm.load_diagrams("list.json") == [D, D]


def test_diagram_json_floats_are_exact(fm, tmp_path):
    D = PersistenceDiagram(1, [(0.1 + 0.2, 1 / 3, 1), (1e-300, 2 / 3 + 1e-16, 3)], [math.pi])
    fm.save_diagram(D, "d.json")
    loaded = fm.load_diagram("d.json")
    assert loaded == D
    assert loaded.points[1][0] == 1e-300
    assert "0.30000000000000004" in (tmp_path / "d.json").read_text(encoding="utf-8")


def test_malformed_json_reports_line(fm, tmp_path):
    (tmp_path / "d.json").write_text('{\n  "hom_dim": 1,\n  "points": [[0, 1, 1]\n}\n', encoding="utf-8")
    with pytest.raises(ParseError) as info:
        fm.load_diagram("d.json")
    assert info.value.line is not None


def test_invalid_diagram_content(fm, tmp_path):
    (tmp_path / "d.json").write_text('{"hom_dim": 1, "points": [[1, 0, 1]]}', encoding="utf-8")
    with pytest.raises(ParseError):
        fm.load_diagram("d.json")


def test_loss_curve_round_trip(fm):
    curve = LossCurve([LossRow(10, 1, 0.1 + 0.2, 0.0), LossRow(20, 2, 1 / 3, 0.25)], label="proxy")
    fm.save_loss_curve(curve, "curve.csv")
    assert fm.load_loss_curve("curve.csv") == curve


def test_experiment_log_skips_partial_rows(fm, tmp_path):
    assert fm.open_experiment_log("run.csv", "abc") == {}
    fm.append_experiment_row("run.csv", 10, 0, 1, 0.5)
    with open(tmp_path / "run.csv", "a", encoding="utf-8") as f:
        f.write("10,1\n")
    assert fm.open_experiment_log("run.csv", "abc") == {(10, 0): (1, 0.5)}


def test_results_dir_prefixes_relative_paths(tmp_path, cloud):
    fm = FileManager(tmp_path / "out")
    path = fm.save_point_csv(cloud, "cloud.csv")
    assert path == tmp_path / "out" / "cloud.csv"
