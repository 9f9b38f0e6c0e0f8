# tests/test_cli.py
"""ph 命令列：輸出格式與結束碼"""

import io
import json
import math

import pytest

from data.file_manager import FileManager
from data.models import PersistenceDiagram
from ui.cli import int_list, main


def run(*argv):
    stream = io.StringIO()
    code = main(list(argv), stream=stream)
    return code, stream.getvalue()


@pytest.fixture
def fm() -> FileManager:
    return FileManager()


@pytest.fixture
def square_metric(tmp_path):
    s = repr(math.sqrt(2))
    rows = [f"0,1,{s},1", f"1,0,1,{s}", f"{s},1,0,1", f"1,{s},1,0"]
    (tmp_path / "square.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return "metric:square.csv"


def test_int_list():
    assert int_list("100:300:100") == [100, 200, 300]
    assert int_list("5,7,9") == [5, 7, 9]


def test_compute_square(square_metric):
    code, text = run("compute", square_metric)
    assert code == 0
    h0, h1 = json.loads(text)
    assert h0 == {"hom_dim": 0, "points": [[0.0, 1.0, 3]], "essential": [0.0]}
    assert h1["points"] == [[1.0, math.sqrt(2), 1]]


def test_compute_csv_format(square_metric):
    code, text = run("compute", square_metric, "--format", "csv")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "hom_dim,birth,death,multiplicity"
    assert "0,0,inf,1" in lines


def test_output_file(square_metric, tmp_path):
    code, text = run("compute", square_metric, "-o", "out/d.json")
    assert code == 0 and text == ""
    assert len(json.loads((tmp_path / "out" / "d.json").read_text(encoding="utf-8"))) == 2


def test_wasserstein_between_files(fm):
    fm.save_diagram(PersistenceDiagram.from_pairs(1, [(0, 2)]), "a.json")
    fm.save_diagram(PersistenceDiagram(1), "b.json")
    code, text = run("dist", "wasserstein", "a.json", "b.json", "--plan", "plan.json")
    assert code == 0
    payload = json.loads(text)
    assert payload["distance"] == pytest.approx(math.sqrt(2))
    assert payload["kind"] == "wasserstein"
    assert json.loads(open("plan.json", encoding="utf-8").read())["pairs"] == [[0, None]]


def test_bottleneck_defaults_to_max_norm(fm):
    fm.save_diagram(PersistenceDiagram.from_pairs(1, [(0, 2)]), "a.json")
    fm.save_diagram(PersistenceDiagram.from_pairs(1, [(0, 2.5)]), "b.json")
    code, text = run("dist", "bottleneck", "a.json", "b.json", "--format", "csv")
    assert code == 0
    header, row = text.splitlines()
    assert header == "distance,kind,p,q"
    assert row.split(",")[0] == "0.5" and row.endswith(",inf")


def test_frechet_command(fm):
    diagrams = [PersistenceDiagram.from_pairs(1, [(1, 3)]), PersistenceDiagram.from_pairs(1, [(1, 5)])]
    fm.save_json([D.to_dict() for D in diagrams], "ds.json")
    code, text = run("frechet", "ds.json", "--init", "0", "--trace", "trace.jsonl")
    assert code == 0
    payload = json.loads(text)
    assert payload["points"] == [[1.0, 4.0, 1]]
    assert payload["frechet_value"] == pytest.approx(1.0)
    assert payload["converged"] is True
    assert len(open("trace.jsonl", encoding="utf-8").read().splitlines()) >= 2


def test_quantize_command(fm):
    diagrams = [PersistenceDiagram.from_pairs(1, [(1, 3)]), PersistenceDiagram.from_pairs(1, [(1, 5)])]
    fm.save_json([D.to_dict() for D in diagrams], "ds.json")
    code, text = run("quantize", "ds.json", "--init", "1,3")
    assert code == 0
    payload = json.loads(text)
    assert payload["atoms"] == [[1.0, 4.0, 1.0]]
    assert payload["mass_denominator"] == 2


def test_bounds_command():
    code, text = run("bounds", "--a", "1", "--b", "1", "--r0", "0", "--N", "1", "--n-grid", "10", "--p", "2",
                     "--r", "2")
    assert code == 0
    (record, ) = json.loads(text)
    assert record["n"] == 10
    assert record["bias_bound"] == pytest.approx(1.6)
    assert record["optimal_B"] == 100
    assert record["regime"] == "p>b"
    assert record["frechet_offset"] == "+O(1)"
    assert 0 <= record["tail_bound"] <= 1


def test_bounds_needs_b():
    code, _ = run("bounds", "--N", "10", "--n-grid", "10")
    assert code == 2


def test_subsample_mean_command():
    code, text = run("subsample-mean", "annulus:N=30,R=0.5,r=0.2", "--n", "10", "--B", "3", "--dim", "0",
                     "--save-diagrams", "diagrams.json")
    assert code == 0
    assert json.loads(text)["mass_denominator"] == 3
    assert len(json.loads(open("diagrams.json", encoding="utf-8").read())) == 3


def test_otmatrix_of_identical_inputs():
    spec = "annulus:N=30,R=0.5,r=0.2"
    code, text = run("otmatrix", spec, spec, "--n", "10", "--B", "2", "--dim", "0")
    assert code == 0
    assert json.loads(text) == [[0.0, 0.0], [0.0, 0.0]]


def test_rate_experiment_command():
    code, text = run("experiment", "rate", "annulus:N=30,R=0.5,r=0.2", "--n-grid", "10,20", "--b-rule", "explicit",
                     "--b-values", "1,2", "--repeats", "1", "--csv", "rate.csv", "--summary", "summary.csv")
    assert code == 0
    payload = json.loads(text)
    assert [row[0] for row in payload["rows"]] == [10, 20]
    assert "fit" not in payload
    assert open("summary.csv", encoding="utf-8").read().startswith("# label=empirical")


def test_rate_experiment_csv_ignores_thread_count():
    outputs = {}
    for threads, csv_name in (("1", "a.csv"), ("8", "b.csv")):
        code, text = run("experiment", "rate", "annulus:N=30,R=0.5,r=0.2", "--n-grid", "10,20", "--b-rule", "explicit",
                         "--b-values", "1,2", "--repeats", "2", "--threads", threads, "--csv", csv_name)
        assert code == 0
        outputs[csv_name] = text
    a = open("a.csv", "rb").read()
    b = open("b.csv", "rb").read()
    assert a.startswith(b"# config_sha256=")
    assert a == b
    assert outputs["a.csv"] == outputs["b.csv"]


def test_missing_input_exits_with_data_code():
    code, _ = run("compute", "missing.csv")
    assert code == 3


def test_malformed_input_exits_with_data_code(tmp_path):
    (tmp_path / "bad.csv").write_text("0,1\n1\n", encoding="utf-8")
    code, _ = run("compute", "bad.csv")
    assert code == 3


def test_usage_errors_exit_with_two():
    assert run("bounds", "--N", "1")[0] == 2
    assert run("compute", "annulus:N=10,R=0.2,r=0.5")[0] == 2
    assert run("compute", "annulus:N=10,R=0.5,r=0.2", "--log-level", "LOUD")[0] == 2


def test_missing_config_file():
    assert run("bounds", "--b", "1", "--N", "1", "--n-grid", "10", "--config", "nope.json")[0] == 2
