import json
import subprocess
import sys

import pytest

from codings.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def line_model(tmp_path):
    path = tmp_path / "line.json"
    path.write_text(json.dumps({"d": 1, "points": [["0"], ["1"]], "lambda": "0.95"}))
    return str(path)


@pytest.fixture
def triangle_model(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(json.dumps({"d": 2, "points": [[0, 0], [1, 0], [0, 1]], "lambda": "0.9"}))
    return str(path)


def test_blocks_csv(capsys):
    code, out = run(capsys, "blocks", "--n", "1", "--k", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[:3] == ["i,block", "0,00011011", "1,01101100"]
    assert "8/8 pass" in lines[-1]


def test_blocks_json(capsys):
    code, out = run(capsys, "blocks", "--n", "2", "--k", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["blocks"] == ["012", "120", "201"] and data["passed"]


def test_spectrum_csv_rows(capsys):
    code, out = run(capsys, "spectrum", "--q", "3", "--bound", "10", "--format", "csv")
    assert code == 0
    rows = [r for r in out.splitlines() if not r.startswith("#")]
    assert rows[0] == "index,value,gap_to_next"
    assert [float(r.split(",")[1]) for r in rows[1:]] == [0, 1, 3, 4, 9, 10]
    assert "max_gap=5.0" in out


def test_spectrum_exact_json(capsys):
    code, out = run(capsys, "spectrum", "--poly", "1,-1,-1", "--bound", "10", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["exact"] and data["poly"] == [1, -1, -1]
    assert data["gap_stats"]["min_gap"] == pytest.approx(0.6180339887498949)


def test_spectrum_adapts_tolerance(capsys):
    # the default merge tolerance overflows the point budget here
    code, out = run(capsys, "spectrum", "--q", "1.1", "--bound", "40", "--window", "20,40",
                    "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["tol"] >= 1e-6
    assert data["gap_stats"]["approximate"]


def test_spectrum_bad_window(capsys):
    code, out = run(capsys, "spectrum", "--q", "2", "--bound", "4", "--window", "3,5")
    assert code == 2 and json.loads(out)["kind"] == "precondition"


def test_thresholds_table(capsys):
    code, out = run(capsys, "thresholds", "--table", "q", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "k,q_max" and len(lines) == 9
    assert lines[1].startswith("2,1.0905")


@pytest.mark.parametrize("argv,expected", [
    (["--kind", "d_plus_one", "--d", "1"], 2 ** -0.5),
    (["--kind", "explicit_k", "--k", "3", "--n", "1"], 0.5 ** (1 / 24)),
])
def test_thresholds_kinds(capsys, argv, expected):
    code, out = run(capsys, "thresholds", *argv, "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(expected)


def test_thresholds_missing_argument(capsys):
    code, out = run(capsys, "thresholds", "--kind", "d_plus_one")
    assert code == 2


def test_code_greedy(capsys, triangle_model):
    code, out = run(capsys, "code", triangle_model, "--x", "0.2,0.3", "--length", "40")
    data = json.loads(out)
    assert code == 0 and data["length"] == 40 and data["contains_x"]


def test_code_universal(capsys, line_model):
    code, out = run(capsys, "code", line_model, "--x", "0.4", "--policy", "universal", "--targets", "all:2")
    data = json.loads(out)
    assert code == 0
    assert all(t in data["prefix"] for t in ["0", "1", "00", "01", "10", "11"])
    assert data["guaranteed"]


def test_code_outside_hull(capsys, line_model):
    code, out = run(capsys, "code", line_model, "--x", "1.5")
    assert code == 2 and json.loads(out)["kind"] == "precondition"


def test_code_budget_exit(capsys, line_model):
    code, out = run(capsys, "code", line_model, "--x", "0.4", "--policy", "universal",
                    "--targets", "all:3", "--budget", "1")
    assert code == 3 and json.loads(out)["kind"] == "budget"


def test_hexagon_zero_samples(capsys):
    code, out = run(capsys, "hexagon", "--samples", "0")
    assert code == 0 and json.loads(out)["located"] == 0


def test_hexagon_samples(capsys):
    code, out = run(capsys, "hexagon", "--samples", "50", "--seed", "3", "--format", "csv")
    assert code == 0 and out.strip().splitlines()[1] == "50,50"


def test_locate_square_centre(capsys):
    code, out = run(capsys, "locate", "--points", "0,0;1,0;0,1;1,1", "--x", "0.5,0.5", "--format", "csv")
    assert code == 0 and out.strip() == "none"


def test_locate_triangle(capsys, triangle_model):
    code, out = run(capsys, "locate", "--model", triangle_model, "--x", "0.2,0.2")
    assert json.loads(out)["simplex"]["indices"] == [0, 1, 2]


def test_pisot(capsys):
    code, out = run(capsys, "pisot", "--poly", "1,0,-1,-1")
    data = json.loads(out)
    assert code == 0 and data["certified"] == "pisot"
    assert data["dominant_root"] == pytest.approx(1.3247179572)


def test_precision_floor(capsys):
    code, out = run(capsys, "pisot", "--poly", "1,-1,-1", "--precision", "20")
    assert code == 2


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CODINGS_PRECISION", "10")
    code, _ = run(capsys, "thresholds", "--kind", "d_plus_one", "--d", "1")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "codings", "thresholds", "--kind", "d_plus_one", "--d", "2",
                           "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["value"] == pytest.approx(2 ** -0.25)
