import csv
import json

import pytest

from crncompose.cli import main
from crncompose.corpus import builtin_text


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("example1", "adder", "normalizer", "example2"):
        p = tmp_path / f"{name}.crn"
        p.write_text(builtin_text(name))
        out[name] = str(p)
    return out


def test_analyze(files, capsys):
    assert main(["analyze", files["example1"]]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["deficiency"] == 0 and report["weakly_reversible"] is True


def test_analyze_builtin_to_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", "builtin:adder", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["deficiency"] == 4


def test_check_exit_codes(files, capsys, tmp_path):
    assert main(["check", files["adder"], files["normalizer"]]) == 0
    assert json.loads(capsys.readouterr().out)["certified"] is True
    gate = tmp_path / "gate.crn"
    gate.write_text("species Y1 Y2 A B\ninputs Y1 Y2\nY1 + A -> Y1 + B ; k=1\n")
    assert main(["check", files["adder"], str(gate)]) == 2
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["reasons"]["weakly_reversible"] == "fail"


def test_check_undetermined(files, monkeypatch, capsys):
    import crncompose.structure as structure

    class Failed:
        status, success, message = 4, False, "numerical difficulties"

    monkeypatch.setattr(structure, "linprog", lambda *a, **k: Failed())
    assert main(["check", files["adder"], files["normalizer"]]) == 3


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.crn"
    bad.write_text("A -> B ; k=0\n")
    assert main(["analyze", str(bad)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_reduce(files, capsys):
    assert main(["reduce", files["example2"]]) == 0
    text = capsys.readouterr().out
    assert "Y -> 2 Y ; k=1  # k=1 * X" in text
    assert "dropped" in text


def test_compose(files, tmp_path):
    out = tmp_path / "coupled.crn"
    assert main(["compose", files["adder"], files["normalizer"], "--out", str(out)]) == 0
    text = out.read_text()
    assert text.count("# from c1") == 6 and text.count("# from c2") == 2


def test_compose_wiring_error(files, capsys):
    assert main(["compose", files["adder"], files["adder"]]) == 1


def test_simulate_csv(files, tmp_path):
    out = tmp_path / "run.csv"
    args = ["simulate", files["example1"], "--init", "Z1=0.5", "--init", "Z2=0.5", "--samples", "11", "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "Z1", "Z2"]
    assert len(rows) == 12
    steady = json.loads(out.with_suffix(".steady.json").read_text())["steady_state"]
    assert steady["state"]["Z1"] == pytest.approx(2 / 3, abs=1e-8)


def test_simulate_unknown_species(files):
    assert main(["simulate", files["example1"], "--init", "Q=1"]) == 1


def test_verify_single_and_pair(files, capsys):
    args = ["verify", files["adder"], "--init", "X1=0.2", "--init", "X2=0.3", "--init", "X3=0.6",
            "--init", "X4=0.1", "--target", "Y1=0.5", "--target", "Y2=0.7"]
    assert main(args) == 0
    capsys.readouterr()
    args = ["verify", files["adder"], files["normalizer"], "--init", "X1=0.2", "--init", "X2=0.3",
            "--init", "X3=0.6", "--init", "X4=0.1", "--init", "Z1=0.5", "--init", "Z2=0.5",
            "--random-runs", "2", "--seed", "7"]
    assert main(args) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] and len(payload["random_runs"]) == 2
    assert main(["verify", files["adder"], "--target", "Y1=9", "--target", "Y2=9"]) == 2


def test_verify_random_runs_deterministic(files, capsys):
    args = ["verify", files["adder"], files["normalizer"], "--init", "Z1=0.5", "--init", "Z2=0.5",
            "--init", "X1=1", "--init", "X2=1", "--init", "X3=1", "--init", "X4=1",
            "--random-runs", "1", "--seed", "3", "--t-end", "60"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first


def test_demo(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    assert main(["demo", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["certified"] and summary["verification"]["passed"]
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["t", "X1", "X2", "X3", "X4", "Y1", "Y2", "Z1", "Z2"]
    last = rows[-1]
    assert float(last["Y1"]) == pytest.approx(0.5, abs=1e-6)
    assert float(last["Y2"]) == pytest.approx(0.7, abs=1e-6)
    assert float(last["Z1"]) == pytest.approx(7 / 12, abs=1e-6)
    assert float(last["Z2"]) == pytest.approx(5 / 12, abs=1e-6)


def test_demo_swapped(tmp_path, capsys):
    assert main(["demo", "--wiring", "swapped", "--out", str(tmp_path / "f.csv")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["verification"]["achieved"]["Z1"] == pytest.approx(5 / 12, abs=1e-6)


def test_verify_zero_input_limit_is_input_error(files, capsys):
    # Y2 settles at 0, so the frozen rates of the second layer vanish
    args = ["verify", files["adder"], files["normalizer"], "--init", "X1=1", "--init", "Z1=1"]
    assert main(args) == 1
    assert "strictly positive" in capsys.readouterr().err
