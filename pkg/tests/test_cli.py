import csv
import json
import shutil
import subprocess
from pathlib import Path

import pytest

from steinhaus.cli import main


def write(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


@pytest.fixture
def two_point(tmp_path):
    return write(tmp_path / "two.json", {"kind": "points", "dimension": 1, "points": [["0"], ["4"]]})


@pytest.fixture
def rectangle(tmp_path):
    return write(tmp_path / "rect.json", {"kind": "polytope", "dimension": 2,
                                          "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]})


def test_iterate_two_point_csv(tmp_path, two_point):
    out = tmp_path / "out"
    assert main(["iterate", "--input", str(two_point), "--out", str(out), "--iters", "5"]) == 0
    rows = list(csv.DictReader((out / "trace.csv").open()))
    assert [r["dH"] for r in rows] == ["1", "1/2", "1/4", "1/8", "1/16"]
    trace = json.loads((out / "trace.json").read_text())
    assert trace["schema_version"] == 1


def test_iterate_float_mode(tmp_path, two_point):
    out = tmp_path / "out"
    assert main(["iterate", "--input", str(two_point), "--out", str(out), "--iters", "2",
                 "--mode", "float"]) == 0
    rows = list(csv.DictReader((out / "trace.csv").open()))
    assert float(rows[1]["dH"]) == 0.5


def test_radius_on_rectangle(tmp_path, rectangle):
    out = tmp_path / "out"
    assert main(["radius", "--input", str(rectangle), "--out", str(out),
                 "--resolution", "1/8"]) == 0
    rep = json.loads((out / "radius.json").read_text())
    assert rep["theorem1"]["bound_value"] == pytest.approx(5 ** -0.5)
    assert rep["theorem1"]["truth_bracket"] == [1.0, 1.0]


def test_shape_over_directory(tmp_path):
    d = tmp_path / "polys"
    d.mkdir()
    write(d / "tri.json", {"kind": "polytope", "dimension": 2,
                           "vertices": [[0, 0], [2, 0], [0, 2]]})
    write(d / "sq.json", {"kind": "polytope", "dimension": 2,
                          "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})
    out = tmp_path / "out"
    assert main(["shape", "--input", str(d), "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "shape.csv").open()))
    assert sorted(r["file"] for r in rows) == ["sq.json", "tri.json"]
    sq = next(r for r in rows if r["file"] == "sq.json")
    assert float(sq["x"]) == pytest.approx(0.5 ** 0.5) and float(sq["y"]) == pytest.approx(1)


@pytest.mark.parametrize("doc", [
    {"kind": "polytope", "dimension": 2, "vertices": [[0, 0], [2, 0], [1, "1/4"], [1, 2]]},
    '{"kind": "points",',
    {"kind": "grid", "dimension": 2, "h": "1/2", "cells": []},
])
def test_bad_input_exits_2_without_output(tmp_path, doc):
    src = write(tmp_path / "in.json", doc)
    out = tmp_path / "out"
    assert main(["iterate", "--input", str(src), "--out", str(out)]) == 2
    assert not out.exists() or not any(out.iterdir())


def test_missing_input_exits_2(tmp_path):
    assert main(["export", "--input", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2


def test_budget_exits_3(tmp_path, monkeypatch):
    src = write(tmp_path / "pts.json", {"kind": "points", "dimension": 1,
                                        "points": [[i * i] for i in range(20)]})
    monkeypatch.setenv("STEINHAUS_BUDGET", "100")
    out = tmp_path / "out"
    assert main(["iterate", "--input", str(src), "--out", str(out)]) == 3
    assert not out.exists() or not any(out.iterdir())


def test_verify_reports_failure_with_exit_1(tmp_path, capsys):
    assert main(["verify", "--only", "tube", "--out", str(tmp_path)]) == 1
    assert "[FAIL] 10" in capsys.readouterr().out


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["verify", "--seed", "3", "--only", "1", "--only", "k1-image",
                     "--out", str(out)]) == 0
    assert (a / "verify.json").read_bytes() == (b / "verify.json").read_bytes()
    rep = json.loads((a / "verify.json").read_text())
    assert rep["seed"] == 3 and [c["number"] for c in rep["criteria"]] == [1, 2]
    assert (a / "verify_timing.json").exists()


def test_verify_unknown_criterion(tmp_path):
    assert main(["verify", "--only", "nonsense", "--out", str(tmp_path)]) == 2


def test_export_roundtrip_and_svg(tmp_path, rectangle):
    out = tmp_path / "out"
    assert main(["export", "--input", str(rectangle), "--out", str(out), "--svg"]) == 0
    doc = json.loads((out / "rect.json").read_text())
    assert doc["kind"] == "polytope" and len(doc["vertices"]) == 4
    assert "<svg" in (out / "rect.svg").read_text()


def test_star_and_steiner(tmp_path):
    sym = write(tmp_path / "sq.json", {"kind": "polytope", "dimension": 2,
                                       "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]})
    out = tmp_path / "out"
    assert main(["star", "--input", str(sym), "--out", str(out), "--directions", "8"]) == 0
    rows = list(csv.DictReader((out / "profile.csv").open()))
    assert len(rows) == 8
    assert main(["steiner", "--input", str(sym), "--out", str(out), "--radius", "1/2",
                 "--resolution", "1/64"]) == 0
    assert (out / "steiner.json").exists()


def test_star_rejects_asymmetric(tmp_path, rectangle):
    assert main(["star", "--input", str(rectangle), "--out", str(tmp_path / "o")]) == 2


@pytest.mark.skipif(shutil.which("steinhaus") is None, reason="console script not installed")
def test_console_script(tmp_path, two_point):
    res = subprocess.run(["steinhaus", "iterate", "--input", str(two_point),
                          "--out", str(tmp_path / "o"), "--iters", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
