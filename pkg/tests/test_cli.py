import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nodearrays import pointset
from nodearrays.cli import main
from nodearrays.points import padua_points


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_points_padua(capsys):
    code, out, _ = _run(["points", "--set", "square", "--gen", "padua", "--n", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["d"] == 2 and doc["n"] == 4
    assert doc["provenance"] == "padua" and len(doc["points"]) == 15
    assert all(len(p) == 2 and all(len(c) == 2 for c in p) for p in doc["points"])


def test_points_discrete_leja(tmp_path):
    path = tmp_path / "leja.json"
    assert main(["points", "--set", "interval", "--gen", "discrete-leja", "--n", "1",
                 "--out", str(path)]) == 0
    assert len(pointset.load(str(path))["points"]) == 2


def test_points_deterministic(tmp_path):
    files = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        main(["points", "--set", "square", "--gen", "approx-fekete", "--n", "5",
              "--out", str(path)])
        files.append(path.read_bytes())
    assert files[0] == files[1]


def test_out_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("NODEARRAYS_OUT_DIR", str(tmp_path))
    assert main(["points", "--set", "circle", "--gen", "leja-disk", "--n", "3",
                 "--out", "disk.json"]) == 0
    assert (tmp_path / "disk.json").exists()


@pytest.mark.parametrize("argv, code", [
    (["points", "--set", "interval", "--gen", "padua", "--n", "3"], 4),
    (["points", "--set", "nowhere", "--n", "3"], 2),
    (["points", "--gen", "bos", "--set", "real-disk", "--n", "3"], 2),
    (["points", "--n-min", "5", "--n-max", "2"], 2),
    (["diag", "--metric", "bos_vdm", "--n", "2"], 4),
    (["kergin", "--instances", "0"], 2),
    ([], 2),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert capsys.readouterr().err


def test_degenerate_points_file(tmp_path, capsys):
    doc = pointset.pointset_document(np.array([[0.5], [0.5]]), 1, "custom")
    path = tmp_path / "bad.json"
    pointset.save(str(path), doc)
    assert main(["diag", "--points", str(path)]) == 3


def test_malformed_points_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": 7}')
    assert main(["diag", "--points", str(path)]) == 2


def test_diag_tdiam_trend(capsys):
    code, out, _ = _run(["diag", "--set", "interval", "--gen", "approx-fekete",
                         "--n-min", "4", "--n-max", "16", "--metric", "tdiam_estimate"], capsys)
    assert code == 0
    vals = [float(r["value"]) for r in _rows(out) if r["metric"] == "tdiam_estimate"]
    assert len(vals) == 13
    assert abs(vals[-1] - 0.5) < abs(vals[0] - 0.5)


def test_diag_l_functional_and_bos(capsys):
    code, out, _ = _run(["diag", "--set", "real-disk", "--gen", "bos", "--G", "chebyshev",
                         "--n", "4", "--metric", "l_functional"], capsys)
    assert code == 0
    (row,) = _rows(out)
    assert row["n"] == "" and float(row["value"]) == pytest.approx(-0.6806085842, abs=1e-6)
    code, out, _ = _run(["diag", "--set", "real-disk", "--gen", "bos", "--G", "equilibrium",
                         "--n", "4", "--metric", "bos_vdm"], capsys)
    limit = [float(r["value"]) for r in _rows(out) if r["metric"] == "bos_vdm_limit"]
    assert limit and limit[0] == pytest.approx(0.42597, abs=5e-5)


def test_points_round_trip_through_diag(tmp_path, capsys):
    path = tmp_path / "padua.json"
    main(["points", "--set", "square", "--gen", "padua", "--n", "3", "--out", str(path)])
    stage = pointset.stage_from_document(pointset.load(str(path)))
    np.testing.assert_array_equal(stage.points, padua_points(3).points)
    code, out, _ = _run(["diag", "--set", "square", "--points", str(path),
                         "--metric", "lebesgue"], capsys)
    assert code == 0
    lam = [float(r["value"]) for r in _rows(out) if r["metric"] == "lebesgue"]
    assert lam[0] >= 1
    code, out, _ = _run(["interp", "--set", "square", "--points", str(path)], capsys)
    assert code == 0 and any(r["metric"] == "sup_error" for r in _rows(out))


def test_diag_json_format(capsys):
    code, out, _ = _run(["diag", "--n", "3", "--metric", "lebesgue", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)[0]["metric"] == "lebesgue"


def test_interp_rates(capsys):
    code, out, _ = _run(["interp", "--set", "circle", "--gen", "roots", "--func", "cauchy",
                         "--n", "20"], capsys)
    assert code == 0
    rate = [float(r["value"]) for r in _rows(out) if r["metric"] == "root_rate"]
    assert 0.45 <= rate[0] <= 0.55


def test_bergman_roots(capsys):
    code, out, _ = _run(["bergman", "--set", "circle", "--measure", "roots",
                         "--n-min", "1", "--n-max", "5"], capsys)
    assert code == 0
    M = {int(r["n"]): float(r["value"]) for r in _rows(out) if r["metric"] == "bm_constant"}
    for n, v in M.items():
        assert v == pytest.approx(math.sqrt(n + 1), abs=1e-10)


@pytest.mark.parametrize("suite", ["polynomial", "hermite", "ridge"])
def test_kergin_suites(suite, capsys):
    code, out, _ = _run(["kergin", "--suite", suite, "--instances", "10"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_kergin_node_file(tmp_path, capsys):
    path = tmp_path / "nodes.json"
    doc = pointset.pointset_document(np.array([[0.0, 0.0], [1.0, 0.5], [0.0, 0.0]]), 2, "custom")
    pointset.save(str(path), doc)
    code, out, _ = _run(["kergin", "--nodes", str(path)], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nodearrays", "points", "--set", "square",
                          "--gen", "padua", "--n", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and len(json.loads(res.stdout)["points"]) == 6


def test_pointset_encoding():
    pts = np.array([[1 + 2j, -0.5], [0.25j, 3.0]])
    doc = pointset.loads(pointset.dumps(pointset.pointset_document(pts, 1, "custom")))
    assert doc["points"][0] == [[1.0, 2.0], [-0.5, 0.0]]
    np.testing.assert_array_equal(pointset.decode_points(doc), pts)
    doc["points"] = [[1, 2]]
    with pytest.raises(pointset.PointSetFormatError):
        pointset.decode_points(doc)
    with pytest.raises(pointset.PointSetFormatError):
        pointset.loads("not json")
