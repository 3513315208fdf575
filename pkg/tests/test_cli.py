import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from ultraharm.cli import dumps, main
from ultraharm.fourier import GridFunction
from ultraharm.group import GroupDescriptor


@pytest.fixture
def runner():
    return CliRunner()


def write_function(path, g, values):
    path.write_text(json.dumps(GridFunction(g, values).to_json()))
    return str(path)


def test_dual_counts(runner):
    res = runner.invoke(main, ["dual", "--group", "heisenberg", "--p", "3", "--level", "1"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert len(doc["irreps"]) == 11
    assert doc["counting"]["passed"]
    res = runner.invoke(main, ["dual", "--group", "abelian", "--level", "2", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(res.stdout)))
    assert len(rows) == 9


def test_dual_dot(runner):
    res = runner.invoke(main, ["dual", "--level", "1", "--format", "dot"])
    assert res.exit_code == 0
    text = res.stdout.strip()
    assert text.startswith("digraph dual {") and text.endswith("}")
    assert text.count("->") == 10


def test_bad_group_and_level(runner):
    assert runner.invoke(main, ["dual", "--level", "0"]).exit_code == 2
    assert runner.invoke(main, ["dual", "--group", "heisenberg", "--p", "2"]).exit_code == 2
    assert runner.invoke(main, ["dual", "--group", "lie"]).exit_code == 2


def test_apply_vt_on_constant(runner, tmp_path):
    g = GroupDescriptor("heisenberg", 3, 1, 1)
    src = write_function(tmp_path / "one.json", g, np.ones(g.order))
    out = tmp_path / "out.json"
    res = runner.invoke(main, ["apply", src, "--operator", "vt", "--alpha", "2", "--out", str(out)])
    assert res.exit_code == 0, res.output
    vals = GridFunction.from_json(json.loads(out.read_text())).values
    assert np.allclose(vals, 234 / 242)


def test_apply_radial_identity(runner, tmp_path):
    g = GroupDescriptor("heisenberg", 3, 1, 1)
    f = GridFunction.random(g, np.random.default_rng(0))
    src = write_function(tmp_path / "f.json", g, f.values)
    prof = tmp_path / "phi.json"
    prof.write_text(json.dumps({"1": 1.0, "3": 1.0}))
    res = runner.invoke(main, ["apply", src, "--operator", f"radial:{prof}"])
    assert res.exit_code == 0, res.output
    assert np.allclose(GridFunction.from_json(json.loads(res.stdout)).values, f.values)


def test_apply_script_l_keeps_central_character(runner, tmp_path):
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    chi = GridFunction.from_callable(g, lambda X: np.exp(2j * np.pi * X[:, 2] / 9))
    src = write_function(tmp_path / "chi.json", g, chi.values)
    res = runner.invoke(main, ["apply", src, "--operator", "script-l", "--alpha", "1"])
    assert res.exit_code == 0, res.output
    assert np.max(np.abs(GridFunction.from_json(json.loads(res.stdout)).values)) > 1e-3


def test_apply_exit_codes(runner, tmp_path):
    g = GroupDescriptor("heisenberg", 3, 1, 1)
    src = write_function(tmp_path / "one.json", g, np.ones(g.order))
    assert runner.invoke(main, ["apply", src, "--operator", "vt", "--alpha", "0"]).exit_code == 3
    assert runner.invoke(main, ["apply", src, "--operator", "vt"]).exit_code == 2
    assert runner.invoke(main, ["apply", src, "--operator", "vt", "--alpha", "1", "--level", "2"]).exit_code == 2
    assert runner.invoke(main, ["apply", src, "--operator", "nope", "--alpha", "1"]).exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert runner.invoke(main, ["apply", str(bad), "--operator", "vt", "--alpha", "1"]).exit_code == 2


def test_verify_exit_codes(runner, tmp_path):
    out = tmp_path / "plancherel.json"
    res = runner.invoke(main, ["verify", "--suite", "plancherel", "--level", "2", "--option", "count=5",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert json.loads(out.read_text())["passed"] is True
    assert (tmp_path / "plancherel.csv").exists()
    assert runner.invoke(main, ["verify", "--suite", "sub-laplacian", "--level", "1"]).exit_code == 1
    assert runner.invoke(main, ["verify", "--suite", "nonsense"]).exit_code == 2


def test_verify_vt_locality(runner):
    res = runner.invoke(main, ["verify", "--suite", "vt-locality", "--level", "2"])
    assert res.exit_code == 0
    assert json.loads(res.stdout)["summary"]["max_deviation"] < 1e-12


def test_config_file(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# lower bound on G_5,2\ngroup = g52\np = 3\nlevel = 1\n")
    res = runner.invoke(main, ["verify", "--suite", "lower-bound", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert doc["summary"]["empirical_C"] == pytest.approx(2 / 3)
    cfg.write_text("colour = blue\n")
    assert runner.invoke(main, ["verify", "--suite", "lower-bound", "--config", str(cfg)]).exit_code == 2


def test_verify_is_deterministic(runner, tmp_path):
    args = ["verify", "--suite", "cz", "--level", "2", "--option", "count=3", "--seed", "7"]
    a = runner.invoke(main, args + ["--out", str(tmp_path / "a.json")])
    b = runner.invoke(main, args + ["--out", str(tmp_path / "b.json")])
    assert a.exit_code == b.exit_code == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    c = runner.invoke(main, ["verify", "--suite", "cz", "--level", "2", "--option", "count=3", "--seed", "8"])
    assert c.stdout != (tmp_path / "a.json").read_text()


def test_report_commands(runner):
    res = runner.invoke(main, ["report", "--suite", "mu-alpha", "--level", "2", "--alpha", "0.5"])
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["report", "--suite", "i-alpha-point", "--level", "2", "--alpha", "1",
                               "--format", "csv"])
    assert res.exit_code == 0, res.output
    assert len(list(csv.DictReader(io.StringIO(res.stdout)))) > 0


def test_float_formatting():
    text = dumps({"x": 0.1, "y": float("nan"), "z": float("inf"), "n": 3})
    doc = json.loads(text)
    assert doc["x"] == 0.1 and doc["n"] == 3
    assert doc["y"] == "NaN" and doc["z"] == "Infinity"
    assert "0.10000000000000001" in text
