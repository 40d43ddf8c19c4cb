from __future__ import annotations

import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from fracdhk import serialize
from fracdhk.catalog import example52
from fracdhk.cli import main
from fracdhk.config import ENV_VAR
from fracdhk.ops import frac_integral_left

SQPI = math.sqrt(math.pi)


@pytest.fixture
def runner():
    return CliRunner()


def read_csv(text):
    lines = text.strip().splitlines()
    header = lines[0]
    data = np.array([[float(v) for v in row.split(",")] for row in lines[2:]])
    return header, lines[1], data


def test_integrate_monomial(runner):
    res = runner.invoke(main, ["integrate", "--entry", "monomial:1", "--n", "0.5"])
    assert res.exit_code == 0, res.output
    header, cols, data = read_csv(res.stdout)
    assert header == "# frac-dhk v1; order=0; n=0.5"
    assert cols == "x,value,order"
    x = data[:, 0]
    np.testing.assert_allclose(data[:, 1], 4 * x**1.5 / (3 * SQPI), atol=1e-14)
    assert data.shape[0] == 129


def test_integrate_step_example_once_gives_primitive(runner):
    res = runner.invoke(main, ["integrate", "--entry", "example52:12", "--n", "1", "--resolution", "257"])
    assert res.exit_code == 0
    _, _, data = read_csv(res.stdout)
    prim = example52(12).dist.rep
    np.testing.assert_allclose(data[:, 1], prim(data[:, 0]), atol=1e-12)


def test_integrate_right_side(runner):
    res = runner.invoke(main, ["integrate", "--entry", "constant:1", "--n", "0.5", "--side", "right"])
    _, _, data = read_csv(res.stdout)
    np.testing.assert_allclose(data[:, 1], 2 * np.sqrt(1 - data[:, 0]) / SQPI, atol=1e-12)


def test_negative_order_is_input_error(runner):
    res = runner.invoke(main, ["integrate", "--entry", "monomial:1", "--n", "-1"])
    assert res.exit_code == 2


def test_entry_and_file_are_exclusive(runner):
    assert runner.invoke(main, ["integrate", "--n", "0.5"]).exit_code == 2


def test_differentiate_monomial(runner):
    res = runner.invoke(main, ["differentiate", "--entry", "monomial:1", "--n", "0.5"])
    assert res.exit_code == 0
    _, _, data = read_csv(res.stdout)
    np.testing.assert_allclose(data[:, 1], 2 * np.sqrt(data[:, 0]) / SQPI, atol=1e-12)


def test_differentiate_weierstrass_keeps_order(runner):
    res = runner.invoke(main, ["differentiate", "--entry", "weierstrass", "--n", "0.3"])
    assert res.exit_code == 0
    header, cols, data = read_csv(res.stdout)
    assert "order=2" in header and cols == "x,representative,order"
    assert np.all(data[:, 2] == 2)


def test_differentiate_bad_file(runner, tmp_path):
    res = runner.invoke(main, ["differentiate", "--file", str(tmp_path / "missing.json"), "--n", "0.5"])
    assert res.exit_code == 2
    (tmp_path / "junk.json").write_text("{not json")
    res = runner.invoke(main, ["differentiate", "--file", str(tmp_path / "junk.json"), "--n", "0.5"])
    assert res.exit_code == 2


def test_file_input_and_outputs(runner, tmp_path):
    src = tmp_path / "in.json"
    serialize.dump(example52(6).dist, src)
    res = runner.invoke(main, ["integrate", "--file", str(src), "--n", "0.5", "--output", "out.csv",
                               "--output-dir", str(tmp_path), "--save", "res.json"])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "out.csv").read_text().startswith("# frac-dhk v1; order=0")
    assert (tmp_path / "out.svg").read_text().lstrip().startswith("<?xml")
    assert serialize.load(tmp_path / "res.json").order == 1


def test_outputs_are_deterministic(runner, tmp_path):
    args = ["differentiate", "--entry", "monomial:2", "--n", "0.4", "--output-dir", str(tmp_path)]
    runner.invoke(main, args + ["--output", "a.csv"])
    runner.invoke(main, args + ["--output", "b.csv"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_abel_roundtrip(runner, tmp_path):
    src = tmp_path / "f.json"
    serialize.dump(frac_integral_left(example52(12).dist, 0.5), src)
    res = runner.invoke(main, ["abel", "--file", str(src), "--n", "0.5", "--output-dir", str(tmp_path)])
    assert res.exit_code == 0, res.output
    rep = json.loads((tmp_path / "abel_report.json").read_text())
    assert rep["solvable"] and rep["residual"] <= 1e-4
    assert (tmp_path / "abel_solution.csv").exists()


def test_abel_unsolvable(runner, tmp_path):
    res = runner.invoke(main, ["abel", "--entry", "half_power", "--n", "0.5", "--output-dir", str(tmp_path)])
    assert res.exit_code == 4
    rep = json.loads((tmp_path / "abel_report.json").read_text())
    assert rep["solvable"] is False
    assert rep["boundary_value"] == pytest.approx(1.7724539, abs=1e-6)


@pytest.mark.parametrize("n", ["0", "1", "1.5"])
def test_abel_order_range(runner, tmp_path, n):
    res = runner.invoke(main, ["abel", "--entry", "constant:1", "--n", n, "--output-dir", str(tmp_path)])
    assert res.exit_code == 2


def test_verify_suite_passes_and_writes_table(runner, tmp_path):
    res = runner.invoke(main, ["verify", "--suite", "abel", "--output", str(tmp_path / "t.csv")])
    assert res.exit_code == 0
    text = (tmp_path / "t.csv").read_text()
    assert text.splitlines()[0] == "suite,identity,case,residual,tolerance,pass"
    assert "FAIL" not in text


def test_verify_tight_tolerance_fails(runner):
    res = runner.invoke(main, ["verify", "--suite", "ftc", "--tol-grid", "1e-15"])
    assert res.exit_code == 1
    assert "FAIL" in res.stdout


def test_config_errors(runner, tmp_path):
    assert runner.invoke(main, ["verify", "--suite", "abel", "--resolution", "10"]).exit_code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert runner.invoke(main, ["verify", "--suite", "abel", "--config", str(bad)]).exit_code == 2


def test_config_from_environment(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("resolution = 65\n")
    res = runner.invoke(main, ["integrate", "--entry", "monomial:0", "--n", "1"], env={ENV_VAR: str(cfg)})
    assert len(res.stdout.strip().splitlines()) == 2 + 65
    res = runner.invoke(main, ["integrate", "--entry", "monomial:0", "--n", "1", "--resolution", "70"],
                        env={ENV_VAR: str(cfg)})
    assert len(res.stdout.strip().splitlines()) == 2 + 70


def test_step_example_needs_unit_interval(runner):
    res = runner.invoke(main, ["integrate", "--entry", "example52", "--n", "0.5", "--b", "2"])
    assert res.exit_code == 2
