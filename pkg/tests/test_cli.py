import json

import pytest

from lpa_lab.cli import clean, run

S0 = {"R": 3, "I": 1, "c": 0.1, "rho": 1.0, "projects": [{"lambda": 0.5, "p": 0.2}] * 2}
S1 = {"R": 3, "I": 1, "c": 0.05, "rho": 0.5,
      "projects": [{"lambda": 0.4, "p": 0.3}, {"lambda": 0.6, "p": 0.1}]}


@pytest.fixture
def scenario(tmp_path):
    def write(data, name="s.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_clean_rounds_to_twelve_digits():
    assert clean({"a": 1 / 3, "b": [float("nan")], "c": True}) == {"a": 0.333333333333, "b": [None], "c": True}


@pytest.mark.parametrize("method", ["dbd", "wp", "wp-fno", "conditional", "wp-monotone"])
def test_solve_methods(scenario, capsys, method):
    assert run(["solve", "--scenario", scenario(S1), "--method", method]) == 0
    out = _json(capsys)
    assert out["method"] == method
    assert out["oracle_gap"] <= 1e-8


def test_solve_wp_s0(scenario, capsys):
    assert run(["solve", "--scenario", scenario(S0), "--method", "wp"]) == 0
    assert _json(capsys)["gp_expected"] == pytest.approx(13 / 60, abs=1e-11)


def test_solve_three_point(scenario, capsys):
    data = {**S0, "three_point": {"R1": 3, "R2": 2, "lambda": 0.5, "p": 0.6, "p1": 0.1, "p2": 0.3}}
    assert run(["solve", "--scenario", scenario(data), "--method", "three-point"]) == 0
    assert _json(capsys)["contract"]["sR1"] == pytest.approx(0.4)


def test_solve_continuous(scenario, capsys):
    data = {**S0, "projects": [{"lambda": 0.5, "p": 0.0}] * 2, "power_cost": {"a": 1, "b": 2, "m": 3}}
    assert run(["solve", "--scenario", scenario(data), "--method", "continuous"]) == 0
    assert _json(capsys)["comparison"]["preferred"] == "WP"


def test_exit_codes(scenario, capsys):
    assert run(["solve", "--scenario", scenario({"R": 3}), "--method", "wp"]) == 2
    assert run(["solve", "--scenario", scenario(S1), "--method", "three-point"]) == 2
    assert run(["solve", "--scenario", "/nonexistent.json", "--method", "wp"]) == 2
    bad_cost = {**S0, "power_cost": {"a": 0.1, "b": 0.1, "m": 3}}
    assert run(["solve", "--scenario", scenario(bad_cost), "--method", "continuous"]) == 3
    assert "invalid input" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run(["solve", "--scenario", scenario(S0), "--method", "nope"])
    assert exc.value.code == 2


def test_compare_and_thresholds(scenario, capsys):
    path = scenario(S1)
    assert run(["compare", "--scenario", path]) == 0
    assert _json(capsys)["preferred"] == "WP"
    assert run(["thresholds", "--scenario", path]) == 0
    out = _json(capsys)
    assert out["rho_star"] == pytest.approx(3 / 14, abs=1e-11)
    assert out["rho_double_star"]["side"] == "interior"


def test_sweep_to_file(scenario, tmp_path):
    target = tmp_path / "sweep.csv"
    argv = ["sweep", "--scenario", scenario(S1), "--param", "rho", "--from", "0", "--to", "1",
            "--steps", "101", "--output", str(target)]
    assert run(argv) == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "param,value,gp_expected,lp_expected,preferred,regime"
    assert len(lines) == 102


def test_verify_small_grid(capsys):
    assert run(["verify", "--grid", "3", "--seed", "5"]) == 0
    assert _json(capsys)["ok"] is True


def test_simulate_from_solve_output(scenario, tmp_path, capsys):
    path = scenario(S1)
    contract = tmp_path / "wp.json"
    assert run(["solve", "--scenario", path, "--method", "wp-fno", "--output", str(contract)]) == 0
    argv = ["simulate", "--scenario", path, "--contract", str(contract), "--trials", "5000", "--seed", "2"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["analytic"]["total"] == pytest.approx(3.98)
