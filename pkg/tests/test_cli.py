import json
import subprocess
import sys

import pytest

from edgeoffload.cli import main
from edgeoffload.fixtures import FIXTURES
from edgeoffload.scenario import load


@pytest.fixture
def fixture_file(tmp_path):
    def make(name):
        path = tmp_path / f"{name}.json"
        assert main(["fixture", name, "--out", str(path)]) == 0
        return path
    return make


def solve(path, *flags, tmp_path):
    out = tmp_path / "report.json"
    code = main(["solve", str(path), *flags, "--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_written(fixture_file, name):
    assert load(fixture_file(name)) == FIXTURES[name]()


def test_example1_elr_infeasible(fixture_file, tmp_path):
    code, doc = solve(fixture_file("example1"), "--algo", "elr", tmp_path=tmp_path)
    assert code == 2 and doc["status"] == "infeasible"


def test_example1_oracle_infeasible(fixture_file, tmp_path):
    code, doc = solve(fixture_file("example1"), "--algo", "oracle", tmp_path=tmp_path)
    assert code == 2 and doc["assignment"] is None


def test_example2_cga_vs_oracle(fixture_file, tmp_path):
    path = fixture_file("example2")
    assert solve(path, "--algo", "cga", tmp_path=tmp_path)[1]["objective"] == pytest.approx(7.0)
    assert solve(path, "--algo", "oracle", tmp_path=tmp_path)[1]["objective"] == pytest.approx(6.5)


def test_example2_mga_flags(fixture_file, tmp_path):
    code, doc = solve(fixture_file("example2"), "--algo", "mga", "--epsilon", "1", "--zeta", "2",
                      tmp_path=tmp_path)
    assert code == 0 and doc["objective"] == pytest.approx(6.5)


def test_example3_adma_unstable_with_trace(fixture_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, doc = solve(fixture_file("example3"), "--algo", "adma", "--trace", str(trace),
                      tmp_path=tmp_path)
    assert code == 0 and doc["stable"] is False
    records = [json.loads(line) for line in trace.read_text().splitlines()]
    assert {r["kind"] for r in records} == {"propose", "reject"}
    assert set(records[0]) == {"round", "kind", "task", "ecs", "ap", "u"}


def test_eta_override(fixture_file, tmp_path):
    path = fixture_file("example2")
    _, base = solve(path, "--algo", "fga", tmp_path=tmp_path)
    _, scaled = solve(path, "--algo", "fga", "--eta", "3", tmp_path=tmp_path)
    assert scaled["fairness_objective"] == pytest.approx(3 * base["fairness_objective"])


def test_budget_exit_code(fixture_file, tmp_path):
    assert main(["solve", str(fixture_file("example2")), "--algo", "oracle",
                 "--budget", "10", "--out", str(tmp_path / "x")]) == 3


def test_schema_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["solve", str(bad)]) == 4
    assert main(["solve", str(tmp_path / "missing.json")]) == 4


def test_validate_round_trip(fixture_file, tmp_path, capsys):
    path = fixture_file("example2")
    solve(path, "--algo", "cga", tmp_path=tmp_path)
    assert main(["validate", str(path), str(tmp_path / "report.json")]) == 0
    assert capsys.readouterr().out == ""


def test_validate_lists_overfull_ecs(fixture_file, tmp_path, capsys):
    path = fixture_file("example2")
    overfull = {"paths": [{"user": 0, "task": j, "ap": j % 2, "ecs": 1} for j in range(3)]}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(overfull))
    assert main(["validate", str(path), str(bad)]) == 1
    assert "ecs-capacity\t1\t" in capsys.readouterr().out


def test_validate_malformed_assignment(fixture_file, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"paths": "nope"}')
    assert main(["validate", str(fixture_file("example2")), str(bad)]) == 4


def test_generate_reproducible(tmp_path):
    params = tmp_path / "p.json"
    params.write_text('{"n_users": 3, "r_mean": 4.0}')
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["generate", "--params", str(params), "--seed", "9", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads(a.read_text())["metadata"]
    assert meta["seed"] == 9 and meta["params"]["n_users"] == 3


def test_generate_bad_params(tmp_path):
    params = tmp_path / "p.json"
    params.write_text('{"n_users": -1}')
    assert main(["generate", "--params", str(params)]) == 4


def test_sweep_identical_bytes(tmp_path):
    spec = tmp_path / "sweep.json"
    spec.write_text(json.dumps({"algorithms": ["cga", "fga"], "param": "r_mean",
                                "values": [2, 6], "seeds": 4,
                                "base": {"n_users": 3, "tasks_per_user": 2}}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", str(spec), "--out", str(a)]) == 0
    assert main(["sweep", str(spec), "--out", str(b), "--seeds", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_sweep_invalid_spec(tmp_path):
    spec = tmp_path / "sweep.json"
    spec.write_text('{"algorithms": [], "param": "r_mean", "values": [2]}')
    assert main(["sweep", str(spec)]) == 4


def test_module_entry_point(tmp_path):
    out = tmp_path / "e2.json"
    proc = subprocess.run([sys.executable, "-m", "edgeoffload", "fixture", "example2",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and out.exists()
