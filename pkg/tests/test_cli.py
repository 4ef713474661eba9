import json
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))
from src.cli import main

MAPS = ROOT / "data" / "maps"
PAIRS = ROOT / "data" / "pairs"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out)


def test_validate_writes_json(capsys, tmp_path):
    code, payload = _run(capsys, "validate", MAPS / "fib.map", "--out", tmp_path)
    assert code == 0
    assert payload["command"] == "validate"
    assert payload["result"]["train_track"] is True
    assert payload["result"]["expanding_power"] == {"value": 2, "exact": True}
    saved = json.loads((tmp_path / "validate.json").read_text(encoding="utf-8"))
    assert saved == payload


def test_repeated_runs_are_byte_identical(capsys):
    argv = ["frequencies", str(MAPS / "fib.map"), "--radius", "2", "--tol", "1e-7"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_library_errors_exit_with_status_one(capsys):
    code, payload = _run(capsys, "analyze", MAPS / "theta.map")
    assert code == 1
    assert payload["error"] == "not_train_track"
    assert payload["details"] == {"edge": "a", "turn": "{b,c}"}
    code, payload = _run(capsys, "validate", MAPS / "missing.map")
    assert code == 1
    assert payload["error"] == "invalid_input"


def test_usage_errors_exit_with_status_two():
    with pytest.raises(SystemExit) as err:
        main(["explode"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["limit", str(MAPS / "fib.map")])
    assert err.value.code == 2


def test_limit_of_a_reducible_word(capsys):
    code, payload = _run(capsys, "limit", MAPS / "reducible.map", "--word", "ac", "--radius", "2", "--tol", "1e-7")
    assert code == 0
    assert payload["result"]["edges"] == ["c"]
    assert payload["result"]["distance_to_iterate"]["value"] < 0.1


def test_wedge_subcommand(capsys, tmp_path):
    code, payload = _run(capsys, "wedge", MAPS / "plastic.map", MAPS / "plastic_xyz.map", "--out", tmp_path, "--name", "w")
    assert code == 0
    assert payload["result"]["edges"] == ["a", "b", "c", "x", "y", "z"]
    assert (tmp_path / "w.map").exists()
    code, payload = _run(capsys, "validate", tmp_path / "w.map")
    assert code == 0
    assert payload["result"]["train_track"] is True


def test_orbit_subcommand(capsys, tmp_path):
    code, payload = _run(
        capsys, "orbit", "--pair", PAIRS / "plastic.yaml", "--word", "abC", "--nmax", "2", "--radius", "2", "--tol", "1e-8", "--out", tmp_path
    )
    assert code == 0
    steps = [r["step"]["value"] for r in payload["result"]["records"]]
    assert steps[:3] == [0, 1, 2]
    assert payload["settings"]["u_tol"]["value"] == 1e-3
    assert (tmp_path / "orbit.csv").exists()
