import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from qdfa.channel import HEISENBERG, make_channel, save_channel
from qdfa.cli import main

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "qdfa" / "data" / "fixtures"
REPORT_SCHEMA = json.loads((ROOT / "docs" / "report_schema.json").read_text())
SUITE_SCHEMA = json.loads((ROOT / "docs" / "suite_report_schema.json").read_text())


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("QDFA_SEED", raising=False)


def analyze(tmp_path, name, *extra):
    out = tmp_path / f"{name}.report.json"
    code = main(["analyze", str(FIXTURES / f"{name}.json"), "--report", str(out), "--trials", "100", *extra])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc


def test_analyze_block_projection(tmp_path):
    code, doc = analyze(tmp_path, "block_projection", "--emit-bases")
    assert code == 0
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["dims"] == {"attr": 4, "fix": 4, "dfa": 3, "ce_dfa": 5, "kernel": 1}
    assert doc["flags"]["peripherally_automorphic"] is False
    assert doc["asymptotic_class"] == "generic"
    assert len(doc["bases"]["attr"]) == 4


def test_analyze_relaxation(tmp_path):
    code, doc = analyze(tmp_path, "relaxation")
    assert code == 0
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["asymptotic_class"] == "peripherally_automorphic"
    assert doc["flags"]["faithful"] is False
    assert doc["bases"] is None
    sigma = np.array(doc["stationary_state"])[..., 0]
    assert np.allclose(sigma, np.diag([2 / 3, 1 / 3, 0]))


def test_analyze_is_deterministic(tmp_path):
    _, a = analyze(tmp_path, "unitary", "--seed", "4")
    a2 = dict(a)
    _, b = analyze(tmp_path, "unitary", "--seed", "4")
    a2.pop("timestamp"), b.pop("timestamp")
    assert a2 == b


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("QDFA_SEED", "7")
    _, doc = analyze(tmp_path, "trace_map_2")
    assert doc["positivity"]["seed"] == 7
    monkeypatch.setenv("QDFA_SEED", "seven")
    assert analyze(tmp_path, "trace_map_2")[0] == 1


def test_expectations(tmp_path):
    assert analyze(tmp_path, "block_projection", "--expect", "generic", "--expect", "not-faithful")[0] == 0
    assert analyze(tmp_path, "block_projection", "--expect", "faithful")[0] == 2


def test_invalid_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert main(["analyze", str(bad)]) == 1
    assert main(["analyze", str(tmp_path / "missing.json")]) == 1
    assert main(["analyze", str(FIXTURES / "transpose_2.json")]) == 1
    assert main(["analyze", str(FIXTURES / "transpose_2.json"), "--permissive", "--trials", "50"]) == 0
    assert main(["analyze", str(FIXTURES / "unitary.json"), "--tol", "-1"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["suite", "--dims", "1"]) == 1
    assert "invalid input" in capsys.readouterr().err


def test_numeric_failure_exit_code(tmp_path):
    S = np.eye(4, dtype=complex)
    S[0, 2] = 1.0
    path = tmp_path / "jordan.json"
    save_channel(make_channel(2, HEISENBERG, "superop", [S], permissive=True), path, "superop")
    assert main(["analyze", str(path), "--permissive"]) == 3


def test_check_faithful(capsys):
    assert main(["check", str(FIXTURES / "unitary.json"), "faithful"]) == 0
    out = capsys.readouterr().out
    assert "faithful True" in out and "0.5" in out
    assert main(["check", str(FIXTURES / "relaxation.json"), "faithful"]) == 2


def test_check_peripheral_automorphy_prints_witness(capsys):
    assert main(["check", str(FIXTURES / "block_projection.json"), "peripherally-automorphic"]) == 2
    out = capsys.readouterr().out
    assert "X =" in out and "Y =" in out
    assert main(["check", str(FIXTURES / "relaxation.json"), "peripherally-automorphic"]) == 0


def test_check_positivity_predicates(capsys):
    assert main(["check", str(FIXTURES / "transpose_2.json"), "schwarz-falsify"]) == 0
    assert "Schwarz violation" in capsys.readouterr().out
    assert main(["check", str(FIXTURES / "relaxation.json"), "schwarz-falsify", "--trials", "100"]) == 2
    assert main(["check", str(FIXTURES / "transpose_2.json"), "ucp"]) == 2
    assert main(["check", str(FIXTURES / "swap.json"), "ucp"]) == 0


def test_suite_on_qubits(tmp_path):
    out = tmp_path / "suite.json"
    assert main(["suite", "--seeds", "20", "--dims", "2", "--trials", "100", "--report", str(out)]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SUITE_SCHEMA)
    qubit = {r["name"]: r for r in doc["invariants"] if r["name"].startswith("qubit_")}
    assert qubit and all(r["passed"] and r["evaluated"] > 0 for r in qubit.values())


def test_suite_detects_injected_sign_flip(capsys):
    code = main(["suite", "--seeds", "10", "--dims", "2,3", "--trials", "50", "--inject-fault", "star_sign"])
    assert code == 2
    err = capsys.readouterr().err
    assert "star_automorphism" in err and "reproducer" in err


def test_entry_points(tmp_path):
    r = subprocess.run([sys.executable, "-m", "qdfa", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "qdfa" in r.stdout
    r = subprocess.run([sys.executable, "-m", "qdfa", "analyze", str(FIXTURES / "block_projection.json"),
                        "--trials", "50"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "attr=4 fix=4 dfa=3 ce_dfa=5 kernel=1" in r.stdout

