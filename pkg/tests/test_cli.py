import json
import re
import subprocess
import sys

import jsonschema
import pytest

from qoracle.cli import main
from qoracle.report import REPORT_SCHEMA

BELL = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n'


@pytest.fixture
def bell(tmp_path):
    p = tmp_path / "bell.qasm"
    p.write_text(BELL)
    return p


def _report(path):
    data = json.loads(path.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    return data


def test_check_bell(bell, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check", str(bell), "--seed", "1", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert len(re.findall(r"^PASS ", text, re.M)) == 4
    data = _report(out)
    assert data["exit_status"] == 0
    assert sum(v["passed"] for v in data["verdicts"]) == 4
    assert "4 passed, 0 failed" in text


def test_check_width_error_has_position(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[2];\nh q[5];\n")
    assert main(["check", str(bad), "--seed", "0"]) == 2
    err = capsys.readouterr().err
    assert f"{bad}:3:5:" in err and "width" in err


def test_check_per_gate_reversibility(bell, capsys):
    assert main(["check", str(bell), "--oracle", "reversibility", "--granularity", "per_gate", "--seed", "2"]) == 0
    text = capsys.readouterr().out
    assert "min_fidelity" in text and "per_gate" in text


def test_check_post_measurement(bell):
    assert main(["check", str(bell), "--post-measurement", "--seed", "0"]) == 0


def test_check_missing_file(tmp_path):
    assert main(["check", str(tmp_path / "nope.qasm"), "--seed", "0"]) == 2


def test_loose_tolerance_rejected(bell):
    assert main(["check", str(bell), "--eps-sum", "0.1", "--seed", "0"]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["fuzz", "--trials", "0"],
        ["fuzz", "--mutants", "bogus"],
        ["fuzz", "--min-qubits", "5", "--max-qubits", "2"],
        ["fuzz", "--mutation-rate", "2"],
        ["fuzz", "--oracle", "speed"],
        ["frobnicate"],
        [],
    ],
)
def test_bad_flags_exit_2(argv):
    assert main(argv + ["--seed", "0"] if argv and argv[0] == "fuzz" else argv) == 2


def test_fuzz_no_mutants(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["fuzz", "--trials", "20", "--seed", "3", "--mutants", "none", "--json", str(out)]) == 0
    data = _report(out)
    assert data["campaign"]["detection_matrix"] == {}
    assert data["campaign"]["correct_violations"] == 0 == len(data["verdicts"])
    assert "correct backend: 0 violation(s)" in capsys.readouterr().out


def test_fuzz_expect_detections(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["fuzz", "--trials", "60", "--seed", "42", "--mutants", "all", "--expect-detections",
                 "--json", str(out)])
    assert code == 0
    data = _report(out)
    for m, row in data["campaign"]["mutants"].items():
        assert row["detected"] > 0, m
    text = capsys.readouterr().out
    for m in data["campaign"]["detection_matrix"]:
        assert re.search(rf"^{m}\s", text, re.M)


def test_fuzz_json_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["fuzz", "--trials", "30", "--seed", "42", "--mutants", "norm_skip"]
    assert main(args + ["--json", str(a)]) == 0
    assert main(args + ["--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def _fuzz_corpus(tmp_path, mutants="gate_typo"):
    corpus = tmp_path / "corpus"
    assert main(["fuzz", "--trials", "40", "--seed", "7", "--mutants", mutants, "--corpus", str(corpus)]) == 0
    ids = sorted(p.stem for p in (corpus / "failures").glob("*.json"))
    assert ids
    return corpus, ids


def test_shrink_roundtrip(tmp_path, capsys):
    corpus, ids = _fuzz_corpus(tmp_path)
    fid = ids[0]
    out = tmp_path / "s.json"
    assert main(["shrink", fid, "--corpus", str(corpus), "--json", str(out)]) == 0
    data = _report(out)
    info = data["campaign"]["shrink"]
    assert info["after"] <= info["before"]
    assert data["verdicts"][0]["passed"] is False
    assert data["verdicts"][0]["oracle_id"] == info["oracle_id"]

    # a second pass finds nothing to remove and leaves the file alone
    qasm = corpus / "failures" / f"{fid}.qasm"
    before = qasm.read_bytes()
    assert main(["shrink", fid, "--corpus", str(corpus)]) == 0
    assert qasm.read_bytes() == before


def test_shrink_unknown_id(tmp_path):
    assert main(["shrink", "t99999-nothing-width", "--corpus", str(tmp_path)]) == 2


def test_shrink_stale_failure(tmp_path, capsys):
    corpus, ids = _fuzz_corpus(tmp_path)
    fid = ids[0]
    (corpus / "failures" / f"{fid}.qasm").write_text("OPENQASM 2.0;\nqreg q[2];\n")
    assert main(["shrink", fid, "--corpus", str(corpus)]) == 2
    assert "stale" in capsys.readouterr().err


def test_shrink_uses_env_corpus(tmp_path, monkeypatch):
    corpus, ids = _fuzz_corpus(tmp_path)
    monkeypatch.setenv("QORACLE_CORPUS", str(corpus))
    assert main(["shrink", ids[0]]) == 0


def test_mutants_list(capsys):
    assert main(["mutants", "list"]) == 0
    text = capsys.readouterr().out
    for m in ("NORM_SKIP", "GATE_TYPO", "OFF_BY_ONE", "WIDTH_LEAK", "MERGE_FAULT", "PHASE_DROP"):
        assert m in text


def test_module_entry_point(bell):
    proc = subprocess.run([sys.executable, "-m", "qoracle", "check", str(bell), "--seed", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.count("PASS ") == 4


def test_missing_seed_is_logged(bell):
    proc = subprocess.run([sys.executable, "-m", "qoracle", "check", str(bell)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert re.search(r"seed=\d+", proc.stderr)
