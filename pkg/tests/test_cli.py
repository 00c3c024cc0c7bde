import json
import subprocess
import sys
from pathlib import Path

from csym.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_invariants_text(capsys):
    code, out, _ = run(capsys, "invariants", "--map", DATA / "somos5_map.json", "--eta", "2,3,3,3,2", "--d", "1,1,1,1,1")
    assert code == 0
    assert "kernel dimension: 3" in out


def test_invariants_inline_map_json(capsys):
    code, out, _ = run(
        capsys, "--format", "json", "invariants",
        "--sigma", "1,2,3", "--s", "2", "--b", "1,0,-2", "--r", "1", "--Z", "1,1",
        "--eta", "1,2,2", "--d", "0,1,0",
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 7


def test_invariants_joint_mutations(capsys):
    code, out, _ = run(capsys, "invariants", "--builtin", "rank3:7", "--params", "k1=1,k2=2", "--mutations",
                       "--eta", "2,4,4", "--d", "1,2,2", "--format", "json")
    assert code == 0
    assert json.loads(out)["dimension"] == 2


def test_invariants_precondition_error(capsys):
    code, _, err = run(capsys, "invariants", "--map", DATA / "somos5_map.json", "--eta", "2,3,3,3,1", "--d", "1,1,1,1,1")
    assert code == 1
    assert "eta_s" in err


def test_pairs_json_and_table(capsys, tmp_path):
    target = tmp_path / "pairs.json"
    code, out, _ = run(capsys, "pairs", "--poly", DATA / "T3.json", "--json-out", target)
    assert code == 0
    assert "(1 2 3 4)" in out
    data = json.loads(target.read_text())
    assert len(data["pairs"]) == 4
    assert data["pairs"][1]["inverse_row"] == 3


def test_verify_and_correspond(capsys):
    code, out, _ = run(capsys, "verify", "--poly", DATA / "markov.json", "--builtin", "rank3:1", "--mutations")
    assert code == 0 and out.strip().endswith("invariant: true")
    code, out, _ = run(capsys, "correspond", "--map", DATA / "markov_mu2.json", "--builtin", "rank3:1")
    assert code == 0 and "corresponds: true" in out


def test_seed_commands(capsys):
    code, out, _ = run(capsys, "seed-set", "--builtin", "rank3:1", "--format", "json")
    assert code == 0 and len(json.loads(out)) == 18
    code, out, _ = run(capsys, "seed-search", "--poly", DATA / "F3.json", "--limit", "1")
    assert code == 0 and "-3" in out
    code, out, _ = run(capsys, "classify", "--builtin", "rank2:7")
    assert code == 0 and out.startswith("row 7")
    code, out, _ = run(capsys, "classify", "--builtin", "rank3:5")
    assert code == 0 and "A3" in out


def test_orbit_descend_suite(capsys, tmp_path):
    code, out, _ = run(capsys, "orbit", "--builtin", "rank3:1", "--bound", "30")
    assert code == 0 and out.strip().endswith("22 points")
    code, out, _ = run(capsys, "descend", "--builtin", "rank3:1", "--point", "2,5,29", "--format", "json")
    assert code == 0 and json.loads(out)["word"] == [3, 2, 1]
    dest = tmp_path / "suite.txt"
    code, _, _ = run(capsys, "markov-suite", "--i", "1,4", "--kgrid", "0..1", "--bound", "40", "--out", dest)
    assert code == 0 and "PASS" in dest.read_text()


def test_usage_errors(capsys, tmp_path):
    code, _, err = run(capsys, "pairs", "--poly", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,\n "terms": [}')
    code, _, err = run(capsys, "pairs", "--poly", bad)
    assert code == 2 and "2:" in err
    code, _, _ = run(capsys, "descend", "--builtin", "rank3:1", "--point", "1,2,2")
    assert code == 1
    assert main(["no-such-command"]) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "csym", "classify", "--builtin", "rank2:1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "row 1" in proc.stdout
