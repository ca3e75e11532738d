from __future__ import annotations

import csv
import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from octolattice import brute_force_oracle
from octolattice import algebra as alg
from octolattice.cli import main
from octolattice.harness import run_verify_algebra
from octolattice.lattice import read_function


def strip_timing(doc):
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "elapsed_ms"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    doc = json.loads(out.out) if out.out.strip() else None
    return code, doc, out.err


def test_verify_algebra_default(capsys):
    code, doc, _ = run(capsys, "verify-algebra", "--samples", "20")
    assert code == 0 and doc["passed"]
    census = next(c for c in doc["checks"] if c["name"] == "census")
    assert "associative=344" in census["detail"] and "anti_associative=168" in census["detail"]


def test_verify_algebra_zero_samples_still_checks_table(capsys):
    code, doc, _ = run(capsys, "verify-algebra", "--samples", "0")
    names = [c["name"] for c in doc["checks"]]
    assert code == 0
    assert {"table", "units", "alternativity", "moufang", "census"} <= set(names)


def test_corrupted_table_names_the_pair():
    sign = alg.MUL_SIGN.copy()
    sign[3, 5] = -sign[3, 5]
    passed, doc = run_verify_algebra(0, 0, table=(sign, alg.MUL_INDEX))
    table = doc["checks"][0]
    assert not passed and not table["passed"]
    assert "(i,j)=(3,5)" in table["detail"]


def test_census_matches_golden(capsys, golden_dir):
    code, doc, _ = run(capsys, "census")
    assert code == 0
    assert doc == json.loads((golden_dir / "census.json").read_text())


@pytest.mark.parametrize("fn,golden", [("delta.fn", "stokes_delta_T1.json"),
                                       ("delta_half.fn", "stokes_delta_T1_half.json")])
def test_delta_stokes_matches_golden(capsys, golden_dir, fn, golden):
    path = str(golden_dir / fn)
    h = read_function(path).h
    code, doc, _ = run(capsys, "stokes", "--theorem", "T1", "--h", str(h), "--function", path, "--function", path)
    assert code == 0
    assert strip_timing(doc) == json.loads((golden_dir / golden).read_text())


def test_delta_golden_agrees_with_oracle(golden_dir):
    d = read_function(golden_dir / "delta.fn")
    doc = json.loads((golden_dir / "stokes_delta_T1.json").read_text())
    assert brute_force_oracle(d, d, -1).to_strings() == doc["reports"][0]["claim_residual"]


def test_stokes_seeded_t1(capsys):
    code, doc, _ = run(capsys, "stokes", "--theorem", "T1", "--seed", "1", "--radius", "1", "--h", "1", "--mode", "exact")
    assert code == 0
    assert doc["reports"][0]["derived_residual"] == ["0"] * 8


@pytest.mark.parametrize("theorem", ["T2", "T3"])
def test_stokes_slabs_record_both_powers(capsys, theorem):
    code, doc, _ = run(capsys, "stokes", "--theorem", theorem, "--radius", "1", "--h", "1/2", "--sign", "plus")
    rep = doc["reports"][0]
    assert code == 0
    assert rep["derived_residual"] == ["0"] * 8
    assert set(rep["claim_residual_by_h_power"]) == {"7", "8"}


def test_stokes_csv(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, doc, _ = run(capsys, "stokes", "--theorem", "T2", "--radius", "1", "--seeds", "2", "--csv", str(out))
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 2
    assert [r["seed"] for r in rows] == ["0", "1"]


def test_determinism(capsys, tmp_path):
    digests = []
    for n in range(2):
        path = tmp_path / f"r{n}.json"
        code, _, _ = run(capsys, "stokes", "--theorem", "T3", "--seed", "7", "--seeds", "2", "--out", str(path))
        assert code == 0
        doc = strip_timing(json.loads(path.read_text()))
        digests.append(hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest())
    assert digests[0] == digests[1]


def test_verify_factorization(capsys):
    code, doc, _ = run(capsys, "verify-factorization", "--seeds", "2")
    assert code == 0 and all(r["max_residual"] == "0" for r in doc["results"])


def test_verify_factorization_float(capsys):
    code, doc, _ = run(capsys, "verify-factorization", "--mode", "float", "--tol", "1e-12")
    assert code == 0
    code, doc, _ = run(capsys, "verify-factorization", "--mode", "float", "--tol", "1e-300")
    assert code == 1 and not doc["passed"]


def test_monogenic_demo(capsys):
    code, doc, _ = run(capsys, "monogenic-demo", "--radius", "1")
    assert code == 0
    assert doc["f"]["monogenic"] and not doc["g"]["monogenic"]
    assert doc["g"]["uniform_value"] == ["0", "0", "0", "0", "0", "2", "0", "0"]


def test_monogenic_demo_half_step_same_values(capsys):
    _, a, _ = run(capsys, "monogenic-demo", "--radius", "1")
    _, b, _ = run(capsys, "monogenic-demo", "--radius", "1", "--h", "1/2")
    a.pop("h"), b.pop("h")
    assert a == b


def test_monogenic_demo_identity_multiplier(capsys):
    code, doc, _ = run(capsys, "monogenic-demo", "--radius", "1", "--multiplier", "0")
    assert code == 0 and doc["g"]["monogenic"]


@pytest.mark.parametrize("argv", [
    ["stokes", "--theorem", "T2", "--region", "whole"],
    ["stokes", "--tol", "1e-9"],
    ["stokes", "--radius", "4"],
    ["stokes", "--mode", "float"],
    ["stokes", "--h", "2/4"],
    ["stokes", "--h", "0"],
    ["stokes", "--h-power", "6"],
    ["stokes", "--sign", "zero"],
    ["verify-algebra", "--samples", "-1"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        sys.exit(main(argv))
    assert info.value.code == 2


def test_io_errors(capsys, tmp_path):
    code, _, err = run(capsys, "stokes", "--function", str(tmp_path / "missing.fn"))
    assert code == 3 and "cannot load" in err
    bad = tmp_path / "bad.fn"
    bad.write_text("h=1 region=whole mode=exact\n0 0 : 1\n")
    code, _, err = run(capsys, "stokes", "--function", str(bad))
    assert code == 3 and "line 2" in err
    code, _, _ = run(capsys, "census", "--out", str(tmp_path / "no" / "such" / "dir.json"))
    assert code == 3


def test_entry_point_subprocess(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "octolattice.cli", "census"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["associative"] == 344


def test_loaded_function_pair(capsys, tmp_path, golden_dir):
    path = str(golden_dir / "delta.fn")
    code, doc, _ = run(capsys, "stokes", "--function", path, "--function", path, "--sign", "plus")
    assert code == 0
    assert doc["reports"][0]["claim_lhs"] == ["0"] * 8
    assert np.array_equal(np.zeros(8), np.array(doc["reports"][0]["claim_lhs"], dtype=float))
