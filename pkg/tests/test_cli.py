import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from flatcone.cli import main
from flatcone.report import FIELDS, SCHEMA

JOBS = Path(__file__).resolve().parent.parent / "jobs"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def report_of(*argv):
    code, text = run(*argv, "--report", "-")
    return code, json.loads(text)


def test_flatness_condition_ii_on_the_two_parameter_family():
    code, rep = report_of("flatness", JOBS / "cubic_family.job", "--condition", "ii", "--degree-bound", "4")
    assert code == 0
    assert tuple(rep) == FIELDS and rep["schema"] == SCHEMA
    assert rep["degrees_checked"] == [0, 1, 2, 3, 4]
    assert all(p["tor1_vanishes"] for p in rep["verdict"]["pieces"])
    assert rep["timing_ms"] is None
    assert rep["counters"]


def test_human_text_and_report_file(tmp_path):
    dest = tmp_path / "r.json"
    code, text = run("flatness", JOBS / "cusp_line.job", "--report", dest, "--timing")
    assert code == 1
    assert "outcome: fails" in text
    rep = json.loads(dest.read_text())
    assert rep["verdict"]["outcome"] == "fails"
    assert rep["obstruction_support"] == ["y", "x"]
    assert isinstance(rep["timing_ms"], float)
    code, text = run("verify", dest)
    assert code == 0 and "all certificates verified" in text


def test_jacobian_and_expectations():
    code, rep = report_of("jacobian", JOBS / "cubic_curve.job", "--expect", "JF",
                          "--expect-central", "Jf")
    assert code == 0
    assert rep["verdict"]["J_F_equals_JF"] and rep["verdict"]["J_f_equals_Jf"]
    assert {c["kind"] for c in rep["certificates"]} == {"groebner-basis", "ideal-equality"}


def test_jacobian_mismatch_exits_one():
    code, _ = run("jacobian", JOBS / "cubic_curve.job", "--expect", "Jf")
    assert code == 1


def test_lift_relation():
    code, rep = report_of("lift-relation", JOBS / "cubic_family.job", "--relation", "rel")
    assert code == 0 and rep["verdict"]["lift"] == ["0", "y", "-2*z"]


def test_local_membership_and_assoc_prime():
    code, text = run("local-membership", JOBS / "sextic_membership.job", "--poly", "fz", "--ideal", "I",
                     "--prime", "P")
    assert code == 1 and "False" in text
    code, rep = report_of("assoc-prime", JOBS / "cubic_primes.job", "--ideal", "Jf",
                          "--prime", "P1", "--prime", "P2", "--prime", "P3")
    assert code == 0
    code, _ = run("assoc-prime", JOBS / "cubic_primes.job", "--ideal", "Jf", "--prime", "N1")
    assert code == 1


def test_ci_check_and_j_invariant():
    assert run("ci-check", JOBS / "double_line.job", "--generators", "g")[0] == 0
    code, rep = report_of("j-invariant", JOBS / "double_line.job", "--poly", "f", "--ideal", "I")
    assert code == 0 and rep["verdict"]["j"] == 0


def test_normal_cone_without_parameters():
    code, rep = report_of("normal-cone", JOBS / "cubic_primes.job", "--ideal", "Jf",
                          "--degree-bound", "2")
    assert code == 0
    assert rep["verdict"]["piece_generators"] == [1, 3, 6]


def test_stratify_homogeneous():
    code, rep = report_of("stratify-homogeneous", "-n", "1", "-d", "2")
    assert code == 0
    assert rep["verdict"]["count"] == 2
    assert len(rep["strata"]) == 2


def test_run_executes_check_lines():
    code, text = run("run", JOBS / "cusp_unfolding.job")
    assert code == 0 and "flat-everywhere" in text
    code, text = run("run", JOBS / "cubic_primes.job", "--report", "-")
    assert code == 1
    assert text.count("== assoc-prime") == 3


@pytest.mark.parametrize("argv", [
    [],
    ["flatness"],
    ["flatness", "missing.job"],
    ["flatness", JOBS / "cubic_family.job", "--condition", "iii"],
    ["flatness", JOBS / "cubic_family.job", "--family", "nope"],
    ["local-membership", JOBS / "sextic_membership.job", "--poly", "fz", "--ideal", "I", "--prime", "zz"],
    ["stratify-homogeneous", "-n", "1", "-d", "0"],
    ["flatness", JOBS / "cubic_family.job", "--evidence", "f,Jf"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert run(*argv)[0] == 2
    assert "flatcone: error" in capsys.readouterr().err


def test_malformed_job_has_position(tmp_path, capsys):
    bad = tmp_path / "bad.job"
    bad.write_text("ring x y ;\nlet f = x^2 + * y ;\n")
    assert run("jacobian", bad)[0] == 2
    assert f"{bad}:2:15:" in capsys.readouterr().err


def test_resource_limit_exits_three(capsys):
    code, _ = run("flatness", JOBS / "cubic_family.job", "--condition", "ii", "--degree-bound", "4",
                  "--max-degree", "3")
    assert code == 3
    assert "resource bound exceeded" in capsys.readouterr().err


def test_verify_detects_tampering(tmp_path):
    code, text = run("flatness", JOBS / "cusp_line.job", "--report", "-")
    rep = json.loads(text)
    rep["certificates"][0]["vanishes"] = True
    path = tmp_path / "r.json"
    path.write_text(json.dumps(rep))
    code, text = run("verify", path)
    assert code == 1 and "FAILED" in text
    path.write_text("{not json")
    assert run("verify", path)[0] == 2


@pytest.mark.no_gb_check
def test_reports_are_identical_across_hash_seeds():
    outputs = set()
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-m", "flatcone.cli", "flatness", str(JOBS / "cubic_family.job"),
             "--condition", "ii", "--degree-bound", "3", "--report", "-"],
            capture_output=True, env=env, check=False)
        assert proc.returncode == 0
        outputs.add(proc.stdout)
    assert len(outputs) == 1
