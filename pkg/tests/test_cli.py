import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from stable_stats.cli import RESULT_SCHEMA, main


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def doc(capsys, *argv):
    status, out, _ = run(capsys, *argv)
    data = json.loads(out)
    jsonschema.validate(data, RESULT_SCHEMA)
    return status, data


def test_expect_exact(capsys):
    status, data = doc(capsys, "expect", "--family", "gl", "--q", "2", "--class", "eig:1", "--n", "3", "--mode", "exact")
    assert status == 0
    (r,) = data["results"]
    assert r["value"] == {"num": "1", "den": "1"} and r["factors"] == ["eig:1"]
    assert data["config"]["q"] == 2 and "seed" not in data["config"]


def test_scan_sym(capsys):
    status, data = doc(capsys, "scan", "--family", "sym", "--class", "cycletype:[2]", "--n", "2..6")
    assert status == 0 and data["verdict"] == "stable"
    assert [r["value"] for r in data["results"]] == [{"num": "1", "den": "2"}] * 5
    assert [r["n"] for r in data["results"]] == [2, 3, 4, 5, 6]


def test_expand(capsys):
    status, data = doc(capsys, "expand", "--family", "gl", "--q", "2", "--lhs", "eig:1", "--rhs", "eig:1")
    assert status == 0
    assert [(t["label"], t["numerator"]) for t in data["expansion"]] == [("eig:1", "1"), ("invfac:[x+1, x+1]", "6")]


def test_moment_mc_deterministic(capsys):
    argv = ["moment", "--q", "3", "--class", "eig:1", "--class", "eig:2", "--n", "3", "--mode", "mc",
            "--samples", "500", "--seed", "42"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    data = json.loads(first)
    jsonschema.validate(data, RESULT_SCHEMA)
    assert data["results"][0]["value"]["samples"] == 500


def test_classes_csv(capsys):
    status, out, _ = run(capsys, "classes", "--q", "2", "--d", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert status == 0 and rows[0] == ["label", "size", "representative"]
    assert sorted(int(r[1]) for r in rows[1:]) == [1, 2, 3]


def test_scan_csv(capsys):
    status, out, _ = run(capsys, "scan", "--q", "2", "--class", "eig:1", "--n", "1..3", "--format", "csv")
    assert status == 0
    assert out.splitlines()[1].startswith("1,exact,eig:1,1,1")


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["expect", "--q", "3", "--class", "invfac:[x^2+", "--n", "2"], "column 13"),
        (["expect", "--q", "2", "--class", "eig:1", "--n", "6", "--cap", "1000"], "cap of 1000"),
        (["expect", "--q", "6", "--class", "eig:1", "--n", "2"], "prime power"),
        (["expect", "--class", "eig:1", "--n", "2"], "--q is required"),
        (["expect", "--q", "2", "--class", "eig:1", "--n", "2", "--mode", "mc"], "--samples and --seed"),
        (["expect", "--q", "2", "--class", "eig:1", "--n", "4..2"], "--n"),
        (["expect", "--q", "2", "--class", "eig:1", "--class", "eig:1", "--n", "2"], "exactly one"),
        (["expect", "--family", "sym", "--q", "2", "--class", "eig:1", "--n", "2"], "family sym"),
        (["expand", "--family", "sp", "--q", "2", "--lhs", "sp:0", "--rhs", "sp:0"], "sp family"),
        (["verify", "--only", "42"], "no such check"),
    ],
)
def test_usage_errors_exit_2(capsys, argv, needle):
    status, out, err = run(capsys, *argv)
    assert status == 2 and out == ""
    assert needle in err


def test_argparse_error_exit_2(capsys):
    status, _, _ = run(capsys, "expect", "--family", "orthogonal")
    assert status == 2


def test_verify_subset(capsys):
    status, data = doc(capsys, "verify", "--only", "6")
    assert status == 0
    assert data["checks"][0]["id"] == 6 and data["checks"][0]["passed"]


def test_verify_failure_exits_1(capsys):
    # the literal q=3 fixed-line criterion is known to fail (see README)
    status, data = doc(capsys, "verify", "--only", "2")
    assert status == 1 and not data["checks"][0]["passed"]


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "stable_stats", "expect", "--q", "3", "--class", "eig:2", "--n", "2"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"][0]["value"] == {"num": "1", "den": "2"}
