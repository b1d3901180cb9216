import json
import subprocess
import sys

import pytest

from higherspin import cli
from higherspin.liealg import PoleError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)



def test_construct_reports_coefficients(capsys):
    code, out = run(capsys, "construct", "--m", "6", "--lambda", "1,1")
    assert code == 0
    assert out["spec"] == {"m": 6, "lambda": [1, 1]}
    assert [c["value"] for c in out["coefficients"]] == ["-2/3", "-4/3"]
    assert out["coefficients"][0]["expr"] == "-4/(2*E1+m-2)"
    assert out["projector"] == ["pi[e1-e2]", "pi[-2e2]", "pi[-e1-e2]", "pi[-2e1]"]
    assert out["word"][0] == {"coef": "1", "items": [{"gen": "InnerDD", "i": 0, "j": 0}]}


def test_construct_spin_two_matches_reference(capsys):
    code, out = run(capsys, "construct", "--m", "4", "--lambda", "2")
    assert code == 0
    assert out["reference"]["agrees_on_basis"] is True
    assert [t["coef"] for t in out["reference"]["word"]] == ["1", "-2/3", "1/6"]


def test_construct_rejects_small_dimension(capsys):
    code, out = run(capsys, "construct", "--m", "3", "--lambda", "1,1")
    assert code == 2
    assert "k < floor(m/2)" in out["error"]


def test_k_must_match_lambda(capsys):
    code, out = run(capsys, "construct", "--m", "6", "--k", "1", "--lambda", "1,1")
    assert code == 2


def test_verify_passes(capsys):
    code, out = run(capsys, "verify", "--m", "5", "--lambda", "1", "--x-degree", "3", "--trials", "5", "--seed", "42")
    assert code == 0
    assert [c["name"] for c in out["checks"]] == ["translation", "rotation", "dilation", "sct"]
    assert all(c["pass"] and c["counterexample"] is None for c in out["checks"])


def test_verify_subset_of_checks(capsys):
    code, out = run(capsys, "verify", "--m", "6", "--lambda", "2,1", "--checks", "sct", "--trials", "3", "--seed", "7")
    assert code == 0
    assert [c["name"] for c in out["checks"]] == ["sct"]


@pytest.mark.parametrize("mutation", ["c1_plus_one", "drop_factor"])
def test_verify_mutation_fails(capsys, mutation):
    code, out = run(
        capsys, "verify", "--m", "6", "--lambda", "2,1", "--checks", "sct", "--trials", "3", "--seed", "7",
        "--mutate", mutation,
    )
    assert code == 1
    (check,) = out["checks"]
    assert not check["pass"] and check["counterexample"]


def test_vacuous_mutation_is_invalid_input(capsys):
    code, out = run(capsys, "verify", "--m", "5", "--lambda", "1", "--seed", "1", "--mutate", "drop_factor")
    assert code == 2
    assert "error" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--m", "5", "--lambda", "1"],
        ["verify", "--m", "5", "--lambda", "1", "--seed", "1", "--trials", "0"],
        ["verify", "--m", "5", "--lambda", "1", "--seed", "1", "--x-degree", "-1"],
        ["kernel", "--m", "5", "--lambda", "1"],
        ["kernel", "--m", "5", "--lambda", "1", "--lambda0", "-1"],
        ["decompose", "--m", "5", "--lambda", "1,1", "--lambda0", "2"],
        ["dim", "--m", "5"],
        ["construct", "--lambda", "1"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2
    assert out["error"]


@pytest.mark.parametrize("argv", [["bogus"], ["verify", "--checks", "nope"], ["dim", "--m", "4", "--mu", "a"]])
def test_parse_errors_exit_two(capsys, argv):
    assert cli.main(argv) == 2
    capsys.readouterr()


def test_decompose(capsys):
    code, out = run(capsys, "decompose", "--m", "6", "--lambda", "1,1", "--lambda0", "3")
    assert code == 0
    assert [s["mu"] for s in out["summands"]] == [[3, 1, 1], [4, 1, 0]]
    assert out["total_dim"] == out["kernel_dim"] == 636
    assert out["consistent"] is True and out["diagnostics"] == []


def test_dim_and_kernel(capsys):
    assert run(capsys, "dim", "--m", "3", "--mu", "2") == (0, {"mu": [2], "m": 3, "dim": 5})
    code, out = run(capsys, "kernel", "--m", "5", "--lambda", "0", "--lambda0", "2")
    # harmonic quadratics on five variables
    assert code == 0 and out["dim"] == 14


def test_size_refusal(capsys, monkeypatch):
    monkeypatch.setenv("HSL_MAX_MONOMIALS", "10")
    code, out = run(capsys, "dim", "--m", "6", "--mu", "2,1")
    assert code == 2
    assert "HSL_MAX_MONOMIALS" in out["error"]


def test_pole_exit_code(capsys, monkeypatch):
    def boom(args):
        raise PoleError("1/(E1-E2)", (0, 1, 1), 3)

    monkeypatch.setitem(cli.COMMANDS, "dim", boom)
    code, out = run(capsys, "dim", "--m", "3", "--mu", "2")
    assert code == 3
    assert out == {"error": "pole of 1/(E1-E2) at multidegree (0, 1, 1), m=3"}


def test_out_and_pretty(tmp_path, capsys):
    target = tmp_path / "dim.json"
    assert cli.main(["dim", "--m", "3", "--mu", "2", "--out", str(target), "--pretty"]) == 0
    assert capsys.readouterr().out == ""
    text = target.read_text()
    assert text.startswith("{\n  ")
    assert json.loads(text)["dim"] == 5


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "higherspin.cli", "verify", "--m", "5", "--lambda", "2", "--trials", "2", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True, env={"PYTHONHASHSEED": "123", "PATH": ""}).stdout
    assert a == b and a
