import json
import subprocess
import sys
from pathlib import Path

import pytest

from odelin.cli import main

ROOT = Path(__file__).resolve().parent.parent
EMDEN = "y'' + 3*y*y' + y^3 = 0"
RATIONAL = "x*y'' - y'^3 - y' = 0"


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_check_negative_control(capsys):
    code, out = run(["check", "y'' = y^2"], capsys)
    assert code == 1
    assert "L1, L2:   0, -6" in out


def test_check_linearizable(capsys):
    code, out = run(["check", EMDEN], capsys)
    assert code == 0 and "linearizable" in out


def test_lie_verify(capsys):
    assert run(["lie-verify", EMDEN, "--w", "1/y", "--z", "y"], capsys)[0] == 0
    assert run(["lie-verify", EMDEN, "--w", "0", "--z", "0"], capsys)[0] == 2


def test_lambda_verify(capsys):
    assert run(["lambda-verify", EMDEN, "--lambda", "y'/y - y"], capsys)[0] == 0
    assert run(["lambda-verify", EMDEN, "--lambda", "y'"], capsys)[0] == 2


def test_transform_verify(capsys):
    code, out = run(["transform-verify", RATIONAL, "--phi", "1/y", "--psi", "(x^2+y^2)/y"], capsys)
    assert code == 0
    assert "first_integrals=ok" in out


def test_solve_with_aux_gives_implicit_solution(capsys):
    code, out = run(["solve", RATIONAL, "--w", "1/y", "--z", "0"], capsys)
    assert code == 0
    assert "solution: (x^2 + y^2)/y = c1*(1/y) + c2" in out


def test_negative_value_via_equals(capsys):
    eq = "y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0"
    code, _ = run(["linearize", eq, "--w=-1/(x+y)", "--z", "0"], capsys)
    assert code == 0


def test_solve_emden_json(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _ = run(["--json", str(path), "solve", EMDEN], capsys)
    assert code == 0
    rep = json.loads(path.read_text(encoding="utf-8"))
    assert rep["status"] == 0
    assert all(rep["verified"].values())
    assert rep["numeric"]["rk4_derived"]["max_deviation"] < 1e-5


def test_json_is_byte_identical_for_same_seed(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        main(["solve", EMDEN, "--seed", "1F", "--json", str(p)])
        outs.append(p.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    other = tmp_path / "other.json"
    main(["solve", EMDEN, "--seed", "20", "--json", str(other)])
    assert other.read_bytes() != outs[0]


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "y'' = y'^4"],
        ["check", "y'' = k*y"],
        ["check", "y'' = (x"],
        ["lie-verify", EMDEN, "--w", "1/y"],
        ["solve", EMDEN, "--ansatz", "bogus"],
        ["--seed", "zz", "check", EMDEN],
    ],
)
def test_input_errors_exit_3(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 3


def test_parameters(capsys):
    eq = "y'' + (b+3*k*y)*y' + k^2*y^3 + b*k*y^2 + b^2/4*y = 0"
    code, out = run(["solve", eq, "--param", "b,k"], capsys)
    assert code == 0
    assert "explicit:" in out


def test_missing_aux_is_inconclusive(capsys):
    code, out = run(["linearize", "y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' + 1/x = 0"], capsys)
    assert code in (1, 2)


def test_numeric_only_zero_is_a_warning(capsys):
    code, out = run(["check", "y'' + y*(ln(x*y) - ln(x) - ln(y))*y' = 0"], capsys)
    assert code == 2
    assert "vanishes at sample points but not symbolically" in out


def test_corpus(capsys):
    code, out = run(["corpus", str(ROOT / "corpus")], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") == len(list((ROOT / "corpus").glob("*.json")))


def test_corpus_missing_directory(tmp_path, capsys):
    assert run(["corpus", str(tmp_path)], capsys)[0] == 3


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "odelin.cli", "check", "y'' = y^2"], capture_output=True, text=True)
    assert r.returncode == 1
