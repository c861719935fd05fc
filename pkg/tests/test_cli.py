from pathlib import Path

import pytest

from lenode.cli import main

ROOT = Path(__file__).parent.parent
BASICS = str(ROOT / "demos" / "programs" / "basics.ldl")
MACHINES = ROOT / "demos" / "machines"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_polynomial(capsys):
    code, out, _ = run(capsys, "analyze", BASICS, "P")
    assert code == 0
    assert out.splitlines() == ["fn P", "x:1 (essentially linear)", "y:3", "z:0 (essentially constant)"]


def test_analyze_linear_system(capsys):
    code, out, _ = run(capsys, "analyze", BASICS, "geo")
    assert code == 0
    assert "essentially linear" in out.splitlines()
    assert "A[1][1] = half(half(1)) - 1" in out


def test_analyze_rejects_square(capsys):
    code, out, _ = run(capsys, "analyze", BASICS, "square")
    assert code == 1
    assert out.splitlines()[-1] == "NotEssentiallyLinear at component 0"


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["pow2", "7"], "8"),
        (["length", "37"], "6"),
        (["mix", "3", "5.5"], "57/2^3 7.125"),
        (["mix", "1", "5"], "33/2^3 4.125"),
        (["mix", "1", "5/2^1"], "23/2^3 2.875"),
    ],
)
def test_eval(capsys, argv, expected):
    code, out, _ = run(capsys, "eval", BASICS, *argv)
    assert code == 0 and out.strip() == expected


def test_limit_eval(capsys):
    code, out, _ = run(capsys, "limit-eval", BASICS, "third", "--prec", "10")
    assert code == 0 and out.strip() == "683/2^11 0.33349609375"
    code, out, _ = run(capsys, "limit-eval", BASICS, "vanish", "--prec", "6")
    # operand at 2^p(7) = 2^8 is 2 * 2^-8
    assert code == 0 and out.strip() == "1/2^7 0.0078125"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", BASICS, "third"],
        ["eval", BASICS, "nope"],
        ["eval", BASICS, "pow2", "1/3"],
        ["eval", BASICS, "pow2", "2.5"],
        ["eval", "/nonexistent.ldl", "f"],
        ["limit-eval", BASICS, "third"],
        ["limit-eval", BASICS, "third", "--prec", "-1"],
        ["frobnicate"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_run_tm(capsys):
    succ = str(MACHINES / "successor.tm")
    assert run(capsys, "run-tm", succ, "13", "--check")[:2] == (0, "33 MATCH\n")
    assert run(capsys, "run-tm", succ, "-")[:2] == (0, "3\n")
    assert run(capsys, "run-tm", str(MACHINES / "identity.tm"), "-", "--steps", "0")[:2] == (0, "<empty>\n")
    code, _, err = run(capsys, "run-tm", succ, "12")
    assert code == 2 and "BadSymbol" in err


def test_compile_tm_output(capsys, tmp_path):
    target = tmp_path / "succ.ldl"
    code, out, _ = run(capsys, "compile-tm", str(MACHINES / "successor.tm"), "-o", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert "fn next_q(" in text and "llode exec(" in text
    code, out, _ = run(capsys, "analyze", str(target), "exec")
    assert code == 0 and "essentially linear" in out.splitlines()
    code, out, _ = run(capsys, "eval", str(target), "next_rbar", "0", "0", "7/2^4")
    assert code == 0


def test_selftest_deterministic(capsys):
    code, first, _ = run(capsys, "selftest", "--seed", "5")
    assert code == 0
    _, second, _ = run(capsys, "selftest", "--seed", "5")
    assert first == second
    lines = first.splitlines()
    assert lines[0] == "selftest seed=5" and lines[-1] == "8/8 suites passed"
    assert len(lines) == 10


def test_selftest_corrupt(capsys):
    code, out, _ = run(capsys, "selftest", "--corrupt-fixture")
    assert code == 1
    assert "machines: FAIL" in out
    assert out.splitlines()[-1] == "7/8 suites passed"
