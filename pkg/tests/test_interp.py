import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, load_dir, script_for
from leroy import interp
from leroy import syntax as ast
from leroy.corpus_gen import random_corpus


def run(src, inputs=()):
    return interp.run(ast.parse_program(src), inputs)


def cpython(src, inputs=()):
    stdin = "".join(repr(v) + "\n" for v in inputs)
    r = subprocess.run([sys.executable, "-c", src], input=stdin, capture_output=True, text=True, timeout=30)
    assert r.returncode == 0, r.stderr
    return r.stdout


@pytest.mark.parametrize("src,inputs,out", [
    ("print(1 + 2)", (), "3\n"),
    ("x = eval(input())\nprint(x)", (True,), "True\n"),
    ("print([1] + [2, 3])", (), "[1, 2, 3]\n"),
    ("print({1: [True]})", (), "{1: [True]}\n"),
    ("print(True + True)", (), "2\n"),
    ("print(-True)", (), "-1\n"),
    ("print(print(1))", (), "1\nNone\n"),
    ("print(0 or [] or 5)", (), "5\n"),
    ("print(0 and 1)", (), "0\n"),
    ("print(1 if [] else 2)", (), "2\n"),
    ("xs = [1, 2]\nys = xs\nys[0] = 9\nprint(xs)", (), "[9, 2]\n"),
    ("print([1] is [1])\nxs = [1]\nprint(xs is xs)", (), "False\nTrue\n"),
    ("print(1 == True)\nprint(1 is True)", (), "True\nFalse\n"),
    ("d = {}\nd[1] = 2\nd[1] = 3\nprint(d)", (), "{1: 3}\n"),
    ("def f(a):\n    a[0] = 5\n    return 0\nxs = [1]\nprint(f(xs))\nprint(xs)", (), "0\n[5]\n"),
    ("def f():\n    return g\ng = 4\nprint(f())", (), "4\n"),
    ("def f():\n    print(1)\nprint(f())", (), "1\nNone\n"),
    ("x = eval(input())\ny = eval(input())\nprint(x + y)", ([1], [2]), "[1, 2]\n"),
    ("xs = [1, 2, 3]\nprint(xs[-1])", (), "3\n"),
])
def test_examples(src, inputs, out):
    assert run(src, inputs) == out
    assert cpython(src, inputs) == out


@pytest.mark.parametrize("src,message", [
    ("print(x)", "not defined"),
    ("print(1 + [1])", "unsupported operand"),
    ("print([1][3])", "out of range"),
    ("print(1[0])", "not subscriptable"),
    ("def f(a):\n    return a\nprint(f())", "takes 1 arguments"),
    ("x = 1\nprint(x())", "not callable"),
    ("print({[1]: 2})", "unhashable"),
    ("print({1: 2}[3])", "key error"),
    ("def f():\n    y = x\n    x = 1\n    return y\nx = 2\nprint(f())", "before assignment"),
    ("def f():\n    return f()\nprint(f())", "recursion"),
    ("print(-[1])", "unary"),
])
def test_runtime_errors(src, message):
    with pytest.raises(interp.P2RuntimeError, match=message):
        run(src)


def test_input_exhausted():
    with pytest.raises(interp.InputExhausted):
        run("x = eval(input())\ny = eval(input())", [1])


def test_input_values_are_fresh_copies():
    prog = ast.parse_program("x = eval(input())\nx[0] = 9\nprint(x)")
    script = [[1]]
    assert interp.run(prog, script) == "[9]\n"
    assert script == [[1]]


def test_partial_run_keeps_output():
    out, err = interp.run_partial(ast.parse_program("print(1)\nprint(x)"))
    assert out == "1\n"
    assert isinstance(err, interp.P2RuntimeError)


@pytest.mark.parametrize("text,values", [
    ("1\n\nTrue\n[1, {2: 3}]\n", [1, True, [1, {2: 3}]]),
    ("-4\n", [-4]),
])
def test_parse_script(text, values):
    assert interp.parse_script(text) == values


@pytest.mark.parametrize("text", ["'a'\n", "(1, 2)\n", "x\n", "None\n"])
def test_parse_script_rejects_non_literals(text):
    with pytest.raises(ValueError):
        interp.parse_script(text)


def test_deterministic():
    src = "x = [1]\ny = {2: x}\nprint(y)\nprint(x is y[2])"
    assert run(src) == run(src)


ROUNDTRIP, ROUNDTRIP_PROGRAMS = load_dir(FIXTURES / "roundtrip")


@pytest.mark.parametrize("path", ROUNDTRIP, ids=[p.stem for p in ROUNDTRIP])
def test_agrees_with_cpython_on_fixtures(path):
    src = path.read_text()
    script = script_for(path)
    assert interp.run(ast.parse_program(src), script) == cpython(src, script)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000))
def test_agrees_with_cpython_on_generated_programs(seed):
    srcs = random_corpus(seed, 3, lines=(3, 8), allow_input=True, function_rate=0.5)
    inputs = list(range(20))
    for src in srcs:
        assert run(src, inputs) == cpython(src, inputs)
