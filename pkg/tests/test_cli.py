import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from conftest import FIXTURES
from leroy import cli, interp, rewrite
from leroy import syntax as ast
from leroy.corpus_gen import random_corpus
from leroy.schema import REPORT_SCHEMA

PLANTED = FIXTURES / "planted"


def learn(tmp_path, corpus=PLANTED, *extra, out="out"):
    out = tmp_path / out
    code = cli.main(["learn", "--corpus", str(corpus), "--out", str(out), *extra])
    return code, out


def test_planted_run(tmp_path):
    code, out = learn(tmp_path, PLANTED, "--oracle-check")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    assert len(report["abstractions"]) == 1
    assert report["abstractions"][0]["sites"] == 3
    assert sorted(p.name for p in out.iterdir()) == ["library.py", "p1.py", "p2.py", "p3.py", "p4.py", "p5.py",
                                                   "report.json"]


def test_counts_recompute_from_files(tmp_path):
    code, out = learn(tmp_path, PLANTED)
    report = json.loads((out / "report.json").read_text())
    originals = [ast.parse_program(p.read_text()) for p in sorted(PLANTED.glob("*.py"))]
    emitted = [ast.parse_program(p.read_text()) for p in sorted(out.glob("p*.py"))]
    stripped = [rewrite.strip_library(p) for p in emitted]
    library = ast.parse_program((out / "library.py").read_text())
    assert report["original_nodes"] == sum(ast.ast_size(p) for p in originals)
    assert report["rewritten_nodes"] == sum(ast.ast_size(p) for p in stripped)
    assert report["rewritten_plus_library_nodes"] == report["rewritten_nodes"] + ast.ast_size(library)
    assert report["compression_ratio"] == round(report["original_nodes"] / report["rewritten_nodes"], 6)
    calls = rewrite.count_calls(stripped, [a["name"] for a in report["abstractions"]])
    assert calls == {a["name"]: a["sites"] for a in report["abstractions"]}


def test_emitted_programs_run(tmp_path):
    code, out = learn(tmp_path, PLANTED)
    for path in sorted(PLANTED.glob("*.py")):
        script = path.with_suffix(".in")
        inputs = interp.parse_script(script.read_text()) if script.exists() else []
        new = ast.parse_program((out / path.name).read_text())
        assert interp.run(new, inputs) == interp.run(ast.parse_program(path.read_text()), inputs)


def test_reruns_are_byte_identical(tmp_path, monkeypatch):
    _, a = learn(tmp_path, PLANTED, "--dump-sexpr", out="a")
    monkeypatch.setenv("LEROY_THREADS", "4")
    _, b = learn(tmp_path, PLANTED, "--dump-sexpr", out="b")
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert any(n.endswith(".sexpr") for n in names)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_huge_threshold_gives_empty_library(tmp_path):
    code, out = learn(tmp_path, PLANTED, "--min-size", "1000000")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["abstractions"] == []
    assert report["compression_ratio"] == 1.0
    assert report["library_growth_pct"] == 0
    assert (out / "library.py").read_text() == ""


def test_empty_directory(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    code, _ = learn(tmp_path, tmp_path / "empty")
    assert code == 1
    assert "no programs found" in capsys.readouterr().err


def test_missing_directory(tmp_path):
    assert learn(tmp_path, tmp_path / "nope")[0] == 1


def test_parse_error_location(tmp_path, capsys):
    corpus = tmp_path / "c"
    corpus.mkdir()
    (corpus / "ok.py").write_text("print(1)\n")
    (corpus / "bad.py").write_text("x = 1\nwhile x:\n    x = 0\n")
    code, _ = learn(tmp_path, corpus)
    assert code == 1
    assert f"{corpus / 'bad.py'}:2:1" in capsys.readouterr().err


@pytest.mark.parametrize("flags", [["--min-size", "0"], ["--max-arity", "-1"]])
def test_bad_options(tmp_path, flags):
    assert learn(tmp_path, PLANTED, *flags)[0] == 1


def test_bad_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("LEROY_THREADS", "many")
    assert learn(tmp_path, PLANTED)[0] == 1


def test_internal_error_exit_code(tmp_path, monkeypatch, capsys):
    def broken(*a, **k):
        raise rewrite.RewriteError("program 0 no longer parses")
    monkeypatch.setattr(cli, "learn", broken)
    assert learn(tmp_path, PLANTED)[0] == 2
    assert "internal error" in capsys.readouterr().err


def test_report_and_frontier_paths(tmp_path):
    code, out = learn(tmp_path, PLANTED, "--report", str(tmp_path / "r.json"),
                      "--dump-frontier", str(tmp_path / "f.tsv"))
    assert code == 0
    assert not (out / "report.json").exists()
    jsonschema.validate(json.loads((tmp_path / "r.json").read_text()), REPORT_SCHEMA)
    lines = (tmp_path / "f.tsv").read_text().splitlines()
    assert lines and all(int(l.split("\t")[0]) > 0 for l in lines)


def test_generated_corpus_with_oracle_check(tmp_path):
    corpus = tmp_path / "gen"
    corpus.mkdir()
    for i, src in enumerate(random_corpus(11, 12, lines=(3, 6), n_snippets=2, snippet_lines=(4, 6),
                                          allow_input=True)):
        (corpus / f"g{i:02d}.py").write_text(src)
        (corpus / f"g{i:02d}.in").write_text("\n".join(str(k) for k in range(10)) + "\n")
    code, out = learn(tmp_path, corpus, "--min-size", "5", "--oracle-check")
    assert code == 0
    jsonschema.validate(json.loads((out / "report.json").read_text()), REPORT_SCHEMA)


# --- small subcommands ------------------------------------------------------------

def test_lispify_and_delispify(tmp_path, capsys):
    src = tmp_path / "a.py"
    src.write_text("x = [1, 2]\nprint(x[0] + 3)\n")
    assert cli.main(["lispify", str(src)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("(StatementList (assign (name x) (list")
    sexpr = tmp_path / "a.sexpr"
    sexpr.write_text(text)
    assert cli.main(["delispify", str(sexpr)]) == 0
    assert capsys.readouterr().out == src.read_text()


@pytest.mark.parametrize("text", ["(add 1 2)", "(frob 1)", "(print"])
def test_delispify_rejects_non_programs(tmp_path, text):
    f = tmp_path / "t.sexpr"
    f.write_text(text)
    assert cli.main(["delispify", str(f)]) == 1


def test_run(tmp_path, capsys):
    src = tmp_path / "a.py"
    src.write_text("x = eval(input())\nprint(x + 1)\n")
    script = tmp_path / "a.in"
    script.write_text("41\n")
    assert cli.main(["run", str(src), "--input", str(script)]) == 0
    assert capsys.readouterr().out == "42\n"
    assert cli.main(["run", str(src)]) == 1
    script.write_text("'text'\n")
    assert cli.main(["run", str(src), "--input", str(script)]) == 1


def test_schema(capsys):
    assert cli.main(["schema"]) == 0
    assert json.loads(capsys.readouterr().out) == REPORT_SCHEMA


def test_console_script(tmp_path):
    exe = shutil.which("leroy")
    cmd = [exe] if exe else [sys.executable, "-m", "leroy"]
    r = subprocess.run(cmd + ["learn", "--corpus", str(PLANTED), "--out", str(tmp_path / "o")],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0, r.stderr
    assert "1 abstraction(s)" in r.stderr
