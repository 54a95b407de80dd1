"""Command-line entry point.

    leroy learn --corpus DIR --out DIR [--min-size N] [--max-arity N] [--report FILE]
                [--dump-sexpr] [--dump-frontier FILE] [--oracle-check]
    leroy lispify FILE
    leroy delispify FILE
    leroy run FILE [--input SCRIPT]
    leroy schema

Exit status: 0 on success, 1 on bad input (parse errors, missing corpus),
2 when an internal invariant breaks.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import interp, rewrite
from . import sexpr as sx
from . import syntax as ast
from .learn import learn
from .schema import REPORT_SCHEMA
from .search import SearchConfig, SearchError

log = logging.getLogger("leroy")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class InputError(Exception):
    pass


def thread_count() -> int:
    raw = os.environ.get("LEROY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"LEROY_THREADS must be an integer, got {raw!r}") from None


def load_corpus(corpus: Path, threads: int) -> tuple:
    """(paths, programs) for every ``*.py`` in ``corpus``, in filename order."""
    if not corpus.is_dir():
        raise InputError(f"{corpus}: not a directory")
    paths = sorted(p for p in corpus.iterdir() if p.suffix == ".py" and p.is_file())
    if not paths:
        raise InputError(f"{corpus}: no programs found")

    def parse(path):
        return ast.parse_program(path.read_text(encoding="utf-8"), str(path))
    with ThreadPoolExecutor(max_workers=threads) as ex:
        programs = list(ex.map(parse, paths))
    return paths, programs


def _script_for(path: Path):
    script = path.with_suffix(".in")
    return interp.parse_script(script.read_text(encoding="utf-8")) if script.exists() else None


def oracle_check(paths, before, after, library) -> list:
    """Files whose interpreter output changed; programs without a script get no input."""
    bad = []
    for path, old, new in zip(paths, before, after):
        inputs = _script_for(path) or []
        expected = interp.run_partial(old, inputs)
        got = interp.run_partial(rewrite.standalone(new, library), inputs)
        if (expected[0], str(expected[1])) != (got[0], str(got[1])):
            bad.append(path.name)
    return bad


def write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _source(program: ast.Program) -> str:
    text = ast.unparse(program)
    return text + "\n" if text else ""


def cmd_learn(args) -> int:
    threads = thread_count()
    paths, programs = load_corpus(Path(args.corpus), threads)
    out = Path(args.out)
    cfg = SearchConfig(min_body_size=args.min_size, max_arity=args.max_arity)
    frontier = [] if args.dump_frontier else None
    result = learn(programs, cfg, threads=threads, frontier=frontier)
    if args.dump_sexpr:
        for path, p in zip(paths, programs):
            write_text(out / (path.stem + ".sexpr"), sx.to_text(sx.lispify(p)) + "\n")
    for path, p in zip(paths, result.rewritten):
        write_text(out / path.name, _source(rewrite.standalone(p, result.library)))
    write_text(out / "library.py", _source(rewrite.library_program(result.library)))
    report = result.report.to_json()
    report_path = Path(args.report) if args.report else out / "report.json"
    write_text(report_path, json.dumps(report, indent=2) + "\n")
    if frontier is not None:
        write_text(Path(args.dump_frontier), "".join(f"{u}\t{t}\n" for t, u in frontier))
    print(f"{len(result.library)} abstraction(s); compression {report['compression_ratio']:.4f}x; "
          f"library growth {report['library_growth_pct']:+.2f}%", file=sys.stderr)
    if args.oracle_check:
        bad = oracle_check(paths, programs, result.rewritten, result.library)
        if bad:
            print(f"oracle check failed: output changed for {', '.join(bad)}", file=sys.stderr)
            return EXIT_INTERNAL
        print(f"oracle check passed on {len(paths)} program(s)", file=sys.stderr)
    return EXIT_OK


def cmd_lispify(args) -> int:
    p = ast.parse_program(Path(args.file).read_text(encoding="utf-8"), args.file)
    print(sx.to_text(sx.lispify(p)))
    return EXIT_OK


def cmd_delispify(args) -> int:
    try:
        term = sx.parse_sexpr(Path(args.file).read_text(encoding="utf-8"))
        tree = sx.delispify(term)
    except (sx.SExprSyntaxError, sx.UnknownSymbol) as e:
        raise InputError(f"{args.file}: {e}") from None
    if not isinstance(tree, ast.Program):
        raise InputError(f"{args.file}: not a complete program")
    print(ast.unparse(tree))
    return EXIT_OK


def cmd_run(args) -> int:
    p = ast.parse_program(Path(args.file).read_text(encoding="utf-8"), args.file)
    try:
        inputs = interp.parse_script(Path(args.input).read_text(encoding="utf-8")) if args.input else []
    except ValueError as e:
        raise InputError(f"{args.input}: {e}") from None
    out, err = interp.run_partial(p, inputs)
    sys.stdout.write(out)
    if err is not None:
        print(f"{args.file}: runtime error: {err}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(REPORT_SCHEMA, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leroy", description="Learn a function library from P2 programs.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a library and rewrite the corpus")
    p.add_argument("--corpus", required=True, help="directory of .py programs")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--min-size", type=int, default=20, help="minimum abstraction body size in AST nodes")
    p.add_argument("--max-arity", type=int, default=4, help="maximum number of hole parameters")
    p.add_argument("--report", help="report path (default OUT/report.json)")
    p.add_argument("--dump-sexpr", action="store_true", help="write OUT/<name>.sexpr for each input")
    p.add_argument("--dump-frontier", metavar="FILE", help="write every scored pattern with positive utility")
    p.add_argument("--oracle-check", action="store_true",
                   help="compare interpreter output before and after (uses <name>.in scripts)")
    p.set_defaults(fn=cmd_learn)

    p = sub.add_parser("lispify", help="print the s-expression of a program")
    p.add_argument("file")
    p.set_defaults(fn=cmd_lispify)

    p = sub.add_parser("delispify", help="print the program of an s-expression")
    p.add_argument("file")
    p.set_defaults(fn=cmd_delispify)

    p = sub.add_parser("run", help="run a program with the reference interpreter")
    p.add_argument("file")
    p.add_argument("--input", help="input script, one literal per line")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("schema", help="print the JSON schema of report.json")
    p.set_defaults(fn=cmd_schema)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        if getattr(args, "min_size", 1) < 1 or getattr(args, "max_arity", 0) < 0:
            raise InputError("--min-size must be >= 1 and --max-arity >= 0")
        return args.fn(args)
    except ast.P2SyntaxError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT
    except (InputError, OSError) as e:
        print(f"leroy: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (rewrite.RewriteError, SearchError) as e:
        print(f"leroy: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
