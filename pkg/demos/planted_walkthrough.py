"""Walk through one learning run on the planted corpus.

Five small programs share a copied block. The run finds it, closes it into a
function, rewrites every copy into a call and checks that outputs are unchanged.

    python3 demos/planted_walkthrough.py
"""
from pathlib import Path

from leroy import interp, rewrite
from leroy import sexpr as sx
from leroy import syntax as ast
from leroy.learn import learn
from leroy.search import SearchConfig

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "planted"


def script(path: Path) -> list:
    s = path.with_suffix(".in")
    return interp.parse_script(s.read_text()) if s.exists() else []


def main():
    paths = sorted(CORPUS.glob("*.py"))
    programs = [ast.parse_program(p.read_text(), str(p)) for p in paths]
    print(f"corpus: {len(programs)} programs")
    print(f"first program as an s-expression:\n  {sx.to_text(sx.lispify(programs[0]))}\n")

    result = learn(programs, SearchConfig(min_body_size=20))
    print("learned library:")
    print(ast.unparse(rewrite.library_program(result.library)))
    print()
    for path, p in zip(paths, result.rewritten):
        print(f"--- {path.name} after rewriting")
        print(ast.unparse(p))

    r = result.report.to_json()
    print(f"\nnodes: {r['original_nodes']} before, {r['rewritten_nodes']} after, "
          f"{r['rewritten_plus_library_nodes']} counting the library")
    print(f"compression {r['compression_ratio']:.4f}x, library growth {r['library_growth_pct']:+.2f}%")

    for path, old, new in zip(paths, programs, result.rewritten):
        before = interp.run_partial(old, script(path))
        after = interp.run_partial(rewrite.standalone(new, result.library), script(path))
        assert (before[0], str(before[1])) == (after[0], str(after[1])), path.name
    print("interpreter output unchanged on every program")


if __name__ == "__main__":
    main()
