"""Show why one copy of a shared block can not become a call.

Three programs repeat ``print(k); x = x + 1``. In two of them the printed value
is a constant; in the third it is ``x`` itself, which the block also writes, so
passing it as an argument would freeze its value. That site is rejected and the
other two are rewritten.

    python3 demos/call_site_clash.py
"""
from pathlib import Path

from leroy import rewrite
from leroy import sexpr as sx
from leroy import syntax as ast
from leroy.closing import analyze_liveness, close
from leroy.search import Candidate, Pattern, find_matches

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "fig4"
PATTERN = "(StatementList (print #0) (StatementList (assign (name x) (add (name x) 1)) #rest))"


def main():
    paths = sorted(CORPUS.glob("*.py"))
    programs = [ast.parse_program(p.read_text(), str(p)) for p in paths]
    terms = [sx.lispify(p) for p in programs]
    pattern = Pattern.parse(PATTERN)
    cand = Candidate(pattern, find_matches(pattern, terms), 0)
    a = close(cand, analyze_liveness(cand, terms))
    print("candidate abstraction:")
    print(a.source())
    print()
    for s, ctx in zip(a.sites, a.facts.contexts):
        check = rewrite.validate_call_site(a, s, ctx)
        print(f"{paths[s.program].name:10} {check.verdict}")


if __name__ == "__main__":
    main()
