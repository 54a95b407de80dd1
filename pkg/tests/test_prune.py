import pytest
from hypothesis import given, settings, strategies as st

from leroy import prune
from leroy import sexpr as sx
from leroy import syntax as ast
from leroy.closing import ClosureFailure, analyze_liveness, close
from leroy.corpus_gen import random_corpus
from leroy.prune import Reason
from leroy.search import Candidate, Pattern, SearchConfig, find_matches, search_best

M, P, S, C = Reason.MACRO_LIKE, Reason.INVALID_PARAMETER, Reason.TOO_SMALL, Reason.CALLS_ABSTRACTION


def _print_list(n):
    return sx.at_path(sx.lispify(ast.parse_program("print([" + ", ".join(["1"] * n) + "])")), (0,))


INVALID = [
    ("(add #0)", M),
    ("(add 1 2 3)", M),
    ("(print)", M),
    ("(ifexp #0 #1)", M),
    ("(add (eq 1) 2)", M),
    ("(StatementList (print 1))", M),
    ("(compare #0 #1 #2)", P),
    ("(binop #0 #1 #2)", P),
    ("(assign #0 #1)", P),
    ("(name #0)", P),
    ("(list #0)", P),
    ("(call (name f) #0)", P),
    ("(dict (KeyDatumList #0 #1 #2))", P),
    ("(StatementList (print 1) #0)", P),
    ("(StatementList (print 1) (StatementList #0 eps))", P),
    ("(StatementList (def f #0 (StatementList (return 1) eps)) eps)", P),
    ("(print (add #0 #1))", S),
    ("(expr (call (name _leroy_fn0) eps))", C),
]


@pytest.mark.parametrize("text,reason", INVALID)
def test_invalid_candidates(text, reason):
    v = prune.check_all(sx.parse_sexpr(text), 20 if reason is S else 1)
    assert not v.kept
    assert v.reason is reason
    assert v.detail


@pytest.mark.parametrize("text", [
    "(StatementList (print 1) #rest)",
    "(subscript #0 #1)",
    "(assign (subscript #0 #1) #2)",
    "(print (add #0 #1))",
    "(StatementList (assign (name x) #0) (StatementList (print (name x)) #rest))",
    "(ifexp #0 #1 #2)",
    "(compare #0 == #1)",
])
def test_valid_candidates_are_kept(text):
    assert prune.check_all(sx.parse_sexpr(text), 1).kept


def test_size_boundary():
    # 17 one-node elements: print + list + 17 = 19; 18 elements give 20
    small, exact = _print_list(17), _print_list(18)
    assert prune.body_size(small) == 19
    assert prune.body_size(exact) == 20
    assert prune.check_all(small, 20).reason is S
    assert prune.check_all(exact, 20).kept


def test_holes_count_as_one_node():
    assert prune.body_size(sx.parse_sexpr("(print (add #0 #1))")) == 4
    assert prune.body_size(sx.parse_sexpr("(print (add (name a) (name b)))")) == 4


def test_checks_run_in_order():
    # both macro-like and too small: the structural reason is reported
    assert prune.check_all(sx.parse_sexpr("(add #0)"), 50).reason is M
    # both an invalid hole and a learned call
    assert prune.check_all(sx.parse_sexpr("(call (name _leroy_fn0) #0)"), 1).reason is P


def test_custom_prefix():
    body = sx.parse_sexpr("(expr (call (name lib_f) eps))")
    assert prune.check_all(body, 1).kept
    assert prune.check_all(body, 1, prefix="lib_").reason is C


def test_stats_count_reasons():
    stats = prune.PruneStats()
    for text, reason in INVALID:
        stats.record(prune.check_all(sx.parse_sexpr(text), 20 if reason is S else 1))
    stats.record(prune.KEPT)
    assert stats.total == len(INVALID)
    assert stats.as_dict() == {"macro_like": 6, "invalid_parameter": 10, "too_small": 1, "calls_abstraction": 1}


def test_kept_verdict_has_no_reason():
    with pytest.raises(ValueError):
        prune.PruneVerdict(True, M)


def _kept_candidates(corpus, min_size):
    frontier = []
    search_best(corpus, SearchConfig(min_body_size=min_size), frontier=frontier)
    for text, _ in frontier:
        p = Pattern.parse(text)
        if prune.check_all(p.body, min_size).kept:
            yield p


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000))
def test_kept_candidates_close_to_parseable_functions(seed):
    corpus = [sx.lispify(ast.parse_program(s))
              for s in random_corpus(seed, 5, lines=(2, 4), snippet_lines=(2, 3))]
    for p in list(_kept_candidates(corpus, 3))[:30]:
        sites = find_matches(p, corpus)
        c = Candidate(p, sites, 0)
        try:
            closed = close(c, analyze_liveness(c, corpus))
        except ClosureFailure:
            continue
        text = closed.source()
        again = ast.parse_program(text)
        assert ast.unparse(again) == text
