import pytest
from hypothesis import given, settings, strategies as st

from leroy import sexpr as sx
from leroy import syntax as ast
from leroy.corpus_gen import random_corpus
from leroy.sexpr import App, Atom, EPS, Hole, Slot


def lisp(source: str) -> str:
    return sx.to_text(sx.lispify(ast.parse_program(source)))


@pytest.mark.parametrize("source, text", [
    ("x = 1\ny = 1\nprint(x + y)",
     "(StatementList (assign (name x) 1) (StatementList (assign (name y) 1)"
     " (StatementList (print (add (name x) (name y))) eps)))"),
    ("print(0)", "(StatementList (print 0) eps)"),
    ("print(True != [])", "(StatementList (print (noteq True (list eps))) eps)"),
    ("d[1] = {2: 3}", "(StatementList (assign (subscript (name d) 1) (dict (KeyDatumList 2 3 eps))) eps)"),
    ("def f(a):\n    return a",
     "(StatementList (def f (ParamList a eps) (StatementList (return (name a)) eps)) eps)"),
    ("g(eval(input()), -1)",
     "(StatementList (expr (call (name g) (ExprList (evalinput) (ExprList (neg 1) eps)))) eps)"),
])
def test_lispify_examples(source, text):
    assert lisp(source) == text


def test_lispify_expression():
    assert sx.to_text(sx.lispify(ast.parse_expression("1 + 2"))) == "(add 1 2)"


def test_delispify_missing_child():
    tree = sx.delispify(sx.parse_sexpr("(add #0)"))
    assert isinstance(tree, sx.PartialTree)
    assert [(m.head, m.position) for m in tree.missing] == [("add", 1)]


def test_delispify_operator_hole():
    tree = sx.delispify(sx.parse_sexpr("(compare #0 #1 #2)"))
    assert isinstance(tree, sx.PartialTree)
    assert [(h.index, h.slot) for h in tree.invalid_holes] == [(1, Slot.OPERATOR)]


def test_delispify_hole_positions():
    tree = sx.delispify(sx.parse_sexpr("(StatementList (assign #0 #1) (StatementList #2 #3))"))
    slots = {h.index: h.slot for h in tree.holes}
    assert slots == {0: Slot.TARGET, 1: Slot.EXPR, 2: Slot.STMT, 3: Slot.TAIL}


def test_delispify_complete_program():
    term = sx.parse_sexpr("(StatementList (print (add 1 2)) eps)")
    assert sx.delispify(term) == ast.parse_program("print(1 + 2)")


def test_unknown_head():
    with pytest.raises(sx.UnknownSymbol):
        sx.delispify(sx.parse_sexpr("(frobnicate 1)"))


@pytest.mark.parametrize("text", ["(add 1", "(add 1 2))", "", "(#0 1)"])
def test_bad_text(text):
    with pytest.raises(sx.SExprSyntaxError):
        sx.parse_sexpr(text)


def test_text_round_trip_with_holes():
    text = "(StatementList (assign (name x) (add #0 #1)) #rest)"
    assert sx.to_text(sx.parse_sexpr(text)) == text


def test_epsilon_and_holes_are_distinct():
    term = sx.parse_sexpr("(StatementList (print #0) eps)")
    assert term.children[1] is EPS
    assert term.children[0].children[0] == Hole(0)


def _arity_ok(term) -> bool:
    for _, t in sx.subterms(term):
        if isinstance(t, App):
            if len(t.children) != len(sx.slots_of(t.head)):
                return False
            if t.head == "StatementList" and not (t.children[1] is EPS or
                                                  (isinstance(t.children[1], App) and
                                                   t.children[1].head == "StatementList")):
                return False
    return True


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_lispify_inverse_and_arity(seed):
    for src in random_corpus(seed, 2, lines=(1, 7), allow_input=True, function_rate=0.5):
        p = ast.parse_program(src)
        term = sx.lispify(p)
        assert _arity_ok(term)
        assert sx.delispify(term) == p
        assert sx.parse_sexpr(sx.to_text(term)) == term


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_lispify_is_injective(a, b):
    pa = ast.parse_program(random_corpus(a, 1, lines=(1, 3))[0])
    pb = ast.parse_program(random_corpus(b, 1, lines=(1, 3))[0])
    assert (pa == pb) == (sx.lispify(pa) == sx.lispify(pb))


def test_identifiers_and_integers_differ():
    assert sx.lispify(ast.parse_expression("x")) == App("name", (Atom("x"),))
    assert sx.lispify(ast.parse_expression("1")) == Atom(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_encoded_size_matches_ast_size(seed):
    for src in random_corpus(seed, 3, lines=(2, 6), allow_input=True, function_rate=0.5):
        p = ast.parse_program(src)
        assert sx.ast_size_of(sx.lispify(p)) == ast.ast_size(p)


def test_hole_counts_one_node():
    assert sx.ast_size_of(sx.parse_sexpr("(print (add #0 (name x)))")) == 4
    assert sx.ast_size_of(sx.parse_sexpr("(StatementList (print 1) #rest)")) == 2
