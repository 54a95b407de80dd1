"""Lisp-style encoding of P2 programs and its inverse.

Every AST node becomes an application of a fixed-arity head symbol.  Variable
length sequences (statement lists, argument lists, dict entries, parameter
lists) are right-nested spines terminated by :data:`EPS`, so that
``x = 1; print(x)`` becomes::

    (StatementList (assign (name x) 1) (StatementList (print (name x)) eps))

Operators live in the head symbol (``add``, ``eq``, ...), identifiers are
wrapped as ``(name x)`` and integers / booleans are bare atoms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from . import syntax as ast


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atom:
    """Leaf value: ``int`` for integer literals, ``'True'``/``'False'`` for
    booleans, any other ``str`` for identifiers and operator symbols."""
    value: Union[int, str]


@dataclass(frozen=True, slots=True)
class App:
    head: str
    children: tuple = ()


class _Epsilon:
    __slots__ = ()

    def __repr__(self):
        return "EPS"

    def __reduce__(self):
        return (_epsilon, ())


def _epsilon():
    return EPS


EPS = object.__new__(_Epsilon)


@dataclass(frozen=True, slots=True)
class Hole:
    index: int


class _Rest:
    """Open tail of a statement spine: the unmatched remainder stays put."""
    __slots__ = ()

    def __repr__(self):
        return "REST"

    def __reduce__(self):
        return (_rest, ())


def _rest():
    return REST


REST = object.__new__(_Rest)

SExpr = Union[Atom, App, _Epsilon, Hole, _Rest]


class Slot(Enum):
    EXPR = "expression"
    STMT = "statement"
    TAIL = "statement-list tail"
    TARGET = "assignment target"
    IDENT = "identifier"
    PARAMS = "parameter list"
    ARGS = "expression list"
    PAIRS = "key/datum list"
    OPERATOR = "operator"


S = Slot

# head -> child slots.  All heads have fixed arity.
VOCABULARY: dict[str, tuple] = {
    "StatementList": (S.STMT, S.TAIL),
    "print": (S.EXPR,),
    "assign": (S.TARGET, S.EXPR),
    "expr": (S.EXPR,),
    "return": (S.EXPR,),
    "def": (S.IDENT, S.PARAMS, S.TAIL),
    "ParamList": (S.IDENT, S.PARAMS),
    "name": (S.IDENT,),
    "neg": (S.EXPR,),
    "not": (S.EXPR,),
    "add": (S.EXPR, S.EXPR),
    "and": (S.EXPR, S.EXPR),
    "or": (S.EXPR, S.EXPR),
    "eq": (S.EXPR, S.EXPR),
    "noteq": (S.EXPR, S.EXPR),
    "is": (S.EXPR, S.EXPR),
    "ifexp": (S.EXPR, S.EXPR, S.EXPR),
    "list": (S.ARGS,),
    "dict": (S.PAIRS,),
    "ExprList": (S.EXPR, S.ARGS),
    "KeyDatumList": (S.EXPR, S.EXPR, S.PAIRS),
    "subscript": (S.EXPR, S.EXPR),
    "call": (S.EXPR, S.ARGS),
    "evalinput": (),
    "printexpr": (S.EXPR,),
}

# Generic operator forms found in foreign encodings, e.g. (compare a == b).
# delispify accepts them; lispify never produces them.
OPERATOR_FORMS: dict[str, tuple] = {
    "compare": (S.EXPR, S.OPERATOR, S.EXPR),
    "binop": (S.EXPR, S.OPERATOR, S.EXPR),
}
OPERATORS = {
    "compare": {"==": ast.Eq, "!=": ast.NotEq, "is": ast.Is},
    "binop": {"+": ast.Add, "and": ast.And, "or": ast.Or},
}

STATEMENT_HEADS = frozenset({"print", "assign", "expr", "return", "def"})
SPINE_HEADS = {S.TAIL: "StatementList", S.ARGS: "ExprList", S.PAIRS: "KeyDatumList", S.PARAMS: "ParamList"}
BOOL_ATOMS = frozenset({"True", "False"})

_BIN_HEADS = {ast.Add: "add", ast.And: "and", ast.Or: "or", ast.Eq: "eq", ast.NotEq: "noteq", ast.Is: "is"}
_HEAD_BINS = {v: k for k, v in _BIN_HEADS.items()}


def slots_of(head: str) -> tuple:
    if head in VOCABULARY:
        return VOCABULARY[head]
    if head in OPERATOR_FORMS:
        return OPERATOR_FORMS[head]
    raise UnknownSymbol(head)


class UnknownSymbol(ValueError):
    def __init__(self, head):
        super().__init__(f"unknown head symbol {head!r}")
        self.head = head


# --- lispify ---------------------------------------------------------------

def _spine(head, items, tail=EPS):
    out = tail
    for item in reversed(items):
        out = App(head, item + (out,)) if isinstance(item, tuple) else App(head, (item, out))
    return out


def lispify(node) -> SExpr:
    """Encode a Program, statement or expression."""
    if isinstance(node, ast.Program):
        return _spine("StatementList", [lispify(s) for s in node.body])
    if isinstance(node, ast.Print):
        return App("print", (lispify(node.value),))
    if isinstance(node, ast.Assign):
        return App("assign", (lispify(node.target), lispify(node.value)))
    if isinstance(node, ast.ExprStmt):
        return App("expr", (lispify(node.value),))
    if isinstance(node, ast.Return):
        return App("return", (lispify(node.value),))
    if isinstance(node, ast.FunctionDef):
        params = _spine("ParamList", [Atom(p) for p in node.params])
        return App("def", (Atom(node.name), params, _spine("StatementList", [lispify(s) for s in node.body])))
    if isinstance(node, ast.Name):
        return App("name", (Atom(node.id),))
    if isinstance(node, ast.IntConst):
        return Atom(node.value)
    if isinstance(node, ast.BoolConst):
        return Atom("True" if node.value else "False")
    if isinstance(node, ast.UnaryNeg):
        return App("neg", (lispify(node.operand),))
    if isinstance(node, ast.Not):
        return App("not", (lispify(node.operand),))
    if isinstance(node, ast.BINARY_OPS):
        return App(_BIN_HEADS[type(node)], (lispify(node.left), lispify(node.right)))
    if isinstance(node, ast.Ternary):
        return App("ifexp", (lispify(node.then), lispify(node.cond), lispify(node.orelse)))
    if isinstance(node, ast.ListDisplay):
        return App("list", (_spine("ExprList", [lispify(i) for i in node.items]),))
    if isinstance(node, ast.DictDisplay):
        return App("dict", (_spine("KeyDatumList", [(lispify(k), lispify(v)) for k, v in node.pairs]),))
    if isinstance(node, ast.Subscript):
        return App("subscript", (lispify(node.obj), lispify(node.index)))
    if isinstance(node, ast.Call):
        return App("call", (lispify(node.func), _spine("ExprList", [lispify(a) for a in node.args])))
    if isinstance(node, ast.EvalInput):
        return App("evalinput")
    if isinstance(node, ast.PrintExpr):
        return App("printexpr", (lispify(node.arg),))
    raise TypeError(f"cannot lispify {node!r}")


# --- delispify -------------------------------------------------------------

@dataclass(frozen=True)
class HoleSite:
    index: int
    path: tuple
    slot: Slot


@dataclass(frozen=True)
class MissingChild:
    path: tuple
    head: str
    position: int
    slot: Slot


@dataclass(frozen=True)
class Malformed:
    path: tuple
    message: str


@dataclass
class PartialTree:
    """Best-effort reconstruction of an incomplete or hole-bearing term.

    ``node`` is a Program, a list of statements, a statement or an expression.
    Holes are rendered as ``_param<k>`` identifiers; missing children as None.
    """
    node: object
    holes: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    malformed: list = field(default_factory=list)
    open_tail: bool = False

    @property
    def complete(self) -> bool:
        return not self.missing and not self.malformed

    @property
    def invalid_holes(self) -> list:
        return [h for h in self.holes if h.slot is not Slot.EXPR]


def hole_name(k: int) -> str:
    return f"_param{k}"


class _Builder:
    def __init__(self):
        self.holes = []
        self.missing = []
        self.malformed = []
        self.open_tail = False

    def child(self, s: App, i: int, path: tuple):
        if i < len(s.children):
            return s.children[i]
        self.missing.append(MissingChild(path, s.head, i, slots_of(s.head)[i]))
        return None

    def check_arity(self, s: App, path: tuple):
        want = len(slots_of(s.head))
        if len(s.children) > want:
            self.malformed.append(Malformed(path, f"{s.head} takes {want} children, got {len(s.children)}"))

    def hole(self, h: Hole, path, slot):
        self.holes.append(HoleSite(h.index, path, slot))
        return hole_name(h.index)

    # spines
    def spine(self, s, path, slot, item_fn, root=False):
        items = []
        head = SPINE_HEADS[slot]
        while True:
            if s is EPS:
                return items
            if s is REST:
                if root and slot is S.TAIL:
                    self.open_tail = True
                else:
                    self.malformed.append(Malformed(path, f"open tail not allowed in {slot.value}"))
                return items
            if isinstance(s, Hole):
                self.hole(s, path, slot)
                return items
            if s is None:
                return items
            if not isinstance(s, App) or s.head != head:
                self.malformed.append(Malformed(path, f"expected {head} or eps in {slot.value}, found {to_text(s)}"))
                return items
            self.check_arity(s, path)
            n = len(slots_of(head))
            kids = [self.child(s, i, path) for i in range(n)]
            items.append(item_fn(kids[:-1], path))
            s = kids[-1]
            path = path + (n - 1,)

    def statements(self, s, path, root=False):
        return self.spine(s, path, S.TAIL, lambda kids, p: self.stmt(kids[0], p + (0,)), root=root)

    def stmt(self, s, path):
        if s is None:
            return None
        if isinstance(s, Hole):
            return ast.ExprStmt(ast.Name(self.hole(s, path, S.STMT)))
        if not isinstance(s, App) or s.head not in STATEMENT_HEADS:
            if isinstance(s, App):
                slots_of(s.head)
            self.malformed.append(Malformed(path, f"expected a statement, found {to_text(s)}"))
            return None
        self.check_arity(s, path)
        h = s.head
        if h == "def":
            name = self.ident(self.child(s, 0, path), path + (0,))
            params = self.spine(self.child(s, 1, path), path + (1,), S.PARAMS,
                                lambda kids, p: self.ident(kids[0], p + (0,)))
            body = self.statements(self.child(s, 2, path), path + (2,))
            return ast.FunctionDef(name, tuple(params), tuple(body))
        if h == "assign":
            target = self.target(self.child(s, 0, path), path + (0,))
            return ast.Assign(target, self.expr(self.child(s, 1, path), path + (1,)))
        value = self.expr(self.child(s, 0, path), path + (0,))
        return {"print": ast.Print, "expr": ast.ExprStmt, "return": ast.Return}[h](value)

    def ident(self, s, path):
        if s is None:
            return None
        if isinstance(s, Hole):
            return self.hole(s, path, S.IDENT)
        if isinstance(s, Atom) and isinstance(s.value, str) and s.value not in BOOL_ATOMS:
            return s.value
        self.malformed.append(Malformed(path, f"expected an identifier, found {to_text(s)}"))
        return None

    def target(self, s, path):
        if isinstance(s, Hole):
            return ast.Name(self.hole(s, path, S.TARGET))
        if isinstance(s, App) and s.head in ("name", "subscript"):
            return self.expr(s, path)
        if s is not None:
            self.malformed.append(Malformed(path, f"assignment target must be a name or subscription, found {to_text(s)}"))
        return None

    def expr(self, s, path):
        if s is None:
            return None
        if isinstance(s, Hole):
            return ast.Name(self.hole(s, path, S.EXPR))
        if isinstance(s, Atom):
            if isinstance(s.value, int):
                return ast.IntConst(s.value)
            if s.value in BOOL_ATOMS:
                return ast.BoolConst(s.value == "True")
            self.malformed.append(Malformed(path, f"bare identifier {s.value!r} in expression position; expected (name ...)"))
            return None
        if not isinstance(s, App):
            self.malformed.append(Malformed(path, f"expected an expression, found {to_text(s)}"))
            return None
        h = s.head
        slots = slots_of(h)
        if h in STATEMENT_HEADS or h in ("StatementList", "ExprList", "KeyDatumList", "ParamList"):
            self.malformed.append(Malformed(path, f"{h} is not an expression"))
            return None
        self.check_arity(s, path)
        kid = lambda i: self.child(s, i, path)
        if h == "name":
            return ast.Name(self.ident(kid(0), path + (0,)))
        if h == "evalinput":
            return ast.EvalInput()
        if h in OPERATOR_FORMS:
            left = self.expr(kid(0), path + (0,))
            op = kid(1)
            right = self.expr(kid(2), path + (2,))
            if isinstance(op, Hole):
                self.hole(op, path + (1,), S.OPERATOR)
                return None
            cls = OPERATORS[h].get(op.value) if isinstance(op, Atom) else None
            if cls is None and op is not None:
                self.malformed.append(Malformed(path + (1,), f"unknown operator {to_text(op)} for {h}"))
                return None
            return cls(left, right) if cls else None
        if h == "list":
            items = self.spine(kid(0), path + (0,), S.ARGS, lambda k, p: self.expr(k[0], p + (0,)))
            return ast.ListDisplay(tuple(items))
        if h == "dict":
            pairs = self.spine(kid(0), path + (0,), S.PAIRS,
                               lambda k, p: (self.expr(k[0], p + (0,)), self.expr(k[1], p + (1,))))
            return ast.DictDisplay(tuple(pairs))
        if h == "call":
            func = self.expr(kid(0), path + (0,))
            args = self.spine(kid(1), path + (1,), S.ARGS, lambda k, p: self.expr(k[0], p + (0,)))
            return ast.Call(func, tuple(args))
        operands = [self.expr(kid(i), path + (i,)) for i in range(len(slots))]
        if h in _HEAD_BINS:
            return _HEAD_BINS[h](*operands)
        return {"neg": ast.UnaryNeg, "not": ast.Not, "ifexp": ast.Ternary,
                "subscript": ast.Subscript, "printexpr": ast.PrintExpr}[h](*operands)


def root_kind(s: SExpr) -> str:
    """'statements', 'statement' or 'expression' for a term's top node."""
    if s is EPS or s is REST or (isinstance(s, App) and s.head == "StatementList"):
        return "statements"
    if isinstance(s, App) and s.head in STATEMENT_HEADS:
        return "statement"
    return "expression"


def root_slot(s: SExpr) -> Slot:
    """The slot a free-standing term occupies: a program, a statement or an expression."""
    return {"statements": Slot.TAIL, "statement": Slot.STMT, "expression": Slot.EXPR}[root_kind(s)]


def delispify(s: SExpr) -> Union[ast.Program, PartialTree]:
    """Invert :func:`lispify`.

    A complete, hole-free statement spine yields a Program.  Anything else
    (holes, missing or extra children, fragments) yields a PartialTree that
    says what is wrong and where.  Unknown heads raise UnknownSymbol.
    """
    b = _Builder()
    kind = root_kind(s)
    if kind == "statements":
        node = b.statements(s, (), root=True)
    elif kind == "statement":
        node = b.stmt(s, ())
    else:
        node = b.expr(s, ())
    tree = PartialTree(node, b.holes, b.missing, b.malformed, b.open_tail)
    if kind == "statements" and tree.complete and not tree.holes and not tree.open_tail and node:
        return ast.Program(tuple(node))
    return tree


def to_ast(s: SExpr):
    """Delispify a hole-free complete fragment to its AST node (or statement list)."""
    r = delispify(s)
    if isinstance(r, ast.Program):
        return list(r.body)
    if r.holes or not r.complete:
        raise ValueError(f"not a complete hole-free term: {to_text(s)}")
    return r.node


# --- text serialization ----------------------------------------------------

def to_text(s) -> str:
    if s is None:
        return "<missing>"
    if s is EPS:
        return "eps"
    if s is REST:
        return "#rest"
    if isinstance(s, Hole):
        return f"#{s.index}"
    if isinstance(s, Atom):
        return str(s.value)
    if isinstance(s, App):
        if not s.children:
            return f"({s.head})"
        return "(" + s.head + " " + " ".join(to_text(c) for c in s.children) + ")"
    raise TypeError(f"not an s-expression: {s!r}")


_SEXPR_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


class SExprSyntaxError(ValueError):
    pass


def parse_sexpr(text: str) -> SExpr:
    """Read the textual form produced by :func:`to_text`.

    ``eps`` and ``ε`` denote the spine terminator, ``#k`` a hole and
    ``#rest`` an open statement tail.  Tokens in identifier slots are always
    identifiers, so ``(name eps)`` is the variable ``eps``.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _SEXPR_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SExprSyntaxError(f"bad input at offset {pos}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    out, i = _read(tokens, 0, None)
    if i != len(tokens):
        raise SExprSyntaxError(f"trailing input after term: {' '.join(tokens[i:i + 5])}")
    return out


def _read(tokens, i, slot):
    if i >= len(tokens):
        raise SExprSyntaxError("unexpected end of input")
    t = tokens[i]
    if t == ")":
        raise SExprSyntaxError("unexpected ')'")
    if t == "(":
        if i + 1 >= len(tokens) or tokens[i + 1] in "()":
            raise SExprSyntaxError("expected head symbol after '('")
        head = tokens[i + 1]
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", head):
            raise SExprSyntaxError(f"head must be a symbol, got {head!r}")
        slots = VOCABULARY.get(head) or OPERATOR_FORMS.get(head) or ()
        kids = []
        i += 2
        while True:
            if i >= len(tokens):
                raise SExprSyntaxError(f"unclosed ({head} ...")
            if tokens[i] == ")":
                return App(head, tuple(kids)), i + 1
            kid_slot = slots[len(kids)] if len(kids) < len(slots) else None
            kid, i = _read(tokens, i, kid_slot)
            kids.append(kid)
    return _atom(t, slot), i + 1


def _atom(t: str, slot) -> SExpr:
    if t == "#rest":
        return REST
    if re.fullmatch(r"#\d+", t):
        return Hole(int(t[1:]))
    if slot in (Slot.IDENT, Slot.OPERATOR):
        return Atom(t)
    if t in ("eps", "ε"):
        return EPS
    if re.fullmatch(r"-?\d+", t):
        return Atom(int(t))
    return Atom(t)


# --- helpers ---------------------------------------------------------------

def subterms(s: SExpr, path: tuple = ()):
    """Preorder (path, term) pairs."""
    yield path, s
    if isinstance(s, App):
        for i, c in enumerate(s.children):
            yield from subterms(c, path + (i,))


def at_path(s: SExpr, path) -> SExpr:
    for i in path:
        s = s.children[i]
    return s


def replace_at(s: SExpr, path, new: SExpr) -> SExpr:
    if not path:
        return new
    i = path[0]
    kids = list(s.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return App(s.head, tuple(kids))


def holes_of(s: SExpr) -> list:
    """Hole indices in first-occurrence preorder, without duplicates."""
    seen = []
    for _, t in subterms(s):
        if isinstance(t, Hole) and t.index not in seen:
            seen.append(t.index)
    return seen


def ast_weight(s: SExpr, parent_slot: Optional[Slot] = None, parent_head: Optional[str] = None) -> int:
    """AST nodes contributed by this single s-expression node (not its children).

    Spines, the epsilon terminator and the identifier inside ``(name x)`` or a
    def name contribute nothing; def parameters count 1 each, holes count 1.
    """
    if isinstance(s, App):
        return 0 if s.head in SPINE_HEADS.values() else 1
    if s is EPS or s is REST:
        return 0
    if isinstance(s, Hole):
        return 1
    if parent_slot is Slot.IDENT:
        return 1 if parent_head == "ParamList" else 0
    return 1


def ast_size_of(s: SExpr) -> int:
    """AST node count of an encoded term, holes counting 1 each."""
    def go(t, slot, parent_head):
        w = ast_weight(t, slot, parent_head)
        if isinstance(t, App):
            slots = slots_of(t.head)
            for i, c in enumerate(t.children):
                w += go(c, slots[i] if i < len(slots) else None, t.head)
        return w
    return go(s, None, None)
