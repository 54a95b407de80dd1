"""Parser, unparser and node counting for the supported P2 subset of Python 3.

The grammar covers integer/boolean/list/dict values, ``print``, assignment to a
name or a subscription, ``return``, top-level ``def`` and the fixed input form
``eval(input())``.  Everything else (loops, ``if`` statements, lambdas, nested
definitions, strings) is rejected with a :class:`P2SyntaxError`.
"""
from __future__ import annotations

import keyword
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")


def _span():
    return field(default=None, compare=False, repr=False)


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Name:
    id: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IntConst:
    value: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class BoolConst:
    value: bool
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class UnaryNeg:
    operand: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Not:
    operand: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Add:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class And:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Or:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Eq:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class NotEq:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Is:
    left: "Expression"
    right: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Ternary:
    then: "Expression"
    cond: "Expression"
    orelse: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ListDisplay:
    items: tuple
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class DictDisplay:
    pairs: tuple  # of (key, value) tuples
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Subscript:
    obj: "Expression"
    index: "Expression"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Call:
    func: "Expression"
    args: tuple
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class EvalInput:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PrintExpr:
    """``print(e)`` used as a value, e.g. ``return print(x)``.

    A bare ``print(e)`` statement always parses as :class:`Print`.
    """
    arg: "Expression"
    span: Optional[SourceSpan] = _span()


Expression = Union[Name, IntConst, BoolConst, UnaryNeg, Not, Add, And, Or, Eq,
                   NotEq, Is, Ternary, ListDisplay, DictDisplay, Subscript,
                   Call, EvalInput, PrintExpr]

BINARY_OPS = (Add, And, Or, Eq, NotEq, Is)


# --- statements ------------------------------------------------------------

@dataclass(frozen=True)
class Print:
    value: Expression
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Assign:
    target: Union[Name, Subscript]
    value: Expression
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ExprStmt:
    value: Expression
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Return:
    value: Expression
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple
    body: tuple
    span: Optional[SourceSpan] = _span()


Statement = Union[Print, Assign, ExprStmt, Return, FunctionDef]


@dataclass(frozen=True)
class Program:
    body: tuple
    span: Optional[SourceSpan] = _span()


class P2SyntaxError(SyntaxError):
    """Source text outside the supported grammar."""

    def __init__(self, msg, file="<string>", line=0, col=0):
        # col is 0-based internally; messages and offset are 1-based like CPython's
        super().__init__(f"{file}:{line}:{col + 1}: {msg}")
        self.msg_text = msg
        self.filename = file
        self.lineno = line
        self.offset = col + 1

    def __str__(self):
        return self.args[0]


# --- tokenizer -------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, OP, KEYWORD, NEWLINE, INDENT, DEDENT, EOF
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


_OPS = ("==", "!=", "(", ")", "[", "]", "{", "}", ",", ":", "=", "+", "-")
_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\f]+)
  | (?P<comment>\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<int>[0-9]+[A-Za-z_0-9.]*)
  | (?P<op>==|!=|[()\[\]{},:=+\-])
""", re.VERBOSE)

_KEYWORDS = frozenset(keyword.kwlist) | {"print", "eval", "input"}


def tokenize(source: str, file: str = "<string>") -> Iterator[Token]:
    lines = source.splitlines()
    indents = [""]
    depth = 0  # bracket nesting; newlines inside brackets are ignored
    last_line = 0
    for lineno, raw in enumerate(lines, start=1):
        last_line = lineno
        stripped = raw.lstrip(" \t\f")
        if depth == 0:
            if not stripped or stripped.startswith("#"):
                continue
            indent = raw[: len(raw) - len(stripped)]
            if indent != indents[-1]:
                if indent.startswith(indents[-1]):
                    indents.append(indent)
                    yield Token("INDENT", indent, lineno, 0, lineno, len(indent))
                else:
                    while indent != indents[-1]:
                        if not indents[-1].startswith(indent) or len(indents) == 1:
                            raise P2SyntaxError("inconsistent dedent", file, lineno, 0)
                        indents.pop()
                        yield Token("DEDENT", "", lineno, 0, lineno, 0)
            col = len(indent)
        else:
            col = 0
        while col < len(raw):
            m = _TOKEN_RE.match(raw, col)
            if m is None:
                ch = raw[col]
                what = "string literals are not supported" if ch in "'\"" else f"unexpected character {ch!r}"
                raise P2SyntaxError(what, file, lineno, col)
            kind = m.lastgroup
            text = m.group()
            end = m.end()
            if kind == "name":
                yield Token("KEYWORD" if text in _KEYWORDS else "NAME", text, lineno, col, lineno, end)
            elif kind == "int":
                if not text.isdigit():
                    raise P2SyntaxError(f"invalid integer literal {text!r}", file, lineno, col)
                if len(text) > 1 and text[0] == "0" and text.strip("0"):
                    raise P2SyntaxError("leading zeros in decimal integer", file, lineno, col)
                yield Token("INT", text, lineno, col, lineno, end)
            elif kind == "op":
                if text in "([{":
                    depth += 1
                elif text in ")]}":
                    depth = max(0, depth - 1)
                yield Token("OP", text, lineno, col, lineno, end)
            col = end
        if depth == 0:
            yield Token("NEWLINE", "", lineno, len(raw), lineno, len(raw))
    if depth:
        raise P2SyntaxError("unexpected end of file inside brackets", file, last_line, 0)
    while len(indents) > 1:
        indents.pop()
        yield Token("DEDENT", "", last_line + 1, 0, last_line + 1, 0)
    yield Token("EOF", "", last_line + 1, 0, last_line + 1, 0)


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, source: str, file: str):
        self.file = file
        self.toks = list(tokenize(source, file))
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return P2SyntaxError(msg, self.file, tok.line, tok.col)

    def describe(self, tok):
        if tok.kind in ("NEWLINE", "INDENT", "DEDENT", "EOF"):
            return tok.kind.lower().replace("eof", "end of file")
        return repr(tok.text)

    def at(self, kind, text=None):
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_op(self, text):
        return self.at("OP", text)

    def at_kw(self, text):
        return self.at("KEYWORD", text)

    def advance(self):
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind, text=None):
        if not self.at(kind, text):
            want = repr(text) if text else kind.lower()
            raise self.error(f"expected {want}, found {self.describe(self.tok)}")
        return self.advance()

    def span(self, start: Token, end: Token = None) -> SourceSpan:
        end = end or self.toks[self.pos - 1]
        if (end.end_line, end.end_col) < (start.line, start.col):
            end = start
        return SourceSpan(self.file, start.line, start.col, end.end_line, end.end_col)

    # statements
    def program(self) -> Program:
        start = self.tok
        body = []
        while not self.at("EOF"):
            body.append(self.statement(in_def=False))
        if not body:
            raise self.error("expected at least one statement")
        return Program(tuple(body), self.span(start))

    def statement(self, in_def: bool) -> Statement:
        start = self.tok
        if self.at("INDENT"):
            raise self.error("unexpected indent")
        if self.at_kw("def"):
            if in_def:
                raise self.error("nested function definitions are not supported")
            return self.funcdef()
        if self.at_kw("return"):
            if not in_def:
                raise self.error("'return' outside function")
            self.advance()
            value = self.expression()
            self.end_of_statement()
            return Return(value, self.span(start))
        expr = self.expression()
        if self.at_op("="):
            if not isinstance(expr, (Name, Subscript)):
                raise self.error("cannot assign to expression; target must be a name or subscription")
            self.advance()
            value = self.expression()
            if self.at_op("="):
                raise self.error("chained assignment is not supported")
            self.end_of_statement()
            return Assign(expr, value, self.span(start))
        self.end_of_statement()
        if isinstance(expr, PrintExpr):
            return Print(expr.arg, self.span(start))
        return ExprStmt(expr, self.span(start))

    def end_of_statement(self):
        if not self.at("NEWLINE"):
            raise self.error(f"expected end of statement, found {self.describe(self.tok)}")
        self.advance()

    def funcdef(self) -> FunctionDef:
        start = self.expect("KEYWORD", "def")
        name = self.identifier()
        self.expect("OP", "(")
        params = []
        if not self.at_op(")"):
            params.append(self.identifier())
            while self.at_op(","):
                self.advance()
                params.append(self.identifier())
        if len(set(params)) != len(params):
            raise self.error("duplicate parameter name")
        self.expect("OP", ")")
        self.expect("OP", ":")
        self.expect("NEWLINE")
        self.expect("INDENT")
        body = []
        while not self.at("DEDENT"):
            if self.at("EOF"):
                raise self.error("expected dedent")
            body.append(self.statement(in_def=True))
        self.advance()
        return FunctionDef(name, tuple(params), tuple(body), self.span(start))

    def identifier(self) -> str:
        if self.at("KEYWORD"):
            raise self.error(f"keyword {self.tok.text!r} cannot be used as an identifier")
        return self.expect("NAME").text

    # expressions, lowest precedence first
    def expression(self) -> Expression:
        start = self.tok
        then = self.disjunction()
        if self.at_kw("if"):
            self.advance()
            cond = self.disjunction()
            self.expect("KEYWORD", "else")
            orelse = self.expression()
            return Ternary(then, cond, orelse, self.span(start))
        return then

    def disjunction(self):
        start = self.tok
        left = self.conjunction()
        while self.at_kw("or"):
            self.advance()
            left = Or(left, self.conjunction(), self.span(start))
        return left

    def conjunction(self):
        start = self.tok
        left = self.inversion()
        while self.at_kw("and"):
            self.advance()
            left = And(left, self.inversion(), self.span(start))
        return left

    def inversion(self):
        start = self.tok
        if self.at_kw("not"):
            self.advance()
            return Not(self.inversion(), self.span(start))
        return self.comparison()

    def comparison(self):
        start = self.tok
        left = self.sum()
        op = self.compare_op()
        if op is None:
            return left
        node = op(left, self.sum(), self.span(start))
        if self.compare_op(peek=True):
            raise self.error("chained comparisons are not supported")
        return node

    def compare_op(self, peek=False):
        if self.at_op("=="):
            op = Eq
        elif self.at_op("!="):
            op = NotEq
        elif self.at_kw("is"):
            op = Is
        elif self.at_kw("in") or self.at_kw("not") or self.at_op("<"):
            raise self.error(f"unsupported comparison {self.tok.text!r}")
        else:
            return None
        if not peek:
            self.advance()
            if op is Is and self.at_kw("not"):
                raise self.error("'is not' is not supported")
        return op

    def sum(self):
        start = self.tok
        left = self.unary()
        while self.at_op("+"):
            self.advance()
            left = Add(left, self.unary(), self.span(start))
        if self.at_op("-"):
            raise self.error("binary '-' is not in the grammar")
        return left

    def unary(self):
        start = self.tok
        if self.at_op("-"):
            self.advance()
            return UnaryNeg(self.unary(), self.span(start))
        return self.primary()

    def primary(self):
        start = self.tok
        node = self.atom()
        while True:
            if self.at_op("["):
                self.advance()
                index = self.expression()
                self.expect("OP", "]")
                node = Subscript(node, index, self.span(start))
            elif self.at_op("("):
                self.advance()
                args = self.expr_list(")")
                self.expect("OP", ")")
                node = Call(node, tuple(args), self.span(start))
            else:
                return node

    def expr_list(self, closer):
        items = []
        if self.at_op(closer):
            return items
        items.append(self.expression())
        while self.at_op(","):
            self.advance()
            items.append(self.expression())
        return items

    def atom(self):
        t = self.tok
        if t.kind == "NAME":
            self.advance()
            return Name(t.text, self.span(t))
        if t.kind == "INT":
            self.advance()
            return IntConst(int(t.text), self.span(t))
        if t.kind == "KEYWORD":
            if t.text in ("True", "False"):
                self.advance()
                return BoolConst(t.text == "True", self.span(t))
            if t.text == "eval":
                self.advance()
                for kind, text in (("OP", "("), ("KEYWORD", "input"), ("OP", "("), ("OP", ")"), ("OP", ")")):
                    self.expect(kind, text)
                return EvalInput(self.span(t))
            if t.text == "input":
                raise self.error("'input' is only supported in the form eval(input())")
            if t.text == "print":
                self.advance()
                self.expect("OP", "(")
                arg = self.expression()
                self.expect("OP", ")")
                return PrintExpr(arg, self.span(t))
            raise self.error(f"unexpected keyword {t.text!r}; expected an expression")
        if t.kind == "OP":
            if t.text == "(":
                self.advance()
                inner = self.expression()
                if self.at_op(","):
                    raise self.error("tuples are not supported")
                self.expect("OP", ")")
                return inner
            if t.text == "[":
                self.advance()
                items = self.expr_list("]")
                self.expect("OP", "]")
                return ListDisplay(tuple(items), self.span(t))
            if t.text == "{":
                self.advance()
                pairs = []
                if not self.at_op("}"):
                    pairs.append(self.key_datum())
                    while self.at_op(","):
                        self.advance()
                        pairs.append(self.key_datum())
                self.expect("OP", "}")
                return DictDisplay(tuple(pairs), self.span(t))
        raise self.error(f"expected an expression, found {self.describe(t)}")

    def key_datum(self):
        key = self.expression()
        self.expect("OP", ":")
        return (key, self.expression())


def parse_program(source: str, file: str = "<string>") -> Program:
    """Parse P2 source text.  Raises :class:`P2SyntaxError` with line/col."""
    return _Parser(source, file).program()


def parse_expression(source: str) -> Expression:
    p = _Parser(source, "<expr>")
    expr = p.expression()
    if not p.at("NEWLINE"):
        raise p.error(f"unexpected {p.describe(p.tok)}")
    return expr


# --- unparser --------------------------------------------------------------

# Python precedence levels, loosest first.
_P_TERNARY, _P_OR, _P_AND, _P_NOT, _P_CMP, _P_ADD, _P_UNARY, _P_PRIMARY = range(8)


def _prec(e) -> int:
    if isinstance(e, Ternary):
        return _P_TERNARY
    if isinstance(e, Or):
        return _P_OR
    if isinstance(e, And):
        return _P_AND
    if isinstance(e, Not):
        return _P_NOT
    if isinstance(e, (Eq, NotEq, Is)):
        return _P_CMP
    if isinstance(e, Add):
        return _P_ADD
    if isinstance(e, UnaryNeg):
        return _P_UNARY
    return _P_PRIMARY


_BIN_TEXT = {Add: "+", And: "and", Or: "or", Eq: "==", NotEq: "!=", Is: "is"}


def unparse_expr(e: Expression, min_prec: int = _P_TERNARY) -> str:
    text = _unparse_expr(e)
    return f"({text})" if _prec(e) < min_prec else text


def _unparse_expr(e) -> str:
    if isinstance(e, Name):
        return e.id
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, BoolConst):
        return "True" if e.value else "False"
    if isinstance(e, EvalInput):
        return "eval(input())"
    if isinstance(e, PrintExpr):
        return f"print({unparse_expr(e.arg)})"
    if isinstance(e, UnaryNeg):
        return "-" + unparse_expr(e.operand, _P_UNARY)
    if isinstance(e, Not):
        return "not " + unparse_expr(e.operand, _P_NOT)
    if isinstance(e, (Add, And, Or)):
        p = _prec(e)
        return f"{unparse_expr(e.left, p)} {_BIN_TEXT[type(e)]} {unparse_expr(e.right, p + 1)}"
    if isinstance(e, (Eq, NotEq, Is)):
        # comparisons do not chain: both operands must bind tighter
        return f"{unparse_expr(e.left, _P_ADD)} {_BIN_TEXT[type(e)]} {unparse_expr(e.right, _P_ADD)}"
    if isinstance(e, Ternary):
        return (f"{unparse_expr(e.then, _P_OR)} if {unparse_expr(e.cond, _P_OR)} "
                f"else {unparse_expr(e.orelse, _P_TERNARY)}")
    if isinstance(e, ListDisplay):
        return "[" + ", ".join(unparse_expr(i) for i in e.items) + "]"
    if isinstance(e, DictDisplay):
        return "{" + ", ".join(f"{unparse_expr(k)}: {unparse_expr(v)}" for k, v in e.pairs) + "}"
    if isinstance(e, Subscript):
        return f"{unparse_expr(e.obj, _P_PRIMARY)}[{unparse_expr(e.index)}]"
    if isinstance(e, Call):
        return f"{unparse_expr(e.func, _P_PRIMARY)}(" + ", ".join(unparse_expr(a) for a in e.args) + ")"
    raise TypeError(f"not an expression: {e!r}")


def unparse_stmt(s: Statement, indent: str = "") -> list:
    if isinstance(s, Print):
        return [f"{indent}print({unparse_expr(s.value)})"]
    if isinstance(s, Assign):
        return [f"{indent}{unparse_expr(s.target)} = {unparse_expr(s.value)}"]
    if isinstance(s, ExprStmt):
        if isinstance(s.value, PrintExpr):
            # would re-parse as a Print statement
            return [f"{indent}print({unparse_expr(s.value.arg)})"]
        return [f"{indent}{unparse_expr(s.value)}"]
    if isinstance(s, Return):
        return [f"{indent}return {unparse_expr(s.value)}"]
    if isinstance(s, FunctionDef):
        lines = [f"{indent}def {s.name}({', '.join(s.params)}):"]
        for inner in s.body:
            lines.extend(unparse_stmt(inner, indent + "    "))
        return lines
    raise TypeError(f"not a statement: {s!r}")


def unparse(p) -> str:
    """Render a Program (or a single statement / expression) as Python source."""
    if isinstance(p, Program):
        return "\n".join(line for s in p.body for line in unparse_stmt(s))
    if isinstance(p, (Print, Assign, ExprStmt, Return, FunctionDef)):
        return "\n".join(unparse_stmt(p))
    return unparse_expr(p)


# --- traversal and size ----------------------------------------------------

def children(n) -> tuple:
    """Direct AST children (statements and expressions only)."""
    if isinstance(n, Program):
        return n.body
    if isinstance(n, FunctionDef):
        return n.body
    if isinstance(n, (Print, ExprStmt, Return)):
        return (n.value,)
    if isinstance(n, Assign):
        return (n.target, n.value)
    if isinstance(n, (UnaryNeg, Not)):
        return (n.operand,)
    if isinstance(n, BINARY_OPS):
        return (n.left, n.right)
    if isinstance(n, Ternary):
        return (n.then, n.cond, n.orelse)
    if isinstance(n, ListDisplay):
        return n.items
    if isinstance(n, DictDisplay):
        return tuple(x for pair in n.pairs for x in pair)
    if isinstance(n, Subscript):
        return (n.obj, n.index)
    if isinstance(n, Call):
        return (n.func,) + n.args
    if isinstance(n, PrintExpr):
        return (n.arg,)
    return ()


def walk(n) -> Iterator:
    yield n
    for c in children(n):
        yield from walk(c)


def ast_size(n) -> int:
    """Number of AST nodes: 1 per statement/expression, 1 per def parameter.

    The :class:`Program` wrapper counts 0, so the size of a program is the sum
    of its statements.  A list or tuple of nodes is summed.
    """
    if n is None:
        return 0
    if isinstance(n, (list, tuple)):
        return sum(ast_size(x) for x in n)
    own = 0 if isinstance(n, Program) else 1
    if isinstance(n, FunctionDef):
        own += len(n.params)
    return own + sum(ast_size(c) for c in children(n))


def names_in(n) -> set:
    """Identifiers occurring anywhere below ``n`` (including def names/params)."""
    out = set()
    for node in walk(n):
        if isinstance(node, Name):
            out.add(node.id)
        elif isinstance(node, FunctionDef):
            out.add(node.name)
            out.update(node.params)
    return out


def strip_spans(n):
    """Copy of ``n`` with every span cleared (spans never affect equality)."""
    import dataclasses

    if isinstance(n, tuple):
        return tuple(strip_spans(x) for x in n)
    if dataclasses.is_dataclass(n):
        kw = {f.name: strip_spans(getattr(n, f.name)) for f in dataclasses.fields(n) if f.name != "span"}
        return type(n)(**kw)
    return n
