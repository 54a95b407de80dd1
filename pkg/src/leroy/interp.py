"""Reference interpreter for P2, the oracle for semantic preservation.

Values are plain Python objects (int, bool, list, dict, None) plus
:class:`FunctionRef`, so printed output is formatted exactly as CPython would
format it.  Operations that P2 does not allow on a given kind of value (adding
a list to an int, subscripting an int, ...) raise :class:`P2RuntimeError`.
"""
from __future__ import annotations

import ast as pyast
import io
import sys
from dataclasses import dataclass
from typing import Iterable, Optional

from . import syntax as ast


class P2RuntimeError(RuntimeError):
    pass


class InputExhausted(P2RuntimeError):
    """``eval(input())`` ran past the end of the input script."""


@dataclass(frozen=True, eq=False)
class FunctionRef:
    node: ast.FunctionDef

    def __repr__(self):
        return f"<function {self.node.name}>"


class _Frame:
    __slots__ = ("fn", "vars")

    def __init__(self, fn: ast.FunctionDef, vars: dict):
        self.fn = fn
        self.vars = vars


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def _check_literal(v):
    if isinstance(v, (bool, int)):
        return v
    if isinstance(v, list):
        for x in v:
            _check_literal(x)
        return v
    if isinstance(v, dict):
        for k, x in v.items():
            _check_literal(k)
            _check_literal(x)
        return v
    raise ValueError(f"input values must be int, bool, list or dict literals, got {v!r}")


def parse_script(text: str) -> list:
    """Input script: one literal per non-blank line."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(_check_literal(pyast.literal_eval(line.strip())))
        except (ValueError, SyntaxError) as e:
            raise ValueError(f"input line {lineno}: {e}") from None
    return out


def _is_int(v) -> bool:
    return isinstance(v, int)  # bools included, as in Python arithmetic


def _same(a, b) -> bool:
    if isinstance(a, (list, dict, FunctionRef)) or isinstance(b, (list, dict, FunctionRef)):
        return a is b
    return type(a) is type(b) and a == b


def _local_names(fn: ast.FunctionDef) -> frozenset:
    names = set(fn.params)
    for s in fn.body:
        if isinstance(s, ast.Assign) and isinstance(s.target, ast.Name):
            names.add(s.target.id)
    return frozenset(names)


class Interpreter:
    def __init__(self, inputs: Iterable = (), max_depth: int = 400):
        self.inputs = list(inputs)
        self.pos = 0
        self.out = io.StringIO()
        self.globals = {}
        self.max_depth = max_depth
        self.depth = 0
        self._locals_cache = {}

    # statements
    def run_program(self, program: ast.Program) -> str:
        # each P2 call costs a handful of host frames
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 12 * self.max_depth + 1000))
        try:
            for s in program.body:
                self.exec_stmt(s, None)
        except RecursionError:
            raise P2RuntimeError("maximum recursion depth exceeded") from None
        finally:
            sys.setrecursionlimit(limit)
        return self.out.getvalue()

    def exec_stmt(self, s, frame: Optional[_Frame]):
        if isinstance(s, ast.Print):
            self.out.write(self.fmt(self.eval(s.value, frame)) + "\n")
        elif isinstance(s, ast.Assign):
            value = self.eval(s.value, frame)
            if isinstance(s.target, ast.Name):
                (self.globals if frame is None else frame.vars)[s.target.id] = value
            else:
                obj = self.eval(s.target.obj, frame)
                key = self.eval(s.target.index, frame)
                self.store(obj, key, value)
        elif isinstance(s, ast.ExprStmt):
            self.eval(s.value, frame)
        elif isinstance(s, ast.Return):
            raise _Return(self.eval(s.value, frame))
        elif isinstance(s, ast.FunctionDef):
            self.globals[s.name] = FunctionRef(s)
        else:
            raise P2RuntimeError(f"unknown statement {s!r}")

    @staticmethod
    def fmt(v) -> str:
        return "None" if v is None else str(v) if not isinstance(v, (list, dict)) else repr(v)

    # expressions
    def lookup(self, name: str, frame: Optional[_Frame]):
        if frame is not None and name in self._locals(frame.fn):
            if name not in frame.vars:
                raise P2RuntimeError(f"local variable '{name}' referenced before assignment")
            return frame.vars[name]
        if name not in self.globals:
            raise P2RuntimeError(f"name '{name}' is not defined")
        return self.globals[name]

    def _locals(self, fn):
        key = id(fn)
        if key not in self._locals_cache:
            self._locals_cache[key] = _local_names(fn)
        return self._locals_cache[key]

    def eval(self, e, frame: Optional[_Frame]):
        ev = lambda x: self.eval(x, frame)
        if isinstance(e, ast.Name):
            return self.lookup(e.id, frame)
        if isinstance(e, ast.IntConst):
            return e.value
        if isinstance(e, ast.BoolConst):
            return e.value
        if isinstance(e, ast.UnaryNeg):
            v = ev(e.operand)
            if not _is_int(v):
                raise P2RuntimeError(f"bad operand type for unary -: {type(v).__name__}")
            return -v
        if isinstance(e, ast.Not):
            return not self.truth(ev(e.operand))
        if isinstance(e, ast.Add):
            a, b = ev(e.left), ev(e.right)
            if _is_int(a) and _is_int(b):
                return a + b
            if isinstance(a, list) and isinstance(b, list):
                return a + b
            raise P2RuntimeError(f"unsupported operand types for +: {type(a).__name__} and {type(b).__name__}")
        if isinstance(e, ast.And):
            a = ev(e.left)
            return ev(e.right) if self.truth(a) else a
        if isinstance(e, ast.Or):
            a = ev(e.left)
            return a if self.truth(a) else ev(e.right)
        if isinstance(e, ast.Eq):
            return self.equal(ev(e.left), ev(e.right))
        if isinstance(e, ast.NotEq):
            return not self.equal(ev(e.left), ev(e.right))
        if isinstance(e, ast.Is):
            return _same(ev(e.left), ev(e.right))
        if isinstance(e, ast.Ternary):
            return ev(e.then) if self.truth(ev(e.cond)) else ev(e.orelse)
        if isinstance(e, ast.ListDisplay):
            return [ev(x) for x in e.items]
        if isinstance(e, ast.DictDisplay):
            d = {}
            for k, v in e.pairs:
                key = ev(k)
                self._check_key(key)
                d[key] = ev(v)
            return d
        if isinstance(e, ast.Subscript):
            return self.load(ev(e.obj), ev(e.index))
        if isinstance(e, ast.Call):
            f = ev(e.func)
            args = [ev(a) for a in e.args]
            return self.call(f, args)
        if isinstance(e, ast.EvalInput):
            if self.pos >= len(self.inputs):
                raise InputExhausted("input script exhausted")
            v = self.inputs[self.pos]
            self.pos += 1
            return _copy(v)
        if isinstance(e, ast.PrintExpr):
            self.out.write(self.fmt(ev(e.arg)) + "\n")
            return None
        raise P2RuntimeError(f"unknown expression {e!r}")

    def call(self, f, args):
        if not isinstance(f, FunctionRef):
            raise P2RuntimeError(f"'{type(f).__name__}' object is not callable")
        node = f.node
        if len(args) != len(node.params):
            raise P2RuntimeError(f"{node.name}() takes {len(node.params)} arguments but {len(args)} were given")
        if self.depth >= self.max_depth:
            raise P2RuntimeError("maximum recursion depth exceeded")
        frame = _Frame(node, dict(zip(node.params, args)))
        self.depth += 1
        try:
            for s in node.body:
                self.exec_stmt(s, frame)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        return None

    @staticmethod
    def truth(v) -> bool:
        return bool(v) if not isinstance(v, FunctionRef) else True

    @staticmethod
    def equal(a, b) -> bool:
        if isinstance(a, FunctionRef) or isinstance(b, FunctionRef):
            return a is b
        return a == b

    @staticmethod
    def _check_key(key):
        if isinstance(key, (list, dict)):
            raise P2RuntimeError(f"unhashable type: '{type(key).__name__}'")

    def load(self, obj, key):
        if isinstance(obj, list):
            if not _is_int(key):
                raise P2RuntimeError("list indices must be integers")
            if not -len(obj) <= key < len(obj):
                raise P2RuntimeError("list index out of range")
            return obj[key]
        if isinstance(obj, dict):
            self._check_key(key)
            if key not in obj:
                raise P2RuntimeError(f"key error: {key!r}")
            return obj[key]
        raise P2RuntimeError(f"'{type(obj).__name__}' object is not subscriptable")

    def store(self, obj, key, value):
        if isinstance(obj, list):
            if not _is_int(key):
                raise P2RuntimeError("list indices must be integers")
            if not -len(obj) <= key < len(obj):
                raise P2RuntimeError("list assignment index out of range")
            obj[key] = value
        elif isinstance(obj, dict):
            self._check_key(key)
            obj[key] = value
        else:
            raise P2RuntimeError(f"'{type(obj).__name__}' object does not support item assignment")


def _copy(v):
    if isinstance(v, list):
        return [_copy(x) for x in v]
    if isinstance(v, dict):
        return {k: _copy(x) for k, x in v.items()}
    return v


def run(program: ast.Program, inputs: Iterable = ()) -> str:
    """Captured stdout of running ``program`` on the given input values."""
    return Interpreter(inputs).run_program(program)


def run_partial(program: ast.Program, inputs: Iterable = ()) -> tuple:
    """(stdout so far, error or None): output is kept when the program fails."""
    it = Interpreter(inputs)
    try:
        it.run_program(program)
        return it.out.getvalue(), None
    except P2RuntimeError as e:
        return it.out.getvalue(), e
