"""Turn a search candidate into a real function: extra parameters and a return plan.

Bodies are straight-line code (P2 has no loops or if-statements), so liveness
is a single forward scan.  Subscript writes count as a read of the base
followed by a write to the base name.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import sexpr as sx
from . import syntax as ast
from .sexpr import App
from .search import Candidate, MatchSite, Pattern


class ClosureFailure(Exception):
    """The candidate cannot be closed into a single function."""


# --- reads and writes ------------------------------------------------------

def expr_reads(e) -> list:
    """Names read by an expression, in source order (with repeats)."""
    return [n.id for n in ast.walk(e) if isinstance(n, ast.Name)]


def stmt_effects(s) -> tuple:
    """(reads, name writes) of one statement; reads come first in evaluation."""
    if isinstance(s, ast.Assign):
        if isinstance(s.target, ast.Name):
            return expr_reads(s.value), [s.target.id]
        reads = expr_reads(s.value) + expr_reads(s.target)
        base = s.target.obj
        return reads, [base.id] if isinstance(base, ast.Name) else []
    if isinstance(s, ast.FunctionDef):
        return [], [s.name]
    return expr_reads(s.value), []


def live_after(stmts, extra=frozenset()) -> set:
    """Names whose current value may be read by ``stmts`` (plus ``extra``)."""
    live = set(extra)
    killed = set()
    for s in stmts:
        reads, writes = stmt_effects(s)
        live.update(r for r in reads if r not in killed)
        if isinstance(s, ast.Assign) and isinstance(s.target, ast.Name):
            killed.add(s.target.id)
        elif isinstance(s, ast.FunctionDef):
            killed.add(s.name)
    return live


def global_reads(program: ast.Program) -> frozenset:
    """Names that some function in the program reads from module scope."""
    out = set()
    for s in program.body:
        if isinstance(s, ast.FunctionDef):
            local = set(s.params)
            for t in s.body:
                local.update(stmt_effects(t)[1])
            for t in s.body:
                out.update(r for r in stmt_effects(t)[0] if r not in local)
    return frozenset(out)


# --- site context ----------------------------------------------------------

@dataclass(frozen=True)
class SiteContext:
    after: tuple           # statements that run after the site, same scope
    in_function: bool
    global_reads: frozenset  # empty inside functions


def _spine_items(term) -> list:
    out = []
    while isinstance(term, App) and term.head == "StatementList":
        out.append(term.children[0])
        term = term.children[1]
    return out


def site_context(program_term, pattern: Pattern, site: MatchSite) -> SiteContext:
    kind = pattern.root_kind
    node = program_term
    in_function = False
    for i in site.path:
        if isinstance(node, App) and node.head == "def":
            in_function = True
        node = node.children[i]
    if kind == "statements":
        rest = sx.at_path(program_term, site.rest_path) if site.rest_path is not None else sx.EPS
    elif kind == "statement":
        rest = sx.at_path(program_term, site.path[:-1]).children[1]
    else:
        rest = sx.EPS
    after = tuple(sx.to_ast(s) for s in _spine_items(rest))
    reads = frozenset()
    if not in_function:
        reads = global_reads(ast.Program(tuple(sx.to_ast(s) for s in _spine_items(program_term))))
    return SiteContext(after, in_function, reads)


# --- liveness --------------------------------------------------------------

def body_statements(pattern: Pattern) -> list:
    """The pattern as P2 statements (an expression pattern yields ``[]``)."""
    tree = sx.delispify(pattern.body)
    if isinstance(tree, ast.Program):
        return list(tree.body)
    kind = pattern.root_kind
    if kind == "statements":
        return [s for s in tree.node if s is not None]
    if kind == "statement":
        return [tree.node]
    return []


def body_expression(pattern: Pattern):
    tree = sx.delispify(pattern.body)
    return tree.node


@dataclass(frozen=True)
class LivenessFacts:
    live_in: tuple              # free names of the body, first-use order
    assigned: tuple             # names written in the body, first-write order
    live_out_per_site: tuple    # per site: body names whose values are read afterwards
    returns: bool = False       # the body contains a return statement
    contexts: tuple = field(default=(), compare=False, repr=False)

    @property
    def live_out(self) -> tuple:
        """Union over sites, in ``assigned`` order."""
        union = set().union(*self.live_out_per_site) if self.live_out_per_site else set()
        return tuple(n for n in self.assigned if n in union)


def _binding_name(site: MatchSite, k: int) -> Optional[str]:
    b = site.bindings.get(k)
    if isinstance(b, App) and b.head == "name":
        return b.children[0].value
    return None


def caller_name(name: str, site: MatchSite) -> Optional[str]:
    """The caller-side variable a body name stands for at ``site``."""
    if name.startswith("_param"):
        return _binding_name(site, int(name[len("_param"):]))
    return name


def _is_hole_name(name: str, arity: int) -> bool:
    return name.startswith("_param") and name[len("_param"):].isdigit() and int(name[len("_param"):]) < arity


def analyze_liveness(c: Candidate, corpus: list) -> LivenessFacts:
    """Liveness facts for a candidate over lispified programs ``corpus``."""
    pattern = c.pattern
    arity = pattern.arity
    if pattern.root_kind == "expression":
        reads = expr_reads(body_expression(pattern))
        live_in = tuple(dict.fromkeys(r for r in reads if not _is_hole_name(r, arity)))
        return LivenessFacts(live_in, (), tuple(frozenset() for _ in c.sites))
    stmts = body_statements(pattern)
    live_in, assigned, written = [], [], set()
    for s in stmts:
        reads, writes = stmt_effects(s)
        for r in reads:
            if r not in written and not _is_hole_name(r, arity) and r not in live_in:
                live_in.append(r)
        for w in writes:
            written.add(w)
            if w not in assigned:
                assigned.append(w)
    returns = any(isinstance(s, ast.Return) for s in stmts)
    per_site, contexts = [], []
    for site in c.sites:
        ctx = site_context(corpus[site.program], pattern, site)
        contexts.append(ctx)
        if returns:
            per_site.append(frozenset())
            continue
        live = live_after(ctx.after, ctx.global_reads)
        out = set()
        for n in assigned:
            caller = caller_name(n, site)
            if caller is not None and caller in live:
                out.add(n)
        per_site.append(frozenset(out))
    return LivenessFacts(tuple(live_in), tuple(assigned), tuple(per_site), returns, tuple(contexts))


# --- closing ---------------------------------------------------------------

@dataclass(frozen=True)
class ReturnPlan:
    kind: str                 # 'single', 'multiple' or 'last_expr'
    names: tuple = ()         # returned names for 'single'/'multiple'
    expr: object = None       # returned expression for 'single' expression bodies / 'last_expr'

    def describe(self) -> list:
        if self.kind == "last_expr":
            return [] if self.expr is None else [ast.unparse_expr(self.expr)]
        if self.names:
            return list(self.names)
        return [ast.unparse_expr(self.expr)]


@dataclass(frozen=True)
class ClosedAbstraction:
    name: str
    params: tuple
    body: tuple
    return_plan: ReturnPlan
    pattern: Pattern
    facts: LivenessFacts
    sites: tuple = field(default=(), compare=False, repr=False)  # aligned with facts.live_out_per_site

    @property
    def hole_params(self) -> tuple:
        return self.params[: self.pattern.arity]

    @property
    def extra_params(self) -> tuple:
        return self.params[self.pattern.arity:]

    @property
    def kind(self) -> str:
        return self.pattern.root_kind

    def definition(self) -> ast.FunctionDef:
        return ast.FunctionDef(self.name, self.params, self.body)

    def source(self) -> str:
        return ast.unparse(ast.Program((self.definition(),)))

    def body_names(self) -> frozenset:
        """Every identifier the closed function reads, writes or declares."""
        names = set(self.params)
        for s in self.body:
            for n in ast.walk(s):
                if isinstance(n, ast.Name):
                    names.add(n.id)
        return frozenset(names)


def _last_value(last):
    if isinstance(last, ast.Print):
        return ast.PrintExpr(last.value)
    return last.value


def close(c: Candidate, facts: LivenessFacts, name: str = "_leroy_fn0") -> ClosedAbstraction:
    """Add live-in parameters and a trailing return to a candidate body."""
    pattern = c.pattern
    for _, t in sx.subterms(pattern.body):
        if isinstance(t, sx.Atom) and isinstance(t.value, str) and _is_hole_name(t.value, 1 << 30):
            raise ClosureFailure(f"body already uses the parameter name {t.value}")
    params = tuple(sx.hole_name(k) for k in range(pattern.arity)) + facts.live_in
    if len(set(params)) != len(params):
        raise ClosureFailure(f"parameter names collide: {params}")
    if pattern.root_kind == "expression":
        e = body_expression(pattern)
        return ClosedAbstraction(name, params, (ast.Return(e),), ReturnPlan("single", (), e), pattern, facts,
                                 tuple(c.sites))
    body = list(body_statements(pattern))
    for site, out in zip(c.sites, facts.live_out_per_site):
        callers = [caller_name(n, site) for n in out]
        if len(set(callers)) != len(callers):
            raise ClosureFailure(f"live-out values {sorted(out)} all land in one caller variable")
    live_out = facts.live_out
    if facts.returns:
        plan = ReturnPlan("last_expr")
    elif len(live_out) == 1:
        plan = ReturnPlan("single", live_out)
        body.append(ast.Return(ast.Name(live_out[0])))
    elif live_out:
        plan = ReturnPlan("multiple", live_out)
        body.append(ast.Return(ast.ListDisplay(tuple(ast.Name(n) for n in live_out))))
    else:
        last = body[-1]
        if isinstance(last, (ast.Print, ast.ExprStmt)):
            value = _last_value(last)
            body[-1] = ast.Return(value)
        else:
            value = last.target
            body.append(ast.Return(value))
        plan = ReturnPlan("last_expr", (), value)
    return ClosedAbstraction(name, params, tuple(body), plan, pattern, facts, tuple(c.sites))
