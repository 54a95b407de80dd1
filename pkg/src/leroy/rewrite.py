"""Call-site validation, corpus rewriting and compression metrics."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import sexpr as sx
from . import syntax as ast
from .closing import ClosedAbstraction, SiteContext, caller_name
from .search import MatchSite
from .sexpr import App, EPS

RETURN_TEMP = "_leroy_ret"


class RewriteError(RuntimeError):
    """A rewritten program failed to re-parse or broke an invariant."""


# --- validation ------------------------------------------------------------

@dataclass(frozen=True)
class CallSiteCheck:
    site: MatchSite
    argument_names: frozenset
    body_names: frozenset
    accepted: bool
    reason: str = ""        # why a site was rejected
    clash: Optional[str] = None

    @property
    def verdict(self) -> str:
        return "accept" if self.accepted else f"reject({self.clash or self.reason})"


def _names(e) -> set:
    return {n.id for n in ast.walk(e) if isinstance(n, ast.Name)}


def _has(e, kinds) -> bool:
    return any(isinstance(n, kinds) for n in ast.walk(e))


def _maybe_list(e) -> bool:
    if isinstance(e, (ast.IntConst, ast.BoolConst, ast.UnaryNeg, ast.Not, ast.Eq, ast.NotEq, ast.Is)):
        return False
    if isinstance(e, ast.Add):
        return _maybe_list(e.left) and _maybe_list(e.right)
    return True


def _fresh_mutable(e) -> bool:
    """Whether evaluating ``e`` may build a new list or dict."""
    if isinstance(e, (ast.ListDisplay, ast.DictDisplay)):
        return True
    if isinstance(e, ast.Add):
        return _maybe_list(e.left) and _maybe_list(e.right)
    if isinstance(e, ast.Ternary):
        return _fresh_mutable(e.then) or _fresh_mutable(e.orelse)
    if isinstance(e, (ast.And, ast.Or)):
        return _fresh_mutable(e.left) or _fresh_mutable(e.right)
    return False


def _may_raise(e) -> bool:
    return _has(e, (ast.Subscript, ast.Add, ast.UnaryNeg, ast.Call, ast.EvalInput))


def conditional_holes(body) -> set:
    """Holes that sit where the original code might skip evaluating them."""
    out = set()

    def go(t, cond):
        if isinstance(t, sx.Hole):
            if cond:
                out.add(t.index)
            return
        if isinstance(t, App):
            for i, c in enumerate(t.children):
                lazy = (t.head == "ifexp" and i in (0, 2)) or (t.head in ("and", "or") and i == 1)
                go(c, cond or lazy)
    go(body, False)
    return out


def hole_counts(body) -> dict:
    counts = {}
    for _, t in sx.subterms(body):
        if isinstance(t, sx.Hole):
            counts[t.index] = counts.get(t.index, 0) + 1
    return counts


def validate_call_site(a: ClosedAbstraction, s: MatchSite, ctx: Optional[SiteContext] = None) -> CallSiteCheck:
    """Accept a site unless rewriting it could change what the program does.

    The primary rule rejects a site when a name used in an argument also
    occurs in the function; the remaining rules guard against moving an
    argument's evaluation ahead of the body.
    """
    args = [sx.to_ast(s.bindings[k]) for k in range(a.pattern.arity)]
    arg_names = frozenset(n for e in args for n in _names(e))
    body_names = a.body_names()
    clash = sorted(arg_names & body_names)
    check = lambda ok, reason="", clash=None: CallSiteCheck(s, arg_names, body_names, ok, reason, clash)
    if clash:
        return check(False, "name_clash", clash[0])
    if any(_has(e, (ast.Call, ast.PrintExpr, ast.EvalInput)) for e in args):
        return check(False, "effectful_argument")
    cond = conditional_holes(a.pattern.body)
    if any(k in cond and _may_raise(args[k]) for k in range(len(args))):
        return check(False, "conditional_argument")
    body_calls = any(_has(st, ast.Call) for st in a.body)
    sub_writes = any(isinstance(st, ast.Assign) and isinstance(st.target, ast.Subscript) for st in a.body)
    if (body_calls or sub_writes) and any(_has(e, ast.Subscript) for e in args):
        return check(False, "aliasing")
    counts = hole_counts(a.pattern.body)
    if any(counts.get(k, 0) > 1 and _fresh_mutable(args[k]) for k in range(len(args))):
        return check(False, "shared_mutable")
    if ctx is not None and not ctx.in_function and body_calls \
            and set(a.facts.assigned) & ctx.global_reads:
        return check(False, "global_write")
    return check(True)


# --- replacement -----------------------------------------------------------

def call_expression(a: ClosedAbstraction, s: MatchSite) -> ast.Call:
    args = tuple(sx.to_ast(s.bindings[k]) for k in range(a.pattern.arity))
    args += tuple(ast.Name(n) for n in a.extra_params)
    return ast.Call(ast.Name(a.name), args)


def replacement(a: ClosedAbstraction, site_index: int):
    """The expression or statement list that replaces one site."""
    s = a.sites[site_index]
    call = call_expression(a, s)
    if a.kind == "expression":
        return call
    if a.facts.returns:
        return [ast.Return(call)]
    plan = a.return_plan
    needed = a.facts.live_out_per_site[site_index]
    wanted = [(i, caller_name(n, s)) for i, n in enumerate(plan.names) if n in needed]
    if plan.kind == "single" and wanted:
        return [ast.Assign(ast.Name(wanted[0][1]), call)]
    if plan.kind == "multiple" and len(wanted) == 1:
        i, name = wanted[0]
        return [ast.Assign(ast.Name(name), ast.Subscript(call, ast.IntConst(i)))]
    if plan.kind == "multiple" and wanted:
        out = [ast.Assign(ast.Name(RETURN_TEMP), call)]
        out += [ast.Assign(ast.Name(name), ast.Subscript(ast.Name(RETURN_TEMP), ast.IntConst(i)))
                for i, name in wanted]
        return out
    return [ast.ExprStmt(call)]


def _spine(stmts, tail):
    for st in reversed(stmts):
        tail = App("StatementList", (sx.lispify(st), tail))
    return tail


def matched_size(a: ClosedAbstraction, term, s: MatchSite) -> int:
    """AST nodes a site removes (the untouched remainder excluded)."""
    node = sx.at_path(term, s.path)
    if s.rest_path is not None:
        node = sx.replace_at(node, s.rest_path[len(s.path):], EPS)
    r = sx.to_ast(node)
    return ast.ast_size(r)


def site_savings(a: ClosedAbstraction, terms: list, site_index: int) -> int:
    s = a.sites[site_index]
    return matched_size(a, terms[s.program], s) - ast.ast_size(replacement(a, site_index))


def splice(term, a: ClosedAbstraction, site_index: int):
    s = a.sites[site_index]
    new = replacement(a, site_index)
    if a.kind == "expression":
        return sx.replace_at(term, s.path, sx.lispify(new))
    if a.kind == "statement":
        parent = s.path[:-1]
        rest = sx.at_path(term, parent).children[1]
        return sx.replace_at(term, parent, _spine(new, rest))
    rest = sx.at_path(term, s.rest_path) if s.rest_path is not None else EPS
    return sx.replace_at(term, s.path, _spine(new, rest))


def apply(a: ClosedAbstraction, programs: list, accepted: Optional[Sequence[int]] = None) -> list:
    """Rewrite the accepted sites of ``a`` in ``programs``; others stay as they are.

    Without ``accepted``, every site that passes :func:`validate_call_site` is used.

    Sites are spliced deepest-last-first so earlier paths stay valid; a site
    inside another site's untouched remainder is handled before that site.
    """
    terms = [sx.lispify(p) for p in programs]
    if accepted is None:
        contexts = a.facts.contexts or (None,) * len(a.sites)
        accepted = [i for i, (s, ctx) in enumerate(zip(a.sites, contexts))
                    if validate_call_site(a, s, ctx).accepted]
    touched = set()
    for i in sorted(accepted, key=lambda i: (a.sites[i].program, a.sites[i].path), reverse=True):
        pid = a.sites[i].program
        terms[pid] = splice(terms[pid], a, i)
        touched.add(pid)
    out = list(programs)
    for pid in sorted(touched):
        prog = sx.delispify(terms[pid])
        if not isinstance(prog, ast.Program):
            raise RewriteError(f"program {pid} did not rebuild after rewriting with {a.name}")
        text = ast.unparse(prog)
        try:
            reparsed = ast.parse_program(text)
        except ast.P2SyntaxError as e:
            raise RewriteError(f"program {pid} no longer parses after rewriting with {a.name}: {e}") from e
        if ast.strip_spans(reparsed) != ast.strip_spans(prog):
            raise RewriteError(f"program {pid} does not round-trip after rewriting with {a.name}")
        out[pid] = prog
    return out


def check_no_capture(library: list, programs: list):
    """Post-hoc: no call to a learned function passes a name its body uses."""
    bodies = {a.name: a for a in library}
    for pid, prog in enumerate(programs):
        for n in ast.walk(prog):
            if isinstance(n, ast.Call) and isinstance(n.func, ast.Name) and n.func.id in bodies:
                a = bodies[n.func.id]
                hole_args = n.args[: a.pattern.arity]
                bad = {m for e in hole_args for m in _names(e)} & a.body_names()
                if bad:
                    raise RewriteError(f"program {pid}: call to {a.name} captures {sorted(bad)}")


# --- metrics ---------------------------------------------------------------

@dataclass
class CompressionReport:
    original_nodes: int
    rewritten_nodes_excl_library: int
    rewritten_nodes_incl_library: int
    abstractions: list = field(default_factory=list)   # dicts: name, body_nodes, params, returns, sites
    prune_stats: dict = field(default_factory=dict)
    rejected_call_sites: int = 0
    dropped: list = field(default_factory=list)        # dicts: pattern, reason

    @property
    def ratio_excl(self) -> Fraction:
        return Fraction(self.original_nodes, self.rewritten_nodes_excl_library)

    @property
    def growth_incl(self) -> Fraction:
        return Fraction(self.rewritten_nodes_incl_library - self.original_nodes, self.original_nodes)

    def to_json(self) -> dict:
        return {
            "original_nodes": self.original_nodes,
            "rewritten_nodes": self.rewritten_nodes_excl_library,
            "rewritten_plus_library_nodes": self.rewritten_nodes_incl_library,
            "compression_ratio": round(float(self.ratio_excl), 6),
            "library_growth_pct": round(float(self.growth_incl) * 100, 6),
            "abstractions": self.abstractions,
            "pruned": self.prune_stats,
            "rejected_call_sites": self.rejected_call_sites,
            "dropped_abstractions": self.dropped,
        }


def measure(before: list, after: list, library: list, *, sites: Optional[dict] = None,
            prune_stats: Optional[dict] = None, rejected: int = 0, dropped=()) -> CompressionReport:
    """Count nodes from the programs themselves; nothing is carried over from the search."""
    original = sum(ast.ast_size(p) for p in before)
    rewritten = sum(ast.ast_size(p) for p in after)
    lib = sum(ast.ast_size(a.definition()) for a in library)
    if sites is None:
        sites = count_calls(after, [a.name for a in library])
    abstractions = [{
        "name": a.name,
        "body_nodes": ast.ast_size(list(a.body)),
        "params": list(a.params),
        "returns": a.return_plan.describe(),
        "sites": sites.get(a.name, 0),
    } for a in library]
    stats = prune_stats if prune_stats is not None else {
        "macro_like": 0, "invalid_parameter": 0, "too_small": 0, "calls_abstraction": 0}
    return CompressionReport(original, rewritten, rewritten + lib, abstractions, dict(stats),
                             rejected, list(dropped))


def count_calls(programs: list, names: list) -> dict:
    counts = {n: 0 for n in names}
    for p in programs:
        for n in ast.walk(p):
            if isinstance(n, ast.Call) and isinstance(n.func, ast.Name) and n.func.id in counts:
                counts[n.func.id] += 1
    return counts


# --- emission --------------------------------------------------------------

def library_program(library: list) -> ast.Program:
    return ast.Program(tuple(a.definition() for a in library))


def standalone(program: ast.Program, library: list) -> ast.Program:
    """The program with the definitions it calls prepended, in library order."""
    used = count_calls([program], [a.name for a in library])
    needed = [a.definition() for a in library if used[a.name]]
    return ast.Program(tuple(needed) + program.body)


def strip_library(program: ast.Program, prefix: str = "_leroy_") -> ast.Program:
    """Inverse of :func:`standalone`: drop leading learned definitions."""
    body = list(program.body)
    while body and isinstance(body[0], ast.FunctionDef) and body[0].name.startswith(prefix):
        body.pop(0)
    return ast.Program(tuple(body))
