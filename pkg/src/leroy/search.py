"""Corpus-guided top-down search for the pattern of maximal compression utility.

A pattern is an s-expression with numbered holes.  The search starts from a
single hole and refines it one hole at a time: a hole is either expanded into
one of the node kinds found at that position across the current matches,
kept as a parameter, or merged with an earlier parameter whose bindings agree.
Branches whose utility upper bound falls below the best candidate found so far
are cut.
"""
from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import prune
from . import sexpr as sx
from . import syntax as ast
from .sexpr import App, Atom, EPS, Hole, REST, Slot

RESERVED_PREFIX = "_leroy_"

# Arguments are evaluated before the body runs, so a hole may not bind code
# with side effects; nor may it smuggle a learned function's name into a body.
EFFECT_HEADS = frozenset({"call", "printexpr", "evalinput"})


def unbindable(term, reserved_prefix: str = RESERVED_PREFIX) -> bool:
    """Whether ``term`` may not be passed as an argument."""
    for _, t in sx.subterms(term):
        if isinstance(t, App) and t.head in EFFECT_HEADS:
            return True
        if isinstance(t, Atom) and isinstance(t.value, str) and t.value.startswith(reserved_prefix):
            return True
    return False


class SearchError(RuntimeError):
    """Internal inconsistency between the search and the rewrite simulation."""


@dataclass(frozen=True)
class Pattern:
    body: sx.SExpr

    def __post_init__(self):
        if isinstance(self.body, Hole) or self.body is REST:
            raise ValueError("a pattern body cannot be a single hole")

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        return cls(normalize_holes(sx.parse_sexpr(text)))

    @functools.cached_property
    def hole_order(self) -> list:
        return sx.holes_of(self.body)

    @property
    def arity(self) -> int:
        return len(self.hole_order)

    @functools.cached_property
    def root_kind(self) -> str:
        return sx.root_kind(self.body)

    @property
    def rest_path(self) -> Optional[tuple]:
        for path, t in sx.subterms(self.body):
            if t is REST:
                return path
        return None

    def __str__(self):
        return sx.to_text(self.body)


def normalize_holes(body):
    """Renumber holes densely in first-occurrence order."""
    order = {k: i for i, k in enumerate(sx.holes_of(body))}

    def go(t):
        if isinstance(t, Hole):
            return Hole(order[t.index])
        if isinstance(t, App):
            return App(t.head, tuple(go(c) for c in t.children))
        return t
    return go(body)


@dataclass(frozen=True)
class MatchSite:
    program: int
    path: tuple
    bindings: dict  # hole index -> bound s-expression
    tail_rest: Optional[sx.SExpr] = None
    rest_path: Optional[tuple] = None  # absolute path of the untouched remainder

    def covers(self, path: tuple) -> bool:
        """Whether ``path`` lies in the region this site replaces."""
        if path[: len(self.path)] != self.path:
            return False
        return self.rest_path is None or path[: len(self.rest_path)] != self.rest_path


@dataclass(frozen=True)
class SearchConfig:
    min_body_size: int = 20
    max_arity: int = 4
    exhaustive: bool = False  # disable branch-and-bound cuts
    reserved_prefix: str = RESERVED_PREFIX

    def __post_init__(self):
        if self.min_body_size < 1:
            raise ValueError("min_body_size must be >= 1")
        if self.max_arity < 0:
            raise ValueError("max_arity must be >= 0")


@dataclass
class Candidate:
    pattern: Pattern
    sites: list
    utility: int


# --- matching --------------------------------------------------------------

def _positions(term, reserved_prefix):
    """Preorder (path, node, slot) for nodes that may root a match."""
    def go(t, path, slot, parent_head):
        yield path, t, slot
        if isinstance(t, App):
            if t.head == "def" and isinstance(t.children[0], Atom) \
                    and str(t.children[0].value).startswith(reserved_prefix):
                return
            slots = sx.slots_of(t.head)
            for i, c in enumerate(t.children):
                yield from go(c, path + (i,), slots[i], t.head)
    yield from go(term, (), sx.root_slot(term), None)


def _root_ok(pattern_kind, node, slot) -> bool:
    if pattern_kind == "statements":
        return slot is Slot.TAIL and isinstance(node, App) and node.head == "StatementList"
    if pattern_kind == "statement":
        return slot is Slot.STMT
    return slot is Slot.EXPR


def match_at(body, term) -> Optional[tuple]:
    """Match a pattern body against a term: (bindings, relative rest path) or None."""
    bindings = {}
    rest = []

    def go(p, t, path):
        if isinstance(p, Hole):
            if t is EPS or t is REST:
                return False
            if p.index in bindings:
                return bindings[p.index] == t
            bindings[p.index] = t
            return True
        if p is REST:
            if not (t is EPS or (isinstance(t, App) and t.head == "StatementList")):
                return False
            rest.append((path, t))
            return True
        if isinstance(p, App):
            if not isinstance(t, App) or t.head != p.head or len(t.children) != len(p.children):
                return False
            return all(go(pc, tc, path + (i,)) for i, (pc, tc) in enumerate(zip(p.children, t.children)))
        return p == t

    if not go(body, term, ()):
        return None
    return bindings, (rest[0] if rest else None)


def positions(corpus: list, reserved_prefix: str = RESERVED_PREFIX) -> list:
    """(program, path, node, slot) for every node that may root a match, in order."""
    return [(pid, path, node, slot) for pid, prog in enumerate(corpus)
            for path, node, slot in _positions(prog, reserved_prefix)]


def all_matches(pattern: Pattern, corpus: list, reserved_prefix: str = RESERVED_PREFIX, *,
                where: Optional[list] = None) -> list:
    """Every position where the pattern matches, in program then preorder order.

    ``where`` restricts the scan to a precomputed, ordered subset of :func:`positions`.
    """
    kind = pattern.root_kind
    out = []
    for pid, path, node, slot in (positions(corpus, reserved_prefix) if where is None else where):
        if not _root_ok(kind, node, slot):
            continue
        m = match_at(pattern.body, node)
        if m is None:
            continue
        bindings, rest = m
        if rest is None:
            out.append(MatchSite(pid, path, bindings))
        else:
            out.append(MatchSite(pid, path, bindings, rest[1], path + rest[0]))
    return out


def select_sites(matches: list) -> list:
    """Greedy leftmost-outermost choice of pairwise non-overlapping matches."""
    chosen = []
    for m in matches:
        if any(c.program == m.program and c.covers(m.path) for c in chosen):
            continue
        chosen.append(m)
    return chosen


def find_matches(pattern: Pattern, corpus: list, reserved_prefix: str = RESERVED_PREFIX) -> list:
    """Maximal non-overlapping matches of ``pattern`` over lispified programs."""
    return select_sites(all_matches(pattern, corpus, reserved_prefix))


# --- utility by simulated rewrite ----------------------------------------

def instantiate(body, bindings: dict):
    """Substitute bindings for holes; an open tail becomes the end of the list."""
    if isinstance(body, Hole):
        return bindings[body.index]
    if body is REST:
        return EPS
    if isinstance(body, App):
        return App(body.head, tuple(instantiate(c, bindings) for c in body.children))
    return body


def _fragment(term):
    tree = sx.delispify(term)
    if isinstance(tree, ast.Program):
        return list(tree.body)
    return tree.node


def simulated_definition(pattern: Pattern, name: str = "_f") -> ast.FunctionDef:
    """The function a pattern becomes before closing: holes as ``_param<k>``."""
    node = _fragment(pattern.body)
    params = tuple(sx.hole_name(k) for k in pattern.hole_order)
    if pattern.root_kind == "expression":
        body = (ast.Return(node),)
    elif pattern.root_kind == "statement":
        body = (node,)
    else:
        body = tuple(node)
    return ast.FunctionDef(name, params, body)


@functools.lru_cache(maxsize=1 << 16)
def _binding_ast(term):
    return sx.to_ast(term)


@functools.lru_cache(maxsize=1 << 16)
def _fragment_size(term) -> int:
    return ast.ast_size(_fragment(term))


def simulated_call(pattern: Pattern, site: MatchSite, name: str = "_f"):
    args = tuple(_binding_ast(site.bindings[k]) for k in pattern.hole_order)
    call = ast.Call(ast.Name(name), args)
    return call if pattern.root_kind == "expression" else ast.ExprStmt(call)


def utility(pattern: Pattern, sites: list) -> int:
    """Net AST-node savings of rewriting every site into a call.

    Builds the replacement calls and the function definition and counts their
    nodes; closing overhead (extra parameters, returns) is not included.
    """
    total = 0
    for site in sites:
        matched = _fragment_size(instantiate(pattern.body, site.bindings))
        total += matched - ast.ast_size(simulated_call(pattern, site))
    return total - ast.ast_size(simulated_definition(pattern))


# --- corpus index for the search -------------------------------------------

class CorpusIndex:
    """Flat preorder arrays over all programs, with subtree intervals and sizes."""

    def __init__(self, corpus: list, reserved_prefix: str = RESERVED_PREFIX):
        self.prefix = reserved_prefix
        self.terms = []
        self.key = []
        self.kids = []
        self.slot = []
        self.end = []
        self.weight = []
        self.struct = []
        self.roots = []  # ids that may root a match
        self.program = []
        self.path = []
        self.unbindable = []  # subtree may not become an argument
        self.occ = {}  # struct id -> node ids in preorder
        self._cons = {}
        for pid, prog in enumerate(corpus):
            self._add(prog, sx.root_slot(prog), None, False, pid, ())
        prefix = [0]
        for w in self.weight:
            prefix.append(prefix[-1] + w)
        for ids in self.occ.values():
            ids.sort()
        self.full = [prefix[self.end[i]] - prefix[i] for i in range(len(self.terms))]

    def _add(self, t, slot, parent_head, excluded, pid, path):
        i = len(self.terms)
        self.terms.append(t)
        self.slot.append(slot)
        self.program.append(pid)
        self.path.append(path)
        self.weight.append(sx.ast_weight(t, slot, parent_head))
        self.end.append(None)
        self.kids.append(())
        self.struct.append(None)
        self.unbindable.append(
            (isinstance(t, Atom) and isinstance(t.value, str) and t.value.startswith(self.prefix))
            or (isinstance(t, App) and t.head in EFFECT_HEADS))
        if isinstance(t, App):
            self.key.append(("app", t.head))
        elif isinstance(t, Atom):
            self.key.append(("int" if isinstance(t.value, int) else "sym", t.value))
        else:
            self.key.append(("eps",))
        if not excluded and ((slot is Slot.EXPR) or (slot is Slot.TAIL and self.key[i] == ("app", "StatementList"))):
            self.roots.append(i)
        kids = []
        if isinstance(t, App):
            if t.head == "def" and str(t.children[0].value).startswith(self.prefix):
                excluded = True
            slots = sx.slots_of(t.head)
            for j, c in enumerate(t.children):
                kids.append(self._add(c, slots[j], t.head, excluded, pid, path + (j,)))
        self.kids[i] = tuple(kids)
        self.end[i] = len(self.terms)
        sig = (self.key[i], tuple(self.struct[k] for k in kids))
        self.struct[i] = self._cons.setdefault(sig, len(self._cons))
        self.unbindable[i] = self.unbindable[i] or any(self.unbindable[k] for k in kids)
        self.occ.setdefault(self.struct[i], []).append(i)
        return i

    def count_within(self, node: int, root: int) -> int:
        """Copies of ``node``'s subtree inside ``root``'s subtree."""
        ids = self.occ[self.struct[node]]
        return bisect.bisect_left(ids, self.end[root]) - bisect.bisect_left(ids, root)


# --- the search ------------------------------------------------------------

_HEAD_ORDER = {h: i for i, h in enumerate(sx.VOCABULARY)}


def _key_order(key):
    if key[0] == "app":
        return (0, _HEAD_ORDER[key[1]], "")
    if key[0] == "eps":
        return (1, 0, "")
    if key[0] == "int":
        return (2, key[1], "")
    return (3, 0, key[1])


@dataclass
class _State:
    exp: Optional[tuple]  # expansions as a linked list: (hole id, node, previous)
    open: list          # [(hole id, slot)], first is expanded next
    params: list        # frozen parameter hole ids
    rest: Optional[int]  # hole id frozen as an open statement tail
    concrete: int       # AST weight of concrete pattern nodes
    dups: list          # [(hole id, param id)] merged occurrences
    kind: Optional[str]  # 'expression' | 'statements'
    roots: list
    binds: dict         # live hole id -> [node id per match]
    new: bool = True    # a pattern not evaluated before


def _materialize(exp, rename: dict):
    nodes = {}
    while exp is not None:
        h, node, exp = exp
        nodes[h] = node

    def build(h):
        if h not in nodes:
            return rename.get(h, Hole(h))
        node = nodes[h]
        if isinstance(node, App):
            return App(node.head, tuple(build(k.index) for k in node.children))
        return node
    return build(0)


class _Search:
    def __init__(self, idx: CorpusIndex, cfg: SearchConfig, stats, exclude, trace, frontier, check, keep: int = 1):
        self.idx = idx
        self.keep = keep
        self.top = []  # (-utility, text, pattern), best first, at most ``keep`` long
        self.check = check
        self.cfg = cfg
        self.stats = stats
        self.exclude = set(exclude)
        self.trace = trace
        self.frontier = frontier
        self.best_u = 0      # utility a new entry must reach
        self.best_text = None  # and the text it must beat on a tie, once ``top`` is full
        self.next_hole = 1
        self.visited = 0

    def fresh(self):
        h = self.next_hole
        self.next_hole += 1
        return h

    # scoring
    def _classify(self, st):
        params = list(st.params)
        rest = st.rest
        invalid = []
        for h, slot in st.open:
            if slot is Slot.EXPR:
                params.append(h)
            elif slot is Slot.TAIL and rest is None:
                rest = h
            else:
                invalid.append(h)
        return params, rest, invalid

    def score(self, st) -> int:
        idx = self.idx
        params, rest, invalid = self._classify(st)
        arity = len(params) + len(invalid)
        is_expr = st.kind == "expression"
        call = 2 if is_expr else 3
        definition = 1 + arity + (1 if is_expr else 0) + st.concrete + arity + len(st.dups)
        ends = st.binds[rest] if rest is not None else None
        base = st.concrete - call
        full = idx.full
        dup_binds = [st.binds[u] for u, _ in st.dups]
        total = 0
        last_end = -1
        for i, r in enumerate(st.roots):
            if r < last_end:
                continue
            last_end = ends[i] if ends is not None else idx.end[r]
            total += base
            for b in dup_binds:
                total += full[b[i]]
        return total - definition

    def bound(self, st) -> float:
        if st.kind is None:
            return math.inf
        idx = self.idx
        full = idx.full
        is_expr = st.kind == "expression"
        call = 2 if is_expr else 3
        frozen = [st.binds[p] for p in st.params]
        rest = st.binds[st.rest] if st.rest is not None else None
        end = idx.end
        cap_base = call
        # Roots nest; sites chosen inside one root's subtree have disjoint
        # regions, so together they save at most that subtree minus one call.
        acc = 0
        stack = []  # [root, end, own ub, sum of nested bounds]
        for i, r in enumerate(st.roots):
            while stack and stack[-1][1] <= r:
                acc = self._close(stack, acc, full, cap_base)
            ub = full[r] - call
            if rest is not None:
                ub -= full[rest[i]]
            for b in frozen:
                ub -= full[b[i]]
            stack.append([r, end[r], ub if ub > 0 else 0, 0])
        while stack:
            acc = self._close(stack, acc, full, cap_base)
        n_open_expr = sum(1 for _, s in st.open if s is Slot.EXPR)
        def_lb = 1 + 2 * len(st.params) + st.concrete + (1 if is_expr else 0) + n_open_expr + len(st.dups)
        return acc - def_lb

    @staticmethod
    def _close(stack, acc, full, call):
        r, _, ub, nested = stack.pop()
        b = min(ub + nested, full[r] - call)
        if b > 0:
            if stack:
                stack[-1][3] += b
            else:
                acc += b
        return acc

    def pattern_of(self, st) -> Pattern:
        params, rest, invalid = self._classify(st)
        rename = {u: Hole(p) for u, p in st.dups}
        if rest is not None:
            rename[rest] = REST
        return Pattern(normalize_holes(_materialize(st.exp, rename)))

    def consider(self, st, parent_bound):
        u = self.score(st)
        self.visited += 1
        if self.trace is not None:
            self.trace(self.pattern_of(st), u, self.bound(st), parent_bound)
        if self.frontier is not None and u > 0:
            self.frontier.append((str(self.pattern_of(st)), u))
        if u <= 0 or u < self.best_u:
            return
        params, rest, invalid = self._classify(st)
        if len(params) + len(invalid) > self.cfg.max_arity:
            return
        unbindable = self.idx.unbindable
        if any(unbindable[n] for h, slot in st.open if slot is Slot.EXPR for n in st.binds[h]):
            return
        pattern = self.pattern_of(st)
        text = str(pattern)
        if u == self.best_u and self.best_text is not None and text >= self.best_text:
            return
        if text in self.exclude or any(e[1] == text for e in self.top):
            return
        verdict = self.check(Candidate(pattern, [], u), self.cfg.min_body_size, self.cfg.reserved_prefix)
        if not verdict.kept:
            if self.stats is not None:
                self.stats.record(verdict)
            return
        bisect.insort(self.top, (-u, text, pattern), key=lambda e: e[:2])
        del self.top[self.keep:]
        if len(self.top) == self.keep:
            self.best_u, self.best_text = -self.top[-1][0], self.top[-1][1]

    # refinement
    def children(self, st):
        idx = self.idx
        h, slot = st.open[0]
        rest_open = st.open[1:]
        bound_nodes = st.binds[h]
        groups = {}
        for i, n in enumerate(bound_nodes):
            groups.setdefault(idx.key[n], []).append(i)
        out = []
        for key in sorted(groups, key=_key_order):
            if key == ("app", "def"):
                continue
            sel = groups[key]
            first = bound_nodes[sel[0]]
            n_kids = len(idx.kids[first])
            kid_holes = [self.fresh() for _ in range(n_kids)]
            if key[0] == "app":
                node = App(key[1], tuple(Hole(k) for k in kid_holes))
                kid_slots = sx.slots_of(key[1])
            else:
                node = idx.terms[first]
                kid_slots = ()
            if len(sel) == len(bound_nodes):
                binds = {k: v for k, v in st.binds.items() if k != h}
            else:
                binds = {k: [v[i] for i in sel] for k, v in st.binds.items() if k != h}
            for j, kh in enumerate(kid_holes):
                binds[kh] = [idx.kids[bound_nodes[i]][j] for i in sel]
            kind = st.kind
            if kind is None:
                kind = "statements" if key == ("app", "StatementList") else "expression"
            weight = idx.weight[first]
            out.append(_State(
                exp=(h, node, st.exp),
                open=list(zip(kid_holes, kid_slots)) + rest_open,
                params=st.params, rest=st.rest, concrete=st.concrete + weight,
                dups=st.dups, kind=kind, roots=[st.roots[i] for i in sel], binds=binds))
        if st.kind is not None and slot is Slot.EXPR and not any(idx.unbindable[n] for n in bound_nodes):
            if not self._param_dominated(st, bound_nodes):
                    out.append(_State(st.exp, rest_open, st.params + [h], st.rest, st.concrete, st.dups,
                                  st.kind, st.roots, st.binds, new=False))
            struct = idx.struct
            for p in st.params:
                pb = st.binds[p]
                sel = [i for i, n in enumerate(bound_nodes) if struct[n] == struct[pb[i]]]
                if not sel:
                    continue
                binds = {k: [v[i] for i in sel] for k, v in st.binds.items()}
                out.append(_State(st.exp, rest_open, st.params, st.rest, st.concrete,
                                  st.dups + [(h, p)], st.kind, [st.roots[i] for i in sel], binds))
        elif slot is Slot.TAIL and st.rest is None:
            out.append(_State(st.exp, rest_open, st.params, h, st.concrete, st.dups,
                              st.kind, st.roots, st.binds, new=False))
        return out

    def _param_dominated(self, st, bound_nodes) -> bool:
        """Whether a parameter bound to the same subtree at every match loses to inlining it.

        With n >= 2 final sites, a binding of weight s and k merged copies,
        inlining gains (n - k - 1) * s + k + 2 nodes.  k is at most the number
        of further copies the second-richest match holds, so when even that
        worst case gains, the parameter branch can go.
        """
        idx = self.idx
        if self.cfg.exhaustive:
            return False
        first = bound_nodes[0]
        s = idx.struct[first]
        if any(idx.struct[n] != s for n in bound_nodes):
            return False
        counts = sorted((idx.count_within(first, r) for r in st.roots), reverse=True)
        k = counts[1] - 1
        w = idx.full[first]
        return (1 - k) * w + k + 2 > 0

    def _cut(self, b) -> bool:
        return not self.cfg.exhaustive and (b <= 0 or b < self.best_u)

    def run(self):
        idx = self.idx
        init = _State(None, [(0, None)], [], None, 0, [], None, list(idx.roots), {0: list(idx.roots)}, new=False)
        stack = [(init, math.inf)]
        while stack:
            st, b = stack.pop()
            if self._cut(b):
                continue
            live = []
            for child in self.children(st):
                if len(child.params) > self.cfg.max_arity:
                    continue
                # one match never pays for its own definition
                if len(child.roots) < 2 and not self.cfg.exhaustive:
                    continue
                cb = self.bound(child)
                if not self._cut(cb):
                    live.append((child, cb))
            for child, cb in live:
                if child.new:
                    self.consider(child, b)
            # most promising child on top of the stack
            for child, cb in sorted(reversed(live), key=lambda e: e[1]):
                if child.open:
                    stack.append((child, cb))
        return [(p, -nu) for nu, _, p in self.top]


def _candidate(corpus, cfg, pattern, u) -> Candidate:
    sites = find_matches(pattern, corpus, cfg.reserved_prefix)
    check = utility(pattern, sites)
    if check != u:
        raise SearchError(f"search scored {pattern} at {u}, simulated rewrite gives {check}")
    return Candidate(pattern, sites, u)


def search_top(corpus: list, cfg: SearchConfig = SearchConfig(), keep: int = 1, *,
               stats: Optional[prune.PruneStats] = None, exclude=(), trace: Optional[Callable] = None,
               frontier: Optional[list] = None, check: Callable = prune.check_all) -> list:
    """The ``keep`` best patterns, ordered by utility and then serialization.

    Entry i is what :func:`search_best` returns once entries 0..i-1 are
    excluded, so a caller that rejects a candidate can move to the next one
    without searching again.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if keep < 1:
        raise ValueError("keep must be >= 1")
    idx = CorpusIndex(corpus, cfg.reserved_prefix)
    s = _Search(idx, cfg, stats, exclude, trace, frontier, check, keep)
    return [_candidate(corpus, cfg, p, u) for p, u in s.run()]


def search_best(corpus: list, cfg: SearchConfig = SearchConfig(), *, stats: Optional[prune.PruneStats] = None,
                exclude=(), trace: Optional[Callable] = None, frontier: Optional[list] = None,
                check: Callable = prune.check_all) -> Optional[Candidate]:
    """Best pattern over lispified programs, or None if nothing has utility > 0.

    Candidates that fail a prune check are skipped (and tallied in ``stats``);
    patterns whose serialization is in ``exclude`` are skipped silently.
    """
    top = search_top(corpus, cfg, 1, stats=stats, exclude=exclude, trace=trace, frontier=frontier, check=check)
    return top[0] if top else None
