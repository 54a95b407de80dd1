"""Brute-force reference for the pattern search, for small corpora only.

Every pattern the search can produce generalizes some subtree of the corpus:
pick the subtree, turn an antichain of its expression positions into holes,
optionally cut the statement list into an open tail, and merge holes whose
bindings at that subtree agree.  This module enumerates all of them and scores
each one with the rewrite simulation, sharing no code with the search itself.
"""
from __future__ import annotations

from typing import Iterator, Optional

from . import prune
from . import sexpr as sx
from .search import (Candidate, Pattern, SearchConfig, all_matches, normalize_holes, positions,
                     select_sites, unbindable, utility)
from .sexpr import App, EPS, Hole, REST, Slot


class _Marker:
    __slots__ = ("binding",)

    def __init__(self, binding):
        self.binding = binding


def _skeletons(t, slot, partners: tuple, max_arity: int) -> Iterator[tuple]:
    """Yield (skeleton, markers, surviving partners) for generalizations of ``t``.

    ``partners`` holds (id, term) pairs at the same position in other roots;
    a branch dies once no partner can match it, since a pattern with a single
    match never pays for its definition.
    """
    if not partners:
        return
    if slot is Slot.EXPR:
        m = _Marker(t)
        yield m, [m], frozenset(i for i, _ in partners)
    if slot is Slot.TAIL:
        ok = frozenset(i for i, u in partners if u is EPS or (isinstance(u, App) and u.head == "StatementList"))
        if ok:
            yield REST, [], ok
    if not isinstance(t, App):
        ok = frozenset(i for i, u in partners if u == t)
        if ok:
            yield t, [], ok
        return
    if t.head == "def":
        return
    slots = sx.slots_of(t.head)
    same = tuple((i, u) for i, u in partners
                 if isinstance(u, App) and u.head == t.head and len(u.children) == len(t.children))

    def go(k, alive, markers):
        if k == len(t.children):
            yield (), [], frozenset(i for i, _ in alive)
            return
        for sk, ms, ok in _skeletons(t.children[k], slots[k], tuple((i, u.children[k]) for i, u in alive), max_arity):
            both = markers + ms
            if len({m.binding for m in both}) > max_arity:
                continue
            rest_alive = tuple(p for p in alive if p[0] in ok)
            for rest_sk, rest_ms, rest_ok in go(k + 1, rest_alive, both):
                yield (sk,) + rest_sk, ms + rest_ms, rest_ok
    for kids, ms, ok in go(0, same, []):
        yield App(t.head, kids), ms, ok


def _partitions(items: list) -> Iterator[list]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _merges(markers: list, max_arity: int) -> Iterator[list]:
    """Ways to merge markers into holes: only markers with equal bindings may share one."""
    groups = {}
    for m in markers:
        groups.setdefault(m.binding, []).append(m)
    groups = list(groups.values())

    def go(k, acc):
        if len(acc) > max_arity:
            return
        if k == len(groups):
            yield acc
            return
        for part in _partitions(groups[k]):
            yield from go(k + 1, acc + part)
    yield from go(0, [])


def _fill(sk, assign):
    if isinstance(sk, _Marker):
        return Hole(assign[id(sk)])
    if isinstance(sk, App):
        return App(sk.head, tuple(_fill(c, assign) for c in sk.children))
    return sk


def generalizations(term, slot, partners: tuple, max_arity: int) -> Iterator[sx.SExpr]:
    """Patterns matching ``term`` at its own position and at least one partner."""
    for sk, markers, _ in _skeletons(term, slot, partners, max_arity):
        if isinstance(sk, _Marker) or sk is REST:
            continue
        for part in _merges(markers, max_arity):
            assign = {id(m): k for k, g in enumerate(part) for m in g}
            yield normalize_holes(_fill(sk, assign))


def _candidate_roots(term, reserved_prefix):
    def go(t, slot):
        if slot is Slot.EXPR or (slot is Slot.TAIL and isinstance(t, App) and t.head == "StatementList"):
            yield t, slot
        if isinstance(t, App):
            if t.head == "def" and str(t.children[0].value).startswith(reserved_prefix):
                return
            for c, s in zip(t.children, sx.slots_of(t.head)):
                yield from go(c, s)
    yield from go(term, sx.root_slot(term))


def all_candidates(corpus: list, cfg: SearchConfig) -> set:
    roots = [r for prog in corpus for r in _candidate_roots(prog, cfg.reserved_prefix)]
    seen, done = set(), set()
    for i, (t, slot) in enumerate(roots):
        # equal roots in equal slot classes yield equal generalizations
        key = (t, slot is Slot.EXPR)
        if key in done:
            continue
        done.add(key)
        partners = tuple((j, u) for j, (u, s) in enumerate(roots) if j != i and (s is Slot.EXPR) == (slot is Slot.EXPR))
        seen.update(generalizations(t, slot, partners, cfg.max_arity))
    return seen


def brute_force_best(corpus: list, cfg: SearchConfig = SearchConfig(), *, exclude=()) -> Optional[Candidate]:
    """Highest-utility valid pattern; ties go to the smallest serialization."""
    exclude = set(exclude)
    by_head = {}
    for pos in positions(corpus, cfg.reserved_prefix):
        node = pos[2]
        by_head.setdefault(node.head if isinstance(node, App) else None, []).append(pos)
    best = None
    for body in all_candidates(corpus, cfg):
        pattern = Pattern(body)
        text = str(pattern)
        if text in exclude:
            continue
        matches = all_matches(pattern, corpus, cfg.reserved_prefix, where=by_head.get(body.head if isinstance(body, App) else None, []))
        if any(unbindable(b, cfg.reserved_prefix) for m in matches for b in m.bindings.values()):
            continue
        sites = select_sites(matches)
        u = utility(pattern, sites)
        if u <= 0:
            continue
        if best is not None and (u < best.utility or (u == best.utility and text >= str(best.pattern))):
            continue
        if not prune.check_all(body, cfg.min_body_size, cfg.reserved_prefix).kept:
            continue
        best = Candidate(pattern, sites, u)
    return best

