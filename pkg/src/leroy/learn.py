"""The learning loop: search, prune, close, validate and rewrite until nothing is left."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import closing, prune, rewrite
from . import sexpr as sx
from . import syntax as ast
from .search import SearchConfig, search_top

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Passes:
    """Hooks for the stages after search; the defaults are the real passes."""
    prune: Callable = prune.check_all
    analyze: Callable = closing.analyze_liveness
    close: Callable = closing.close
    validate: Callable = rewrite.validate_call_site


@dataclass
class LearnResult:
    library: list
    rewritten: list
    report: rewrite.CompressionReport
    checks: list = field(default_factory=list)  # every CallSiteCheck made, in order


def fresh_names(programs: list, prefix: str):
    """``<prefix>fn0``, ``<prefix>fn1``, ... skipping names the corpus already uses."""
    used = set()
    for p in programs:
        for n in ast.walk(p):
            if isinstance(n, ast.Name):
                used.add(n.id)
            elif isinstance(n, ast.FunctionDef):
                used.add(n.name)
                used.update(n.params)
    k = 0
    while True:
        name = f"{prefix}fn{k}"
        k += 1
        if name not in used:
            yield name


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def learn(programs: list, cfg: SearchConfig = SearchConfig(), passes: Passes = Passes(), *,
          threads: int = 1, frontier: Optional[list] = None, max_rounds: Optional[int] = None,
          lookahead: int = 16) -> LearnResult:
    """Learn a library from parsed programs and rewrite them to use it.

    Each search keeps the ``lookahead`` best candidates, so a run of dropped
    candidates does not cost one search each; the outcome is the same as
    searching again after every drop.
    """
    if not programs:
        raise ValueError("empty corpus")
    stats = prune.PruneStats()
    names = fresh_names(programs, cfg.reserved_prefix)
    current = list(programs)
    library, checks, dropped = [], [], []
    exclude = set()
    rejected = 0
    rounds = 0
    name = next(names)
    queue, more, terms = [], True, None
    while max_rounds is None or rounds < max_rounds:
        if not queue:
            if not more:
                break
            terms = _pmap(sx.lispify, current, threads)
            t0 = time.perf_counter()
            queue = search_top(terms, cfg, lookahead, stats=stats, exclude=exclude, frontier=frontier,
                               check=passes.prune)
            log.info("round %d: search took %.2fs", rounds + 1, time.perf_counter() - t0)
            more = len(queue) == lookahead
            if not queue:
                break
        rounds += 1
        cand = queue.pop(0)
        text = str(cand.pattern)
        try:
            facts = passes.analyze(cand, terms)
            a = passes.close(cand, facts, name)
        except closing.ClosureFailure as e:
            log.info("dropping %s: %s", text, e)
            exclude.add(text)
            dropped.append({"pattern": text, "reason": f"closure_failure: {e}"})
            continue
        contexts = facts.contexts or (None,) * len(cand.sites)
        site_checks = [passes.validate(a, s, ctx) for s, ctx in zip(cand.sites, contexts)]
        checks.extend(site_checks)
        accepted = [i for i, ch in enumerate(site_checks) if ch.accepted]
        rejected += len(site_checks) - len(accepted)
        if len(accepted) < 2:
            log.info("dropping %s: %d valid call site(s)", text, len(accepted))
            exclude.add(text)
            dropped.append({"pattern": text, "reason": f"{len(accepted)} valid call site(s)"})
            continue
        savings = sum(rewrite.site_savings(a, terms, i) for i in accepted)
        if savings <= 0:
            exclude.add(text)
            dropped.append({"pattern": text, "reason": "call sites are no smaller than the code they replace"})
            continue
        current = rewrite.apply(a, current, accepted)
        queue, more = [], True
        library.append(a)
        log.info("learned %s from %s at %d sites", name, text, len(accepted))
        name = next(names)
    rewrite.check_no_capture(library, current)
    report = rewrite.measure(programs, current, library, prune_stats=stats.as_dict(),
                             rejected=rejected, dropped=dropped)
    return LearnResult(library, current, report, checks)


def learn_library(corpus: list, cfg: SearchConfig = SearchConfig(), passes: Passes = Passes(), **kw) -> tuple:
    """(library, rewritten programs, report) for a list of parsed programs."""
    r = learn(corpus, cfg, passes, **kw)
    return r.library, r.rewritten, r.report
