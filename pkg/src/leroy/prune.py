"""Checks that reject candidates which cannot become valid P2 functions."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import sexpr as sx
from .syntax import ast_size


class Reason(Enum):
    MACRO_LIKE = "macro_like"
    INVALID_PARAMETER = "invalid_parameter"
    TOO_SMALL = "too_small"
    CALLS_ABSTRACTION = "calls_abstraction"


@dataclass(frozen=True)
class PruneVerdict:
    kept: bool
    reason: Optional[Reason] = None
    detail: str = ""

    def __post_init__(self):
        if self.kept and self.reason is not None:
            raise ValueError("a kept verdict carries no reason")


KEPT = PruneVerdict(True)


@dataclass
class PruneStats:
    macro_like: int = 0
    invalid_parameter: int = 0
    too_small: int = 0
    calls_abstraction: int = 0

    def record(self, verdict: PruneVerdict):
        if not verdict.kept:
            setattr(self, verdict.reason.value, getattr(self, verdict.reason.value) + 1)

    @property
    def total(self) -> int:
        return self.macro_like + self.invalid_parameter + self.too_small + self.calls_abstraction

    def as_dict(self) -> dict:
        return {r.value: getattr(self, r.value) for r in Reason}


def _body(c):
    return c.pattern.body if hasattr(c, "pattern") else c


def _fmt_path(path) -> str:
    return "root" if not path else "/".join(map(str, path))


def check_macro_like(c) -> PruneVerdict:
    """Reject bodies that do not rebuild into a complete AST fragment.

    Missing required children (``(add #0)``), surplus children, nodes of the
    wrong syntactic category and malformed statement spines all count.
    """
    try:
        tree = sx.delispify(_body(c))
    except sx.UnknownSymbol as e:
        return PruneVerdict(False, Reason.MACRO_LIKE, str(e))
    if isinstance(tree, sx.PartialTree):
        if tree.missing:
            m = tree.missing[0]
            return PruneVerdict(False, Reason.MACRO_LIKE,
                                f"{m.head} at {_fmt_path(m.path)} is missing child {m.position} ({m.slot.value})")
        if tree.malformed:
            m = tree.malformed[0]
            return PruneVerdict(False, Reason.MACRO_LIKE, f"{m.message} at {_fmt_path(m.path)}")
        if (tree.node is None or tree.node == []) and not tree.invalid_holes:
            return PruneVerdict(False, Reason.MACRO_LIKE, "empty body")
    return KEPT


def check_parameters(c) -> PruneVerdict:
    """Reject holes in positions where an arbitrary expression is illegal."""
    tree = sx.delispify(_body(c))
    if isinstance(tree, sx.PartialTree) and tree.invalid_holes:
        h = tree.invalid_holes[0]
        return PruneVerdict(False, Reason.INVALID_PARAMETER,
                            f"#{h.index} at {_fmt_path(h.path)} sits in a {h.slot.value} slot")
    return KEPT


def body_size(c) -> int:
    """AST nodes of the body, each hole counting as one parameter reference."""
    tree = sx.delispify(_body(c))
    node = tree.body if not isinstance(tree, sx.PartialTree) else tree.node
    return ast_size([n for n in node if n is not None] if isinstance(node, (list, tuple)) else node)


def check_size(c, min_size: int) -> PruneVerdict:
    size = body_size(c)
    if size < min_size:
        return PruneVerdict(False, Reason.TOO_SMALL, f"{size} AST nodes < {min_size}")
    return KEPT


def check_calls_learned(c, prefix: str = "_leroy_") -> PruneVerdict:
    """Reject bodies that mention identifiers reserved for learned functions."""
    for path, t in sx.subterms(_body(c)):
        if isinstance(t, sx.Atom) and isinstance(t.value, str) and t.value.startswith(prefix):
            return PruneVerdict(False, Reason.CALLS_ABSTRACTION,
                                f"references {t.value} at {_fmt_path(path[:-1])}")
    return KEPT


def check_all(c, min_size: int, prefix: str = "_leroy_") -> PruneVerdict:
    """Run every check in the fixed order macro-like, parameters, size, learned calls."""
    for check in (check_macro_like, check_parameters):
        v = check(c)
        if not v.kept:
            return v
    v = check_size(c, min_size)
    if not v.kept:
        return v
    return check_calls_learned(c, prefix)
