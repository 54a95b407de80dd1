"""Seeded generator of small, well-typed P2 programs.

Programs only read variables they have assigned, only add values of matching
kinds and only subscript lists with in-range constants, so every generated
program runs to completion.  Shared snippets are spliced into several
programs to give the search something to find.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass
class _Scope:
    ints: list = field(default_factory=list)
    lists: dict = field(default_factory=dict)  # name -> length
    bools: list = field(default_factory=list)
    funcs: dict = field(default_factory=dict)  # name -> arity, all int -> int


class ProgramGenerator:
    def __init__(self, seed: int, names=("a", "b", "c", "x", "y", "z", "n", "m")):
        self.rng = random.Random(seed)
        self.names = list(names)

    def int_expr(self, sc: _Scope, depth: int = 2) -> str:
        r = self.rng
        choices = ["const"]
        if sc.ints:
            choices += ["var", "var"]
        if depth > 0:
            choices += ["add", "add", "neg", "ternary"]
            if sc.lists:
                choices.append("index")
            if sc.funcs:
                choices.append("call")
        kind = r.choice(choices)
        if kind == "const":
            return str(r.randint(0, 9))
        if kind == "var":
            return r.choice(sc.ints)
        if kind == "add":
            return f"{self.int_expr(sc, depth - 1)} + {self.int_expr(sc, depth - 1)}"
        if kind == "neg":
            return f"-{self._atom(sc)}"
        if kind == "ternary":
            return f"{self._atom(sc)} if {self.bool_expr(sc, depth - 1)} else {self._atom(sc)}"
        if kind == "index":
            name = r.choice(sorted(sc.lists))
            return f"{name}[{r.randrange(sc.lists[name])}]"
        name = r.choice(sorted(sc.funcs))
        args = ", ".join(self._atom(sc) for _ in range(sc.funcs[name]))
        return f"{name}({args})"

    def _atom(self, sc: _Scope) -> str:
        if sc.ints and self.rng.random() < 0.6:
            return self.rng.choice(sc.ints)
        return str(self.rng.randint(0, 9))

    def bool_expr(self, sc: _Scope, depth: int = 1) -> str:
        r = self.rng
        kind = r.choice(["eq", "ne", "const", "not"] + (["var"] if sc.bools else []))
        if kind == "eq":
            return f"{self._atom(sc)} == {self._atom(sc)}"
        if kind == "ne":
            return f"{self._atom(sc)} != {self._atom(sc)}"
        if kind == "const":
            return r.choice(["True", "False"])
        if kind == "var":
            return r.choice(sc.bools)
        return f"not {self._atom(sc)} == {self._atom(sc)}"

    @staticmethod
    def _bind(sc: _Scope, target: str, kind: str, length: int = 0):
        for table in (sc.ints, sc.bools):
            if target in table:
                table.remove(target)
        sc.lists.pop(target, None)
        if kind == "int":
            sc.ints.append(target)
        elif kind == "bool":
            sc.bools.append(target)
        else:
            sc.lists[target] = length

    def statement(self, sc: _Scope, allow_input: bool) -> str:
        """One line of source; updates the scope with what it binds."""
        r = self.rng
        roll = r.random()
        target = r.choice(self.names)
        if roll < 0.45 or not (sc.ints or sc.lists):
            line = f"{target} = {self.int_expr(sc)}"
            self._bind(sc, target, "int")
            return line
        if roll < 0.55 and allow_input:
            self._bind(sc, target, "int")
            return f"{target} = eval(input())"
        if roll < 0.7:
            n = r.randint(1, 3)
            line = f"{target} = [{', '.join(self.int_expr(sc, 1) for _ in range(n))}]"
            self._bind(sc, target, "list", n)
            return line
        if roll < 0.75:
            line = f"{target} = {self.bool_expr(sc)}"
            self._bind(sc, target, "bool")
            return line
        if roll < 0.82 and sc.lists:
            name = r.choice(sorted(sc.lists))
            return f"{name}[{r.randrange(sc.lists[name])}] = {self.int_expr(sc, 1)}"
        if r.random() < 0.5 and sc.ints:
            return f"print({self.int_expr(sc)})"
        return f"print({r.choice(sc.ints + sorted(sc.lists) + sc.bools)})"

    def function(self, sc: _Scope, name: str) -> str:
        arity = self.rng.randint(1, 2)
        params = ["p", "q"][:arity]
        inner = _Scope(ints=list(params))
        body = [f"    t = {self.int_expr(inner)}", f"    return t + {self.int_expr(inner, 1)}"]
        sc.funcs[name] = arity
        return "\n".join([f"def {name}({', '.join(params)}):"] + body)

    def program(self, n_lines: int, snippets=(), allow_input: bool = False, with_function: bool = False) -> str:
        sc = _Scope()
        lines = []
        if with_function:
            lines.append(self.function(sc, "helper"))
        pending = list(snippets)
        for _ in range(n_lines):
            if pending and self.rng.random() < 0.35:
                snippet, defines = pending.pop(0)
                lines.append(snippet)
                for v in defines:
                    self._bind(sc, v, "int")
                continue
            lines.append(self.statement(sc, allow_input))
        for snippet, defines in pending:
            lines.append(snippet)
            for v in defines:
                self._bind(sc, v, "int")
        return "\n".join(lines) + "\n"

    def snippet(self, n_lines: int) -> tuple:
        """A closed block of int assignments and prints, plus the names it defines."""
        sc = _Scope()
        lines = []
        for _ in range(n_lines):
            if sc.ints and self.rng.random() < 0.3:
                lines.append(f"print({self.int_expr(sc)})")
                continue
            target = self.rng.choice(self.names)
            lines.append(f"{target} = {self.int_expr(sc)}")
            if target not in sc.ints:
                sc.ints.append(target)
        return "\n".join(lines), tuple(sc.ints)


def random_corpus(seed: int, n_programs: int, lines: tuple = (2, 6), n_snippets: int = 1,
                  snippet_lines: tuple = (2, 4), allow_input: bool = False,
                  function_rate: float = 0.0) -> list:
    """Source texts of ``n_programs`` programs; each snippet shows up in several."""
    gen = ProgramGenerator(seed)
    snippets = [gen.snippet(gen.rng.randint(*snippet_lines)) for _ in range(n_snippets)]
    out = []
    for _ in range(n_programs):
        chosen = [s for s in snippets if gen.rng.random() < 0.5]
        out.append(gen.program(gen.rng.randint(*lines), chosen, allow_input,
                               with_function=gen.rng.random() < function_rate))
    return out
