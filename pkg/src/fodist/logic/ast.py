"""First-order formulas over the vocabulary {adjacency, equality}."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import FormulaError


class Formula:
    __slots__ = ()

    def __str__(self):
        from .syntax import to_text

        return to_text(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Adj(Formula):
    a: str
    b: str


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    a: str
    b: str


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise FormulaError("And needs at least two parts; use conj()")


@dataclass(frozen=True, repr=False)
class Or(Formula):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise FormulaError("Or needs at least two parts; use disj()")


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula


for _cls in (Top, Bottom, Adj, Eq, Not, And, Or, Exists, Forall):
    _cls.__repr__ = lambda self: f"<{type(self).__name__} {self}>"

TRUE = Top()
FALSE = Bottom()


def conj(*parts: Formula) -> Formula:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def is_literal(f: Formula) -> bool:
    if isinstance(f, Not):
        f = f.body
    return isinstance(f, (Adj, Eq))


def variables(f: Formula) -> set[str]:
    """Every variable name occurring in ``f``, bound or free."""
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Adj, Eq)):
            out.update((node.a, node.b))
        elif isinstance(node, (Exists, Forall)):
            out.add(node.var)
            stack.append(node.body)
        elif isinstance(node, Not):
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            stack.extend(node.parts)
    return out


def free_variables(f: Formula, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(f, (Adj, Eq)):
        return {f.a, f.b} - bound
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body, bound | {f.var})
    if isinstance(f, Not):
        return free_variables(f.body, bound)
    if isinstance(f, (And, Or)):
        return set().union(*(free_variables(p, bound) for p in f.parts))
    return set()


def num_variables(f: Formula) -> int:
    return len(variables(f))
