"""Builders for the sentence shapes used by the counting statistics.

Variables are named ``x1..xk`` for the set, ``v1, v2, v3`` for the extra tuple
vertices and ``y`` for the forbidden outside vertex.  Set quantifiers are nested
with pairwise distinctness and the pattern's adjacency literals at the level
where both endpoints are bound.

Since the set quantifiers range over ordered tuples, one labelled
representative per isomorphism class already covers every copy, so family
membership is a disjunction over classes rather than over labelled graphs.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from ..errors import EmptyFamilyError, SizeLimitError, ValidationError
from ..graph import CANON_LIMIT, Graph
from .ast import TRUE, Adj, Eq, Exists, Forall, Formula, Not, conj, disj


def _xs(k: int) -> list[str]:
    return [f"x{i}" for i in range(1, k + 1)]


def _distinct(v: str, others: Sequence[str]) -> list[Formula]:
    return [Not(Eq(v, u)) for u in others]


def pattern_block(pattern: Graph | None, xs: Sequence[str], inner: Formula) -> Formula:
    """E x1 E x2 (x2 != x1 & lits & E x3 (...& inner)); no literals if pattern is None."""
    body = inner
    for j in range(len(xs) - 1, -1, -1):
        lits = _distinct(xs[j], xs[:j])
        if pattern is not None:
            for i in range(j):
                atom = Adj(xs[i], xs[j])
                lits.append(atom if pattern.has_edge(i, j) else Not(atom))
        body = Exists(xs[j], conj(*lits, body))
    return body


def _dominated(y: str, xs: Sequence[str]) -> list[Formula]:
    return [Adj(y, x) for x in xs]


def x_condition(xs: Sequence[str]) -> Formula:
    """No outside vertex is adjacent to every vertex of the set."""
    return Not(Exists("y", conj(*_dominated("y", xs))))


def y_condition(xs: Sequence[str]) -> Formula:
    """Some v1 != v2 off the set with no outside y adjacent to the set and to v1 or v2."""
    forbidden = Not(Exists("y", conj(
        *_distinct("y", ["v1", "v2"]), *_dominated("y", xs), disj(Adj("y", "v1"), Adj("y", "v2"))
    )))
    return Exists("v1", conj(
        *_distinct("v1", xs),
        Exists("v2", conj(*_distinct("v2", [*xs, "v1"]), forbidden)),
    ))


def z_condition(xs: Sequence[str]) -> Formula:
    forbidden = Not(Exists("y", conj(
        *_distinct("y", ["v1", "v2", "v3"]),
        *_dominated("y", xs),
        disj(Adj("y", "v3"), conj(Adj("y", "v1"), Adj("y", "v2"))),
    )))
    return Exists("v3", conj(
        *_distinct("v3", xs),
        Exists("v1", conj(
            *_distinct("v1", [*xs, "v3"]),
            Exists("v2", conj(*_distinct("v2", [*xs, "v3", "v1"]), forbidden)),
        )),
    ))


_CONDITIONS = {"X": x_condition, "Y": y_condition, "Z": z_condition}


def _family_reps(classes) -> list[Graph]:
    reps = [c.representative for c in classes]
    if not reps:
        raise EmptyFamilyError("the family is empty")
    k = reps[0].n
    if any(r.n != k for r in reps):
        raise ValidationError("family mixes vertex counts")
    return reps


def build_count_zero_sentence(kind: str, classes) -> Formula:
    """Sentence true exactly when the ``kind`` statistic over ``classes`` is zero."""
    reps = _family_reps(classes)
    xs = _xs(reps[0].n)
    inner = _CONDITIONS[kind](xs)
    return Not(disj(*(pattern_block(r, xs, inner) for r in reps)))


def build_X_sentence(chain, mu: int) -> Formula:
    return build_count_zero_sentence("X", chain.prefix_classes(mu))


def build_Y_sentence(chain, mu: int) -> Formula:
    return build_count_zero_sentence("Y", chain.prefix_classes(mu))


def build_Z_sentence(chain, mu: int) -> Formula:
    return build_count_zero_sentence("Z", chain.prefix_classes(mu))


def build_witness_sentence(pattern: Graph, mode: str, limit: int = CANON_LIMIT) -> Formula:
    """Some set induces a copy of ``pattern`` and is non-extendible in the given mode."""
    if pattern.n > limit:
        raise SizeLimitError(f"pattern on {pattern.n} vertices exceeds limit {limit}")
    if mode not in ("X", "Y"):
        raise ValidationError(f"witness mode must be X or Y, got {mode!r}")
    xs = _xs(pattern.n)
    return pattern_block(pattern, xs, _CONDITIONS[mode](xs))


def extension_axiom(k: int) -> Formula:
    """Every k distinct vertices and split A|B have an outside y joined to A and not to B."""
    if k < 1:
        raise ValidationError("extension axiom needs k >= 1")
    xs = _xs(k)
    witnesses = []
    for split in itertools.product((True, False), repeat=k):
        lits = [Adj("y", x) if inA else Not(Adj("y", x)) for x, inA in zip(xs, split)]
        witnesses.append(Exists("y", conj(*_distinct("y", xs), *lits)))
    body = conj(*witnesses)
    for j in range(k - 1, -1, -1):
        clash = [Eq(xs[j], u) for u in xs[:j]]
        body = Forall(xs[j], disj(*clash, body))
    return body


def distinct_vertices(m: int) -> Formula:
    """There exist ``m`` pairwise distinct vertices (``m`` variables)."""
    return pattern_block(None, _xs(m), TRUE)
