"""Isomorphism classes on [k] and the nested downward-closed family chain.

Classes are found by orbit marking: walk the labelled codes 0..2^C(k,2)-1 in
order, and each time an unmarked code turns up it is the least member of a new
orbit, so it is already the canonical code of its class.  Marking the whole
orbit gives the labelled count for free.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoAsymmetricGraphError,
    SizeLimitError,
    ValidationError,
)
from .graph import CANON_LIMIT, CanonicalCode, Graph, canonical_code, orbit_codes

RANK_TABLE_LIMIT = 7


@dataclass(frozen=True)
class GraphClass:
    representative: Graph
    code: CanonicalCode
    edge_count: int
    aut_size: int
    labeled_count: int

    @property
    def k(self) -> int:
        return self.representative.n

    def labeled_codes(self) -> np.ndarray:
        return np.unique(orbit_codes(self.representative))


def _make_class(rep: Graph) -> GraphClass:
    orbit = np.unique(orbit_codes(rep))
    count = len(orbit)
    return GraphClass(
        representative=rep,
        code=CanonicalCode(rep.n, int(orbit[0])),
        edge_count=rep.num_edges,
        aut_size=math.factorial(rep.n) // count,
        labeled_count=count,
    )


def _iter_classes(k: int) -> Iterator[GraphClass]:
    m = k * (k - 1) // 2
    total = 1 << m
    # packed "seen" bits; padding past `total` is pre-marked
    seen = np.zeros(max(1, (total + 7) // 8), dtype=np.uint8)
    for code in range(total, 8 * len(seen)):
        seen[code >> 3] |= np.uint8(1 << (code & 7))
    byte = 0
    chunk = 1 << 16
    while True:
        while byte < len(seen):
            window = seen[byte : byte + chunk]
            hits = np.flatnonzero(window != 255)
            if hits.size:
                byte += int(hits[0])
                break
            byte += len(window)
        else:
            return
        value = int(seen[byte])
        bit = next(t for t in range(8) if not value >> t & 1)
        rep = Graph.from_code(k, byte * 8 + bit)
        cls = _make_class(rep)
        orbit = cls.labeled_codes()
        np.bitwise_or.at(seen, orbit >> 3, (1 << (orbit & 7)).astype(np.uint8))
        yield cls


def _check_k(k: int, limit: int = CANON_LIMIT):
    if k < 1:
        raise ValidationError("k must be at least 1")
    if k > limit:
        raise SizeLimitError(f"k={k} exceeds the class enumeration limit {limit}")


@lru_cache(maxsize=None)
def _classes_cached(k: int) -> tuple:
    return tuple(_iter_classes(k))


def enumerate_classes(k: int, limit: int = CANON_LIMIT) -> list[GraphClass]:
    """One :class:`GraphClass` per isomorphism class of graphs on ``k`` vertices."""
    _check_k(k, limit)
    return list(_classes_cached(k))


def asymmetric_class(k: int) -> GraphClass:
    """Some class on ``k`` vertices with trivial automorphism group."""
    _check_k(k)
    if k == 1:
        return _make_class(Graph.empty(1))
    if 2 <= k <= 5:
        raise NoAsymmetricGraphError(f"no asymmetric graph on {k} vertices")
    source = _classes_cached(k) if k <= RANK_TABLE_LIMIT else _iter_classes(k)
    for cls in source:
        if cls.aut_size == 1:
            return cls
    raise NoAsymmetricGraphError(f"no asymmetric graph on {k} vertices")  # pragma: no cover


@dataclass(frozen=True)
class FamilyChain:
    """F^0 = {empty graph} and F^i = F^0 plus the first ``i`` entries of ``classes``."""

    k: int
    empty: GraphClass
    classes: tuple
    cum_sizes: tuple = field(init=False)

    def __post_init__(self):
        sizes = [self.empty.labeled_count]
        for c in self.classes:
            sizes.append(sizes[-1] + c.labeled_count)
        object.__setattr__(self, "cum_sizes", tuple(sizes))

    @property
    def num_prefixes(self) -> int:
        return len(self.classes) + 1

    def prefix_size(self, i: int) -> int:
        self._check_prefix(i)
        return self.cum_sizes[i]

    def prefix_classes(self, i: int) -> list[GraphClass]:
        self._check_prefix(i)
        return [self.empty, *self.classes[:i]]

    def _check_prefix(self, i: int):
        if not 0 <= i < self.num_prefixes:
            raise ValidationError(f"prefix {i} outside 0..{self.num_prefixes - 1}")

    @cached_property
    def positions(self) -> dict:
        pos = {self.empty.code: 0}
        for i, c in enumerate(self.classes, start=1):
            pos[c.code] = i
        return pos

    @cached_property
    def rank_table(self) -> np.ndarray:
        """Chain position of every labelled graph on [k], indexed by labelled code.

        Classes missing from the chain get a position past the end.
        """
        if self.k > RANK_TABLE_LIMIT:
            raise SizeLimitError(f"rank table needs k <= {RANK_TABLE_LIMIT}")
        m = self.k * (self.k - 1) // 2
        table = np.full(1 << m, self.num_prefixes, dtype=np.int32)
        for i, c in enumerate([self.empty, *self.classes]):
            table[c.labeled_codes()] = i
        return table

    def position_of(self, g: Graph) -> int | None:
        if g.n != self.k:
            raise DimensionMismatchError(f"graph has {g.n} vertices, chain is on {self.k}")
        return self.positions.get(canonical_code(g))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "classes": [
                {
                    "position": i,
                    "edge_count": c.edge_count,
                    "aut_size": c.aut_size,
                    "labeled_count": c.labeled_count,
                    "graph6": c.representative.to_graph6(),
                }
                for i, c in enumerate([self.empty, *self.classes])
            ],
            "prefix_sizes": list(self.cum_sizes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@lru_cache(maxsize=None)
def build_chain(k: int) -> FamilyChain:
    """Classes ordered by edge count, ties by ascending canonical code."""
    _check_k(k)
    classes = sorted(_classes_cached(k), key=lambda c: (c.edge_count, c.code))
    return FamilyChain(k=k, empty=classes[0], classes=tuple(classes[1:]))


def contains(chain: FamilyChain, prefix: int, g: Graph) -> bool:
    chain._check_prefix(prefix)
    pos = chain.position_of(g)
    return pos is not None and pos <= prefix


def is_downward_closed(classes: Sequence[GraphClass]) -> bool:
    """Deleting any single edge of any member lands back in the family."""
    codes = {c.code for c in classes}
    for c in classes:
        rep = c.representative
        for u, v in rep.edges():
            rows = list(rep.adj)
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
            if canonical_code(Graph(rep.n, tuple(rows))) not in codes:
                return False
    return True


def verify_downward_closed(chain: FamilyChain, prefix: int) -> bool:
    return is_downward_closed(chain.prefix_classes(prefix))
