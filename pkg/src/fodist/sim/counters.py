"""Exact X, Y, Z counts on concrete graphs, plus the exhaustive small-n oracles."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numba
import numpy as np

from ..errors import BudgetExceededError, DimensionMismatchError, SizeLimitError, ValidationError
from ..graph import Graph, has_outside_dominator, labeled_code
from .kernels import scan

KIND_CODES = {"X": 0, "Y": 1, "Z": 2}
EXTRA_VERTICES = {"X": 0, "Y": 2, "Z": 3}
DEFAULT_BUDGET = 1e11
WARN_COST = 1e10

_NO_HIST = np.zeros(0, dtype=np.int64)
_NO_TUPLES = np.zeros((0, 1), dtype=np.int64)


@dataclass(frozen=True)
class CountStats:
    value: int
    n: int
    k: int
    kind: str
    prefix: int


def _check_kind(kind: str):
    if kind not in KIND_CODES:
        raise ValidationError(f"kind must be X, Y or Z, got {kind!r}")


def scan_cost(n: int, k: int, kind: str) -> float:
    """Rough word-operation count of one exhaustive scan."""
    words = max(1, -(-n // 64))
    per_set = k if kind == "X" else k + n
    return float(comb(n, k)) * per_set * words


def check_budget(cost: float, budget: float | None):
    budget = DEFAULT_BUDGET if budget is None else budget
    if cost > budget:
        raise BudgetExceededError(f"estimated cost {cost:.3g} exceeds budget {budget:.3g}", cost, budget)
    if cost > WARN_COST:
        warnings.warn(f"large scan: estimated cost {cost:.3g}", RuntimeWarning, stacklevel=3)


def _validate(g: Graph, chain, mu: int, kind: str, k: int | None):
    _check_kind(kind)
    if k is not None and k != chain.k:
        raise DimensionMismatchError(f"k={k} but the chain is on {chain.k} vertices")
    chain._check_prefix(mu)
    need = chain.k + EXTRA_VERTICES[kind]
    if need > g.n:
        raise DimensionMismatchError(f"{kind} with k={chain.k} needs {need} vertices, graph has {g.n}")


def prefix_max_edges(chain, mu: int) -> int:
    return max(c.edge_count for c in chain.prefix_classes(mu))


def statistic(g: Graph, kind: str, chain, mu: int, k: int | None = None, budget: float | None = None) -> int:
    """The ``kind`` statistic of ``g`` over the prefix F^mu of ``chain``."""
    _validate(g, chain, mu, kind, k)
    check_budget(scan_cost(g.n, chain.k, kind), budget)
    return int(scan(g.words, g.n, chain.k, KIND_CODES[kind], chain.rank_table, mu,
                    prefix_max_edges(chain, mu), _NO_HIST, _NO_HIST, _NO_TUPLES))


def count_X(g: Graph, chain, mu: int, k: int | None = None, budget: float | None = None) -> int:
    return statistic(g, "X", chain, mu, k, budget)


def count_Y(g: Graph, chain, mu: int, k: int | None = None, budget: float | None = None) -> int:
    return statistic(g, "Y", chain, mu, k, budget)


def count_Z(g: Graph, chain, mu: int, k: int | None = None, budget: float | None = None) -> int:
    return statistic(g, "Z", chain, mu, k, budget)


def count_stats(g: Graph, kind: str, chain, mu: int) -> CountStats:
    return CountStats(statistic(g, kind, chain, mu), g.n, chain.k, kind, mu)


# -- per-tuple checks (plain Python, used as a second implementation) ----------


def x_holds(g: Graph, s) -> bool:
    return not has_outside_dominator(g, s)


def y_holds(g: Graph, s, v1: int, v2: int) -> bool:
    """No y outside S, v1, v2 adjacent to all of S and to v1 or v2."""
    for y in range(g.n):
        if y in s or y in (v1, v2):
            continue
        if all(g.has_edge(y, x) for x in s) and (g.has_edge(y, v1) or g.has_edge(y, v2)):
            return False
    return True


def z_holds(g: Graph, s, v1: int, v2: int, v3: int) -> bool:
    """No y outside S, v1, v2, v3 adjacent to all of S and to v3 or to both v1, v2."""
    for y in range(g.n):
        if y in s or y in (v1, v2, v3):
            continue
        if all(g.has_edge(y, x) for x in s) and (
            g.has_edge(y, v3) or (g.has_edge(y, v1) and g.has_edge(y, v2))
        ):
            return False
    return True


def tuple_counted(g: Graph, kind: str, chain, mu: int, s, extra=()) -> bool:
    """Whether one tuple (S plus v1, v2[, v3]) is counted by the ``kind`` statistic."""
    s = tuple(s)
    if chain.rank_table[labeled_code(_induced(g, s))] > mu:
        return False
    if kind == "X":
        return x_holds(g, s)
    if kind == "Y":
        return y_holds(g, s, *extra)
    return z_holds(g, s, *extra)


def _induced(g: Graph, s) -> Graph:
    k = len(s)
    return Graph.from_edges(k, [(a, b) for a in range(k) for b in range(a + 1, k) if g.has_edge(s[a], s[b])])


def reference_count(g: Graph, kind: str, chain, mu: int) -> int:
    """Nested-loop count, independent of the bitset kernels."""
    _validate(g, chain, mu, kind, None)
    total = 0
    verts = range(g.n)
    for s in itertools.combinations(verts, chain.k):
        rest = [v for v in verts if v not in s]
        if kind == "X":
            total += tuple_counted(g, kind, chain, mu, s)
        elif kind == "Y":
            total += sum(tuple_counted(g, kind, chain, mu, s, p) for p in itertools.combinations(rest, 2))
        else:
            for v3 in rest:
                others = [v for v in rest if v != v3]
                total += sum(
                    tuple_counted(g, kind, chain, mu, s, (a, b, v3))
                    for a, b in itertools.combinations(others, 2)
                )
    return total


# -- exhaustive oracles --------------------------------------------------------

BRUTE_FORCE_MAX_N = 8


@numba.njit(cache=True)
def _graph_words(n, code, pi, pj):
    words = np.zeros((n, 1), dtype=np.uint64)
    m = pi.shape[0]
    for p in range(m):
        if (code >> p) & 1:
            words[pi[p], 0] |= np.uint64(1) << np.uint64(pj[p])
            words[pj[p], 0] |= np.uint64(1) << np.uint64(pi[p])
    return words


@numba.njit(cache=True)
def _exhaust(n, k, kind, rank, mu, max_edges, pi, pj, hist, first_order, first_tuple):
    m = pi.shape[0]
    total = 0
    total2 = 0
    for code in range(1 << m):
        words = _graph_words(n, code, pi, pj)
        c = scan(words, n, k, kind, rank, mu, max_edges, hist, first_order, first_tuple)
        total += c
        total2 += c * (c - 1)
    return total, total2


def _exhaustive_sums(n: int, kind: str, chain, mu: int) -> tuple[int, int, int]:
    _check_kind(kind)
    if n > BRUTE_FORCE_MAX_N:
        raise SizeLimitError(f"exhaustive oracle needs n <= {BRUTE_FORCE_MAX_N}")
    chain._check_prefix(mu)
    if chain.k + EXTRA_VERTICES[kind] > n:
        raise DimensionMismatchError(f"{kind} with k={chain.k} needs more than {n} vertices")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    s1, s2 = _exhaust(n, chain.k, KIND_CODES[kind], chain.rank_table, mu,
                      prefix_max_edges(chain, mu), pi, pj,
                      _NO_HIST, _NO_HIST, _NO_TUPLES)
    return int(s1), int(s2), 1 << len(pairs)


def brute_force_expectation(n: int, k: int, kind: str, chain, mu: int) -> Fraction:
    """Mean of the statistic over all labelled graphs on ``n`` vertices."""
    if k != chain.k:
        raise DimensionMismatchError(f"k={k} but the chain is on {chain.k} vertices")
    s1, _, count = _exhaustive_sums(n, kind, chain, mu)
    return Fraction(s1, count)


def brute_force_factorial_moment(n: int, kind: str, chain, mu: int) -> Fraction:
    """E[X(X-1)] over all labelled graphs on ``n`` vertices."""
    _, s2, count = _exhaustive_sums(n, kind, chain, mu)
    return Fraction(s2, count)


def pairwise_factorial_moment(n: int, chain, mu: int) -> Fraction:
    """E[X(X-1)] for X as the sum over ordered pairs of distinct k-sets of P(both counted).

    Plain Python double loop over sets inside an outer loop over all graphs;
    an independent check on :func:`brute_force_factorial_moment`.
    """
    if n > 6:
        raise SizeLimitError("pairwise oracle is limited to n <= 6")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    sets = list(itertools.combinations(range(n), chain.k))
    total = 0
    for code in range(1 << len(pairs)):
        g = Graph.from_edges(n, [p for b, p in enumerate(pairs) if code >> b & 1])
        hit = [tuple_counted(g, "X", chain, mu, s) for s in sets]
        for a in range(len(sets)):
            if hit[a]:
                for b in range(len(sets)):
                    if b != a and hit[b]:
                        total += 1
    return Fraction(total, 1 << len(pairs))
