"""Simple undirected graphs on vertices 0..n-1 with bitset adjacency rows.

Rows are Python ints (bit ``j`` of ``adj[i]`` is set iff ``i ~ j``); the
numba kernels in :mod:`fodist.sim` read the same rows packed into a
``(n, words)`` uint64 array, see :attr:`Graph.words`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSelectionError, SizeLimitError, ValidationError

CANON_LIMIT = 8


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("vertex count must be nonnegative")
        if len(self.adj) != self.n:
            raise ValidationError(f"expected {self.n} adjacency rows, got {len(self.adj)}")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row & ~full:
                raise ValidationError(f"row {i} has an out-of-range neighbour")
            if row >> i & 1:
                raise ValidationError(f"loop at vertex {i}")
            r = row
            while r:
                low = r & -r
                j = low.bit_length() - 1
                if not self.adj[j] >> i & 1:
                    raise ValidationError(f"edge {i}-{j} is not symmetric")
                r ^= low

    # -- constructors -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValidationError(f"bad edge ({u}, {v}) for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        a = np.asarray(matrix, dtype=bool)
        n = a.shape[0]
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if a[i, j]])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << i) for i in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def from_code(cls, k: int, code: int) -> "Graph":
        """Inverse of :func:`labeled_code` on ``k`` vertices."""
        pairs = _pairs(k)
        m = len(pairs)
        return cls.from_edges(k, [pairs[p] for p in range(m) if code >> (m - 1 - p) & 1])

    # -- queries ------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return bits_of(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in bits_of(self.adj[i]) if i < j]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def words(self) -> np.ndarray:
        nw = max(1, (self.n + 63) // 64)
        out = np.zeros((self.n, nw), dtype=np.uint64)
        mask = (1 << 64) - 1
        for i, row in enumerate(self.adj):
            for w in range(nw):
                out[i, w] = (row >> (64 * w)) & mask
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges():
            a[i, j] = a[j, i] = True
        return a

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return pi.g: vertex ``i`` of ``self`` becomes vertex ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise InvalidSelectionError("not a permutation of the vertex set")
        return Graph.from_edges(self.n, [(perm[i], perm[j]) for i, j in self.edges()])

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"

    # -- serialization -------------------------------------------------

    def to_edge_list(self) -> str:
        edges = self.edges()
        lines = [f"{self.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "Graph":
        tokens = text.split()
        if len(tokens) < 2:
            raise ValidationError("edge list needs a 'n m' header")
        n, m = int(tokens[0]), int(tokens[1])
        body = list(map(int, tokens[2:]))
        if len(body) != 2 * m:
            raise ValidationError(f"header promises {m} edges, found {len(body) / 2:g}")
        return cls.from_edges(n, zip(body[0::2], body[1::2]))

    def to_graph6(self) -> str:
        n = self.n
        if n < 63:
            head = chr(n + 63)
        elif n < 258048:
            head = "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
        else:
            raise SizeLimitError("graph6 header supports n < 258048 here")
        bits = [self.has_edge(i, j) for j in range(1, n) for i in range(j)]
        bits += [False] * (-len(bits) % 6)
        body = "".join(
            chr(63 + sum(b << (5 - t) for t, b in enumerate(bits[q : q + 6])))
            for q in range(0, len(bits), 6)
        )
        return head + body

    @classmethod
    def from_graph6(cls, text: str) -> "Graph":
        s = text.strip()
        if s.startswith(">>graph6<<"):
            s = s[10:]
        vals = [ord(c) - 63 for c in s]
        if not vals or any(v < 0 or v > 63 for v in vals):
            raise ValidationError("not a graph6 string")
        if vals[0] == 63:
            n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
            vals = vals[4:]
        else:
            n, vals = vals[0], vals[1:]
        m = n * (n - 1) // 2
        if len(vals) != (m + 5) // 6:
            raise ValidationError("graph6 body has the wrong length")
        bits = [(v >> (5 - t)) & 1 for v in vals for t in range(6)]
        pos = [(i, j) for j in range(1, n) for i in range(j)]
        return cls.from_edges(n, [e for e, b in zip(pos, bits) if b])


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# -- sampling ----------------------------------------------------------


def derive_seed(master: int, index: int) -> int:
    """64-bit child seed for sample ``index``; independent of scheduling."""
    ss = np.random.SeedSequence(master, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_uniform(n: int, seed: int) -> Graph:
    """Uniform labelled graph on ``n`` vertices.

    One fair bit per pair, drawn from PCG64 in row-major pair order
    (0,1), (0,2), ..., (1,2), ...
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    rng = np.random.Generator(np.random.PCG64(seed))
    return _from_pair_bits(n, rng.integers(0, 2, size=n * (n - 1) // 2, dtype=np.uint8))


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with the same pair order as :func:`sample_uniform`."""
    if n < 0 or not 0 <= p <= 1:
        raise ValidationError("need n >= 0 and 0 <= p <= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return _from_pair_bits(n, rng.random(n * (n - 1) // 2) < p)


def _from_pair_bits(n: int, bits) -> Graph:
    rows = [0] * n
    pos = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bits[pos]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            pos += 1
    return Graph(n, tuple(rows))


# -- induced subgraphs and dominators ----------------------------------


def induced_subgraph(g: Graph, s: Sequence[int]) -> Graph:
    s = list(s)
    if len(set(s)) != len(s):
        raise InvalidSelectionError(f"duplicate vertex in selection {s}")
    for v in s:
        if not 0 <= v < g.n:
            raise InvalidSelectionError(f"vertex {v} out of range for n={g.n}")
    k = len(s)
    return Graph.from_edges(
        k, [(a, b) for a in range(k) for b in range(a + 1, k) if g.adj[s[a]] >> s[b] & 1]
    )


def has_outside_dominator(g: Graph, s: Iterable[int], excluded: Iterable[int] = ()) -> bool:
    """True iff some vertex outside ``s`` and ``excluded`` is adjacent to all of ``s``."""
    common = g.full_mask
    smask = 0
    for v in s:
        common &= g.adj[v]
        smask |= 1 << v
    common &= ~(smask | mask_of(excluded))
    return common != 0


# -- canonical forms ----------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalCode:
    k: int
    code: int


@lru_cache(maxsize=None)
def _pairs(k: int) -> tuple:
    return tuple((a, b) for a in range(k) for b in range(a + 1, k))


@lru_cache(maxsize=None)
def _perms(k: int) -> np.ndarray:
    # one empty permutation when k = 0
    return np.array(list(itertools.permutations(range(k))), dtype=np.int8).reshape(math.factorial(k), k)


@lru_cache(maxsize=None)
def _weights(k: int) -> np.ndarray:
    m = k * (k - 1) // 2
    return np.array([1 << (m - 1 - p) for p in range(m)], dtype=np.int64)


def labeled_code(g: Graph) -> int:
    """Upper-triangle bit string of ``g`` in its own labelling, as an int."""
    code = 0
    for a, b in _pairs(g.n):
        code = (code << 1) | (g.adj[a] >> b & 1)
    return code


def orbit_codes(g: Graph) -> np.ndarray:
    """Codes of ``g`` reordered by every permutation of its vertices (k! entries)."""
    k = g.n
    pairs = _pairs(k)
    if not pairs:
        return np.zeros(len(_perms(k)), dtype=np.int64)
    perms = _perms(k)
    ia = np.array([a for a, _ in pairs])
    ib = np.array([b for _, b in pairs])
    bits = g.matrix[perms[:, ia], perms[:, ib]]
    return bits.astype(np.int64) @ _weights(k)


def _check_limit(g: Graph, limit: int):
    if g.n > limit:
        raise SizeLimitError(f"n={g.n} exceeds the permutation-scan limit {limit}")


def canonical_code(g: Graph, limit: int = CANON_LIMIT) -> CanonicalCode:
    """Lexicographically least upper-triangle bit string over all vertex orders."""
    _check_limit(g, limit)
    return CanonicalCode(g.n, int(orbit_codes(g).min()))


def automorphism_count(g: Graph, limit: int = CANON_LIMIT) -> int:
    _check_limit(g, limit)
    return int(np.count_nonzero(orbit_codes(g) == labeled_code(g)))


def is_isomorphic(g: Graph, h: Graph, limit: int = CANON_LIMIT) -> bool:
    return g.n == h.n and canonical_code(g, limit) == canonical_code(h, limit)
