"""k-pebble games and FO^k equivalence.

:func:`fo_k_equivalent` runs the k-variable partition refinement on k-tuples
of both graphs at once.  A tuple starts with its atomic type (which
coordinates coincide, which are adjacent), and each round adds, for every
coordinate i, the set of colours reachable by moving pebble i.  Duplicator wins
the k-pebble game iff the stable colourings of the two graphs contain the same
colours; this is the tuple version of the pebble-game fixpoint.

:func:`pebble_fixpoint` is the explicit game: the greatest set of
pebble-indexed partial isomorphisms closed under Spoiler moves.  It is only
feasible for tiny graphs and is kept as a check on the refinement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .graph import Graph
from .logic import evaluate, extension_axiom

DEFAULT_BUDGET = 5e7


def _atomic_colors(g: Graph, k: int) -> np.ndarray:
    n = g.n
    idx = np.indices((n,) * k).reshape(k, -1)
    adj = g.matrix
    code = np.zeros(idx.shape[1], dtype=np.int64)
    bit = 0
    for i in range(k):
        for j in range(i + 1, k):
            code |= (idx[i] == idx[j]).astype(np.int64) << bit
            code |= adj[idx[i], idx[j]].astype(np.int64) << (bit + 1)
            bit += 2
    return code.reshape((n,) * k)


def _fiber_sets(col: np.ndarray, axis: int, width: int) -> np.ndarray:
    """Per tuple, the sorted distinct colours along ``axis``, padded with -1 to ``width``."""
    s = np.sort(col, axis=axis)
    dup = np.zeros(s.shape, dtype=bool)
    lead = [slice(None)] * s.ndim
    prev = [slice(None)] * s.ndim
    lead[axis] = slice(1, None)
    prev[axis] = slice(None, -1)
    dup[tuple(lead)] = s[tuple(lead)] == s[tuple(prev)]
    s = np.sort(np.where(dup, -1, s), axis=axis)
    fiber = np.moveaxis(s, axis, -1)
    n = col.shape[axis]
    rows = np.broadcast_to(np.expand_dims(fiber, axis), col.shape + (n,)).reshape(-1, n)
    if width > n:
        rows = np.hstack([np.full((rows.shape[0], width - n), -1, dtype=rows.dtype), rows])
    return rows


def _refine(cols: list, k: int, width: int) -> tuple[list, int]:
    sigs = []
    for col in cols:
        parts = [col.reshape(-1, 1)] + [_fiber_sets(col, i, width) for i in range(k)]
        sigs.append(np.hstack(parts))
    _, inv = np.unique(np.vstack(sigs), axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out, start = [], 0
    for col in cols:
        out.append(inv[start:start + col.size].reshape(col.shape))
        start += col.size
    return out, int(inv.max()) + 1


def stable_colors(g1: Graph, g2: Graph, k: int, budget: float = DEFAULT_BUDGET) -> tuple:
    """Stable joint colouring of k-tuples of g1 and g2."""
    if k < 1:
        raise ValidationError("k must be at least 1")
    width = max(g1.n, g2.n, 1)
    cost = (g1.n ** k + g2.n ** k) * (1 + k * width)
    if cost > budget:
        raise BudgetExceededError(f"refinement cost {cost:.3g} exceeds budget {budget:.3g}", cost, budget)
    atoms = [_atomic_colors(g1, k), _atomic_colors(g2, k)]
    _, inv = np.unique(np.concatenate([a.ravel() for a in atoms]), return_inverse=True)
    cols = [inv[:atoms[0].size].reshape(atoms[0].shape), inv[atoms[0].size:].reshape(atoms[1].shape)]
    count = int(inv.max()) + 1 if inv.size else 0
    while True:
        cols, new = _refine(cols, k, width)
        if new == count:
            return cols[0], cols[1]
        count = new


def fo_k_equivalent(g1: Graph, g2: Graph, k: int, budget: float = DEFAULT_BUDGET) -> bool:
    """True iff no sentence with ``k`` variables tells g1 from g2."""
    if g1.n == 0 or g2.n == 0:
        return g1.n == g2.n
    c1, c2 = stable_colors(g1, g2, k, budget)
    return set(np.unique(c1).tolist()) == set(np.unique(c2).tolist())


def pebble_fixpoint(g1: Graph, g2: Graph, k: int, max_states: int = 200_000) -> bool:
    """Duplicator wins the k-pebble game, by explicit greatest fixpoint."""
    n1, n2 = g1.n, g2.n
    slots = [None] + [(a, b) for a in range(n1) for b in range(n2)]
    if len(slots) ** k > max_states:
        raise BudgetExceededError(f"{len(slots) ** k} states exceed {max_states}", len(slots) ** k, max_states)

    def partial_iso(state):
        placed = [p for p in state if p is not None]
        for (a, b), (c, d) in itertools.combinations(placed, 2):
            if (a == c) != (b == d) or g1.has_edge(a, c) != g2.has_edge(b, d):
                return False
        return True

    alive = {s for s in itertools.product(slots, repeat=k) if partial_iso(s)}
    changed = True
    while changed:
        changed = False
        for state in list(alive):
            if not _survives(state, alive, k, n1, n2):
                alive.discard(state)
                changed = True
    return (None,) * k in alive


def _survives(state, alive, k, n1, n2) -> bool:
    for i in range(k):
        for a in range(n1):
            if not any(state[:i] + ((a, b),) + state[i + 1:] in alive for b in range(n2)):
                return False
        for b in range(n2):
            if not any(state[:i] + ((a, b),) + state[i + 1:] in alive for a in range(n1)):
                return False
    return True


def min_distinguishing_variables(g1: Graph, g2: Graph, k_max: int, budget: float = DEFAULT_BUDGET) -> int | None:
    for k in range(1, k_max + 1):
        if not fo_k_equivalent(g1, g2, k, budget):
            return k
    return None


@dataclass(frozen=True)
class ClaimCheck:
    holds: bool
    vacuous: bool
    k: int


def verify_claim(g1: Graph, g2: Graph, k: int, budget: float = DEFAULT_BUDGET) -> ClaimCheck:
    """Graphs that both satisfy the k-extension axiom agree on every (k+1)-variable sentence."""
    phi = extension_axiom(k)
    if not (evaluate(phi, g1) and evaluate(phi, g2)):
        return ClaimCheck(True, True, k)
    return ClaimCheck(fo_k_equivalent(g1, g2, k + 1, budget), False, k)
