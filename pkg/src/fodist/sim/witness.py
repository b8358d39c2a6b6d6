"""Part-2 witness search: a non-extendible pattern present in one graph only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, ValidationError
from ..families import RANK_TABLE_LIMIT
from ..graph import Graph, canonical_code, induced_subgraph
from ..logic import evaluate
from ..logic.sentences import build_witness_sentence
from .counters import KIND_CODES, check_budget, scan_cost
from .kernels import scan

DISTINGUISHED = "DistinguishedBy"
SYMMETRIC = "SymmetricFailure"
NO_WITNESS = "NoWitness"


@dataclass
class WitnessOutcome:
    status: str
    mode: str
    k: int
    variable_budget: int
    direction: int | None = None  # 1 if g1 holds the pattern, 2 if g2 does
    pattern: Graph | None = None
    witness: tuple | None = None  # S (then v1, v2 in mode Y) in the winning graph
    patterns_g1: int = 0
    patterns_g2: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "mode": self.mode,
            "k": self.k,
            "variable_budget": self.variable_budget,
            "direction": self.direction,
            "pattern_graph6": None if self.pattern is None else self.pattern.to_graph6(),
            "pattern_edges": None if self.pattern is None else [list(e) for e in self.pattern.edges()],
            "witness": None if self.witness is None else list(self.witness),
            "patterns_g1": self.patterns_g1,
            "patterns_g2": self.patterns_g2,
        }


def nonextendible_patterns(g: Graph, k: int, mode: str, budget: float | None = None) -> dict:
    """Canonical code -> (scan order, tuple) of the first non-extendible set per class."""
    if mode not in ("X", "Y"):
        raise ValidationError(f"witness mode must be X or Y, got {mode!r}")
    if k > RANK_TABLE_LIMIT:
        raise ValidationError(f"witness search needs k <= {RANK_TABLE_LIMIT}")
    extra = 0 if mode == "X" else 2
    if k < 1 or k + extra > g.n:
        raise DimensionMismatchError(f"mode {mode} with k={k} needs {k + extra} vertices, graph has {g.n}")
    check_budget(scan_cost(g.n, k, mode), budget)
    m = k * (k - 1) // 2
    size = 1 << m
    rank = np.zeros(size, dtype=np.int32)
    hist = np.zeros(size, dtype=np.int64)
    first_order = np.zeros(size, dtype=np.int64)
    first_tuple = np.zeros((size, k + 2), dtype=np.int64)
    scan(g.words, g.n, k, KIND_CODES[mode], rank, 0, m, hist, first_order, first_tuple)
    width = k if mode == "X" else k + 2
    found = {}
    for code in np.nonzero(hist)[0]:
        order = int(first_order[code])
        tup = tuple(int(v) for v in first_tuple[code, :width])
        cc = canonical_code(Graph.from_code(k, int(code)))
        if cc not in found or order < found[cc][0]:
            found[cc] = (order, tup)
    return found


def find_witness(g1: Graph, g2: Graph, k: int, mode: str, budget: float | None = None) -> WitnessOutcome:
    """Non-extendible k-set pattern of one graph with no non-extendible copy in the other.

    g1 is tried first; within a graph the lexicographically first set wins.
    """
    if g1.n != g2.n:
        raise DimensionMismatchError("graphs must have the same vertex count")
    p1 = nonextendible_patterns(g1, k, mode, budget)
    p2 = nonextendible_patterns(g2, k, mode, budget)
    out = WitnessOutcome(NO_WITNESS, mode, k, k + (1 if mode == "X" else 3),
                         patterns_g1=len(p1), patterns_g2=len(p2))
    if not p1 and not p2:
        return out
    for direction, (mine, other, g) in enumerate(((p1, p2, g1), (p2, p1, g2)), start=1):
        only = [v for c, v in mine.items() if c not in other]
        if only:
            _, tup = min(only)
            out.status = DISTINGUISHED
            out.direction = direction
            out.witness = tup
            out.pattern = induced_subgraph(g, tup[:k])
            return out
    out.status = SYMMETRIC
    return out


def part2_witness(g1: Graph, g2: Graph, report, budget: float | None = None) -> WitnessOutcome:
    """Witness search at the part-2 regime (mode and k) recorded in ``report``."""
    if not (g1.n == g2.n == report.n):
        raise DimensionMismatchError(f"graphs must have n={report.n} vertices")
    return find_witness(g1, g2, report.k_part2, report.regime_part2, budget)


def verify_witness(outcome: WitnessOutcome, g1: Graph, g2: Graph) -> tuple[bool, bool] | None:
    """Witness sentence truth on (winner, loser), or None without a witness."""
    if outcome.status != DISTINGUISHED:
        return None
    phi = build_witness_sentence(outcome.pattern, outcome.mode)
    winner, loser = (g1, g2) if outcome.direction == 1 else (g2, g1)
    return evaluate(phi, winner), evaluate(phi, loser)
