"""Seeded Monte Carlo runs over uniform random graphs.

Sample ``i`` uses the child seed ``derive_seed(seed, i)``, so a run is a pure
function of (seed, parameters) whatever the number of workers.  In the
distinguishing experiment pair ``i`` uses children ``2i`` and ``2i + 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .. import __version__
from ..errors import ValidationError
from ..graph import derive_seed, sample_uniform
from ..logic import Formula, evaluate, num_variables
from ..logic.sentences import build_count_zero_sentence
from .counters import check_budget, scan_cost, statistic

DEFAULT_EVAL_BUDGET = 1e13


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class ExperimentRecord:
    experiment: str
    seed: int
    params: dict
    sample_seeds: list
    values: list
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0  # not serialized, so outputs stay byte-identical

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": __version__,
            "seed": self.seed,
            "params": self.params,
            "summary": self.summary,
        }

    def summary_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def samples_jsonl(self) -> str:
        lines = []
        for i, (s, v) in enumerate(zip(self.sample_seeds, self.values)):
            lines.append(json.dumps({"index": i, "seed": s, "value": v}, sort_keys=True))
        return "".join(line + "\n" for line in lines)

    def summary_csv(self) -> str:
        row = {"experiment": self.experiment, "seed": self.seed}
        row.update({k: v for k, v in sorted(self.params.items()) if not isinstance(v, (list, dict))})
        row.update(sorted(self.summary.items()))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buf.getvalue()


def summarize_counts(values) -> dict:
    """Mean, variance and P(value = 0) with their standard errors."""
    n = len(values)
    if n == 0:
        return {"defined": False, "samples": 0}
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    p0 = sum(1 for v in values if v == 0) / n
    return {
        "defined": True,
        "samples": n,
        "mean": mean,
        "variance": var,
        "se_mean": math.sqrt(var / n),
        "p_zero": p0,
        "se_p_zero": math.sqrt(p0 * (1 - p0) / n),
    }


def monte_carlo(n: int, kind: str, chain, mu: int, samples: int, seed: int = 0,
                workers: int = 1, budget: float | None = None) -> ExperimentRecord:
    """Exact statistic on ``samples`` independent uniform graphs."""
    if samples < 0:
        raise ValidationError("samples must be nonnegative")
    check_budget(samples * scan_cost(n, chain.k, kind), budget)
    seeds = [derive_seed(seed, i) for i in range(samples)]
    start = time.perf_counter()
    # budget already charged for the whole run
    values = _map(lambda s: statistic(sample_uniform(n, s), kind, chain, mu, budget=math.inf),
                  seeds, workers)
    params = {"n": n, "k": chain.k, "kind": kind, "mu": mu, "family_size": chain.cum_sizes[mu],
              "samples": samples}
    rec = ExperimentRecord("monte_carlo", seed, params, seeds, values, summarize_counts(values))
    rec.wall_time = time.perf_counter() - start
    return rec


@dataclass(frozen=True)
class StatisticSentence:
    """The sentence "the statistic over F^mu is zero", decided by the counter.

    ``formula`` builds the first-order sentence itself; the two agree on every
    graph (checked in the test suite), and the counter is much cheaper.
    """

    kind: str
    chain: object
    mu: int

    def holds(self, g) -> bool:
        return statistic(g, self.kind, self.chain, self.mu, budget=math.inf) == 0

    def cost(self, n: int) -> float:
        return scan_cost(n, self.chain.k, self.kind)

    @property
    def formula(self) -> Formula:
        return build_count_zero_sentence(self.kind, self.chain.prefix_classes(self.mu))

    @property
    def num_variables(self) -> int:
        return self.chain.k + {"X": 1, "Y": 3, "Z": 4}[self.kind]

    def describe(self) -> dict:
        return {"kind": self.kind, "k": self.chain.k, "mu": self.mu,
                "family_size": self.chain.cum_sizes[self.mu], "num_variables": self.num_variables}


def distinguishing_probability(n: int, sentence, samples: int, seed: int = 0, workers: int = 1,
                               budget: float | None = None) -> ExperimentRecord:
    """Estimate q = P(G |= phi) and d = P(G1 |= phi, G2 |/= phi) over independent pairs.

    ``sentence`` is a :class:`Formula` (run through the model checker) or a
    :class:`StatisticSentence` (run through the counter).
    """
    if samples < 0:
        raise ValidationError("samples must be nonnegative")
    if isinstance(sentence, StatisticSentence):
        per_graph, decide = sentence.cost(n), sentence.holds
        info = {"evaluator": "counter", **sentence.describe()}
    elif isinstance(sentence, Formula):
        v = num_variables(sentence)
        per_graph = float(n) ** max(v - 1, 0)
        decide = lambda g: evaluate(sentence, g)
        info = {"evaluator": "model_checker", "num_variables": v}
        if budget is None:
            budget = DEFAULT_EVAL_BUDGET
    else:
        raise ValidationError(f"not a sentence: {sentence!r}")
    check_budget(2 * samples * per_graph, budget)
    seeds = [derive_seed(seed, i) for i in range(2 * samples)]
    start = time.perf_counter()
    truth = _map(lambda s: bool(decide(sample_uniform(n, s))), seeds, workers)
    values = [[truth[2 * i], truth[2 * i + 1]] for i in range(samples)]
    params = {"n": n, "samples": samples, **info}
    rec = ExperimentRecord("distinguish", seed, params, seeds, values, summarize_pairs(values))
    rec.wall_time = time.perf_counter() - start
    return rec


def summarize_pairs(values) -> dict:
    n = len(values)
    if n == 0:
        return {"defined": False, "samples": 0}
    q = sum(a + b for a, b in values) / (2 * n)
    d = sum(1 for a, b in values if a and not b) / n
    prod = q * (1 - q)
    se_d = math.sqrt(d * (1 - d) / n)
    # spread of d under the independence model, so a zero estimate still has a scale
    se_model = math.sqrt(prod * (1 - prod) / n)
    se = max(se_d, se_model)
    gap = abs(d - prod)
    return {
        "defined": True,
        "samples": n,
        "q_hat": q,
        "se_q": math.sqrt(q * (1 - q) / (2 * n)),
        "d_hat": d,
        "se_d": se_d,
        "product": prod,
        "product_gap": gap,
        "product_se": se,
        "product_gap_in_se": gap / se if se > 0 else (0.0 if gap == 0 else math.inf),
        "product_ok": gap <= 4 * se,
        "gap_to_quarter": abs(0.25 - d),
    }
