"""Threshold calculus for the X/Y/Z statistics.

Every threshold is the root of an exact log-expectation, with binomials
continued through lgamma so that ``k`` may be real.  The asymptotic forms
(``log2 n - 2 log2 ln n + log2 ln 2`` and friends) are only reported as
diagnostics next to the exact roots.

Kinds of log-expectation (``F`` is the family size, ``m = k(k-1)/2``)::

    f_ext     log C(n,k) + k ln2                      + (n-k)   ln(1 - 2^-k)
    f_family  log C(n,k) + ln F - m ln2               + (n-k)   ln(1 - 2^-k)
    g_family  log C(n,2) + log C(n-2,k) + ln F - m ln2 + (n-k-2) ln(1 - 3 2^-(k+2))
    h_family  ln 3 + log C(n,3) + log C(n-3,k) + ln F - m ln2 + (n-k-3) ln(1 - 5 2^-(k+3))
    f_plain   log C(n,k)                              + (n-k)   ln(1 - 2^-k)
    g_plain   log C(n,2) + log C(n-2,k)               + (n-k-2) ln(1 - 3 2^-(k+2))
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, lgamma, log, log2
from typing import Callable

from .errors import DomainError, SolverError

LN2 = math.log(2.0)
REGIME_MIN_N = 64

KINDS = ("f_ext", "f_family", "g_family", "h_family", "f_plain", "g_plain")
# extra tuple vertices beyond the k-set, per kind
_EXTRA = {"f_ext": 0, "f_family": 0, "f_plain": 0, "g_family": 2, "g_plain": 2, "h_family": 3}
STAT_KIND = {"X": "f_family", "Y": "g_family", "Z": "h_family"}
EXTRA_VARIABLES = {"X": 1, "Y": 3, "Z": 4}


def log_binom(n: float, k: float) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def log_factorial(k: float) -> float:
    """log |F*_k| = log k!, the asymmetric family size."""
    return lgamma(k + 1)


def _family_term(log_family_size, k):
    if callable(log_family_size):
        return log_family_size(k)
    return float(log_family_size)


def log_expectation(kind: str, n: int, k: float, log_family_size=0.0) -> float:
    """Natural log of the expectation of the statistic named by ``kind``.

    ``log_family_size`` is a number or a function of ``k``; ignored for the
    ``f_ext`` and ``*_plain`` kinds.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}")
    extra = _EXTRA[kind]
    if not (1 <= k <= n - extra):
        raise DomainError(f"k={k} outside [1, {n - extra}] for {kind} at n={n}")
    pairs = k * (k - 1) / 2
    if kind == "f_ext":
        return log_binom(n, k) + k * LN2 + (n - k) * math.log1p(-(2.0 ** -k))
    fam = 0.0 if kind.endswith("plain") else _family_term(log_family_size, k) - pairs * LN2
    if kind in ("f_family", "f_plain"):
        return log_binom(n, k) + fam + (n - k) * math.log1p(-(2.0 ** -k))
    if kind in ("g_family", "g_plain"):
        return (log_binom(n, 2) + log_binom(n - 2, k) + fam
                + (n - k - 2) * math.log1p(-3 * 2.0 ** (-k - 2)))
    return (log(3) + log_binom(n, 3) + log_binom(n - 3, k) + fam
            + (n - k - 3) * math.log1p(-5 * 2.0 ** (-k - 3)))


def exact_expectation(stat: str, n: int, k: int, family_size: int | None) -> Fraction:
    """Closed-form expectation as a rational; ``family_size=None`` drops the pattern factor."""
    pattern = Fraction(1) if family_size is None else Fraction(family_size, 2 ** comb(k, 2))
    if stat == "X":
        return comb(n, k) * pattern * (1 - Fraction(1, 2 ** k)) ** (n - k)
    if stat == "Y":
        return comb(n, 2) * comb(n - 2, k) * pattern * (1 - Fraction(3, 2 ** (k + 2))) ** (n - k - 2)
    if stat == "Z":
        return 3 * comb(n, 3) * comb(n - 3, k) * pattern * (1 - Fraction(5, 2 ** (k + 3))) ** (n - k - 3)
    raise DomainError(f"unknown statistic {stat!r}")


@dataclass(frozen=True)
class ThresholdFn:
    kind: str
    n: int
    log_family_size: Callable[[float], float] | float = 0.0

    def __call__(self, k: float) -> float:
        return log_expectation(self.kind, self.n, k, self.log_family_size)

    def default_bracket(self) -> tuple[float, float]:
        return 1.0, float(min(self.n - 4, 4 * log2(self.n)))


@dataclass
class Root:
    value: float
    residual: float
    bracket: tuple
    iterations: int


def find_root(fn: ThresholdFn, lo: float | None = None, hi: float | None = None) -> Root:
    """Bisection for the first upward zero crossing of ``fn`` on the bracket.

    The family kinds eventually turn down again (the ``-m ln2`` term wins), so
    when the right end is negative the bracket is shrunk to the first grid
    point, in steps of 1/4, where ``fn`` is nonnegative.
    """
    dlo, dhi = fn.default_bracket()
    lo = dlo if lo is None else lo
    hi = dhi if hi is None else hi
    if not hi > lo:
        raise SolverError("empty bracket", {"n": fn.n, "kind": fn.kind, "bracket": [lo, hi]})
    flo, fhi = fn(lo), fn(hi)
    diag = {"n": fn.n, "kind": fn.kind, "bracket": [lo, hi], "f_lo": flo, "f_hi": fhi}
    if flo > 0:
        raise SolverError("no sign change: positive at the left end", diag)
    if fhi < 0:
        step = 0.25
        prev, x = lo, lo + step
        while x < hi:
            if fn(x) >= 0:
                break
            prev, x = x, x + step
        else:
            raise SolverError("no sign change on the bracket", diag)
        lo, hi = prev, x
    a, b = lo, hi
    it = 0
    while True:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        it += 1
        if abs(fm) < 1e-9 or b - a < 1e-12:
            return Root(mid, fm, (lo, hi), it)
        if fm < 0:
            a = mid
        else:
            b = mid


def solve_root(fn: ThresholdFn, lo: float | None = None, hi: float | None = None) -> float:
    return find_root(fn, lo, hi).value


def asymptotic_k_hat(n: int) -> float:
    return log2(n) - 2 * log2(log(n)) + log2(LN2)


# -- regimes ----------------------------------------------------------------


def regime_part1(delta: float) -> str:
    if 0.05 < delta <= 0.55:
        return "X"
    if 0.55 < delta <= 0.95:
        return "Y"
    return "Z"


def regime_part2(delta: float) -> str:
    return "X" if 0.05 <= delta <= 0.95 else "Y"


@dataclass
class Part1:
    k_star: float
    delta: float
    regime: str
    k_root: float
    k_used: int
    roots: dict


def select_regime_part1(n: int) -> Part1:
    """Solve f_{F*}; the fractional part of its root picks X, Y or Z."""
    if n < REGIME_MIN_N:
        raise DomainError(f"regime selection needs n >= {REGIME_MIN_N}")
    star = find_root(ThresholdFn("f_family", n, log_factorial))
    delta = star.value - math.floor(star.value)
    regime = regime_part1(delta)
    roots = {"f_family": star}
    root = star
    if regime != "X":
        kind = STAT_KIND[regime]
        root = find_root(ThresholdFn(kind, n, log_factorial))
        roots[kind] = root
    return Part1(star.value, delta, regime, root.value, math.floor(root.value), roots)


def statistic_k(n: int, kind: str) -> int:
    """Floor of the root of the asymmetric-family threshold for statistic ``kind``."""
    return math.floor(solve_root(ThresholdFn(STAT_KIND[kind], n, log_factorial)))


def select_mu(n: int, k: int, chain, kind: str = "X") -> tuple[int, float]:
    """Chain prefix whose expectation is nearest ln 2 (ties to the smaller prefix)."""
    lk = STAT_KIND.get(kind, kind)
    best, best_dev, best_le = 0, math.inf, None
    for i, size in enumerate(chain.cum_sizes):
        le = log_expectation(lk, n, k, log(size))
        dev = abs(math.exp(le) - LN2)
        if dev < best_dev:
            best, best_dev, best_le = i, dev, le
    return best, best_le


# -- second-moment diagnostics ----------------------------------------------


def _logsumexp(xs):
    top = max(xs)
    return top + log(sum(math.exp(x - top) for x in xs))


def psi1_terms(kind: str, n: int, k: int, family_size: int) -> list[tuple[str, float]]:
    """Log of each summand of the finite-sum upper bound on psi_1."""
    if not (2 <= k <= n / 2):
        raise DomainError(f"psi_1 bound needs 2 <= k <= n/2, got k={k}, n={n}")
    lb = log_binom
    lf = log(family_size)
    out = []
    if kind == "X":
        pk = comb(k, 2)
        for s in range(1, k):
            base = 1 - 2.0 ** -s + 2.0 ** -s * (1 - 2.0 ** -(k - s)) ** 2
            t = (lb(n, k) + lb(k, s) + lb(n - k, k - s) + 2 * lf
                 - (2 * pk - comb(s, 2)) * LN2 + (n - 2 * k + s) * log(base))
            out.append((f"s={s}", t))
        return out
    if kind == "Y":
        K = k + 2
        lF = lf + (1 + 2 * k) * LN2  # family lifted to [k+2]
        pk = comb(K, 2)
        common = lb(n, K) + 2 * lb(K, 2) + 2 * lF
        for s in range(1, k + 1):
            base = 1 - 2 * 3 / 2.0 ** K + 9 / 2.0 ** (2 * k + 4 - s)
            t = (common + lb(K, s) + lb(n - K, K - s) - (2 * pk - comb(s, 2)) * LN2
                 + (n - 2 * k - 4 + s) * log(base))
            out.append((f"s={s}", t))
        base = 1 - 2 * 3 / 2.0 ** K + 5 / 2.0 ** (k + 3)
        t = (common + log(K) + log(n - K) - (2 * pk - comb(k + 1, 2)) * LN2
             + (n - k - 3) * log(base))
        out.append((f"s={k + 1}", t))
        return out
    if kind == "Z":
        K = k + 3
        lF = lf + (3 + 3 * k) * LN2  # family lifted to [k+3]
        pk = comb(K, 2)
        common = log(9) + lb(n, K) + 2 * lb(K, 3) + 2 * lF
        for s in range(1, k + 1):
            base = 1 - 2 * 5 / 2.0 ** K + 25 / 2.0 ** (2 * k + 6 - s)
            t = (common + lb(K, s) + lb(n - K, K - s) - (2 * pk - comb(s, 2)) * LN2
                 + (n - 2 * k - 6 + s) * log(base))
            out.append((f"s={s}", t))
        base = 1 - 2 * 5 / 2.0 ** K + 17 / 2.0 ** (k + 5)
        t = (common + lb(K, k + 1) + lb(n - K, 2) - (2 * pk - comb(k + 1, 2)) * LN2
             + (n - k - 5) * log(base))
        out.append((f"s={k + 1}", t))
        base = 1 - 2 * 5 / 2.0 ** K + 9 / 2.0 ** (k + 4)
        t = (common + log(K) + log(n - K) - (2 * pk - comb(k + 2, 2)) * LN2
             + (n - k - 4) * log(base))
        out.append((f"s={k + 2}", t))
        return out
    raise DomainError(f"unknown statistic {kind!r}")


def psi1_bound(kind: str, n: int, k: int, family_size: int) -> float:
    """The psi_1 upper bound divided by the squared expectation."""
    terms = [t for _, t in psi1_terms(kind, n, k, family_size)]
    le = log_expectation(STAT_KIND[kind], n, k, log(family_size))
    return math.exp(_logsumexp(terms) - 2 * le)


def psi2_ratio_X(n: int, k: int) -> float:
    """psi_2 / (E X)^2 for the X statistic (independent of the family)."""
    return sum(comb(k, s) * comb(n - k, k - s) for s in range(1, k)) / comb(n, k)


def mixing_bound(kind: str, k: int, expectation: float) -> float:
    if kind == "X":
        eps, reps = 2.0 ** -k, k
    elif kind == "Y":
        eps, reps = 3 * 2.0 ** (-k - 2), k + 2
    elif kind == "Z":
        eps, reps = 5 * 2.0 ** (-k - 3), k + 3
    else:
        raise DomainError(f"unknown statistic {kind!r}")
    return expectation * -math.expm1(reps * math.log1p(-eps))


# -- reports ------------------------------------------------------------------


@dataclass
class RegimeReport:
    n: int
    k_hat: float
    k_hat_asymptotic: float
    k_star: float
    delta_part1: float
    regime_part1: str
    k_root_part1: float
    k_used: int
    variable_budget_part1: int
    mu: int | None = None
    family_size: int | None = None
    achieved_log_expectation: float | None = None
    achieved_expectation: float | None = None
    psi1_ratio: float | None = None
    mixing_bound: float | None = None
    k_plain: float = 0.0
    delta_part2: float = 0.0
    regime_part2: str = "X"
    k_root_part2: float = 0.0
    k_part2: int = 0
    variable_budget_part2: int = 0
    solver: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _root_info(root: Root) -> dict:
    return {"root": root.value, "residual": root.residual, "bracket": list(root.bracket),
            "iterations": root.iterations}


def regime_report(n: int, chain_limit: int = 7) -> RegimeReport:
    """All thresholds, regimes and the mu-selection for ``n``.

    The chain-dependent fields are filled only when the regime's k is at most
    ``chain_limit``.
    """
    from .families import build_chain

    k_hat_root = find_root(ThresholdFn("f_ext", n))
    p1 = select_regime_part1(n)
    plain = find_root(ThresholdFn("f_plain", n))
    delta2 = math.ceil(plain.value) - plain.value
    reg2 = regime_part2(delta2)
    solver = {"f_ext": _root_info(k_hat_root), "f_plain": _root_info(plain)}
    solver.update({k: _root_info(r) for k, r in p1.roots.items()})
    root2 = plain
    if reg2 == "Y":
        root2 = find_root(ThresholdFn("g_plain", n))
        solver["g_plain"] = _root_info(root2)
    k2 = math.ceil(root2.value)
    notes = []
    if p1.regime == "Z":
        notes.append("k'' solved from h_F = 0; the source text writes f_F(k''_F) = 0")
    rep = RegimeReport(
        n=n,
        k_hat=k_hat_root.value,
        k_hat_asymptotic=asymptotic_k_hat(n),
        k_star=p1.k_star,
        delta_part1=p1.delta,
        regime_part1=p1.regime,
        k_root_part1=p1.k_root,
        k_used=p1.k_used,
        variable_budget_part1=p1.k_used + EXTRA_VARIABLES[p1.regime],
        k_plain=plain.value,
        delta_part2=delta2,
        regime_part2=reg2,
        k_root_part2=root2.value,
        k_part2=k2,
        variable_budget_part2=k2 + (1 if reg2 == "X" else 3),
        solver=solver,
        notes=notes,
    )
    k = p1.k_used
    if 1 <= k <= chain_limit:
        chain = build_chain(k)
        mu, le = select_mu(n, k, chain, p1.regime)
        rep.mu = mu
        rep.family_size = chain.cum_sizes[mu]
        rep.achieved_log_expectation = le
        rep.achieved_expectation = math.exp(le)
        rep.mixing_bound = mixing_bound(p1.regime, k, rep.achieved_expectation)
        if 2 <= k <= n / 2:
            rep.psi1_ratio = psi1_bound(p1.regime, n, k, rep.family_size)
    else:
        notes.append(f"k={k} is beyond the class enumeration limit {chain_limit}; mu not selected")
    return rep


@dataclass(frozen=True)
class Tuning:
    kind: str
    k: int
    mu: int
    family_size: int
    log_expectation: float

    @property
    def num_variables(self) -> int:
        return self.k + EXTRA_VARIABLES[self.kind]


def tune_statistic(n: int, kinds=("X", "Y", "Z"), ks=range(2, 6), feasible=None) -> Tuning:
    """Statistic, k and prefix with expectation nearest ln 2; ties go to fewer variables.

    ``feasible(kind, k)`` can veto candidates, e.g. ones too costly to count.
    """
    from .families import build_chain

    best, key = None, None
    for kind in kinds:
        for k in ks:
            if k + _EXTRA[STAT_KIND[kind]] > n:
                continue
            if feasible is not None and not feasible(kind, k):
                continue
            chain = build_chain(k)
            mu, le = select_mu(n, k, chain, kind)
            cand = Tuning(kind, k, mu, chain.cum_sizes[mu], le)
            ckey = (abs(math.exp(le) - LN2), cand.num_variables)
            if key is None or ckey < key:
                best, key = cand, ckey
    if best is None:
        raise DomainError(f"no feasible statistic for n={n}")
    return best
