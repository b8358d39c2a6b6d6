import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fodist.analysis import (
    LN2,
    ThresholdFn,
    asymptotic_k_hat,
    exact_expectation,
    find_root,
    log_expectation,
    log_factorial,
    mixing_bound,
    psi1_bound,
    psi1_terms,
    psi2_ratio_X,
    regime_part1,
    regime_part2,
    regime_report,
    select_mu,
    select_regime_part1,
    solve_root,
    tune_statistic,
)
from fodist.errors import DomainError, SolverError
from fodist.families import build_chain


def test_log_expectation_examples():
    assert math.isclose(log_expectation("f_family", 5, 2, 0.0), math.log(2.109375), rel_tol=1e-12)
    assert math.isclose(log_expectation("f_plain", 5, 2), math.log(4.21875), rel_tol=1e-12)


@pytest.mark.parametrize("stat,kind", [("X", "f_family"), ("Y", "g_family"), ("Z", "h_family")])
@pytest.mark.parametrize("n,k,size", [(10, 2, 1), (20, 3, 4), (40, 4, 17), (64, 5, 120)])
def test_integer_k_matches_rational(stat, kind, n, k, size):
    exact = exact_expectation(stat, n, k, size)
    assert math.isclose(math.exp(log_expectation(kind, n, k, math.log(size))), float(exact), rel_tol=1e-12)


@pytest.mark.parametrize("n,k", [(20, 3), (100, 5)])
def test_plain_and_ext_match_rational(n, k):
    plain = exact_expectation("X", n, k, None)
    assert math.isclose(math.exp(log_expectation("f_plain", n, k)), float(plain), rel_tol=1e-12)
    ext = plain * 2 ** k
    assert math.isclose(math.exp(log_expectation("f_ext", n, k)), float(ext), rel_tol=1e-12)
    gp = exact_expectation("Y", n, k, None)
    assert math.isclose(math.exp(log_expectation("g_plain", n, k)), float(gp), rel_tol=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        log_expectation("f_ext", 10, 0.5)
    with pytest.raises(DomainError):
        log_expectation("g_family", 10, 9)
    with pytest.raises(DomainError):
        log_expectation("nope", 10, 2)


def test_root_flanks_k_hat():
    n = 2 ** 10
    f = ThresholdFn("f_ext", n)
    r = solve_root(f)
    assert f(math.floor(r)) <= 0 <= f(math.ceil(r))


def test_f_ext_increasing():
    for e in range(10, 21, 2):
        f = ThresholdFn("f_ext", 2 ** e)
        lo, hi = f.default_bracket()
        ks = [lo + 0.5 * i for i in range(int((hi - lo) / 0.5))]
        assert all(f(b) > f(a) for a, b in zip(ks, ks[1:]))


@given(st.integers(64, 5000))
def test_root_postcondition(n):
    for fn in (ThresholdFn("f_ext", n), ThresholdFn("f_plain", n), ThresholdFn("f_family", n, log_factorial)):
        r = find_root(fn)
        assert abs(r.residual) < 1e-9 or r.bracket[1] - r.bracket[0] < 1e-6
        lo, hi = fn.default_bracket()
        if lo <= math.floor(r.value) and math.ceil(r.value) <= hi and fn.kind != "f_family":
            assert fn(math.floor(r.value)) <= 0 <= fn(math.ceil(r.value))


def test_family_threshold_first_crossing():
    # f_F* rises then falls; the solver takes the first upward crossing
    fn = ThresholdFn("f_family", 150, log_factorial)
    r = solve_root(fn)
    assert abs(fn(r)) < 1e-8
    assert fn(r - 0.1) < 0 < fn(r + 0.1)


def test_no_sign_change():
    with pytest.raises(SolverError) as err:
        solve_root(ThresholdFn("f_plain", 100), lo=1.0, hi=1.5)
    assert "bracket" in err.value.diagnostics


def test_regime_brackets():
    assert regime_part1(0.30) == "X"
    assert regime_part1(0.70) == "Y"
    assert regime_part1(0.99) == "Z"
    assert regime_part1(0.02) == "Z"
    assert regime_part1(0.55) == "X" and regime_part1(0.95) == "Y"
    assert regime_part2(0.05) == "X" and regime_part2(0.96) == "Y" and regime_part2(0.01) == "Y"


@given(st.floats(0, 1, exclude_max=True))
def test_regimes_partition(delta):
    hits = [0.05 < delta <= 0.55, 0.55 < delta <= 0.95, delta <= 0.05 or delta > 0.95]
    assert sum(hits) == 1
    assert regime_part1(delta) == "XYZ"[hits.index(True)]


def test_select_regime_uses_reroot():
    for n in range(64, 3000, 37):
        p1 = select_regime_part1(n)
        assert p1.k_used == math.floor(p1.k_root)
        if p1.regime == "X":
            assert p1.k_root == p1.k_star


def test_k_prime_offset_trend():
    gaps = []
    for e in range(10, 21, 2):
        n = 2 ** e
        ks = solve_root(ThresholdFn("f_family", n, log_factorial))
        kp = solve_root(ThresholdFn("g_family", n, log_factorial))
        gaps.append(abs(kp - ks - (math.log2(3) - 2)))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_select_mu():
    chain = build_chain(3)
    mu, le = select_mu(150, 3, chain, "X")
    devs = [abs(math.exp(log_expectation("f_family", 150, 3, math.log(s))) - LN2) for s in chain.cum_sizes]
    assert mu == devs.index(min(devs))
    assert math.isclose(le, log_expectation("f_family", 150, 3, math.log(chain.cum_sizes[mu])))
    # expectation above ln 2 already at F^0: left endpoint
    assert log_expectation("f_family", 20, 3, 0.0) > math.log(LN2)
    mu0, _ = select_mu(20, 3, chain, "X")
    assert mu0 == 0


def test_psi1_terms():
    size = build_chain(3).cum_sizes[3]
    terms = dict(psi1_terms("X", 150, 3, size))
    assert set(terms) == {"s=1", "s=2"}
    assert terms["s=2"] > terms["s=1"]
    assert 0 < psi1_bound("X", 150, 3, size) < math.inf
    assert len(psi1_terms("Y", 150, 3, 8)) == 4
    assert len(psi1_terms("Z", 150, 3, 8)) == 5
    with pytest.raises(DomainError):
        psi1_bound("X", 150, 1, 1)


def test_psi1_x_first_term_by_hand():
    n, k, size = 40, 2, 2
    base = 1 - 0.5 + 0.5 * 0.25
    expected = math.comb(n, 2) * 2 * (n - 2) * size ** 2 / 2 ** 2 * base ** (n - 3)
    assert math.isclose(math.exp(psi1_terms("X", n, k, size)[0][1]), expected, rel_tol=1e-10)


def test_psi2_ratio():
    assert math.isclose(psi2_ratio_X(10, 2), 2 * 8 / 45)


def test_mixing_bound():
    approx = LN2 * 10 / 1024
    assert math.isclose(mixing_bound("X", 10, LN2), approx, rel_tol=0.01)
    assert mixing_bound("Y", 4, 0.0) == 0.0
    values = [mixing_bound("X", k, LN2) for k in range(2, 12)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_report_n150():
    rep = regime_report(150)
    assert rep.regime_part1 in "XYZ"
    assert rep.variable_budget_part1 == rep.k_used + {"X": 1, "Y": 3, "Z": 4}[rep.regime_part1]
    assert rep.achieved_expectation == pytest.approx(math.exp(rep.achieved_log_expectation))
    doc = rep.to_dict()
    assert "solver" in doc and doc["solver"]["f_ext"]["residual"] < 1e-8
    assert rep.k_hat_asymptotic == pytest.approx(asymptotic_k_hat(150))


def test_z_regime_note():
    for n in range(64, 5000):
        p1 = select_regime_part1(n)
        if p1.regime == "Z":
            assert any("h_F" in note for note in regime_report(n).notes)
            break
    else:
        pytest.fail("no Z regime found")


def test_tuning_prefers_ln2():
    t = tune_statistic(240, kinds=("X",), ks=range(2, 6))
    assert (t.kind, t.k, t.mu) == ("X", 4, 0)
    assert abs(math.exp(t.log_expectation) - LN2) < 0.2


def test_exact_expectation_spot_values():
    assert exact_expectation("X", 5, 2, 1) == Fraction(270, 128)
    assert exact_expectation("X", 4, 2, None) == Fraction(27, 8)
    assert exact_expectation("Y", 5, 2, 1) == Fraction(10 * 3, 2) * Fraction(13, 16)


def _exact_psi1(n, k, chain, mu):
    """Sum over ordered overlapping pairs of distinct counted k-sets, averaged over all graphs."""
    import itertools
    from fodist.graph import Graph
    from fodist.sim import tuple_counted

    pairs = list(itertools.combinations(range(n), 2))
    sets = list(itertools.combinations(range(n), k))
    overlap = [(a, b) for a in range(len(sets)) for b in range(len(sets))
               if a != b and set(sets[a]) & set(sets[b])]
    total = 0
    for code in range(1 << len(pairs)):
        g = Graph.from_edges(n, [p for i, p in enumerate(pairs) if code >> i & 1])
        hit = [tuple_counted(g, "X", chain, mu, s) for s in sets]
        total += sum(1 for a, b in overlap if hit[a] and hit[b])
    return Fraction(total, 1 << len(pairs))


@pytest.mark.parametrize("mu", [0, 1])
def test_psi1_bound_dominates_exact(mu):
    chain = build_chain(2)
    n = 6
    exact = _exact_psi1(n, 2, chain, mu)
    size = chain.cum_sizes[mu]
    e2 = float(exact_expectation("X", n, 2, size)) ** 2
    # equality for the non-edge family: every neglected event is impossible
    assert psi1_bound("X", n, 2, size) * e2 >= float(exact) * (1 - 1e-12) > 0
