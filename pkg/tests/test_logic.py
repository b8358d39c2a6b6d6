import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs
from fodist.errors import EmptyFamilyError, FreeVariableError, ParseError, SizeLimitError
from fodist.families import build_chain
from fodist.graph import Graph, sample_uniform
from fodist.logic import (
    Adj,
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Not,
    Or,
    Top,
    build_witness_sentence,
    build_X_sentence,
    build_Y_sentence,
    build_Z_sentence,
    evaluate,
    evaluate_reference,
    extension_axiom,
    free_variables,
    num_variables,
    parse,
    to_text,
)
from fodist.sim import count_X, count_Y, count_Z

VARS = ["x", "y", "z", "w"]
var = st.sampled_from(VARS)
atoms = st.one_of(
    st.builds(Adj, var, var),
    st.builds(Eq, var, var),
    st.just(Top()),
    st.just(Bottom()),
)


def _extend(children):
    return st.one_of(
        st.builds(Not, children),
        st.builds(lambda ps: And(tuple(ps)), st.lists(children, min_size=2, max_size=3)),
        st.builds(lambda ps: Or(tuple(ps)), st.lists(children, min_size=2, max_size=3)),
        st.builds(Exists, var, children),
        st.builds(Forall, var, children),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


def close(f):
    for v in sorted(free_variables(f)):
        f = Exists(v, f)
    return f


def test_parse_examples():
    assert parse("Ex Ey (x ~ y)") == Exists("x", Exists("y", Adj("x", "y")))
    loop = parse("Ex (x ~ x)")
    assert not evaluate(loop, Graph.complete(4))
    with pytest.raises(ParseError) as err:
        parse("Ex (x ~")
    assert err.value.position == 6


def test_parse_errors():
    with pytest.raises(FreeVariableError):
        parse("x ~ y")
    assert parse("x ~ y", sentence=False) == Adj("x", "y")
    with pytest.raises(ParseError):
        parse("Ex (x ~ y")
    with pytest.raises(ParseError):
        parse("Ex x ? y")
    with pytest.raises(ParseError):
        parse("T T")


def test_precedence():
    f = parse("Ex (x = x) & T | F")
    assert f == Or((And((Exists("x", Eq("x", "x")), Top())), Bottom()))
    assert parse("!Ex Ay (x ~ y)") == Not(Exists("x", Forall("y", Adj("x", "y"))))


@settings(max_examples=1000)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse(to_text(f), sentence=False) == f


def test_num_variables_examples():
    assert num_variables(parse("Ex Ey (x ~ y)")) == 2
    assert num_variables(parse("Ex Ey (x ~ y) & Ex (x = x)")) == 2
    assert num_variables(extension_axiom(1)) == 2


@settings(max_examples=300)
@given(formulas.map(close), graphs(max_n=4))
def test_evaluator_matches_reference(f, g):
    assert evaluate(f, g) == evaluate_reference(f, g)


@given(formulas.map(close), graphs(max_n=5), st.randoms())
def test_evaluation_is_isomorphism_invariant(f, g, r):
    perm = list(range(g.n))
    r.shuffle(perm)
    assert evaluate(f, g) == evaluate(f, g.relabel(perm))


def test_free_variables_rejected():
    with pytest.raises(FreeVariableError):
        evaluate(Adj("x", "y"), Graph.complete(2))


def test_evaluate_examples():
    f = parse("Ex Ey (x ~ y)")
    assert evaluate(f, Graph.complete(2))
    assert not evaluate(f, Graph.empty(2))
    assert not evaluate(extension_axiom(1), Graph.complete(3))
    assert evaluate(extension_axiom(1), Graph.cycle(5))


def _ext_holds(g, k):
    for s in itertools.permutations(range(g.n), k):
        for split in itertools.product((0, 1), repeat=k):
            if not any(
                y not in s and all(g.has_edge(y, x) == bool(b) for x, b in zip(s, split))
                for y in range(g.n)
            ):
                return False
    return True


@pytest.mark.parametrize("k", [1, 2, 3])
def test_extension_axiom_variables(k):
    assert num_variables(extension_axiom(k)) == k + 1


@settings(max_examples=150)
@given(graphs(max_n=7))
def test_extension_axiom_semantics(g):
    for k in (1, 2):
        assert evaluate(extension_axiom(k), g) == _ext_holds(g, k)


def test_extension_axiom_two_fails_on_all_small_graphs():
    phi = extension_axiom(2)
    # no 2-sets at all below two vertices
    assert evaluate(phi, Graph.empty(0)) and evaluate(phi, Graph.empty(1))
    pairs = list(itertools.combinations(range(6), 2))
    for n in range(2, 7):
        sub = [p for p in pairs if p[1] < n]
        for mask in range(1 << len(sub)):
            g = Graph.from_edges(n, [p for b, p in enumerate(sub) if mask >> b & 1])
            assert not evaluate(phi, g)


def test_x_sentence_examples():
    c2 = build_chain(2)
    phi = build_X_sentence(c2, 0)
    assert not evaluate(phi, Graph.empty(4))
    assert evaluate(phi, Graph.complete(4))
    assert num_variables(build_X_sentence(build_chain(3), 2)) == 4


@pytest.mark.parametrize("k", [2, 3])
def test_yz_variable_counts(k):
    chain = build_chain(k)
    assert num_variables(build_Y_sentence(chain, 1)) == k + 3
    assert num_variables(build_Z_sentence(chain, 1)) == k + 4


def test_y_sentence_on_edgeless():
    assert not evaluate(build_Y_sentence(build_chain(2), 0), Graph.empty(5))


def test_empty_family_rejected():
    from fodist.logic import build_count_zero_sentence

    with pytest.raises(EmptyFamilyError):
        build_count_zero_sentence("X", [])


def test_x_sentence_matches_counter_n12():
    chain = build_chain(3)
    for i in range(200):
        g = sample_uniform(12, 1000 + i)
        for mu in range(chain.num_prefixes):
            assert evaluate(build_X_sentence(chain, mu), g) == (count_X(g, chain, mu) == 0)


def test_yz_sentences_match_counters_n10():
    chain = build_chain(2)
    for i in range(200):
        g = sample_uniform(10, 5000 + i)
        for mu in range(chain.num_prefixes):
            assert evaluate(build_Y_sentence(chain, mu), g) == (count_Y(g, chain, mu) == 0)
            assert evaluate(build_Z_sentence(chain, mu), g) == (count_Z(g, chain, mu) == 0)


def test_witness_sentence_examples():
    k2 = Graph.complete(2)
    phi = build_witness_sentence(k2, "X")
    assert evaluate(phi, Graph.from_edges(3, [(0, 1)]))
    assert not evaluate(phi, Graph.complete(3))
    assert num_variables(phi) == 3
    assert num_variables(build_witness_sentence(Graph.path(4), "Y")) == 7
    with pytest.raises(SizeLimitError):
        build_witness_sentence(Graph.empty(9), "X")


@settings(max_examples=100)
@given(graphs(min_n=2, max_n=7), st.data())
def test_x_witness_events_are_decreasing(g, data):
    # a witness for the edgeless-prefix X sentence survives deleting an edge
    chain = build_chain(2)
    phi = build_X_sentence(chain, 1)
    if evaluate(phi, g) or not g.edges():
        return
    e = data.draw(st.sampled_from(g.edges()))
    smaller = Graph.from_edges(g.n, [x for x in g.edges() if x != e])
    assert not evaluate(phi, smaller)
