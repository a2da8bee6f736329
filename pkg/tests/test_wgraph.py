"""Spanning in-forest enumeration, sweep-based extraction and nesting."""

from fractions import Fraction

import pytest

import metachain as mc
from metachain.wgraph import undirected_components

F = Fraction


@pytest.fixture(scope="module")
def demo():
    g = mc.nested_cycle_chain()
    return g, mc.run_algorithm1(g)


@pytest.fixture(scope="module")
def demo_optima(demo):
    g, _ = demo
    return mc.enumerate_all_optimal(g)


def test_two_state_enumeration():
    g = mc.two_state_chain()
    singles = sorted(mc.enumerate_wgraphs(g, 1), key=lambda w: w.arcs)
    assert [w.arcs for w in singles] == [((1, 2),), ((2, 1),)]
    assert [w.sinks for w in singles] == [frozenset({2}), frozenset({1})]
    assert singles[0].total_weight == F(1)
    assert singles[0].m == 1
    full = list(mc.enumerate_wgraphs(g, 2))
    assert len(full) == 1
    assert full[0].arcs == () and full[0].total_weight == 0


def test_two_state_unique_optimum():
    optima, unique = mc.enumerate_optimal(mc.two_state_chain(), 1)
    assert unique
    assert optima[0].arcs == ((1, 2),)
    assert optima[0].total_weight == F(1)


def test_wgraph_json_shape():
    optima, _ = mc.enumerate_optimal(mc.two_state_chain(), 1)
    doc = optima[0].to_json_dict()
    assert doc == {"sinks": [2], "arcs": [[1, 2]], "total_weight": "1"}


def test_successor_map():
    optima, _ = mc.enumerate_optimal(mc.two_state_chain(), 1)
    assert optima[0].successor_map() == {1: 2}


def test_sink_count_bounds():
    g = mc.two_state_chain()
    with pytest.raises(ValueError):
        list(mc.enumerate_wgraphs(g, 0))
    with pytest.raises(ValueError):
        list(mc.enumerate_wgraphs(g, 3))


def test_enumeration_cap():
    ring = [(i, i % 10 + 1, i) for i in range(1, 11)]
    g = mc.chain_graph(ring)
    with pytest.raises(mc.EnumerationCapError):
        list(mc.enumerate_wgraphs(g, 1))
    assert len(list(mc.enumerate_wgraphs(g, 1, cap=10))) == 10


def test_missing_sink_count_reported():
    # states 2 and 3 have no outgoing arcs, so one sink is impossible
    g = mc.chain_graph([(1, 2, 1)], states=[1, 2, 3])
    with pytest.raises(mc.GraphError):
        mc.enumerate_optimal(g, 1)


def test_demo_optimum_single_sink(demo_optima):
    optima, unique = demo_optima[1]
    assert unique
    w = optima[0]
    assert w.sinks == frozenset({7})
    assert w.arcs == ((1, 6), (2, 3), (3, 1), (4, 3), (5, 4), (6, 7))
    assert w.total_weight == F(291, 20)


def test_demo_optimum_two_sinks(demo_optima):
    optima, unique = demo_optima[2]
    assert unique
    w = optima[0]
    assert w.sinks == frozenset({2, 7})
    assert w.arcs == ((1, 2), (3, 1), (4, 3), (5, 4), (6, 5))
    assert w.total_weight == F(43, 4)


def test_demo_optimum_three_sinks(demo_optima):
    optima, unique = demo_optima[3]
    assert unique
    w = optima[0]
    assert w.sinks == frozenset({2, 6, 7})
    assert w.arcs == ((1, 2), (3, 1), (4, 3), (5, 4))
    assert w.total_weight == F(153, 20)


def test_demo_weight_gaps_match_exponents(demo, demo_optima):
    _, rep = demo
    value = {m: opt[0].total_weight for m, (opt, _u) in demo_optima.items()}
    for m in range(1, 7):
        assert value[m] - value[m + 1] == rep.delta[m - 1]
    assert value[7] == 0


def test_extraction_matches_enumeration(demo, demo_optima):
    _, rep = demo
    for m in range(1, 7):
        got = mc.extract_wgraph(rep, m)
        want = demo_optima[m][0][0]
        assert got == want


def test_extraction_respects_tie_flag():
    rep = mc.run_algorithm1(mc.tied_min_arc_chain())
    with pytest.raises(mc.SymmetryError):
        mc.extract_wgraph(rep, 1)


def test_extraction_needs_enough_steps():
    rep = mc.run_algorithm1(
        mc.nested_cycle_chain(), stop=mc.StopCriterion.exponent_threshold(F(3))
    )
    with pytest.raises(mc.GraphError):
        mc.extract_wgraph(rep, 1)


def test_extraction_sink_count_bounds(demo):
    _, rep = demo
    with pytest.raises(ValueError):
        mc.extract_wgraph(rep, 0)
    with pytest.raises(ValueError):
        mc.extract_wgraph(rep, 7)


def test_tied_optima_both_enumerated():
    optima, unique = mc.enumerate_optimal(mc.tied_optimum_chain(), 2)
    assert not unique
    assert sorted(w.arcs for w in optima) == [((2, 1),), ((2, 3),)]
    assert {w.total_weight for w in optima} == {F(1)}


def test_weak_nesting_on_demo(demo_optima):
    for m in range(1, 7):
        fine = demo_optima[m][0][0]
        coarse = demo_optima[m + 1][0][0]
        assert mc.weak_nested_violations(fine, coarse) == []


def test_weak_nesting_rejects_non_consecutive(demo_optima):
    fine = demo_optima[1][0][0]
    coarse = demo_optima[3][0][0]
    problems = mc.weak_nested_violations(fine, coarse)
    assert problems and "not consecutive" in problems[0]


def test_weak_nesting_flags_foreign_sinks(demo_optima):
    coarse = demo_optima[2][0][0]
    alien = mc.WGraph(
        vertices=coarse.vertices,
        sinks=frozenset({3}),
        arcs=((1, 2), (2, 3), (4, 3), (5, 4), (6, 5), (7, 6)),
        total_weight=F(1),
    )
    problems = mc.weak_nested_violations(alien, coarse)
    assert problems and "not contained" in problems[0]


def test_undirected_components():
    comps = undirected_components([1, 2, 3, 4, 5], [(1, 2), (3, 2), (4, 5)])
    assert comps == [frozenset({1, 2, 3}), frozenset({4, 5})]
    assert undirected_components([1], []) == [frozenset({1})]


def test_corpus_extraction_spot_check(oracle_corpus, oracle_extractions):
    (g, rep), (_, _, by_m) = oracle_corpus[0], oracle_extractions[0]
    per_m = mc.enumerate_all_optimal(g)
    for m in range(1, g.n):
        optima, unique = per_m[m]
        assert unique
        assert by_m[m] == optima[0]
        assert by_m[m].total_weight - per_m[m + 1][0][0].total_weight == rep.delta[m - 1]
