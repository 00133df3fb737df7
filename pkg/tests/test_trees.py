from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from localgap.algos.coloring import GreedyColoring
from localgap.graph import PortGraph, gen_path, gen_random_tree
from localgap.lcl import BOT, builtin, check_global, check_local
from localgap.sim import ConstantAlgorithm
from localgap.trees import (LabelRule, NotExtendible, PartialTree, PumpError, SurgeryError,
                            TreeEngine, TreeSpecError, brute_fingerprint, build_hierarchy, chain_view,
                            class_of, complete_labeling, duplicate_cut, extend, extendible_set,
                            extract_f, label_apply, label_region, leaf, legal_labeling_exists,
                            make_node, path_core, path_node, pump, pump_split, replace, search_feasible,
                            star, synthesize_run, tripartition, type_of)

from oracles import engine_fingerprint, pump_cases, pump_violations

TWO = builtin("two-coloring")
THREE = builtin("proper-coloring:3")
ALL = builtin("all-sigma")
A, B = 0, 1


@pytest.fixture(scope="module")
def three_rule():
    return search_feasible(THREE, 3)


@pytest.fixture(scope="module")
def all_rule():
    return search_feasible(ALL, 3)


@st.composite
def nodes(draw, depth: int = 3, labels=(BOT, 0, 1)):
    """Rooted trees with at most two kids per vertex (so degree stays <= 3)."""
    lab = draw(st.sampled_from(labels))
    if depth == 0:
        return leaf(lab)
    kids = draw(st.lists(nodes(depth=depth - 1, labels=labels), max_size=2))
    return make_node(lab, None, kids)


# partial trees and the tripartition

def test_node_hash_consing():
    a = make_node(BOT, None, [leaf(), leaf(0)])
    b = make_node(BOT, None, [leaf(0), leaf()])
    assert a is b and a.size == 3
    assert chain_view(path_core(3)) is path_node(3)


@settings(max_examples=50, deadline=None)
@given(nodes())
def test_partial_tree_roundtrip(node):
    t = PartialTree.from_node(node)
    assert t.to_node() is node


def test_tripartition_examples():
    single = PartialTree.from_node(leaf())
    tp = tripartition(single, 1)
    assert (tp.D1, tp.D2, tp.D3) == ({0}, frozenset(), frozenset())
    s = PartialTree.from_node(star(3))
    tp = tripartition(s, 1)
    assert tp.D1 == {0} and tp.D2 == {1, 2, 3} and not tp.D3
    p = PartialTree(gen_path(7), [BOT] * 7, (0,))
    tp = tripartition(p, 2)
    assert tp.D1 == {0, 1} and tp.D2 == {2, 3} and tp.D3 == {4, 5, 6}


def test_partial_tree_validation():
    with pytest.raises(ValueError):
        PartialTree(gen_path(3), [BOT] * 2, (0,))
    with pytest.raises(ValueError):
        PartialTree(gen_path(3), [BOT] * 3, (0, 0))


# extendible sets, classes and types

def test_extendible_set_examples():
    one = PartialTree.from_node(leaf())
    assert extendible_set(TWO, one) == {(A,), (B,)}
    two = PartialTree.from_node(path_node(2))
    assert extendible_set(TWO, two) == {(A, B), (B, A)}
    three = PartialTree.from_node(path_node(3))
    assert extendible_set(TWO, three) == extendible_set(TWO, two)


def test_class_examples():
    c1, c2, c3 = (class_of(TWO, path_node(k)) for k in (1, 2, 3))
    assert c2 == c3 != c1


def test_two_coloring_path_types_period_two():
    eng = TreeEngine(TWO, 3)
    fps = [eng.type_fp(path_core(k)) for k in range(2, 14)]
    # boundary shapes differ for k < 5 (the pole neighborhoods touch)
    assert len(set(fps[:4])) == 4
    for k in range(5, 12):
        assert fps[k - 2] == fps[k] != fps[k - 1]
    for k in range(2, 9):
        assert fps[k - 2] == brute_fingerprint(TWO, PartialTree.from_core(path_core(k)))


def test_two_coloring_path_classes_delta_two():
    eng = TreeEngine(TWO, 2)
    fps = {eng.class_fp(path_node(k)) for k in range(2, 10)}
    assert len(fps) == 1 and eng.class_fp(leaf()) not in fps
    # hand-derived automaton: empty, one tree, then path types 2..6 with 5 and 6 alternating
    assert len(eng.reachable_states([eng.single])) == 7


def test_all_sigma_classes_depend_on_root_degree_only():
    eng = TreeEngine(ALL, 3)
    by_deg = {}
    for node in [leaf(), path_node(2), path_node(5), star(2), star(3), make_node(BOT, None, [star(2)])]:
        by_deg.setdefault(node.deg, set()).add(eng.class_fp(node))
    assert all(len(v) == 1 for v in by_deg.values())


def test_type_transition_example():
    eng = TreeEngine(TWO, 3)
    t2 = eng.type_of(path_core(2))
    assert eng.type_transition(t2, eng.single) == eng.type_of(path_core(3))


@settings(max_examples=40, deadline=None)
@given(nodes(depth=2), nodes(depth=2), st.integers(2, 5))
def test_type_transition_well_defined(x, y, k):
    eng = TreeEngine(THREE, 3)
    core = path_core(k)
    for kid in (x, y):
        if kid.deg > 1:
            return
    if eng.cls(x) != eng.cls(y):
        return
    assert eng.type_of(core + (x,)) == eng.type_of(core + (y,))


def test_type_transition_well_defined_on_equal_classes():
    eng = TreeEngine(TWO, 3)
    # two different trees of the same class
    x, y = path_node(2), path_node(4)
    assert eng.cls(x) == eng.cls(y)
    for k in range(2, 7):
        assert eng.type_of(path_core(k) + (x,)) == eng.type_of(path_core(k) + (y,))


def test_all_sigma_transition_constant_on_long_cores():
    eng = TreeEngine(ALL, 3)
    out = {eng.type_transition(eng.type_of(path_core(k)), eng.single) for k in range(4, 12)}
    assert len(out) == 1


@settings(max_examples=60, deadline=None)
@given(nodes(depth=2, labels=(BOT, 0, 1, 2)), st.sampled_from(["all-sigma", "proper-coloring:3"]))
def test_class_matches_oracle(node, name):
    spec = builtin(name)
    if not _labels_in(node, {BOT} | set(spec.sigma_out)):
        return
    t = PartialTree.from_node(node)
    assert engine_fingerprint(TreeEngine(spec, 3), t) == brute_fingerprint(spec, t)


def _labels_in(node, labs) -> bool:
    return node.lab in labs and all(_labels_in(k, labs) for k in node.kids)


def test_engine_rejects_unsupported_specs():
    with pytest.raises(TreeSpecError):
        TreeEngine(builtin("hier:2"), 3)
    with pytest.raises(TreeSpecError):
        TreeEngine(builtin("sinkless-orientation"), 3)


# completion

def test_complete_labeling_examples():
    t = PartialTree.from_node(path_node(3))
    done = complete_labeling(TWO, t, [A, B])
    assert done == [A, B, A]
    with pytest.raises(NotExtendible):
        complete_labeling(TWO, t, [A, A])
    s = PartialTree.from_node(star(2))
    assert complete_labeling(TWO, s, [A, B, B]) == [A, B, B]


@settings(max_examples=40, deadline=None)
@given(nodes(depth=3))
def test_completion_verifies_on_d2_d3(node):
    t = PartialTree.from_node(node)
    bnd, ext = sorted(tripartition(t, 1).D1 | tripartition(t, 1).D2), extendible_set(THREE, t)
    tp = tripartition(t, 1)
    for e in sorted(ext)[:3]:
        done = complete_labeling(THREE, t, list(e))
        for v in tp.D2 | tp.D3:
            assert check_local(THREE, t.g, done, v) is True
        assert [done[v] for v in bnd] == list(e)


# pumping and surgery

def test_pump_example():
    eng = TreeEngine(TWO, 3)
    core = path_core(6)
    out = pump(eng, core, 10)
    assert len(out) >= 10 and len(out) % 2 == 0
    assert eng.type_fp(out) == eng.type_fp(core)
    assert pump(eng, core, 5, ell_pump=3) == core


def test_pump_split_and_repetitions():
    checked, bad = pump_violations("two-coloring", [path_core(k) for k in range(5, 12)])
    assert checked and not bad
    eng = TreeEngine(TWO, 3)
    i, j, exact = pump_split(eng, path_core(11), None)
    assert exact and j - i == 2


def test_pump_errors():
    eng = TreeEngine(TWO, 3)
    with pytest.raises(PumpError):
        pump(eng, path_core(1), 5)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1023), st.sampled_from(["all-sigma", "two-coloring", "proper-coloring:3"]))
def test_pump_preserves_type_sample(index, name):
    core = next(itertools.islice(pump_cases((5,)), index, None))
    checked, bad = pump_violations(name, [core])
    assert not bad


def test_label_apply_middle_edge():
    core = path_core(6)
    assert label_region(core, 1) == [(2, ()), (3, ())]
    out = label_apply(core, [A, B], 1)
    assert [x.lab for x in out] == [BOT, BOT, A, B, BOT, BOT]
    with pytest.raises(SurgeryError):
        label_apply(out, [A, B], 1)


def test_extend_length(three_rule):
    ell, lp = three_rule.ell, three_rule.ell_pump
    eng = TreeEngine(THREE, 3)
    w = ell
    out, e = extend(eng, path_core(2 * ell), w, ell, lp)
    assert 2 * (w + 1) <= len(out) <= 2 * (w + 1 + lp)
    assert 0 <= e < len(out) - 1


def test_duplicate_cut_counts():
    # 6-cycle with a pendant at 0; H = {2, 3} hangs between 1 and 4
    g = PortGraph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6)])
    out, labels = duplicate_cut(g, [BOT] * 7, [2, 3], 2, 3)
    assert out.n == g.n + 2 and len(labels) == out.n
    assert out.is_tree()
    # on a tree the cut separates the two sides: a forest on |V| + |V(H)| vertices
    t = PortGraph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (4, 6)])
    out, _ = duplicate_cut(t, [BOT] * 7, [1, 2, 3], 1, 3)
    assert out.n == t.n + 3 and len(out.edges()) == out.n - 2
    with pytest.raises(SurgeryError):
        duplicate_cut(t, [BOT] * 7, [2], 2, 2)


def test_replace_preserves_existence_example():
    # host path 0-1 plus H hanging from 1; swap a 3-path for a 5-path (same 2-coloring class)
    h1 = PartialTree.from_node(path_node(3))
    h2 = PartialTree.from_node(path_node(5))
    assert brute_fingerprint(TWO, h1) == brute_fingerprint(TWO, h2)
    g = PortGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    g2, lab2, keep = replace(g, [A] + [BOT] * 4, [2, 3, 4], [2], h2)
    assert g2.n == 7 and keep == {0: 0, 1: 1}
    assert legal_labeling_exists(TWO, g, [A] + [BOT] * 4) == legal_labeling_exists(TWO, g2, lab2)


# hierarchy and search

def test_all_sigma_converges_at_two(all_rule):
    st_ = all_rule.state
    assert all_rule.outcome == "feasible" and st_.k_reached == 2
    eng = all_rule.engine
    assert {eng.classes[c].rootdeg for c in st_.final_classes} == {0, 1, 2, 3}
    assert len(all_rule.rule) == len(st_.types[-1])


def test_three_coloring_feasible(three_rule):
    assert three_rule.outcome == "feasible"
    eng = three_rule.engine
    assert all(eng.good(c) for c in three_rule.state.final_classes)
    # goodness cross-check by brute force on class representatives
    for c in three_rule.state.final_classes:
        rep = eng.classes[c].rep
        assert legal_labeling_exists(THREE, PartialTree.from_node(rep).g)
    assert "feasible" in three_rule.state.dump(eng)


def test_two_coloring_infeasible():
    res = search_feasible(TWO, 3)
    assert res.outcome == "infeasible" and res.rule is None
    assert res.complexity == "n^{Ω(1)}"


def test_w_independence(three_rule):
    base = {three_rule.engine.classes[c].fp for c in three_rule.state.final_classes}
    ell, lp = three_rule.ell, three_rule.ell_pump
    for w in (ell, ell + 3, 2 * ell):
        eng = TreeEngine(THREE, 3)
        st_ = build_hierarchy(eng, LabelRule(dict(three_rule.rule.table)), ell=ell, w=w, ell_pump=lp)
        assert st_.feasible
        assert {eng.classes[c].fp for c in st_.final_classes} == base


def test_hierarchy_classes_monotone(three_rule):
    cs = three_rule.state.classes
    assert all(a <= b for a, b in zip(cs, cs[1:]))


def test_extract_constant_rule_is_exact():
    res = extract_f(ConstantAlgorithm(0), ALL, 3, trials=1)
    assert res.state.feasible
    assert all(set(v) == {0} for v in res.rule.table.values())


def test_extract_greedy_coloring(three_rule):
    res = extract_f(GreedyColoring(3), THREE, 3, trials=20)
    assert res.state.feasible
    assert res.w >= 4 * (1 + res.t)


# synthesis

@pytest.mark.parametrize("n", [1, 2, 5, 40, 300])
def test_synthesize_three_coloring(three_rule, n):
    g = gen_random_tree(n, 3, n)
    out = synthesize_run(THREE, three_rule, g)
    assert out.verdict.legal and check_global(THREE, g, out.labels).legal


def test_synthesize_all_sigma_constant(all_rule):
    g = gen_random_tree(200, 3, 4)
    out = synthesize_run(ALL, all_rule, g)
    assert set(out.labels) == {0}
    assert out.rounds == out.decomposition_rounds


def test_synthesize_path_levels(three_rule):
    out = synthesize_run(THREE, three_rule, gen_path(1000))
    assert out.verdict.legal
    ell = three_rule.ell
    assert all(ell <= x <= 2 * ell for xs in out.path_lengths.values() for x in xs if x > 1)
