"""Worked examples for the graph, LCL, simulator, algorithm and resampling layers."""
from __future__ import annotations

import math
import random

import pytest

from localgap.algos.decompose import rc_decompose
from localgap.algos.hier import solve_hier
from localgap.algos.indset import check_independent_set, independent_set_path
from localgap.algos.orient import OrientCycle
from localgap.algos.sinkless import SinklessGuess
from localgap.graph import ball, bfs_dist, gen_hk, gen_path, gen_random_regular, gen_random_tree, gen_ring, gen_star
from localgap.lcl import BOT, MARS, MERCURY, VENUS, builtin, check_global, check_local, hier_levels, proper_coloring
from localgap.lll import (BadEventSystem, Event, check_criterion, dependency_degree, events_from_algorithm,
                          mt_resample, speedup_wrap)
from localgap.algos.coloring import GreedyColoring
from localgap.sim import ConstantAlgorithm, RandomLabelAlgorithm, estimate_failure, run_det, run_rand


# graphs

def test_rings():
    tri = gen_ring(3)
    assert all(tri.deg(v) == 2 for v in range(3))
    assert bfs_dist(gen_ring(5), 0)[2] == 2
    g = gen_ring(100)
    assert all(ball(g, v, 50).size == 100 for v in (0, 37, 99))


def test_tree_generator_small_and_deterministic():
    assert gen_random_tree(1, 3, 0).n == 1 and not gen_random_tree(1, 3, 0).edges()
    assert gen_random_tree(2, 3, 0).edges() == [(0, 1)]
    assert gen_random_tree(1000, 3, 7).edges() == gen_random_tree(1000, 3, 7).edges()


def test_hk_shapes():
    h1 = gen_hk(1, 7)
    assert h1.n == 7 and h1.edges() == gen_path(7).edges()
    h2 = gen_hk(2, 3)
    assert h2.n == 18 and h2.max_degree() == 3
    h3 = gen_hk(3, 7)
    lv = hier_levels(h3, 3)
    assert lv == h3.meta["backbone"] and 4 not in lv


def test_views():
    v0 = ball(gen_path(4), 1, 0)
    assert v0.size == 1 and v0.deg(0) == 2
    assert ball(gen_ring(5), 3, 2).size == 5
    s = ball(gen_star(3), 0, 1)
    assert s.size == 4 and s.deg(0) == 3


# LCL verifiers

def test_local_checks():
    two = proper_coloring(2)
    assert check_local(two, gen_path(3), [0, 1, 0], 1) is True
    assert check_local(two, gen_path(3), [0, 0, 1], 1) is False


def test_global_checks():
    g = gen_hk(2, 4)
    labels = run_det(g, builtin("hier:2"), solve_hier(2), mode="global").labeling
    assert all(check_local(builtin("hier:2"), g, labels, v) for v in range(g.n))
    assert check_global(builtin("all-sigma"), gen_ring(4), [0, 1, 1, 0]).legal
    for code in range(32):
        labels = [(code >> i) & 1 for i in range(5)]
        v = check_global(proper_coloring(2), gen_ring(5), labels)
        assert v.status == "illegal" and v.vertex is not None
    assert check_global(proper_coloring(3), gen_path(3), [0, BOT, 1]).status == "incomplete"


def test_hier_one_examples():
    p1 = builtin("hier:1")
    assert check_global(p1, gen_path(3), [VENUS, MARS, VENUS]).legal
    assert not check_global(p1, gen_path(3), [MERCURY] * 3).legal


def test_orientation_uniform_ring():
    # port 1 of vertex v leads to v+1 in gen_ring, so label 1 everywhere is clockwise
    g = gen_ring(5)
    assert all(g.adj[v][0][0] == (v + 1) % 5 for v in range(5))
    assert check_global(builtin("ell-orientation", 2), g, [1] * 5).legal


# simulator

def test_constant_algorithm():
    g = gen_random_tree(50, 3, 1)
    rep = run_det(g, builtin("all-sigma"), ConstantAlgorithm(0))
    assert rep.verdict.legal and rep.rounds == 0


def test_hier_two_on_h2():
    assert run_det(gen_hk(2, 8), builtin("hier:2"), solve_hier(2), mode="global").verdict.legal


def test_order_invariant_id_permutation():
    g = gen_random_tree(30, 3, 2)
    a = run_det(g, builtin("all-sigma"), ConstantAlgorithm(1), id_seed=1).labeling
    b = run_det(g, builtin("all-sigma"), ConstantAlgorithm(1), id_seed=2).labeling
    assert a == b


def test_seeded_runs_repeat():
    g = gen_random_tree(80, 3, 3)
    alg = GreedyColoring(4)
    a = run_rand(g, proper_coloring(4), alg, seed=9)
    b = run_rand(g, proper_coloring(4), alg, seed=9)
    assert a == b
    assert a.advertised_n == g.n


def test_advertised_n_bounds_view():
    g = gen_random_tree(300, 3, 5)
    alg = GreedyColoring(4)
    rep = run_rand(g, proper_coloring(4), alg, seed=1, advertised_n=16, mode="view")
    assert rep.radius_touched <= alg.round_bound(16, 3)


def test_failure_rates():
    g = gen_path(30)
    assert estimate_failure(g, builtin("hier:1"), ConstantAlgorithm(MERCURY), trials=3).global_rate > 0
    est = estimate_failure(gen_path(2), proper_coloring(2), RandomLabelAlgorithm((0, 1)), trials=10000)
    assert abs(est.global_rate - 0.5) <= 3 * est.stderr(0.5)


# algorithms

def test_hier_levels_examples():
    assert set(hier_levels(gen_path(40), 2)) == {1}
    g = gen_hk(2, 4)
    assert hier_levels(g, 2) == g.meta["backbone"]
    assert hier_levels(gen_star(3), 1) == [2, 1, 1, 1]


def test_hier_one_solver_examples():
    out = run_det(gen_path(5), builtin("hier:1"), solve_hier(1), ids=[1, 2, 3, 4, 5]).labeling
    assert out == [VENUS, MARS, VENUS, MARS, VENUS]
    out = run_det(gen_ring(7), builtin("hier:1"), solve_hier(1)).labeling
    assert out == [MERCURY] * 7


@pytest.mark.parametrize("x", [3, 7, 15, 30])
def test_hier_two_any_x(x):
    assert run_det(gen_hk(2, x), builtin("hier:2"), solve_hier(2), mode="global").verdict.legal


def test_decomposition_examples():
    d = rc_decompose(gen_path(1), 4)
    assert d.L == 1 and d.tag == ["R"] and d.iteration == [1]
    d = rc_decompose(gen_star(3), 4)
    assert d.iteration == [2, 1, 1, 1] and set(d.tag) == {"R"}
    d = rc_decompose(gen_path(100), 4)
    assert d.tag[1:99] == ["C"] * 98 and set(d.iteration[1:99]) == {1}
    assert all(4 <= len(p) <= 8 for p in d.paths[1])


def test_independent_set_examples():
    assert independent_set_path(list(range(3)), 4, 8) == frozenset()
    i12 = independent_set_path(list(range(12)), 4, 8)
    assert len(i12) == 1 and check_independent_set(list(range(12)), i12, 4, 8) == []
    ids = random.Random(0).sample(range(1, 10**6), 100)
    i100 = independent_set_path(list(range(100)), 4, 8, ids=ids)
    assert check_independent_set(list(range(100)), i100, 4, 8) == []


def test_orientation_examples():
    rep = run_det(gen_ring(5), builtin("ell-orientation:2"), OrientCycle(2), mode="view")
    assert rep.verdict.legal
    assert OrientCycle(8).round_bound(100, 2) == OrientCycle(8).round_bound(10000, 2)


# resampling

def test_criterion_examples():
    assert check_criterion(2.0 ** -16, 16, 3)
    assert not check_criterion(0.25, 2, 3)
    assert check_criterion(0.0, 100, 5)


def test_resample_examples():
    never = BadEventSystem([2, 2], [Event(0, (0, 1), lambda a: False)])
    assert mt_resample(never).iterations == 0
    coin = BadEventSystem([2], [Event(0, (0,), lambda a: a[0] == 1)])
    its = [mt_resample(coin, seed=s).iterations for s in range(4000)]
    assert all(mt_resample(coin, seed=s).assignment == [0] for s in range(20))
    mean = sum(its) / len(its)
    # iterations ~ Bernoulli(1/2) * Geometric(1/2): mean 1, variance 2
    assert abs(mean - 1) <= 3 * math.sqrt(2 / len(its))


def test_algorithm_event_scopes():
    g = gen_ring(30)
    sys0 = events_from_algorithm(g, builtin("all-sigma"), ConstantAlgorithm(0), n_star=64)
    assert sys0.radius == 1 and len(sys0.events[5].vbl) == 3
    sys1 = events_from_algorithm(g, proper_coloring(3), GreedyColoring(3, depth=1), n_star=64)
    assert len(sys1.events[5].vbl) == 5
    # events within distance 4 share a vertex
    assert sys1.dependency().d == 8 == dependency_degree(g, sys1.radius)
    assert mt_resample(sys0).iterations == 0


def test_speedup_examples():
    g = gen_random_tree(200, 3, 0)
    run = speedup_wrap(ConstantAlgorithm(0), builtin("all-sigma")).run(g)
    assert run.verdict.legal and run.iterations == 0
    h = gen_random_regular(400, 16, 0)
    wrapped = speedup_wrap(SinklessGuess(), builtin("sinkless-orientation", 16))
    for seed in range(3):
        assert wrapped.run(h, seed=seed).verdict.legal
