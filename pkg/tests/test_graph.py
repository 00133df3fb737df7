from __future__ import annotations

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from localgap.graph import (GlobalAccess, GraphError, OutOfView, PortGraph, ball, bfs_dist, gen_hk,
                            gen_path, gen_random_regular, gen_random_tree, gen_ring, gen_star, hk_size)

from conftest import graphs, trees


def test_ports_are_symmetric():
    g = PortGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    for v in range(g.n):
        for p, (u, q) in enumerate(g.adj[v], 1):
            assert g.adj[u][q - 1] == (v, p)
    assert g.port_to(1, 2) == 2


def test_validate_rejects_broken_ports():
    with pytest.raises(GraphError):
        PortGraph([[(1, 2)], [(0, 1)]])
    with pytest.raises(GraphError):
        PortGraph.from_edges(2, [(0, 0)])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_text_roundtrip(g):
    assert PortGraph.from_text(g.to_text()) == g


def test_text_format_errors():
    with pytest.raises(GraphError):
        PortGraph.from_text("2 1\n0 1 - 1:1\n")
    with pytest.raises(GraphError):
        PortGraph.from_text("2 1\n0 1 - 1:1\n1 0 -\n")


def test_small_families():
    assert gen_ring(5).edges() == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    assert gen_path(4).is_tree() and not gen_ring(4).is_tree()
    s = gen_star(3)
    assert s.deg(0) == 3 and s.max_degree() == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300), st.integers(2, 5), st.integers(0, 10**6))
def test_random_tree_shape(n, delta, seed):
    g = gen_random_tree(n, delta, seed)
    assert g.n == n and g.is_tree() and g.max_degree() <= delta
    assert gen_random_tree(n, delta, seed) == g


def test_random_regular():
    g = gen_random_regular(50, 4, seed=3)
    assert all(g.deg(v) == 4 for v in range(g.n))


@pytest.mark.parametrize("k,x", [(1, 3), (2, 3), (2, 5), (3, 4)])
def test_hk_size_matches_generator(k, x):
    g = gen_hk(k, x)
    assert g.n == hk_size(k, x)
    assert g.is_tree() and g.max_degree() <= 3


def test_hk_example_size():
    assert gen_hk(2, 3).n == 18


@settings(max_examples=40, deadline=None)
@given(trees(max_n=25), st.integers(0, 3), st.data())
def test_ball_matches_bfs(g, t, data):
    v = data.draw(st.integers(0, g.n - 1))
    b = ball(g, v, t)
    d = bfs_dist(g, v, limit=t)
    assert sorted(b.dist) == sorted(d.values())
    assert b.dist[0] == 0
    for u in range(b.size):
        if b.dist[u] < t:
            assert all(x is not None for x in b.ports(u))
        else:
            with pytest.raises(OutOfView):
                b.ports(u)


def test_view_rand_agrees_with_global():
    g = gen_path(6)
    acc = GlobalAccess(g, None, g.n, 7, None)
    b = ball(g, 2, 2, seed=7)
    for u in range(b.size):
        assert b.rand(u, 0) == acc.rand(b.keys[u], 0)
