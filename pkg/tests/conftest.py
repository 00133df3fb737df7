from __future__ import annotations

import hypothesis.strategies as st

from localgap.graph import PortGraph


@st.composite
def trees(draw, max_n: int = 30, max_delta: int = 4):
    """Random port-numbered tree by attachment to earlier vertices with spare degree."""
    n = draw(st.integers(1, max_n))
    delta = draw(st.integers(2, max_delta))
    deg = [0] * n
    edges = []
    for v in range(1, n):
        free = [u for u in range(v) if deg[u] < delta]
        u = draw(st.sampled_from(free))
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    order = draw(st.permutations(range(len(edges))))
    return PortGraph.from_edges(n, [edges[i] for i in order], delta=delta)


@st.composite
def graphs(draw, max_n: int = 12):
    """Random simple graph (not necessarily connected)."""
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return PortGraph.from_edges(n, chosen)
