"""Randomized greedy coloring with bounded dependency depth."""
from __future__ import annotations

import math

from ..sim import ViewAlgorithm


class GreedyColoring(ViewAlgorithm):
    """Vertices take the least color unused by higher-ranked neighbors.

    Ranks are random; the dependency chain is cut at ``round_bound`` hops, where
    a vertex falls back to a rank-derived color. Legal with high probability when
    q > Δ, a heuristic otherwise.
    """

    needs_bits = True

    def __init__(self, q: int = 3, depth: int | None = None):
        if q < 1:
            raise ValueError("q >= 1")
        self.q = q
        self.depth = depth
        self.name = f"greedy:{q}"

    def round_bound(self, n: int, delta: int) -> int:
        if self.depth is not None:
            return self.depth
        return max(1, math.ceil(math.log2(max(n, 2)) / max(1.0, math.log2(max(delta, 2)))))

    def output(self, acc, v: int, cache: dict):
        t = cache.get("t")
        if t is None:
            t = cache["t"] = self.round_bound(acc.n, acc.delta or 2)
        memo = cache.setdefault("color", {})

        def color(u: int, budget: int) -> int:
            key = (u, budget)
            if key in memo:
                return memo[key]
            rank = acc.rand(u, 0)
            if budget == 0:
                c = acc.rand(u, 1) % self.q
            else:
                used = {color(w, budget - 1) for w, _ in acc.ports(u) if acc.rand(w, 0) > rank}
                free = [c for c in range(self.q) if c not in used]
                c = free[0] if free else acc.rand(u, 1) % self.q
            memo[key] = c
            return c

        return color(v, t)
