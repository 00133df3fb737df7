"""Hierarchical 2½-coloring solver: levels processed bottom-up, short paths 2-colored."""
from __future__ import annotations

import math

from ..graph import PortGraph
from ..lcl import MARS, MERCURY, SATURN, VENUS, Levels, hier_levels
from ..sim import ViewAlgorithm

__all__ = ["HierSolver", "solve_hier", "hier_levels", "path_threshold", "mercury_components"]


def path_threshold(n: int, k: int) -> int:
    """Longest V_i path that colors itself: ceil(2 n^(1/k))."""
    return math.ceil(2 * max(n, 1) ** (1.0 / k) - 1e-9)


class _State:
    def __init__(self, acc, k: int, T: int):
        self.acc = acc
        self.k = k
        self.T = T
        self.levels = Levels(acc, k)
        self.labels: dict[int, str] = {}

    def exact(self, u: int, i: int) -> bool:
        return self.levels.at_least(u, i) and (i > self.k or not self.levels.at_least(u, i + 1))

    def exempt(self, u: int, i: int) -> bool:
        if i == 1:
            return False
        return any(not self.levels.at_least(w, i) and self.label(w) in (VENUS, MARS, SATURN)
                   for w, _ in self.acc.ports(u))

    def _free(self, u: int, i: int) -> bool:
        return self.exact(u, i) and not self.exempt(u, i)

    def label(self, u: int) -> str:
        hit = self.labels.get(u)
        if hit is not None:
            return hit
        i = self.levels.level(u)
        if i == self.k + 1 or self.exempt(u, i):
            self.labels[u] = SATURN
            return SATURN
        nxt = [w for w, _ in self.acc.ports(u) if self._free(w, i)]
        # walk each side of u inside V_i - D_i, giving up once the run exceeds T
        sides: list[list[int]] = []
        size = 1
        for first in nxt:
            chain, prev, cur = [], u, first
            while True:
                if cur == u:
                    self.labels[u] = MERCURY  # a cycle
                    return MERCURY
                chain.append(cur)
                size += 1
                if size > self.T:
                    self.labels[u] = MERCURY
                    return MERCURY
                step = [w for w, _ in self.acc.ports(cur) if w != prev and self._free(w, i)]
                if not step:
                    break
                prev, cur = cur, step[0]
            sides.append(chain)
        left = sides[0] if sides else []
        right = sides[1] if len(sides) > 1 else []
        path = left[::-1] + [u] + right
        a, b = path[0], path[-1]
        if self.acc.ident(b) < self.acc.ident(a):
            path.reverse()
        for j, w in enumerate(path):
            self.labels[w] = VENUS if j % 2 == 0 else MARS
        return self.labels[u]


class HierSolver(ViewAlgorithm):
    """DetLOCAL solver for hier(k) with round bound k*(T+2), T = ceil(2 n^(1/k)).

    Level i labels need the V_i run (distance <= T), levels of its vertices and the
    labels of lower neighbors, so t_i = T + 2 + t_{i-1} with t_0 = 0 covers it.
    """

    needs_ids = True

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k >= 1")
        self.k = k
        self.name = f"hier:{k}"

    def round_bound(self, n: int, delta: int) -> int:
        return self.k * (path_threshold(n, self.k) + 2)

    def output(self, acc, v: int, cache: dict):
        st = cache.get("hier")
        if st is None:
            st = cache["hier"] = _State(acc, self.k, path_threshold(acc.n, self.k))
        return st.label(v)


def solve_hier(k: int) -> HierSolver:
    return HierSolver(k)


def mercury_components(g: PortGraph, k: int, labels) -> list[tuple[int, int]]:
    """(highest level touched, size) for each connected ☿ component."""
    lv = hier_levels(g, k)
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s] or labels[s] != MERCURY:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbors(v):
                if not seen[w] and labels[w] == MERCURY:
                    seen[w] = True
                    stack.append(w)
        out.append((max(lv[v] for v in comp), len(comp)))
    return out
