"""Rake/compress decomposition of trees into O(log n) levels."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..graph import PortGraph
from .indset import independent_set_path


class NotATree(ValueError):
    pass


@dataclass
class Decomposition:
    level: list[int]
    tag: list[str]  # "C" or "R", the step that removed the vertex
    iteration: list[int]  # iteration that removed the vertex
    promoted: list[bool]
    paths: dict[int, list[list[int]]] = field(default_factory=dict)
    iterations: int = 0
    rounds: int = 0
    ell: int = 0

    @property
    def L(self) -> int:
        return max(self.level, default=0)

    def dump(self) -> str:
        lines = []
        for v in range(len(self.level)):
            t = f"{self.iteration[v]}{self.tag[v]}" + ("+" if self.promoted[v] else "")
            lines.append(f"{v} {self.level[v]} {t}")
        return "\n".join(lines) + "\n"


def level_bound(n: int, ell: int) -> float:
    """Iteration bound: log base 1/(1 - 1/(2(ell+1))) of n, plus 2."""
    base = 1.0 / (1.0 - 1.0 / (2 * (ell + 1)))
    return math.log(max(n, 1)) / math.log(base) + 2


def rc_decompose(g: PortGraph, ell: int, ids: Sequence[int] | None = None) -> Decomposition:
    if ell < 2:
        raise ValueError("ell >= 2")
    if not g.is_tree():
        raise NotATree("rake/compress needs a tree")
    n = g.n
    ids = list(range(n)) if ids is None else list(ids)
    adj = [[u for u, _ in a] for a in g.adj]
    alive = [True] * n
    deg = [len(a) for a in adj]
    iteration = [0] * n
    tag = [""] * n
    U = list(range(n))
    it = 0
    while U:
        it += 1
        tagged: list[int] = []
        # compress: maximal runs of degree-2 vertices with at least ell members
        seen = set()
        for v in U:
            if deg[v] != 2 or v in seen:
                continue
            run = [v]
            seen.add(v)
            for start in adj[v]:
                if not alive[start]:
                    continue
                prev, cur = v, start
                while deg[cur] == 2 and cur not in seen:
                    seen.add(cur)
                    run.append(cur)
                    for u in adj[cur]:
                        if alive[u] and u != prev:
                            prev, cur = cur, u
                            break
            if len(run) >= ell:
                for u in run:
                    tag[u] = "C"
                tagged.extend(run)
        for v in U:
            d = deg[v]
            if d == 0:
                tag[v] = "R"
                tagged.append(v)
            elif d == 1:
                for u in adj[v]:
                    if alive[u]:
                        break
                if deg[u] > 1 or ids[v] > ids[u]:
                    tag[v] = "R"
                    tagged.append(v)
        for v in tagged:
            iteration[v] = it
            alive[v] = False
        for v in tagged:
            for u in adj[v]:
                if alive[u]:
                    deg[u] -= 1
        U = [v for v in U if alive[v]]

    level = iteration[:]
    promoted = [False] * n
    # rake vertices next to a same-iteration compress vertex move up one level
    for v in range(n):
        if tag[v] == "R" and any(tag[u] == "C" and iteration[u] == iteration[v] for u in adj[v]):
            level[v] += 1
            promoted[v] = True
    # split each compress run with an (ell, 2ell)-independent set
    ind_rounds = 0
    seen = set()
    for v in range(n):
        if tag[v] != "C" or v in seen:
            continue
        comp = _run(adj, v, lambda u: tag[u] == "C" and iteration[u] == iteration[v])
        seen.update(comp)
        chosen, r = independent_set_path(comp, ell, 2 * ell, ids=[ids[u] for u in comp], with_rounds=True)
        ind_rounds = max(ind_rounds, r)
        for u in chosen:
            level[u] += 1
            promoted[u] = True

    dec = Decomposition(level, tag, iteration, promoted, iterations=it, ell=ell)
    dec.paths = level_paths(g, level)
    # one iteration needs ell rounds to see a whole compress run; promotions add a constant
    dec.rounds = it * (ell + 1) + 1 + ind_rounds
    return dec


def _run(adj, v, member) -> list[int]:
    """Ordered path component of v among vertices satisfying member."""
    ends = [u for u in adj[v] if member(u)]
    sides = []
    for start in ends:
        chain, prev, cur = [], v, start
        while True:
            chain.append(cur)
            nxt = [u for u in adj[cur] if u != prev and member(u)]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        sides.append(chain)
    left = sides[0] if sides else []
    right = sides[1] if len(sides) > 1 else []
    return left[::-1] + [v] + right


def level_paths(g: PortGraph, level: Sequence[int]) -> dict[int, list[list[int]]]:
    """Multi-vertex components of each V_i (ordered when they are paths)."""
    adj = [[u for u, _ in a] for a in g.adj]
    out: dict[int, list[list[int]]] = {}
    seen = [False] * g.n
    for v in range(g.n):
        if seen[v]:
            continue
        same = [u for u in adj[v] if level[u] == level[v]]
        if not same:
            seen[v] = True
            continue
        comp = _run(adj, v, lambda u: level[u] == level[v])
        for u in comp:
            seen[u] = True
        out.setdefault(level[v], []).append(comp)
    return out


def check_decomposition(g: PortGraph, dec: Decomposition) -> list[str]:
    """Violations of the structural guarantees (empty when all hold)."""
    errs = []
    ell = dec.ell
    lv = dec.level
    top = dec.L
    adj = [[u for u, _ in a] for a in g.adj]
    for v in range(g.n):
        up = [u for u in adj[v] if lv[u] >= lv[v]]
        if len(up) > 2:
            errs.append(f"vertex {v}: degree {len(up)} in G_{lv[v]}")
    # components of each level must be simple paths of ell..2ell vertices
    seen = [False] * g.n
    for v in range(g.n):
        if seen[v]:
            continue
        comp, stack = [], [v]
        seen[v] = True
        while stack:
            x = stack.pop()
            comp.append(x)
            for u in adj[x]:
                if not seen[u] and lv[u] == lv[v]:
                    seen[u] = True
                    stack.append(u)
        if len(comp) > 1:
            if not ell <= len(comp) <= 2 * ell:
                errs.append(f"level-{lv[v]} path of {len(comp)} vertices")
            for x in comp:
                if sum(1 for u in adj[x] if lv[u] >= lv[v]) != 2:
                    errs.append(f"path vertex {x} lacks degree 2 in G_{lv[v]}")
            if lv[v] == top:
                errs.append("top level is not independent")
    if top > level_bound(g.n, ell):
        errs.append(f"L={top} exceeds bound {level_bound(g.n, ell):.2f}")
    return errs
