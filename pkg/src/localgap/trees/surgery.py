"""Operations on bipolar trees (pump, label, extend) and on concrete graphs (replace, duplicate-cut)."""
from __future__ import annotations

import math
from typing import Sequence

from ..graph import PortGraph
from ..lcl import BOT
from .engine import EMPTY, TreeEngine
from .partial import Node, PartialTree, make_node


class SurgeryError(ValueError):
    pass


class PumpError(SurgeryError):
    pass


class LabelError(SurgeryError):
    pass


class ExtendError(SurgeryError):
    pass


def pump_split(eng: TreeEngine, core: Sequence[Node], limit: int | None):
    """(i, j, exact) with y = core[i:j] repeatable without changing the type.

    ``exact``: the automaton state after i and after j trees coincide, so y may
    also be dropped. Otherwise state_j is a fixed point of reading y, which
    still lets y be repeated.
    """
    span = len(core) if limit is None else min(len(core), limit)
    states = [EMPTY]
    seen = {EMPTY: 0}
    st = EMPTY
    for j in range(1, span + 1):
        st = eng.step(st, eng.cls(core[j - 1]))
        if st in seen:
            return seen[st], j, True
        seen[st] = j
        states.append(st)
    for j in range(1, len(states)):
        for i in range(j - 1, -1, -1):
            s = states[j]
            for x in core[i:j]:
                s = eng.step(s, eng.cls(x))
            if s == states[j]:
                return i, j, False
    return None


def pump(eng: TreeEngine, core: Sequence[Node], w: int, ell_pump: int | None = None) -> tuple[Node, ...]:
    """Bipolar tree of the same type with core length in [w, w + ell_pump]."""
    core = tuple(core)
    k = len(core)
    if k < 2:
        raise PumpError("pump needs a bipolar tree")
    slack = ell_pump if ell_pump is not None else k
    if w <= k <= w + slack:
        return core
    before = eng.walk(core)
    if k < w:
        rep = pump_split(eng, core, ell_pump)
        if rep is None:
            raise PumpError("no repeated automaton state along the core")
        i, j, _ = rep
        y = core[i:j]
        m = math.ceil((w - k) / len(y))
        out = core[:j] + y * m + core[j:]
    else:
        out = core
        while len(out) > w + slack:
            rep = pump_split(eng, out, ell_pump)
            if rep is None or not rep[2] or len(out) - (rep[1] - rep[0]) < w:
                raise PumpError("core too long and no removable repetition")
            i, j, _ = rep
            out = out[:i] + out[j:]
    if eng.walk(out) != before:
        raise AssertionError("pumping changed the type")
    return out


def label_region(core: Sequence[Node], r: int) -> list[tuple[int, tuple[int, ...]]]:
    """N^{r-1}(e) for the middle core edge e, as (core index, kid path) pairs in canonical order."""
    x = len(core)
    if x < 2 * r:
        raise LabelError(f"core of length {x} is too short for radius {r}")
    m = x // 2  # e joins core[m-1] and core[m]
    out = []
    for j in range(m - r, m + r):
        base = (m - 1 - j) if j <= m - 1 else (j - m)
        budget = r - 1 - base
        stack = [(core[j], ())]
        while stack:
            node, path = stack.pop()
            out.append((j, path))
            if len(path) < budget:
                for i, kid in enumerate(node.kids):
                    stack.append((kid, path + (i,)))
    out.sort()
    return out


def middle_edge(core: Sequence[Node]) -> int:
    """Core index of the left endpoint of the designated middle edge."""
    return len(core) // 2 - 1


def _at(node: Node, path: tuple[int, ...]) -> Node:
    for i in path:
        node = node.kids[i]
    return node


def _set_labels(node: Node, assign: dict[tuple[int, ...], object], prefix=()) -> Node:
    mine = {p: a for p, a in assign.items() if p[: len(prefix)] == prefix}
    if not mine:
        return node
    kids = [_set_labels(k, mine, prefix + (i,)) for i, k in enumerate(node.kids)]
    lab = mine.get(prefix, node.lab)
    return make_node(lab, node.inp, kids)


def label_apply(core: Sequence[Node], labels: Sequence, r: int = 1) -> tuple[Node, ...]:
    """Fix the output labels of N^{r-1}(e) (in ``label_region`` order)."""
    region = label_region(core, r)
    if len(labels) != len(region):
        raise LabelError(f"expected {len(region)} labels, got {len(labels)}")
    per: dict[int, dict] = {}
    for (j, path), lab in zip(region, labels):
        if lab is BOT:
            raise LabelError("label rule must assign every vertex of the region")
        if _at(core[j], path).lab is not BOT:
            raise LabelError(f"vertex {(j, path)} is already labeled")
        per.setdefault(j, {})[path] = lab
    out = list(core)
    for j, assign in per.items():
        out[j] = _set_labels(core[j], assign)
    return tuple(out)


def extend(eng: TreeEngine, core: Sequence[Node], w: int, ell: int, ell_pump: int | None = None,
           r: int = 1) -> tuple[tuple[Node, ...], int]:
    """X∘Y∘Z -> Pump(X)∘Y∘Pump(Z). Returns the new core and the index of e's left endpoint."""
    core = tuple(core)
    x = len(core)
    if not ell <= x <= 2 * w:
        raise ExtendError(f"extend needs ell <= x <= 2w, got x={x}, ell={ell}, w={w}")
    m = x // 2
    X, Y, Z = core[: m - r], core[m - r: m + r], core[m + r:]
    px, pz = pump(eng, X, w, ell_pump), pump(eng, Z, w, ell_pump)
    return px + Y + pz, len(px) + r - 1


# concrete surgery

def _outside_edges(g: PortGraph, inside: set[int]) -> list[tuple[int, int]]:
    """Edges (h, u) with h inside and u outside."""
    return [(h, u) for h in sorted(inside) for u in g.neighbors(h) if u not in inside]


def replace(g: PortGraph, labels: Sequence, h_vertices: Sequence[int], poles: Sequence[int],
            h2: PartialTree) -> tuple[PortGraph, list, dict[int, int]]:
    """Swap the subtree H (attached only through ``poles``) for h2, pole i to pole i.

    Returns the new graph, its labels and the map from kept old vertices to new ids.
    """
    inside = set(h_vertices)
    if not set(poles) <= inside:
        raise SurgeryError("poles must lie in H")
    if len(poles) != len(h2.poles):
        raise SurgeryError("pole counts differ")
    cross = _outside_edges(g, inside)
    if any(h not in poles for h, _ in cross):
        raise SurgeryError("H is attached through a non-pole vertex")
    keep = [v for v in range(g.n) if v not in inside]
    new = {v: i for i, v in enumerate(keep)}
    off = len(keep)
    edges = [(new[a], new[b]) for a, b in g.edges() if a in new and b in new]
    edges += [(off + a, off + b) for a, b in h2.g.edges()]
    pole_map = {p: off + q for p, q in zip(poles, h2.poles)}
    edges += [(pole_map[h], new[u]) for h, u in cross]
    inputs = [g.inputs[v] for v in keep] + list(h2.g.inputs)
    out = PortGraph.from_edges(off + h2.n, edges, inputs=inputs)
    return out, [labels[v] for v in keep] + list(h2.labels), new


def duplicate_cut(g: PortGraph, labels: Sequence, h_vertices: Sequence[int], s: int,
                  t: int) -> tuple[PortGraph, list]:
    """H attached by exactly {u,s} and {v,t}: replace it with a copy hanging off u and a copy hanging off v."""
    inside = set(h_vertices)
    cross = _outside_edges(g, inside)
    if len(cross) != 2 or {h for h, _ in cross} != {s, t} or s == t:
        raise SurgeryError("H must be attached by exactly one edge at s and one at t")
    u = next(x for h, x in cross if h == s)
    v = next(x for h, x in cross if h == t)
    keep = [x for x in range(g.n) if x not in inside]
    new = {x: i for i, x in enumerate(keep)}
    hs = sorted(inside)
    c1 = {x: len(keep) + i for i, x in enumerate(hs)}
    c2 = {x: len(keep) + len(hs) + i for i, x in enumerate(hs)}
    edges = [(new[a], new[b]) for a, b in g.edges() if a in new and b in new]
    inner = [(a, b) for a, b in g.edges() if a in inside and b in inside]
    edges += [(c1[a], c1[b]) for a, b in inner] + [(c2[a], c2[b]) for a, b in inner]
    edges += [(new[u], c1[s]), (new[v], c2[t])]
    inputs = [g.inputs[x] for x in keep] + [g.inputs[x] for x in hs] * 2
    out = PortGraph.from_edges(len(keep) + 2 * len(hs), edges, inputs=inputs)
    return out, [labels[x] for x in keep] + [labels[x] for x in hs] * 2
