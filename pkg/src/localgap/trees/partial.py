"""Partially labeled trees, the boundary tripartition and brute-force extendibility.

Two representations live here. ``PartialTree`` is a concrete port-numbered tree
with a pole list, used by the exhaustive oracle and by graph surgery. ``Node`` is
a hash-consed rooted unordered tree used by the symbolic engine; equal subtrees
are shared, so huge imaginary trees stay small in memory.
"""
from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from ..graph import GlobalAccess, PortGraph
from ..lcl import BOT, LclSpec


class TreeSpecError(ValueError):
    """The spec is outside what the tree engine handles."""


class NotExtendible(ValueError):
    pass


# hash-consed rooted trees

class Node:
    """Rooted unordered tree; ``kids`` are sorted by hash so equal trees are identical objects."""

    __slots__ = ("lab", "inp", "kids", "h", "size")

    def __init__(self, lab, inp, kids, h, size):
        self.lab = lab
        self.inp = inp
        self.kids = kids
        self.h = h
        self.size = size

    def __repr__(self) -> str:
        return f"Node(lab={self.lab!r}, kids={len(self.kids)}, size={self.size})"

    @property
    def deg(self) -> int:
        return len(self.kids)


_INTERN: dict[bytes, Node] = {}


def make_node(lab: Hashable = BOT, inp: str | None = None, kids: Iterable[Node] = ()) -> Node:
    kids = tuple(sorted(kids, key=lambda k: k.h))
    m = hashlib.blake2b(digest_size=16)
    m.update(f"{lab!r}|{inp!r}|{len(kids)}|".encode())
    for k in kids:
        m.update(k.h)
    h = m.digest()
    hit = _INTERN.get(h)
    if hit is None:
        hit = _INTERN[h] = Node(lab, inp, kids, h, 1 + sum(k.size for k in kids))
    return hit


def leaf(lab: Hashable = BOT, inp: str | None = None) -> Node:
    return make_node(lab, inp, ())


def attach(node: Node, extra: Iterable[Node]) -> Node:
    return make_node(node.lab, node.inp, node.kids + tuple(extra))


def relabel(node: Node, lab: Hashable) -> Node:
    return make_node(lab, node.inp, node.kids)


def chain_view(core: Sequence[Node]) -> Node:
    """A bipolar tree (T_1, ..., T_k) seen as a unipolar tree rooted at the pole of T_1."""
    u = core[-1]
    for t in reversed(core[:-1]):
        u = attach(t, (u,))
    return u


def path_core(k: int) -> tuple[Node, ...]:
    """Unlabeled bipolar path with k core vertices."""
    return (leaf(),) * k


def star(leaves: int) -> Node:
    return make_node(BOT, None, [leaf()] * leaves)


def path_node(k: int) -> Node:
    """Unipolar path of k vertices rooted at one end."""
    return chain_view(path_core(k))


# concrete partial trees

@dataclass
class PartialTree:
    g: PortGraph
    labels: list
    poles: tuple[int, ...]
    designated: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        self.labels = list(self.labels)
        self.poles = tuple(self.poles)
        if len(self.labels) != self.g.n:
            raise ValueError("label count does not match the tree")
        if not self.poles or len(set(self.poles)) != len(self.poles):
            raise ValueError("poles must be distinct and non-empty")
        if any(not 0 <= p < self.g.n for p in self.poles):
            raise ValueError("pole outside the tree")
        if not self.g.is_tree():
            raise ValueError("partial trees must be trees")

    @property
    def n(self) -> int:
        return self.g.n

    @classmethod
    def from_node(cls, node: Node) -> "PartialTree":
        """Unipolar tree rooted at vertex 0; ports follow the kid order."""
        edges, labels, inputs = [], [node.lab], [node.inp]
        queue = deque([(node, 0)])
        while queue:
            x, v = queue.popleft()
            for k in x.kids:
                u = len(labels)
                labels.append(k.lab)
                inputs.append(k.inp)
                edges.append((v, u))
                queue.append((k, u))
        g = PortGraph.from_edges(len(labels), edges, inputs=inputs, check=False)
        return cls(g, labels, (0,))

    @classmethod
    def from_core(cls, core: Sequence[Node]) -> "PartialTree":
        """Bipolar tree; core vertices are 0..k-1 and the poles are 0 and k-1."""
        if len(core) < 2:
            raise ValueError("a bipolar tree needs at least two core vertices")
        k = len(core)
        labels = [t.lab for t in core]
        inputs = [t.inp for t in core]
        edges = [(j, j + 1) for j in range(k - 1)]
        queue = deque((t, j) for j, t in enumerate(core))
        while queue:
            x, v = queue.popleft()
            for kid in x.kids:
                u = len(labels)
                labels.append(kid.lab)
                inputs.append(kid.inp)
                edges.append((v, u))
                queue.append((kid, u))
        g = PortGraph.from_edges(len(labels), edges, inputs=inputs, check=False)
        return cls(g, labels, (0, k - 1))

    def to_node(self) -> Node:
        """Rooted at the first pole (ports are forgotten)."""
        root = self.poles[0]
        order, parent = [root], {root: -1}
        for v in order:
            for u in self.g.neighbors(v):
                if u not in parent:
                    parent[u] = v
                    order.append(u)
        built: dict[int, Node] = {}
        for v in reversed(order):
            kids = [built[u] for u in self.g.neighbors(v) if parent.get(u) == v and u != parent[v]]
            built[v] = make_node(self.labels[v], self.g.inputs[v], kids)
        return built[root]

    def core_path(self) -> list[int]:
        if len(self.poles) != 2:
            raise ValueError("core path needs exactly two poles")
        s, t = self.poles
        parent = {s: -1}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in self.g.neighbors(v):
                if u not in parent:
                    parent[u] = v
                    queue.append(u)
        path = [t]
        while path[-1] != s:
            path.append(parent[path[-1]])
        return path[::-1]

    def to_core(self) -> tuple[Node, ...]:
        path = self.core_path()
        on = set(path)
        core = []
        for v in path:
            kids = []
            for u in self.g.neighbors(v):
                if u not in on:
                    kids.append(_subtree(self, u, v))
            core.append(make_node(self.labels[v], self.g.inputs[v], kids))
        return tuple(core)


def _subtree(t: PartialTree, v: int, parent: int) -> Node:
    order, par = [v], {v: parent}
    for x in order:
        for u in t.g.neighbors(x):
            if u != par[x]:
                par[u] = x
                order.append(u)
    built: dict[int, Node] = {}
    for x in reversed(order):
        kids = [built[u] for u in t.g.neighbors(x) if u != par[x]]
        built[x] = make_node(t.labels[x], t.g.inputs[x], kids)
    return built[v]


# tripartition

@dataclass(frozen=True)
class Tripartition:
    D1: frozenset
    D2: frozenset
    D3: frozenset


def pole_distances(t: PartialTree) -> dict[int, int]:
    dist = {p: 0 for p in t.poles}
    queue = deque(t.poles)
    while queue:
        v = queue.popleft()
        for u in t.g.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def tripartition(t: PartialTree, r: int) -> Tripartition:
    """D1 within r-1 of a pole, D2 within 2r-1 but outside D1, D3 the rest."""
    if r < 1:
        raise ValueError("r >= 1")
    dist = pole_distances(t)
    d1 = frozenset(v for v, d in dist.items() if d <= r - 1)
    d2 = frozenset(v for v, d in dist.items() if r - 1 < d <= 2 * r - 1)
    d3 = frozenset(range(t.n)) - d1 - d2
    return Tripartition(d1, d2, d3)


# canonical boundary encoding shared by the oracle and the engine

def canonical(qverts: Sequence, adj: dict, attrs: dict, poles: Sequence, ext: Iterable[tuple]):
    """Order-independent encoding of (Q, extendible set).

    ``ext`` tuples are aligned with ``qverts``. Returns (qcode, extcode, order):
    ``order`` lists qverts in the canonical order that realizes extcode, so two
    trees with equal encodings are matched position by position.
    """
    roots = []
    seen = set()
    for p in poles:
        if p in seen:
            continue
        roots.append(p)
        stack = [p]
        seen.add(p)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    if len(seen) != len(qverts):
        raise ValueError("boundary subgraph has a component without a pole")
    codes: dict = {}
    kids: dict = {}

    def build(root):
        order, par = [root], {root: None}
        for x in order:
            for y in adj[x]:
                if y != par[x]:
                    par[y] = x
                    order.append(y)
        for x in reversed(order):
            ks = [y for y in adj[x] if y != par[x]]
            ks.sort(key=lambda y: codes[y])
            kids[x] = ks
            codes[x] = (attrs[x], tuple(codes[y] for y in ks))

    for root in roots:
        build(root)

    def orders(x) -> list[list]:
        groups = [list(g) for _, g in itertools.groupby(kids[x], key=lambda y: codes[y])]
        sub = {y: orders(y) for y in kids[x]}
        out = []
        for arrangement in itertools.product(*[itertools.permutations(g) for g in groups]):
            seq = [y for grp in arrangement for y in grp]
            for parts in itertools.product(*[sub[y] for y in seq]):
                out.append([x] + [z for part in parts for z in part])
        return out

    qcode = tuple(codes[root] for root in roots)
    pos = {v: i for i, v in enumerate(qverts)}
    ext = list(ext)
    best = None
    best_order = None
    for parts in itertools.product(*[orders(root) for root in roots]):
        order = [z for part in parts for z in part]
        idx = [pos[z] for z in order]
        enc = tuple(sorted(tuple(t[i] for i in idx) for t in ext))
        if best is None or enc < best:
            best, best_order = enc, order
    return qcode, best, best_order


def label_index(spec: LclSpec) -> dict:
    return {x: i for i, x in enumerate(spec.sigma_out)}


def boundary_attrs(t: PartialTree, verts: Iterable[int], spec: LclSpec) -> dict:
    idx = label_index(spec)
    pole_pos = {p: i for i, p in enumerate(t.poles)}
    return {v: (pole_pos.get(v, -1), -1 if t.labels[v] is BOT else idx[t.labels[v]], t.g.inputs[v])
            for v in verts}


# exhaustive oracle

def _complete_all(spec: LclSpec, t: PartialTree, check: Sequence[int], lab: list | None = None,
                  near_poles: bool = False, first: Sequence[int] = ()):
    """Yield every completion of the partial labeling that is consistent at ``check``.

    Backtracks in vertex order and tests a vertex as soon as its ball is fully
    assigned, so completions come out in lexicographic order. ``near_poles``
    assigns vertices by distance from the poles instead, which prunes far earlier
    when only existence matters. With ``first``, those vertices are assigned
    before all others and only one completion is produced per labeling of them.
    The yielded list is reused between iterations.
    """
    lab = list(t.labels) if lab is None else lab
    acc = GlobalAccess(t.g)
    cache: dict = {}
    head = [v for v in first if lab[v] is BOT]
    rest = [v for v in range(t.n) if lab[v] is BOT and v not in set(head)]
    if near_poles:
        dist = pole_distances(t)
        rest.sort(key=lambda v: (dist[v], v))
    free = head + rest
    cut = len(head) if first else None
    pos = {v: i for i, v in enumerate(free)}
    due: dict[int, list[int]] = {i: [] for i in range(-1, len(free))}
    for v in check:
        last = max((pos[u] for u in _ball_set(t.g, v, spec.r) if u in pos), default=-1)
        due[last].append(v)
    if not all(spec.verifier(acc, lab.__getitem__, v, cache) for v in due[-1]):
        return
    found = [False]

    def go(i: int):
        if i == len(free):
            found[0] = True
            yield lab
            return
        v = free[i]
        for x in spec.sigma_out:
            lab[v] = x
            if all(spec.verifier(acc, lab.__getitem__, u, cache) for u in due[i]):
                yield from go(i + 1)
                if found[0] and cut is not None and i >= cut:
                    break
            if cut is not None and i == cut - 1:
                found[0] = False
        lab[v] = BOT

    if cut == 0:
        for done in go(0):
            yield done
            return
        return
    yield from go(0)


def brute_extendible(spec: LclSpec, t: PartialTree) -> tuple[list[int], set[tuple]]:
    """(sorted D1∪D2, set of extendible labelings as label-index tuples) by enumeration.

    Boundary vertices are enumerated first; each boundary labeling needs one completion.
    """
    tp = tripartition(t, spec.r)
    bnd = sorted(tp.D1 | tp.D2)
    need = sorted(tp.D2 | tp.D3)
    idx = label_index(spec)
    out = set()
    for lab in _complete_all(spec, t, need, near_poles=True, first=bnd):
        out.add(tuple(idx[lab[v]] for v in bnd))
    return bnd, out


def brute_fingerprint(spec: LclSpec, t: PartialTree):
    bnd, ext = brute_extendible(spec, t)
    bset = set(bnd)
    adj = {v: [u for u in t.g.neighbors(v) if u in bset] for v in bnd}
    attrs = boundary_attrs(t, bnd, spec)
    qcode, extcode, _ = canonical(bnd, adj, attrs, list(t.poles), ext)
    kind = "U" if len(t.poles) == 1 else ("B" if len(t.poles) == 2 else f"P{len(t.poles)}")
    return (kind, qcode, extcode)


def legal_labeling_exists(spec: LclSpec, g: PortGraph, labels: Sequence | None = None) -> bool:
    """Exhaustive search over completions; tiny graphs only."""
    t = PartialTree(g, labels if labels is not None else [BOT] * g.n, (0,))
    for _ in _complete_all(spec, t, range(g.n), near_poles=True):
        return True
    return False


def complete_labeling(spec: LclSpec, t: PartialTree, boundary: Sequence) -> list:
    """Lexicographically least completion agreeing with ``boundary`` on sorted(D1∪D2).

    Consistent at every vertex of D2∪D3. Backtracking in vertex order, checking a
    vertex as soon as its whole ball is assigned.
    """
    tp = tripartition(t, spec.r)
    bnd = sorted(tp.D1 | tp.D2)
    if len(boundary) != len(bnd):
        raise ValueError("boundary labeling must cover D1∪D2")
    lab = list(t.labels)
    for v, x in zip(bnd, boundary):
        if lab[v] is not BOT and lab[v] != x:
            raise NotExtendible(f"boundary disagrees with the preset label at {v}")
        if x not in spec.sigma_out:
            raise NotExtendible(f"{x!r} is not an output label")
        lab[v] = x
    for done in _complete_all(spec, t, sorted(tp.D2 | tp.D3), lab):
        return list(done)
    raise NotExtendible("no completion exists")


def _ball_set(g: PortGraph, v: int, r: int) -> set[int]:
    seen = {v}
    frontier = [v]
    for _ in range(r):
        nxt = []
        for x in frontier:
            for u in g.neighbors(x):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen
