"""Port-numbered bounded-degree graphs, instance generators and radius-t views."""
from __future__ import annotations

import hashlib
import random
import struct
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    pass


class OutOfView(LookupError):
    """Raised when an algorithm asks for information beyond its view radius."""


class PortGraph:
    """Undirected simple graph with ports 1..deg(v) at every vertex.

    ``adj[v][p - 1] = (u, q)`` means port ``p`` of ``v`` leads to ``u`` and
    arrives there on port ``q``.
    """

    def __init__(
        self,
        adj: Sequence[Sequence[tuple[int, int]]],
        delta: int | None = None,
        inputs: Sequence[str | None] | None = None,
        meta: dict | None = None,
        check: bool = True,
    ):
        self.adj: list[tuple[tuple[int, int], ...]] = [tuple(a) for a in adj]
        self.n = len(self.adj)
        self.delta = max((len(a) for a in self.adj), default=0) if delta is None else delta
        self.inputs: list[str | None] = list(inputs) if inputs is not None else [None] * self.n
        self.meta = dict(meta or {})
        if check:
            self.validate()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], delta: int | None = None,
                   inputs=None, meta=None, check: bool = True) -> "PortGraph":
        """Ports are handed out in edge order at each endpoint."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self loop at {u}")
            au, av = adj[u], adj[v]
            au.append((v, len(av) + 1))
            av.append((u, len(au)))
        return cls(adj, delta, inputs, meta, check)

    # basic queries
    def deg(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adj[v]]

    def port_to(self, v: int, u: int) -> int:
        for p, (w, _) in enumerate(self.adj[v], 1):
            if w == u:
                return p
        raise GraphError(f"{u} is not adjacent to {v}")

    def edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v in range(self.n) for u, _ in self.adj[v] if v < u]

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def validate(self) -> None:
        if len(self.inputs) != self.n:
            raise GraphError("input label count does not match n")
        for v, a in enumerate(self.adj):
            if len(a) > self.delta:
                raise GraphError(f"vertex {v} has degree {len(a)} > Δ={self.delta}")
            seen = set()
            for p, (u, q) in enumerate(a, 1):
                if not 0 <= u < self.n or u == v:
                    raise GraphError(f"bad neighbor {u} at {v}")
                if u in seen:
                    raise GraphError(f"parallel edge {v}-{u}")
                seen.add(u)
                if not 1 <= q <= len(self.adj[u]) or self.adj[u][q - 1] != (v, p):
                    raise GraphError(f"asymmetric port {v}:{p} -> {u}:{q}")

    def is_tree(self) -> bool:
        if self.n == 0:
            return False
        if sum(len(a) for a in self.adj) != 2 * (self.n - 1):
            return False
        return len(bfs_dist(self, 0)) == self.n

    def with_inputs(self, inputs: Sequence[str | None]) -> "PortGraph":
        return PortGraph(self.adj, self.delta, inputs, self.meta, check=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PortGraph) and self.adj == other.adj
                and self.delta == other.delta and self.inputs == other.inputs)

    def __repr__(self) -> str:
        return f"PortGraph(n={self.n}, Δ={self.delta})"

    # text format
    def to_text(self) -> str:
        lines = [f"{self.n} {self.delta}"]
        for v, a in enumerate(self.adj):
            lab = "-" if self.inputs[v] is None else self.inputs[v]
            ports = " ".join(f"{p}:{u}" for p, (u, _) in enumerate(a, 1))
            lines.append(f"{v} {len(a)} {lab}" + (" " + ports if ports else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PortGraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise GraphError("header must be 'n Δ'")
        n, delta = int(rows[0][0]), int(rows[0][1])
        if len(rows) != n + 1:
            raise GraphError(f"expected {n} vertex lines, got {len(rows) - 1}")
        targets: list[list[int]] = [[] for _ in range(n)]
        inputs: list[str | None] = [None] * n
        for row in rows[1:]:
            v, d, lab = int(row[0]), int(row[1]), row[2]
            if len(row) != 3 + d:
                raise GraphError(f"vertex {v}: degree {d} but {len(row) - 3} ports")
            inputs[v] = None if lab == "-" else lab
            for i, tok in enumerate(row[3:], 1):
                p, u = tok.split(":")
                if int(p) != i:
                    raise GraphError(f"vertex {v}: ports must be listed 1..deg")
                targets[v].append(int(u))
        adj = []
        for v in range(n):
            row = []
            for u in targets[v]:
                try:
                    q = targets[u].index(v) + 1
                except ValueError:
                    raise GraphError(f"edge {v}-{u} missing its reverse") from None
                row.append((u, q))
            adj.append(row)
        return cls(adj, delta, inputs)


def bfs_dist(g: PortGraph, src: int, limit: int | None = None) -> dict[int, int]:
    dist = {src: 0}
    dq = deque([src])
    while dq:
        v = dq.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for u, _ in g.adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                dq.append(u)
    return dist


# generators

def gen_ring(n: int) -> PortGraph:
    """Cycle; port 1 points clockwise (v -> v+1), port 2 counterclockwise."""
    if n < 3:
        raise GraphError("ring needs n >= 3")
    adj = [[((v + 1) % n, 2), ((v - 1) % n, 1)] for v in range(n)]
    return PortGraph(adj, 2)


def gen_path(n: int) -> PortGraph:
    if n < 1:
        raise GraphError("path needs n >= 1")
    return PortGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_star(leaves: int) -> PortGraph:
    return PortGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gen_random_tree(n: int, delta: int, seed: int = 0) -> PortGraph:
    """Uniform attachment to an earlier vertex with spare degree."""
    if n < 1:
        raise GraphError("tree needs n >= 1")
    if n >= 3 and delta < 2 or n == 2 and delta < 1:
        raise GraphError(f"no tree on {n} vertices with Δ={delta}")
    rng = random.Random(seed)
    free = [0]
    deg = [0] * n
    edges = []
    for v in range(1, n):
        i = rng.randrange(len(free))
        u = free[i]
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
        if deg[u] == delta:
            last = free.pop()
            if last != u:
                free[i] = last
        if deg[v] < delta:
            free.append(v)
    # shuffle port order so ports do not encode attachment time
    order = list(range(len(edges)))
    rng.shuffle(order)
    return PortGraph.from_edges(n, [edges[i] for i in order], delta=delta, check=False)


def gen_random_regular(n: int, d: int, seed: int = 0) -> PortGraph:
    import networkx as nx

    h = nx.random_regular_graph(d, n, seed=seed)
    return PortGraph.from_edges(n, sorted(h.edges()), delta=d, check=False)


def hk_size(k: int, x: int) -> int:
    size = x
    for i in range(2, k + 1):
        size = x + (x + (2 if i == k else 1)) * size
    return size


def gen_hk(k: int, x: int) -> PortGraph:
    """Lower-bound instance for the k-level hierarchical coloring problem.

    ``meta['backbone'][v]`` is the construction level of the backbone holding v.
    """
    if k < 1 or x < 3:
        raise GraphError("gen_hk needs k >= 1 and x >= 3")
    edges: list[tuple[int, int]] = []
    backbone: list[int] = []

    def build(i: int, top: bool) -> tuple[int, int]:
        base = len(backbone)
        backbone.extend([i] * x)
        spine = list(range(base, base + x))
        edges.extend(zip(spine, spine[1:]))
        if i > 1:
            hosts = spine + [spine[-1]]
            if top:
                hosts = [spine[0]] + hosts
            for h in hosts:
                head, _ = build(i - 1, False)
                edges.append((h, head))
        return spine[0], spine[-1]

    head, tail = build(k, True)
    return PortGraph.from_edges(len(backbone), edges, delta=3, check=False,
                                meta={"head": head, "tail": tail, "backbone": backbone, "k": k, "x": x})


# views

def _stream_word(seed: int, key: int, index: int) -> int:
    h = hashlib.blake2b(struct.pack("<qqq", seed, key, index), digest_size=8)
    return int.from_bytes(h.digest(), "little")


@dataclass
class View:
    """Radius-t ball around a vertex; local id 0 is the center.

    ``adj[u]`` lists (local neighbor, reverse port) per port, or None where the
    edge leaves the view. Vertices at distance t expose their degree only.
    """

    t: int
    dist: list[int]
    degree: list[int]
    adj: list[list[tuple[int, int] | None]]
    inputs: list[str | None]
    ids: list[int] | None = None
    n: int | None = None
    delta: int | None = None
    seed: int | None = None
    keys: list[int] | None = field(default=None, repr=False)
    touched: int = field(default=0, repr=False)

    @property
    def size(self) -> int:
        return len(self.dist)

    def deg(self, u: int) -> int:
        return self.degree[u]

    def ports(self, u: int) -> list[tuple[int, int]]:
        """Full port list of u; only available strictly inside the ball."""
        if self.dist[u] >= self.t:
            raise OutOfView(f"neighbors of a vertex at distance {self.dist[u]} in a radius-{self.t} view")
        self.touched = max(self.touched, self.dist[u] + 1)
        return self.adj[u]  # type: ignore[return-value]

    def edge(self, u: int, p: int) -> tuple[int, int] | None:
        """Target of port p at u, or None when that edge leaves the view."""
        return self.adj[u][p - 1]

    def ident(self, u: int) -> int:
        if self.ids is None:
            raise OutOfView("no identifiers in this view")
        return self.ids[u]

    def input(self, u: int) -> str | None:
        return self.inputs[u]

    def rand(self, u: int, index: int) -> int:
        """64-bit word ``index`` of u's private random stream."""
        if self.keys is None or self.seed is None:
            raise OutOfView("no random bits in this view")
        return _stream_word(self.seed, self.keys[u], index)

    def relabeled(self, perm: Sequence[int]) -> "View":
        """Same view with local ids renamed by perm (perm[0] must be 0)."""
        if perm[0] != 0:
            raise ValueError("center must stay at 0")
        inv = [0] * len(perm)
        for old, new in enumerate(perm):
            inv[new] = old

        def pick(xs):
            return None if xs is None else [xs[inv[i]] for i in range(len(perm))]

        adj = [[None if e is None else (perm[e[0]], e[1]) for e in self.adj[inv[i]]] for i in range(len(perm))]
        return View(self.t, pick(self.dist), pick(self.degree), adj, pick(self.inputs), pick(self.ids),
                    self.n, self.delta, self.seed, pick(self.keys))


class GlobalAccess:
    """Whole-graph counterpart of View with the same query interface."""

    def __init__(self, g: PortGraph, ids: Sequence[int] | None = None, n: int | None = None,
                 seed: int | None = None, keys: Sequence[int] | None = None):
        self.g = g
        self.ids = ids
        self.n = g.n if n is None else n
        self.delta = g.delta
        self.seed = seed
        self.keys = keys
        self.t = None

    def deg(self, u: int) -> int:
        return len(self.g.adj[u])

    def ports(self, u: int) -> Sequence[tuple[int, int]]:
        return self.g.adj[u]

    def edge(self, u: int, p: int) -> tuple[int, int]:
        return self.g.adj[u][p - 1]

    def ident(self, u: int) -> int:
        if self.ids is None:
            raise OutOfView("no identifiers")
        return self.ids[u]

    def input(self, u: int) -> str | None:
        return self.g.inputs[u]

    def rand(self, u: int, index: int) -> int:
        if self.seed is None:
            raise OutOfView("no random bits")
        return _stream_word(self.seed, u if self.keys is None else self.keys[u], index)


def ball(g: PortGraph, v: int, t: int, ids: Sequence[int] | None = None, n: int | None = None,
         seed: int | None = None, keys: Sequence[int] | None = None) -> View:
    """Induced radius-t ball around v; edges between two distance-t vertices are hidden."""
    dist = bfs_dist(g, v, limit=t)
    order = sorted(dist, key=lambda u: (dist[u], u))
    local = {u: i for i, u in enumerate(order)}
    adj: list[list[tuple[int, int] | None]] = []
    for u in order:
        row: list[tuple[int, int] | None] = []
        for w, q in g.adj[u]:
            if w in local and (dist[u] < t or dist[w] < t):
                row.append((local[w], q))
            else:
                row.append(None)
        adj.append(row)
    return View(
        t=t,
        dist=[dist[u] for u in order],
        degree=[len(g.adj[u]) for u in order],
        adj=adj,
        inputs=[g.inputs[u] for u in order],
        ids=None if ids is None else [ids[u] for u in order],
        n=g.n if n is None else n,
        delta=g.delta,
        seed=seed,
        keys=None if seed is None else [u if keys is None else keys[u] for u in order],
    )
