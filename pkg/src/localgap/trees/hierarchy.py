"""The class/type hierarchy for a label rule, the search for a feasible rule, and rule extraction."""
from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from ..graph import GlobalAccess, PortGraph
from ..lcl import BOT, LclSpec
from .engine import EMPTY, TreeEngine
from .partial import Node, TreeSpecError, chain_view, make_node
from .surgery import PumpError, extend, label_apply, label_region


class Intractable(RuntimeError):
    """A resource cap was hit before the hierarchy converged."""


class NeedLabel(Exception):
    def __init__(self, fp, tid: int, core: tuple):
        super().__init__(f"no label rule entry for type {tid}")
        self.fp = fp
        self.tid = tid
        self.core = core


@dataclass
class LabelRule:
    """f: type fingerprint -> labels for N^{r-1}(e) of the type's representative, in region order."""

    table: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.table)

    def get(self, fp):
        return self.table.get(fp)


@dataclass
class PlusEntry:
    source: int  # type of the representative H~
    tilde: tuple
    labels: tuple
    plus: tuple  # Extend(Label(H~))
    plain: tuple  # Extend(H~), same cores without the fixed labels
    edge: int  # core index of the left endpoint of the designated edge in ``plus``
    views: tuple[int, int]  # classes of ``plus`` seen from s and from t
    view_nodes: tuple[Node, Node]


@dataclass
class HierarchyState:
    spec: str
    delta: int
    r: int
    ell: int
    w: int
    ell_pump: int
    rule: LabelRule
    classes: list[frozenset] = field(default_factory=list)  # Class(T_i), i = 1, 2, ...
    types: list[frozenset] = field(default_factory=list)  # Type(H_i)
    plus: dict[int, PlusEntry] = field(default_factory=dict)
    plus_sizes: list[int] = field(default_factory=list)
    converged: bool = False
    k_reached: int = 0
    bad: list[int] = field(default_factory=list)
    states: int = 0  # automaton states reachable over the converged alphabet

    @property
    def feasible(self) -> bool:
        return self.converged and not self.bad

    @property
    def final_classes(self) -> frozenset:
        return self.classes[-1] if self.classes else frozenset()

    def dump(self, eng: TreeEngine | None = None) -> str:
        lines = [f"spec {self.spec} delta {self.delta} r {self.r}",
                 f"ell {self.ell} w {self.w} ell_pump {self.ell_pump}"]
        for i, cs in enumerate(self.classes, 1):
            ts = len(self.types[i - 1]) if i - 1 < len(self.types) else "-"
            hp = self.plus_sizes[i - 1] if i - 1 < len(self.plus_sizes) else "-"
            lines.append(f"i={i} classes={len(cs)} types={ts} plus={hp}")
        status = "feasible" if self.feasible else ("bad classes" if self.bad else "not converged")
        lines.append(f"k_reached {self.k_reached} status {status} states {self.states}")
        if self.bad:
            lines.append("bad " + " ".join(map(str, self.bad)))
        for tid in sorted(self.plus):
            e = self.plus[tid]
            lines.append(f"f type={tid} labels={' '.join(map(str, e.labels))} plus_len={len(e.plus)} "
                         f"views={e.views[0]},{e.views[1]}")
        if eng is not None:
            for c in sorted(self.final_classes):
                info = eng.classes[c]
                lines.append(f"class {c} rootdeg={info.rootdeg} ext={len(info.ext)} good={int(info.good)}")
        return "\n".join(lines) + "\n"


@dataclass
class Caps:
    max_iter: int = 40
    max_classes: int = 4000
    max_types: int = 20000
    deadline: float | None = None  # time.monotonic() value

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise Intractable("time limit")


def _layer_types(eng: TreeEngine, alpha: list[int], ell: int, caps: Caps) -> dict[int, tuple]:
    """Types of sequences of ell..2ell trees over ``alpha`` with a representative core each."""
    parents: list[dict] = []
    layer = {EMPTY: None}
    found: dict[int, tuple] = {}
    for x in range(1, 2 * ell + 1):
        caps.tick()
        nxt: dict = {}
        for st in sorted(layer):
            for c in alpha:
                y = eng.step(st, c)
                if y not in nxt:
                    nxt[y] = (st, c)
        if len(nxt) > caps.max_types:
            raise Intractable(f"more than {caps.max_types} automaton states")
        parents.append(nxt)
        layer = nxt
        if x >= ell:
            for st in sorted(nxt):
                if st[0] == "T" and st[1] not in found:
                    seq, cur = [], st
                    for depth in range(x - 1, -1, -1):
                        prev, c = parents[depth][cur]
                        seq.append(c)
                        cur = prev
                    found[st[1]] = tuple(eng.classes[c].rep for c in reversed(seq))
    return found


Chooser = Callable[[TreeEngine, int, tuple], tuple]


def build_hierarchy(eng: TreeEngine, rule: LabelRule | None = None, *, ell: int, w: int, ell_pump: int,
                    chooser: Chooser | None = None, caps: Caps | None = None) -> HierarchyState:
    """Class(T_i), Type(H_i) and H_i^+ for i = 1, 2, ... until Class(T_i) = Class(T_{i+1}).

    Stops early (``bad`` non-empty) once a class without a good labeling appears,
    since classes only accumulate. Raises NeedLabel when ``rule`` lacks a type and
    no chooser is given.
    """
    if w < ell:
        raise ValueError("w >= ell")
    caps = caps or Caps()
    rule = rule if rule is not None else LabelRule()
    r, delta = eng.spec.r, eng.delta
    st = HierarchyState(eng.spec.name, delta, r, ell, w, ell_pump, rule)
    cur = frozenset({eng.single})
    st.classes.append(cur)
    for i in range(1, caps.max_iter + 1):
        caps.tick()
        alpha = sorted(c for c in cur if eng.classes[c].rootdeg <= delta - 2)
        reps = _layer_types(eng, alpha, ell, caps)
        st.types.append(frozenset(reps))
        for tid in sorted(reps):
            if tid in st.plus:
                continue
            tilde = reps[tid]
            fp = eng.types[tid].fp
            labs = rule.get(fp)
            if labs is None:
                if chooser is None:
                    raise NeedLabel(fp, tid, tilde)
                labs = tuple(chooser(eng, tid, tilde))
                rule.table[fp] = labs
            labeled = label_apply(tilde, labs, r)
            try:
                plus, e = extend(eng, labeled, w, ell, ell_pump, r)
                plain, _ = extend(eng, tilde, w, ell, ell_pump, r)
            except PumpError as err:
                err.states = len(eng.reachable_states(alpha, limit=caps.max_types))
                raise
            nodes = (chain_view(plus), chain_view(plus[::-1]))
            views = (eng.cls(nodes[0]), eng.cls(nodes[1]))
            st.plus[tid] = PlusEntry(tid, tilde, labs, plus, plain, e, views, nodes)
            # a root with this tree as its only child belongs to the next class set
            for node in nodes:
                c = eng.cls(make_node(BOT, None, [node]))
                if not eng.good(c):
                    st.bad = [c]
                    st.k_reached = i
                    st.states = len(eng.reachable_states(alpha, limit=caps.max_types))
                    return st
        st.plus_sizes.append(len(st.plus))
        opts = sorted({c for c in cur if eng.classes[c].rootdeg <= delta - 1}
                      | {v for entry in st.plus.values() for v in entry.views})
        nxt = set()
        for m in range(delta + 1):
            for combo in itertools.combinations_with_replacement(opts, m):
                nxt.add(eng.cls(make_node(BOT, None, [eng.classes[c].rep for c in combo])))
            if len(eng.classes) > caps.max_classes:
                raise Intractable(f"more than {caps.max_classes} classes")
        nxt = frozenset(nxt)
        bad = sorted(c for c in nxt if not eng.good(c))
        if nxt == cur or bad:
            if nxt != cur:
                st.classes.append(nxt)
            st.bad = bad
            st.converged = not bad
            st.k_reached = i
            final = sorted(c for c in st.classes[-1] if eng.classes[c].rootdeg <= delta - 2)
            st.states = len(eng.reachable_states(final, limit=caps.max_types))
            return st
        st.classes.append(nxt)
        cur = nxt
    raise Intractable(f"no convergence within {caps.max_iter} iterations")


@dataclass
class SearchResult:
    rule: LabelRule | None
    state: HierarchyState | None
    outcome: str  # "feasible", "infeasible" or "cap"
    ell: int
    w: int
    ell_pump: int
    builds: int
    engine: TreeEngine

    @property
    def complexity(self) -> str:
        return {"feasible": "O(log n)", "infeasible": "n^{Ω(1)}"}.get(self.outcome, "undecided (cap)")


def _fixpoint(eng: TreeEngine, w: int | None, attempt, max_rounds: int = 12):
    """Re-run ``attempt(ell, w, ell_pump)`` until ell_pump covers every reachable automaton state."""
    r = eng.spec.r
    lp = 1
    for _ in range(max_rounds):
        ell = 2 * (r + lp)
        ww = max(w or ell, ell)
        try:
            res, need = attempt(ell, ww, lp)
        except PumpError as err:
            res, need = None, max(getattr(err, "states", lp + 1), lp + 1)
        if need <= lp:
            return res, ell, ww, lp
        lp = need
    raise Intractable("ell_pump did not stabilize")


def search_feasible(spec: LclSpec, delta: int, w: int | None = None, *, max_builds: int = 5000,
                    time_limit: float | None = None, caps: Caps | None = None,
                    engine: TreeEngine | None = None) -> SearchResult:
    """Depth-first search over label rules in lexicographic order; the first feasible rule wins."""
    eng = engine or TreeEngine(spec, delta)
    caps = caps or Caps()
    if time_limit is not None:
        caps.deadline = time.monotonic() + time_limit
    counter = {"builds": 0}

    def dfs(rule: LabelRule, ell, ww, lp, need):
        counter["builds"] += 1
        if counter["builds"] > max_builds:
            raise Intractable(f"more than {max_builds} hierarchy builds")
        try:
            st = build_hierarchy(eng, rule, ell=ell, w=ww, ell_pump=lp, caps=caps)
        except NeedLabel as nl:
            size = len(label_region(nl.core, spec.r))
            for labs in itertools.product(eng.sigma, repeat=size):
                res = dfs(LabelRule({**rule.table, nl.fp: labs}), ell, ww, lp, need)
                if res is not None:
                    return res
            return None
        need[0] = max(need[0], st.states)
        return st if st.feasible else None

    def attempt(ell, ww, lp):
        need = [0]
        return dfs(LabelRule(), ell, ww, lp, need), need[0]

    try:
        st, ell, ww, lp = _fixpoint(eng, w, attempt)
    except Intractable:
        return SearchResult(None, None, "cap", 0, 0, 0, counter["builds"], eng)
    if st is None:
        return SearchResult(None, None, "infeasible", ell, ww, lp, counter["builds"], eng)
    return SearchResult(st.rule, st, "feasible", ell, ww, lp, counter["builds"], eng)


# extracting a rule from an algorithm

def core_region_graph(core: tuple, centers: list[tuple[int, tuple]], radius: int):
    """Concrete ball of the given radius around ``centers`` inside an imaginary bipolar tree.

    Returns (graph, id of each center, labels).
    """
    def node_at(v):
        x = core[v[0]]
        for i in v[1]:
            x = x.kids[i]
        return x

    def nbrs(v):
        j, path = v
        out = []
        if path:
            out.append((j, path[:-1]))
        else:
            if j > 0:
                out.append((j - 1, ()))
            if j + 1 < len(core):
                out.append((j + 1, ()))
        out += [(j, path + (i,)) for i in range(len(node_at(v).kids))]
        return out

    ids = {c: i for i, c in enumerate(centers)}
    order = list(centers)
    frontier = list(centers)
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for u in nbrs(v):
                if u not in ids:
                    ids[u] = len(order)
                    order.append(u)
                    nxt.append(u)
        frontier = nxt
    edges = set()
    for v in order:
        for u in nbrs(v):
            if u in ids:
                a, b = ids[v], ids[u]
                edges.add((min(a, b), max(a, b)))
    nodes = [node_at(v) for v in order]
    g = PortGraph.from_edges(len(order), sorted(edges), inputs=[x.inp for x in nodes])
    return g, [ids[c] for c in centers], [x.lab for x in nodes]


@dataclass
class ExtractResult:
    rule: LabelRule
    state: HierarchyState | None
    t: int
    n_advertised: int
    w: int
    ell: int
    ell_pump: int
    engine: TreeEngine


def extract_f(alg, spec: LclSpec, delta: int, w: int | None = None, trials: int = 200, seed: int = 0,
              n_trees: int = 10_000, caps: Caps | None = None) -> ExtractResult:
    """Label rule from the modal output of ``alg`` on the designated edge of Extend(H~).

    ``alg`` runs as if the graph had beta * n_trees + 1 vertices, where beta counts
    the radius-r labelings; its round bound there sets the minimum w = 4(r + t).
    """
    eng = TreeEngine(spec, delta)
    r = spec.r
    beta = eng.q ** (delta ** r)
    n_adv = beta * n_trees + 1
    t = alg.round_bound(n_adv, delta)
    wmin = 4 * (r + t)
    if w is not None and w < wmin:
        raise ValueError(f"w={w} below 4(r+t)={wmin}")

    def chooser_for(ell, ww, lp):
        def choose(eng_, tid, tilde):
            plain, e = extend(eng_, tilde, ww, ell, lp, r)
            m = len(tilde) // 2
            shift = e - (m - 1)
            region = [(j + shift, path) for j, path in label_region(tilde, r)]
            g, centers, _ = core_region_graph(plain, region, t + r + 1)
            counts: Counter = Counter()
            for s in range(trials):
                acc = GlobalAccess(g, n=n_adv, seed=seed * 1_000_003 + s)
                cache: dict = {}
                counts[tuple(alg.output(acc, v, cache) for v in centers)] += 1
            best = max(counts.items(), key=lambda kv: (kv[1], [-eng_.index[x] for x in kv[0]]))
            return best[0]
        return choose

    def attempt(ell, ww, lp):
        st = build_hierarchy(eng, LabelRule(), ell=ell, w=ww, ell_pump=lp,
                             chooser=chooser_for(ell, ww, lp), caps=caps)
        return st, st.states

    st, ell, ww, lp = _fixpoint(eng, max(w or 0, wmin), attempt)
    return ExtractResult(st.rule, st, t, n_adv, ww, ell, lp, eng)


def tree_class_count(state: HierarchyState) -> int:
    return len(state.final_classes)


__all__ = [
    "Caps", "ExtractResult", "HierarchyState", "Intractable", "LabelRule", "NeedLabel", "PlusEntry",
    "SearchResult", "TreeSpecError", "build_hierarchy", "core_region_graph", "extract_f",
    "search_feasible", "tree_class_count",
]
