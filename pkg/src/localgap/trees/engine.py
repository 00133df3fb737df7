"""Memoized extendible sets, classes and types for radius-1 port-free specs.

A class is the fingerprint of a unipolar tree and a type the fingerprint of a
bipolar one. Both are computed bottom-up from small tables: ``F(c)`` holds the
pairs (own label, parent label) for which a subtree of class c can be completed
with every check inside it satisfied.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..graph import View
from ..lcl import BOT, LclSpec
from .partial import Node, TreeSpecError, canonical, chain_view, leaf

EMPTY = ("E",)


@dataclass
class ClassInfo:
    cid: int
    fp: tuple
    rep: Node
    lab: int  # preset label index of the root, -1 if unlabeled
    inp: str | None
    kid_attrs: tuple  # (label index, input) per kid, aligned with ext positions 1..
    ext: frozenset
    good: bool

    @property
    def rootdeg(self) -> int:
        return len(self.kid_attrs)


@dataclass
class TypeInfo:
    tid: int
    fp: tuple
    rep: tuple  # core of a representative bipolar tree


class TreeEngine:
    def __init__(self, spec: LclSpec, delta: int):
        if spec.uses_ports:
            raise TreeSpecError(f"{spec.name} reads port numbers; the tree engine needs port-free specs")
        if spec.r != 1:
            raise TreeSpecError(f"{spec.name} has radius {spec.r}; the symbolic engine covers radius 1")
        if delta < 2:
            raise TreeSpecError("delta >= 2")
        self.spec = spec
        self.delta = delta
        self.sigma = tuple(spec.sigma_out)
        self.q = len(self.sigma)
        self.index = {x: i for i, x in enumerate(self.sigma)}
        self.classes: list[ClassInfo] = []
        self.types: list[TypeInfo] = []
        self._cls_fp: dict[tuple, int] = {}
        self._type_fp: dict[tuple, int] = {}
        self._node_cls: dict[bytes, int] = {}
        self._key_cls: dict[tuple, int] = {}
        self._key_type: dict[tuple, int] = {}
        self._star: dict[tuple, bool] = {}
        self._F: dict[tuple, frozenset] = {}
        self._C: dict[tuple, tuple] = {}
        self._ok: dict[tuple, bool] = {}
        self._delta: dict[tuple, tuple] = {}

    # labels

    def li(self, lab) -> int:
        return -1 if lab is BOT else self.index[lab]

    def allowed(self, li: int) -> Sequence[int]:
        return range(self.q) if li < 0 else (li,)

    def star_ok(self, a: int, inp, nbrs: Sequence[tuple[int, str | None]]) -> bool:
        """Check at a vertex labeled a whose neighbors carry the given (label, input) pairs."""
        key = (a, inp, tuple(sorted(nbrs, key=repr)))
        hit = self._star.get(key)
        if hit is None:
            d = len(nbrs)
            view = View(
                t=1,
                dist=[0] + [1] * d,
                degree=[d] + [1] * d,
                adj=[[(i, 1) for i in range(1, d + 1)]] + [[(0, i)] for i in range(1, d + 1)],
                inputs=[inp] + [x for _, x in nbrs],
            )
            labs = [self.sigma[a]] + [self.sigma[x] for x, _ in nbrs]
            hit = self._star[key] = bool(self.spec.verifier(view, labs.__getitem__, 0, {}))
        return hit

    # classes

    def cls(self, node: Node) -> int:
        """Class id of a unipolar tree (iterative, so deep chains are fine)."""
        hit = self._node_cls.get(node.h)
        if hit is not None:
            return hit
        stack = [node]
        while stack:
            x = stack[-1]
            if x.h in self._node_cls:
                stack.pop()
                continue
            pending = [k for k in x.kids if k.h not in self._node_cls]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            self._node_cls[x.h] = self._class_from(x, [self._node_cls[k.h] for k in x.kids])
        return self._node_cls[node.h]

    def _class_from(self, node: Node, kid_cids: list[int]) -> int:
        kc = tuple(sorted(kid_cids))
        key = (self.li(node.lab), node.inp, kc)
        cid = self._key_cls.get(key)
        if cid is not None:
            info = self.classes[cid]
            if node.size < info.rep.size:
                info.rep = node
            return cid
        lab, inp = key[0], node.inp
        ext = set()
        for a in self.allowed(lab):
            opts = [self.C(c, a, inp) for c in kc]
            for combo in itertools.product(*opts):
                ext.add((a,) + combo)
        kid_attrs = tuple((self.classes[c].lab, self.classes[c].inp) for c in kc)
        d = len(kc)
        adj = {0: list(range(1, d + 1))}
        adj.update({j: [0] for j in range(1, d + 1)})
        attrs = {0: (0, lab, inp)}
        attrs.update({j + 1: (-1,) + kid_attrs[j] for j in range(d)})
        qcode, extcode, _ = canonical(list(range(d + 1)), adj, attrs, [0], ext)
        fp = ("U", qcode, extcode)
        cid = self._cls_fp.get(fp)
        if cid is None:
            cid = len(self.classes)
            good = any(self.star_ok(t[0], inp, list(zip(t[1:], (x for _, x in kid_attrs)))) for t in ext)
            self.classes.append(ClassInfo(cid, fp, node, lab, inp, kid_attrs, frozenset(ext), good))
            self._cls_fp[fp] = cid
        elif node.size < self.classes[cid].rep.size:
            self.classes[cid].rep = node
        self._key_cls[key] = cid
        return cid

    def class_fp(self, node: Node) -> tuple:
        return self.classes[self.cls(node)].fp

    def F(self, cid: int, pinp=None) -> frozenset:
        """Pairs (a, b): a tree of class cid labeled a under a parent labeled b completes."""
        key = (cid, pinp)
        hit = self._F.get(key)
        if hit is None:
            info = self.classes[cid]
            kin = [x for _, x in info.kid_attrs]
            out = set()
            for t in info.ext:
                a = t[0]
                kids = list(zip(t[1:], kin))
                for b in range(self.q):
                    if (a, b) not in out and self.star_ok(a, info.inp, [(b, pinp)] + kids):
                        out.add((a, b))
            hit = self._F[key] = frozenset(out)
        return hit

    def C(self, cid: int, b: int, pinp=None) -> tuple[int, ...]:
        """Labels a child of class cid may take under a parent labeled b."""
        key = (cid, b, pinp)
        hit = self._C.get(key)
        if hit is None:
            f = self.F(cid, pinp)
            hit = self._C[key] = tuple(a for a in range(self.q) if (a, b) in f)
        return hit

    def ok(self, cid: int, left, a: int, right, linp=None, rinp=None) -> bool:
        """Check at a core vertex of class cid labeled a with core neighbors ``left``/``right`` (None = absent)."""
        key = (cid, left, a, right, linp, rinp)
        hit = self._ok.get(key)
        if hit is None:
            info = self.classes[cid]
            kin = [x for _, x in info.kid_attrs]
            extra = []
            if left is not None:
                extra.append((left, linp))
            if right is not None:
                extra.append((right, rinp))
            hit = any(t[0] == a and self.star_ok(a, info.inp, extra + list(zip(t[1:], kin))) for t in info.ext)
            self._ok[key] = hit
        return hit

    def kid_choice(self, node: Node, a: int, extra: Sequence[tuple[int, str | None]]) -> tuple[int, ...] | None:
        """Lexicographically least labels for node's kids (in node order) completing the check at its root."""
        opts = [self.C(self.cls(k), a, node.inp) for k in node.kids]
        kin = [k.inp for k in node.kids]
        for combo in itertools.product(*opts):
            if self.star_ok(a, node.inp, list(extra) + list(zip(combo, kin))):
                return combo
        return None

    def good(self, cid: int) -> bool:
        return self.classes[cid].good

    # bipolar types

    def _bipolar(self, core: Sequence[Node], want_order: bool = False):
        k = len(core)
        if k < 2:
            raise ValueError("a bipolar tree needs at least two core vertices")
        s, t = core[0], core[-1]
        cids = [self.cls(x) for x in core]
        inps = [x.inp for x in core]
        ls = [self.li(x.lab) for x in core]
        skids = [self.cls(x) for x in s.kids]
        tkids = [self.cls(x) for x in t.kids]

        def pole_opts(node, kc, a):
            return itertools.product(*[self.C(c, a, node.inp) for c in kc])

        if k == 2:
            rel = {(a1, None, None, ak) for a1 in self.allowed(ls[0]) for ak in self.allowed(ls[1])}
        elif k == 3:
            rel = {(a1, a2, None, a3)
                   for a1 in self.allowed(ls[0]) for a2 in self.allowed(ls[1]) for a3 in self.allowed(ls[2])
                   if self.ok(cids[1], a1, a2, a3, inps[0], inps[2])}
        else:
            states = {(a1, a2, a1, a2) for a1 in self.allowed(ls[0]) for a2 in self.allowed(ls[1])}
            for j in range(2, k):
                nxt = set()
                for a1, a2, p, c in states:
                    for x in self.allowed(ls[j]):
                        if self.ok(cids[j - 1], p, c, x, inps[j - 2], inps[j]):
                            nxt.add((a1, a2, c, x))
                states = nxt
            rel = {(a1, a2, p, c) for a1, a2, p, c in states}
        ext = set()
        for a1, a2, ap, ak in rel:
            for ks in pole_opts(s, skids, a1):
                for kt in pole_opts(t, tkids, ak):
                    tup = (a1, ak) + ks + kt
                    if k >= 3:
                        tup += (a2,)
                    if k >= 4:
                        tup += (ap,)
                    ext.add(tup)
        qverts = ["s", "t"] + [("s", j) for j in range(len(skids))] + [("t", j) for j in range(len(tkids))]
        adj = {"s": [("s", j) for j in range(len(skids))], "t": [("t", j) for j in range(len(tkids))]}
        for j in range(len(skids)):
            adj[("s", j)] = ["s"]
        for j in range(len(tkids)):
            adj[("t", j)] = ["t"]
        attrs = {"s": (0, ls[0], inps[0]), "t": (1, ls[-1], inps[-1])}
        for j, x in enumerate(s.kids):
            attrs[("s", j)] = (-1, self.li(x.lab), x.inp)
        for j, x in enumerate(t.kids):
            attrs[("t", j)] = (-1, self.li(x.lab), x.inp)
        if k == 2:
            adj["s"].append("t")
            adj["t"].append("s")
        elif k == 3:
            qverts.append("v2")
            adj["v2"] = ["s", "t"]
            adj["s"].append("v2")
            adj["t"].append("v2")
            attrs["v2"] = (-1, ls[1], inps[1])
        else:
            qverts += ["v2", "vk"]
            adj["v2"], adj["vk"] = ["s"], ["t"]
            if k == 4:
                adj["v2"].append("vk")
                adj["vk"].append("v2")
            adj["s"].append("v2")
            adj["t"].append("vk")
            attrs["v2"] = (-1, ls[1], inps[1])
            attrs["vk"] = (-1, ls[-2], inps[-2])
        qcode, extcode, order = canonical(qverts, adj, attrs, ["s", "t"], ext)
        fp = ("B", qcode, extcode)
        if want_order:
            return fp, order, ext, qverts
        return fp

    def _register_type(self, fp: tuple, core: tuple) -> int:
        tid = self._type_fp.get(fp)
        if tid is None:
            tid = len(self.types)
            self.types.append(TypeInfo(tid, fp, core))
            self._type_fp[fp] = tid
        elif _total(core) < _total(self.types[tid].rep):
            self.types[tid].rep = core
        return tid

    def type_of(self, core: Sequence[Node]) -> int:
        core = tuple(core)
        key = tuple(self.cls(x) for x in core)
        tid = self._key_type.get(key)
        if tid is None:
            tid = self._key_type[key] = self._register_type(self._bipolar(core), core)
        return tid

    def type_fp(self, core: Sequence[Node]) -> tuple:
        return self.types[self.type_of(core)].fp

    def type_witness(self, core: Sequence[Node]):
        """(fingerprint, canonical boundary order, extendible set, boundary vertex names)."""
        return self._bipolar(tuple(core), want_order=True)

    # automaton over classes

    def step(self, state: tuple, c: int) -> tuple:
        key = (state, c)
        hit = self._delta.get(key)
        if hit is None:
            if state == EMPTY:
                hit = ("1", c)
            elif state[0] == "1":
                hit = ("T", self.type_of((self.classes[state[1]].rep, self.classes[c].rep)))
            else:
                hit = ("T", self.type_of(self.types[state[1]].rep + (self.classes[c].rep,)))
            self._delta[key] = hit
        return hit

    def walk(self, core: Sequence[Node], state: tuple = EMPTY) -> tuple:
        for x in core:
            state = self.step(state, self.cls(x))
        return state

    def type_transition(self, tid: int, cid: int) -> int:
        return self.step(("T", tid), cid)[1]

    def reachable_states(self, alphabet: Sequence[int], limit: int | None = None) -> set[tuple]:
        seen = {EMPTY}
        frontier = [EMPTY]
        while frontier:
            nxt = []
            for st in frontier:
                for c in alphabet:
                    x = self.step(st, c)
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
                        if limit is not None and len(seen) > limit:
                            return seen
            frontier = nxt
        return seen

    def view_class(self, core: Sequence[Node], side: int) -> int:
        """Class of a bipolar tree seen as unipolar from pole ``side`` (0 = s, 1 = t)."""
        return self.cls(chain_view(tuple(core) if side == 0 else tuple(core)[::-1]))

    @property
    def single(self) -> int:
        return self.cls(leaf())


def _total(core) -> int:
    return sum(x.size for x in core)
