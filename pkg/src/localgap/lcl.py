"""Locally checkable labeling problems, verifiers and the built-in catalog."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Sequence

from .graph import GlobalAccess, PortGraph, ball, bfs_dist

BOT = None  # the unlabeled symbol

VENUS, MARS, MERCURY, SATURN = "♀", "♂", "☿", "♄"
HIER_OUT = (VENUS, MARS, MERCURY, SATURN)

Label = Hashable
Verifier = Callable[[Any, Callable[[int], Label], int, dict], bool]


class UnknownSpec(KeyError):
    pass


class _Incomplete:
    def __repr__(self) -> str:
        return "INCOMPLETE"

    def __bool__(self) -> bool:
        raise TypeError("INCOMPLETE has no truth value; compare with `is`")


INCOMPLETE = _Incomplete()


@dataclass(frozen=True)
class LclSpec:
    """An LCL. ``verifier(acc, lab, v, cache)`` inspects only the radius-r ball of v.

    ``acc`` is a View or GlobalAccess, ``lab`` maps its vertex ids to outputs.
    """

    name: str
    r: int
    sigma_in: tuple
    sigma_out: tuple
    verifier: Verifier = field(compare=False)
    uses_ports: bool = False

    def parse_label(self, tok: str) -> Label:
        if tok == "_":
            return BOT
        for s in self.sigma_out:
            if str(s) == tok:
                return s
        raise ValueError(f"{tok!r} not in the output alphabet of {self.name}")


@dataclass(frozen=True)
class Verdict:
    status: str  # legal | illegal | incomplete
    vertex: int | None = None

    @property
    def legal(self) -> bool:
        return self.status == "legal"

    def __str__(self) -> str:
        return self.status if self.vertex is None else f"{self.status}({self.vertex})"


def check_local(spec: LclSpec, g: PortGraph, labels: Sequence[Label], v: int):
    """True/False for v's radius-r ball, or INCOMPLETE if the ball holds ⊥."""
    view = ball(g, v, spec.r)
    order = sorted(bfs_dist(g, v, spec.r).items(), key=lambda kv: (kv[1], kv[0]))
    local = [labels[u] for u, _ in order]
    if any(x is BOT for x in local):
        return INCOMPLETE
    return bool(spec.verifier(view, local.__getitem__, 0, {}))


def check_global(spec: LclSpec, g: PortGraph, labels: Sequence[Label]) -> Verdict:
    if len(labels) != g.n:
        raise ValueError("labeling size does not match the graph")
    for v in range(g.n):
        if labels[v] is BOT:
            return Verdict("incomplete", v)
    acc = GlobalAccess(g)
    cache: dict = {}
    for v in range(g.n):
        if not spec.verifier(acc, labels.__getitem__, v, cache):
            return Verdict("illegal", v)
    return Verdict("legal")


# level structure shared by the hierarchical coloring verifier and solver

class Levels:
    """Lazy V_1..V_{k+1} membership over any access object (graph or view)."""

    def __init__(self, acc, k: int):
        self.acc = acc
        self.k = k
        self._atleast: dict[tuple[int, int], bool] = {}

    def at_least(self, u: int, i: int) -> bool:
        """Is u in G_i, i.e. not in V_1..V_{i-1}?"""
        if i <= 1:
            return True
        key = (u, i)
        hit = self._atleast.get(key)
        if hit is not None:
            return hit
        if not self.at_least(u, i - 1):
            res = False
        elif i == 2:
            res = self.acc.deg(u) > 2
        else:
            cnt = 0
            for w, _ in self.acc.ports(u):
                if self.at_least(w, i - 1):
                    cnt += 1
            res = cnt > 2
        self._atleast[key] = res
        return res

    def level(self, u: int) -> int:
        i = 1
        while i <= self.k and self.at_least(u, i + 1):
            i += 1
        return i


def hier_levels(g: PortGraph, k: int) -> list[int]:
    lv = Levels(GlobalAccess(g), k)
    return [lv.level(v) for v in range(g.n)]


def _hier_verifier(k: int) -> Verifier:
    def verify(acc, lab, v, cache) -> bool:
        lv = cache.get("levels")
        if lv is None:
            lv = cache["levels"] = Levels(acc, k)
        i = lv.level(v)
        x = lab(v)
        if x not in HIER_OUT:
            return False
        if i == k + 1:
            return x == SATURN
        nbrs = [w for w, _ in acc.ports(v)]
        exempt = any(not lv.at_least(w, i) and lab(w) in (VENUS, MARS, SATURN) for w in nbrs)
        if (x == SATURN) != exempt:
            return False
        # a same-or-higher neighbor labeled like this would be illegal either here or at itself
        if x in (VENUS, MARS):
            if any(lv.at_least(w, i) and lab(w) in (x, MERCURY) for w in nbrs):
                return False
        if i == k and not exempt:
            free = sum(1 for w in nbrs if lv.at_least(w, k) and lab(w) != SATURN)
            if free <= 1 and x not in (VENUS, MARS):
                return False
        return True

    return verify


def _coloring_verifier(acc, lab, v, cache) -> bool:
    x = lab(v)
    return all(lab(w) != x for w, _ in acc.ports(v))


def _all_sigma(acc, lab, v, cache) -> bool:
    return True


def _sinkless_verifier(acc, lab, v, cache) -> bool:
    """Label = port of an edge v claims as outgoing (0 = none, allowed below degree 3)."""
    p = lab(v)
    d = acc.deg(v)
    if p == 0:
        return d < 3
    if not 1 <= p <= d:
        return False
    w, q = acc.ports(v)[p - 1]
    return lab(w) != q


def _orientation_verifier(ell: int) -> Verifier:
    def aligned(acc, lab, u, w, pu_to_w, pw_to_u) -> bool:
        return (lab(u) == pu_to_w) != (lab(w) == pw_to_u)

    def verify(acc, lab, v, cache) -> bool:
        if acc.deg(v) != 2 or lab(v) not in (1, 2):
            return False
        count = 1
        for start in (1, 2):
            cur, p = v, start
            for _ in range(ell - 1):
                e = acc.edge(cur, p)
                if e is None:
                    break
                w, q = e
                if acc.deg(w) != 2 or lab(w) not in (1, 2):
                    return False
                if not aligned(acc, lab, cur, w, p, q):
                    break
                if w == v:
                    return True  # the whole cycle is one uniform run
                count += 1
                cur, p = w, 3 - q
            if count >= ell:
                return True
        return count >= ell

    return verify


def proper_coloring(q: int) -> LclSpec:
    if q < 1:
        raise ValueError("q >= 1")
    name = "two-coloring" if q == 2 else f"proper-coloring:{q}"
    return LclSpec(name, 1, (), tuple(range(q)), _coloring_verifier)


def builtin(name: str, param: int | None = None) -> LclSpec:
    """Catalog lookup. ``name`` may carry its parameter as ``name:param``."""
    if ":" in name:
        name, raw = name.split(":", 1)
        param = int(raw)
    if name == "proper-coloring":
        return proper_coloring(3 if param is None else param)
    if name == "two-coloring":
        return proper_coloring(2)
    if name == "hier":
        k = 1 if param is None else param
        if k < 1:
            raise ValueError("hier needs k >= 1")
        return LclSpec(f"hier:{k}", k, (), HIER_OUT, _hier_verifier(k))
    if name == "ell-orientation":
        ell = 2 if param is None else param
        if ell < 1:
            raise ValueError("ell-orientation needs ell >= 1")
        return LclSpec(f"ell-orientation:{ell}", max(1, ell - 1), (), (1, 2),
                       _orientation_verifier(ell), uses_ports=True)
    if name == "sinkless-orientation":
        delta = 3 if param is None else param
        return LclSpec("sinkless-orientation", 1, (), tuple(range(delta + 1)), _sinkless_verifier,
                       uses_ports=True)
    if name == "all-sigma":
        q = 2 if param is None else param
        return LclSpec(f"all-sigma:{q}" if param is not None else "all-sigma", 1, (), tuple(range(q)),
                       _all_sigma)
    raise UnknownSpec(name)


CATALOG = ("proper-coloring", "two-coloring", "hier", "ell-orientation", "sinkless-orientation", "all-sigma")


def dump_labeling(labels: Sequence[Label]) -> str:
    return "".join(f"{v} {'_' if x is BOT else x}\n" for v, x in enumerate(labels))


def load_labeling(spec: LclSpec, text: str) -> list[Label]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    out: list[Label] = [BOT] * len(rows)
    for v, tok in rows:
        out[int(v)] = spec.parse_label(tok)
    return out
