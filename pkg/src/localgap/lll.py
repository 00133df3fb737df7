"""Bad-event systems, the ID-priority resampling algorithm and the n* speedup wrapper."""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .graph import GlobalAccess, PortGraph, bfs_dist
from .lcl import LclSpec, Verdict, check_global
from .sim import ViewAlgorithm

KEY_RANGE = 1 << 63


class NonTermination(RuntimeError):
    pass


class NoValidNStar(ValueError):
    pass


@dataclass
class Event:
    id: int
    vbl: tuple[int, ...]
    occurs: Callable[[Sequence[int]], bool] | None = None


class BadEventSystem:
    """Independent finite-range variables plus events over variable scopes.

    Subclasses may override ``occurring`` to evaluate many events at once.
    """

    def __init__(self, ranges: Sequence[int], events: Sequence[Event], p: float | None = None):
        self.ranges = list(ranges)
        self.events = list(events)
        ids = [e.id for e in self.events]
        if len(set(ids)) != len(ids):
            raise ValueError("event ids must be distinct")
        self.p = p
        self._by_var: list[list[int]] | None = None
        self._dep: DependencyGraph | None = None

    def sample(self, var: int, rng: random.Random) -> int:
        return rng.randrange(self.ranges[var])

    def events_of(self, var: int) -> list[int]:
        if self._by_var is None:
            by: list[list[int]] = [[] for _ in self.ranges]
            for j, e in enumerate(self.events):
                for x in e.vbl:
                    by[x].append(j)
            self._by_var = by
        return self._by_var[var]

    def occurring(self, assignment: Sequence[int], changed: Iterable[int] | None,
                  current: set[int] | None) -> set[int]:
        """Indices of occurring events; only events touching ``changed`` are re-checked."""
        if changed is None or current is None:
            return {j for j, e in enumerate(self.events) if e.occurs(assignment)}
        touched = {j for x in changed for j in self.events_of(x)}
        out = set(current) - touched
        out.update(j for j in touched if self.events[j].occurs(assignment))
        return out

    def dependency(self) -> "DependencyGraph":
        if self._dep is None:
            adj = []
            for j, e in enumerate(self.events):
                nb = {i for x in e.vbl for i in self.events_of(x)}
                nb.discard(j)
                adj.append(sorted(nb))
            self._dep = DependencyGraph(adj, max((len(a) for a in adj), default=0), self.p)
        return self._dep


@dataclass
class DependencyGraph:
    adj: list[list[int]]
    d: int
    p: float | None = None


def check_criterion(p: float, d: int, c: float) -> bool:
    """The symmetric criterion p * d^c < 1."""
    if not 0 <= p <= 1:
        raise ValueError("p must be a probability")
    return p * max(d, 1) ** c < 1


@dataclass
class ResampleResult:
    assignment: list[int]
    iterations: int
    outcome: str  # "ok" or "cap"
    cap: int
    resampled: int = 0

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"


def default_cap(n: int) -> int:
    return max(1, math.ceil(100 * math.log2(max(n, 2))))


def mt_resample(sys: BadEventSystem, seed: int = 0, cap: int | None = None,
                initial: Sequence[int] | None = None, trace: Callable | None = None,
                raise_on_cap: bool = False) -> ResampleResult:
    """Resample the variables of locally-minimal-id occurring events until none occurs."""
    rng = random.Random(seed)
    cap = default_cap(len(sys.events)) if cap is None else cap
    x = list(initial) if initial is not None else [sys.sample(i, rng) for i in range(len(sys.ranges))]
    ids = [e.id for e in sys.events]
    occ = sys.occurring(x, None, None)
    it = 0
    resampled = 0
    while occ:
        if it >= cap:
            if raise_on_cap:
                raise NonTermination(f"{len(occ)} events still occur after {cap} iterations")
            return ResampleResult(x, it, "cap", cap, resampled)
        chosen = _local_minima(sys, occ, ids)
        vars_ = sorted({v for j in chosen for v in sys.events[j].vbl})
        before = list(x) if trace else None
        for v in vars_:
            x[v] = sys.sample(v, rng)
        resampled += len(vars_)
        it += 1
        if trace:
            trace(it, set(occ), chosen, before, list(x))
        occ = sys.occurring(x, vars_, occ)
    assert not sys.occurring(x, None, None), "resampling stopped with an occurring event"
    return ResampleResult(x, it, "ok", cap, resampled)


def _local_minima(sys: BadEventSystem, occ: set[int], ids: Sequence[int]) -> list[int]:
    """Occurring events whose id beats every occurring event sharing a variable."""
    by_var: dict[int, list[int]] = {}
    for j in occ:
        for x in sys.events[j].vbl:
            by_var.setdefault(x, []).append(j)
    out = []
    for j in sorted(occ):
        if all(ids[j] <= ids[b] for x in sys.events[j].vbl for b in by_var[x]):
            out.append(j)
    return out


def dependency_degree(g: PortGraph, radius: int) -> int:
    """max_v |N^{2 radius}(v)| - 1, via bitset reachability."""
    reach = [(1 << v) for v in range(g.n)]
    for _ in range(2 * radius):
        nxt = []
        for v in range(g.n):
            acc = reach[v]
            for u, _ in g.adj[v]:
                acc |= reach[u]
            nxt.append(acc)
        reach = nxt
    return max((bin(r).count("1") for r in reach), default=1) - 1


# sinkless orientation via random edge directions

def sinkless_events(g: PortGraph) -> BadEventSystem:
    """Variable per edge (0: low->high endpoint, 1: high->low); event per vertex = sink."""
    edges = g.edges()
    eidx = {e: i for i, e in enumerate(edges)}
    evs = []
    for v in range(g.n):
        inc = tuple(eidx[(min(u, v), max(u, v))] for u in g.neighbors(v))
        into = tuple(1 if u > v else 0 for u in g.neighbors(v))

        def occurs(a, inc=inc, into=into):
            return all(a[i] == s for i, s in zip(inc, into))

        evs.append(Event(v, inc, occurs))
    p = 2.0 ** -g.max_degree() if g.n else 0.0
    sys = BadEventSystem([2] * len(edges), evs, p=p)
    sys.edges = edges  # type: ignore[attr-defined]
    return sys


def orientation_labels(g: PortGraph, edges: Sequence[tuple[int, int]], a: Sequence[int]) -> list[int]:
    """Port of the first outgoing edge at each vertex (0 if none)."""
    out_ports = [0] * g.n
    for (u, v), s in zip(edges, a):
        src, dst = (u, v) if s == 0 else (v, u)
        p = g.port_to(src, dst)
        if out_ports[src] == 0 or p < out_ports[src]:
            out_ports[src] = p
    return out_ports


# events induced by running a randomized algorithm

class AlgorithmEvents(BadEventSystem):
    """E_v: the verifier fails at v when ``alg`` runs with advertised size n_star.

    Variables are the per-vertex random-stream keys; vbl(E_v) = N^{r+t*}(v).
    """

    def __init__(self, g: PortGraph, spec: LclSpec, alg: ViewAlgorithm, n_star: int,
                 stream_seed: int = 0, p: float | None = None):
        self.g, self.spec, self.alg, self.n_star = g, spec, alg, n_star
        self.stream_seed = stream_seed
        self.t_star = alg.round_bound(n_star, g.delta)
        self.radius = spec.r + self.t_star
        self._balls_t = [sorted(bfs_dist(g, v, self.t_star)) for v in range(g.n)]
        self._balls_r = [sorted(bfs_dist(g, v, spec.r)) for v in range(g.n)]
        evs = [Event(v, tuple(sorted(bfs_dist(g, v, self.radius)))) for v in range(g.n)]
        super().__init__([KEY_RANGE] * g.n, evs, p=p)
        self.labels: list | None = None

    def labels_for(self, a: Sequence[int], vertices: Iterable[int] | None = None, base=None) -> list:
        acc = GlobalAccess(self.g, n=self.n_star, seed=self.stream_seed, keys=a)
        cache: dict = {}
        out = list(base) if base is not None else [None] * self.g.n
        for u in (range(self.g.n) if vertices is None else vertices):
            out[u] = self.alg.output(acc, u, cache)
        return out

    def _bad(self, labels, vs) -> set[int]:
        acc = GlobalAccess(self.g)
        cache: dict = {}
        return {v for v in vs if not self.spec.verifier(acc, labels.__getitem__, v, cache)}

    def occurring(self, assignment, changed, current):
        if changed is None or current is None or self.labels is None:
            self.labels = self.labels_for(assignment)
            return self._bad(self.labels, range(self.g.n))
        moved = {u for x in changed for u in self._balls_t[x]}
        self.labels = self.labels_for(assignment, moved, self.labels)
        recheck = {v for u in moved for v in self._balls_r[u]}
        return (set(current) - recheck) | self._bad(self.labels, recheck)

    def degree_bound(self) -> int:
        return max(self.g.max_degree(), 1) ** (2 * self.radius)


def events_from_algorithm(g: PortGraph, spec: LclSpec, alg: ViewAlgorithm, n_star: int,
                          stream_seed: int = 0, p: float | None = None) -> AlgorithmEvents:
    return AlgorithmEvents(g, spec, alg, n_star, stream_seed, p)


def estimate_event_probability(sys: AlgorithmEvents, samples: int = 50, seed: int = 0,
                               safety: float = 2.0) -> float:
    """Monte Carlo mean event frequency over random assignments, times a safety factor."""
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        a = [sys.sample(i, rng) for i in range(len(sys.ranges))]
        sys.labels = None
        hits += len(sys.occurring(a, None, None))
    sys.labels = None
    return min(1.0, safety * hits / (samples * max(len(sys.events), 1)))


# speedup wrapper

@dataclass
class SpeedupConfig:
    c: float
    t_star: int
    n_star: int
    r: int
    delta: int

    def holds(self) -> bool:
        return self.t_star < math.log(self.n_star, max(self.delta, 2)) / (2 * self.c) - self.r


def find_n_star(alg: ViewAlgorithm, spec: LclSpec, delta: int, c: float = 3,
                start: int = 2, max_doublings: int = 4096) -> SpeedupConfig:
    """Smallest n* on the doubling sequence from ``start`` meeting the config inequality."""
    n = start
    for _ in range(max_doublings):
        cfg = SpeedupConfig(c, alg.round_bound(n, delta), n, spec.r, delta)
        if cfg.holds():
            return cfg
        n *= 2
    raise NoValidNStar(f"no n* up to {n} satisfies t* < log_Δ(n*)/(2c) - r for {alg.name}")


@dataclass
class SpeedupRun:
    labeling: list
    verdict: Verdict
    config: SpeedupConfig
    iterations: int
    rounds: int
    outcome: str
    p: float
    d: int
    criterion: bool
    extra: dict = field(default_factory=dict)

    def csv_row(self, n: int) -> list:
        return [n, self.config.delta, f"{self.p:.6g}", self.d, self.config.c, self.criterion,
                self.iterations, self.outcome]


LLL_CSV_HEADER = ["n", "Δ", "p", "d", "c", "criterion", "iterations", "outcome"]


def lll_csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LLL_CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


class SpeedupAlgorithm(ViewAlgorithm):
    """Run ``alg`` believing n = n*, then resample bad neighborhoods until all are fixed.

    Each resampling iteration costs 2(r+t*)+1 rounds: gather the event scope, compare
    ids with dependent events, redraw. One extra such phase detects termination.
    """

    needs_bits = True

    def __init__(self, alg: ViewAlgorithm, spec: LclSpec, c: float = 3, start: int = 2,
                 p: float | None = None, cap: int | None = None):
        self.alg, self.spec, self.c, self.start = alg, spec, c, start
        self.p = p
        self.cap = cap
        self.name = f"speedup({alg.name})"

    def config(self, delta: int) -> SpeedupConfig:
        return find_n_star(self.alg, self.spec, delta, self.c, self.start)

    def phase_rounds(self, delta: int) -> int:
        cfg = self.config(delta)
        return 2 * (cfg.r + cfg.t_star) + 1

    def round_bound(self, n: int, delta: int) -> int:
        return self.phase_rounds(delta) * (default_cap(n) + 1 if self.cap is None else self.cap + 1)

    def run(self, g: PortGraph, seed: int = 0, estimate_p: bool = True) -> SpeedupRun:
        cfg = self.config(max(g.delta, 2))
        sys = events_from_algorithm(g, self.spec, self.alg, cfg.n_star, stream_seed=seed)
        p = self.p
        if p is None:
            p = estimate_event_probability(sys, seed=seed + 1) if estimate_p else 1.0 / cfg.n_star
        d = dependency_degree(g, sys.radius)
        res = mt_resample(sys, seed=seed, cap=self.cap)
        labels = sys.labels_for(res.assignment)
        verdict = check_global(self.spec, g, labels)
        rounds = (2 * (cfg.r + cfg.t_star) + 1) * (res.iterations + 1)
        return SpeedupRun(labels, verdict, cfg, res.iterations, rounds, res.outcome, p, d,
                          check_criterion(p, d, self.c),
                          extra={"degree_bound": sys.degree_bound(), "resampled": res.resampled})

    def output(self, acc, v: int, cache: dict):
        if not isinstance(acc, GlobalAccess):
            raise NotImplementedError("the resampling wrapper runs in whole-graph mode")
        hit = cache.get("speedup")
        if hit is None:
            hit = cache["speedup"] = self.run(acc.g, seed=acc.seed or 0, estimate_p=False)
        return hit.labeling[v]


def speedup_wrap(alg: ViewAlgorithm, spec: LclSpec, c: float = 3, **kw) -> SpeedupAlgorithm:
    return SpeedupAlgorithm(alg, spec, c, **kw)
