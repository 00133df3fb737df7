"""Synchronous LOCAL execution in the full-information formulation.

After t rounds a vertex knows exactly its radius-t ball, so an algorithm is a
pure function of that ball. Algorithms here evaluate against an access object
(a View or the whole graph); running on views is the faithful mode, running on
the whole graph with a shared cache is the fast mode used at scale.
"""
from __future__ import annotations

import csv
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .graph import GlobalAccess, PortGraph, ball
from .lcl import LclSpec, Verdict, check_global


class DuplicateIds(ValueError):
    pass


class ViewAlgorithm:
    """Base class. Subclasses implement ``round_bound`` and ``output``."""

    name = "alg"
    needs_ids = False
    needs_bits = False

    def round_bound(self, n: int, delta: int) -> int:
        raise NotImplementedError

    def output(self, acc, v: int, cache: dict):
        """Label of v computed from acc; must only look within round_bound of v."""
        raise NotImplementedError

    def decide(self, view):
        return self.output(view, 0, {})


class ConstantAlgorithm(ViewAlgorithm):
    def __init__(self, label, name: str = "const"):
        self.label = label
        self.name = name

    def round_bound(self, n, delta):
        return 0

    def output(self, acc, v, cache):
        return self.label


class RandomLabelAlgorithm(ViewAlgorithm):
    """Zero-round uniform random choice from an alphabet."""

    needs_bits = True

    def __init__(self, alphabet: Sequence, name: str = "uniform"):
        self.alphabet = tuple(alphabet)
        self.name = name

    def round_bound(self, n, delta):
        return 0

    def output(self, acc, v, cache):
        return self.alphabet[acc.rand(v, 0) % len(self.alphabet)]


@dataclass
class RunReport:
    labeling: list
    rounds: int
    verdict: Verdict
    fail: list[bool]
    seed: int | None
    advertised_n: int
    graph: str = "g"
    spec: str = ""
    alg: str = ""
    n: int = 0
    delta: int = 0
    radius_touched: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def outcome(self) -> str:
        return self.verdict.status

    def csv_row(self) -> list:
        return [self.graph, self.n, self.delta, self.spec, self.alg,
                "" if self.seed is None else self.seed, self.rounds, self.outcome,
                int(any(self.fail))]


CSV_HEADER = ["graph", "n", "Δ", "spec", "alg", "seed", "rounds", "outcome", "fail_local_max"]


def reports_csv(reports: Sequence[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def default_ids(n: int, seed: int = 0) -> list[int]:
    """Distinct ids drawn from [1, n^3]."""
    return random.Random(seed).sample(range(1, max(n, 2) ** 3 + 1), n)


def _eval_views(args):
    g, alg, vs, t, ids, n, seed = args
    out = []
    touched = 0
    for v in vs:
        view = ball(g, v, t, ids=ids, n=n, seed=seed)
        out.append(alg.decide(view))
        touched = max(touched, view.touched)
    return out, touched


def _evaluate(g: PortGraph, alg: ViewAlgorithm, ids, n_adv: int, seed, mode: str,
              workers: int | None) -> tuple[list, int | None]:
    t = alg.round_bound(n_adv, g.delta)
    if mode == "global":
        acc = GlobalAccess(g, ids=ids, n=n_adv, seed=seed)
        cache: dict = {}
        return [alg.output(acc, v, cache) for v in range(g.n)], None
    if mode != "view":
        raise ValueError(f"unknown mode {mode!r}")
    if not workers or workers <= 1 or g.n < 2:
        out, touched = _eval_views((g, alg, range(g.n), t, ids, n_adv, seed))
        return out, touched
    chunks = [list(range(i, g.n, workers)) for i in range(workers)]
    labels: list = [None] * g.n
    touched = 0
    with ProcessPoolExecutor(workers) as ex:
        for vs, (out, tch) in zip(chunks, ex.map(_eval_views, [(g, alg, c, t, ids, n_adv, seed) for c in chunks])):
            for v, x in zip(vs, out):
                labels[v] = x
            touched = max(touched, tch)
    return labels, touched


def _report(g, spec, alg, labels, n_adv, seed, touched, graph_name) -> RunReport:
    verdict = check_global(spec, g, labels)
    fail = [False] * g.n
    if verdict.status == "illegal":
        acc = GlobalAccess(g)
        cache: dict = {}
        fail = [not spec.verifier(acc, labels.__getitem__, v, cache) for v in range(g.n)]
    return RunReport(labels, alg.round_bound(n_adv, g.delta), verdict, fail, seed, n_adv,
                     graph=graph_name, spec=spec.name, alg=alg.name, n=g.n, delta=g.delta,
                     radius_touched=touched)


def run_det(g: PortGraph, spec: LclSpec, alg: ViewAlgorithm, ids: Sequence[int] | None = None,
            id_seed: int = 0, mode: str = "view", workers: int | None = None,
            advertised_n: int | None = None, id_exponent: int = 3, graph_name: str = "g") -> RunReport:
    if ids is None:
        ids = default_ids(g.n, id_seed)
    ids = list(ids)
    if len(ids) != g.n:
        raise ValueError("need one id per vertex")
    if len(set(ids)) != len(ids):
        raise DuplicateIds("identifiers must be distinct")
    bound = max(g.n, 2) ** id_exponent
    if any(not 0 <= i <= bound for i in ids):
        raise ValueError(f"identifiers must lie in [0, n^{id_exponent}]")
    n_adv = g.n if advertised_n is None else advertised_n
    labels, touched = _evaluate(g, alg, ids, n_adv, None, mode, workers)
    return _report(g, spec, alg, labels, n_adv, None, touched, graph_name)


def run_rand(g: PortGraph, spec: LclSpec, alg: ViewAlgorithm, seed: int = 0,
             advertised_n: int | None = None, mode: str = "view", workers: int | None = None,
             graph_name: str = "g") -> RunReport:
    n_adv = g.n if advertised_n is None else advertised_n
    labels, touched = _evaluate(g, alg, None, n_adv, seed, mode, workers)
    return _report(g, spec, alg, labels, n_adv, seed, touched, graph_name)


@dataclass
class FailureEstimate:
    trials: int
    global_rate: float
    local_max: float

    def stderr(self, p: float | None = None) -> float:
        p = self.global_rate if p is None else p
        return math.sqrt(p * (1 - p) / self.trials)


def estimate_failure(g: PortGraph, spec: LclSpec, alg: ViewAlgorithm, trials: int,
                     seed: int = 0, advertised_n: int | None = None, mode: str = "global") -> FailureEstimate:
    if trials < 1:
        raise ValueError("trials >= 1")
    bad = 0
    local = [0] * g.n
    for s in range(seed, seed + trials):
        rep = run_rand(g, spec, alg, seed=s, advertised_n=advertised_n, mode=mode)
        if not rep.verdict.legal:
            bad += 1
        for v, f in enumerate(rep.fail):
            local[v] += f
    return FailureEstimate(trials, bad / trials, max(local, default=0) / trials)
