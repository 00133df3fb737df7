"""Command-line front end: graph generation, single runs, decompositions, resampling,
tree decidability and scaling sweeps.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import statistics
import sys
from dataclasses import dataclass
from typing import Sequence

from . import graph as G
from .algos.coloring import GreedyColoring
from .algos.decompose import NotATree, check_decomposition, rc_decompose
from .algos.hier import solve_hier
from .algos.orient import OrientCycle
from .algos.sinkless import SinklessGuess
from .lcl import UnknownSpec, builtin, check_global, dump_labeling
from .lll import mt_resample, orientation_labels, sinkless_events
from .sim import ConstantAlgorithm, RandomLabelAlgorithm, run_det, run_rand

OK, FAIL, USAGE, CAP = 0, 1, 2, 3

EXPERIMENT_HEADER = ["family", "n", "Δ", "spec", "alg", "seed", "rounds", "outcome"]


class UsageError(ValueError):
    pass


# helpers

def parse_range(text: str) -> list[int]:
    """'4..32' (inclusive), '4..32:4' (step) or '10,20,40'."""
    try:
        if ".." in text:
            lo, rest = text.split("..", 1)
            hi, _, step = rest.partition(":")
            vals = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            vals = [int(x) for x in text.split(",") if x]
    except ValueError as err:
        raise UsageError(f"bad range {text!r}") from err
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError(f"range {text!r} must be non-empty and strictly increasing")
    return vals


def make_graph(family: str, size: int, k: int = 1, delta: int = 3, seed: int = 0) -> G.PortGraph:
    if family == "hk":
        return G.gen_hk(k, size)
    if family == "tree":
        return G.gen_random_tree(size, delta, seed)
    if family == "regular":
        return G.gen_random_regular(size, delta, seed)
    if family == "ring":
        return G.gen_ring(size)
    if family == "path":
        return G.gen_path(size)
    if family == "star":
        return G.gen_star(size)
    raise UsageError(f"unknown family {family!r}")


def make_spec(name: str):
    try:
        return builtin(name)
    except (UnknownSpec, ValueError) as err:
        raise UsageError(f"unknown spec {name!r}") from err


def make_alg(name: str, spec):
    head, _, arg = name.partition(":")
    if head == "hier":
        k = int(arg) if arg else int(spec.name.split(":")[1]) if spec.name.startswith("hier:") else 1
        return solve_hier(k)
    if head == "const":
        return ConstantAlgorithm(spec.parse_label(arg) if arg else spec.sigma_out[0])
    if head == "uniform":
        return RandomLabelAlgorithm(spec.sigma_out)
    if head == "greedy":
        return GreedyColoring(int(arg) if arg else len(spec.sigma_out))
    if head == "orient":
        return OrientCycle(int(arg) if arg else 2)
    if head == "sinkless-guess":
        return SinklessGuess()
    raise UsageError(f"unknown algorithm {name!r}")


def run_alg(g, spec, alg, seed: int):
    if getattr(alg, "needs_ids", False):
        return run_det(g, spec, alg, id_seed=seed, mode="global")
    return run_rand(g, spec, alg, seed=seed, mode="global")


@dataclass
class Fit:
    slope: float
    intercept: float
    residual: float  # root mean square residual in log space
    points: int


def fit_loglog(ns: Sequence[float], rounds: Sequence[float]) -> Fit:
    """Least squares of log(rounds) on log(n); zero-round points are dropped."""
    pts = [(math.log(n), math.log(r)) for n, r in zip(ns, rounds) if n > 0 and r > 0]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise ValueError("need at least two distinct sizes with positive rounds")
    xs, ys = zip(*pts)
    slope, intercept = statistics.linear_regression(xs, ys)
    res = math.sqrt(sum((y - slope * x - intercept) ** 2 for x, y in pts) / len(pts))
    return Fit(slope, intercept, res, len(pts))


def experiment_rows(spec_name: str, family: str, sizes: Sequence[int], alg_name: str,
                    seeds: Sequence[int], k: int = 1, delta: int = 3) -> list[list]:
    spec = make_spec(spec_name)
    if family == "hk" and spec.name.startswith("hier:"):
        k = int(spec.name.split(":")[1])
    rows = []
    synth = None
    if alg_name == "synth":
        from .trees import search_feasible
        synth = search_feasible(spec, delta)
        if synth.outcome != "feasible":
            raise UsageError(f"no feasible rule for {spec.name} (outcome {synth.outcome})")
    for size in sizes:
        for seed in seeds:
            g = make_graph(family, size, k=k, delta=delta, seed=seed)
            if synth is not None:
                from .trees import synthesize_run
                res = synthesize_run(spec, synth, g)
                rounds, outcome = res.rounds, res.verdict.status
            else:
                rep = run_alg(g, spec, make_alg(alg_name, spec), seed)
                rounds, outcome = rep.rounds, rep.outcome
            rows.append([family, g.n, g.max_degree(), spec.name, alg_name, seed, rounds, outcome])
    rows.sort(key=lambda r: (r[1], r[5]))
    return rows


def rows_csv(rows: Sequence[Sequence], fit: Fit | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPERIMENT_HEADER)
    w.writerows(rows)
    if fit is not None:
        buf.write(f"# slope={fit.slope:.4f} intercept={fit.intercept:.4f} residual={fit.residual:.4f} "
                  f"points={fit.points}\n")
    return buf.getvalue()


# subcommands

def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_graph(path: str) -> G.PortGraph:
    try:
        with open(path) as fh:
            return G.PortGraph.from_text(fh.read())
    except OSError as err:
        raise UsageError(str(err)) from err


def cmd_gen(a) -> int:
    size = a.x if a.family == "hk" else a.n
    if size is None:
        raise UsageError("--x is required for hk, --n for the other families")
    g = make_graph(a.family, size, k=a.k, delta=a.delta, seed=a.seed)
    _write(a.output, g.to_text())
    print(f"{g.n} vertices", file=sys.stderr)
    return OK


def cmd_run(a) -> int:
    g = _read_graph(a.graph)
    spec = make_spec(a.spec)
    rep = run_alg(g, spec, make_alg(a.alg, spec), a.seed)
    verdict = check_global(spec, g, rep.labeling)
    print(f"spec={spec.name} alg={rep.alg} n={g.n} rounds={rep.rounds} outcome={verdict.status}")
    if a.labels:
        _write(a.labels, dump_labeling(rep.labeling))
    return OK if verdict.legal else FAIL


def cmd_decompose(a) -> int:
    g = _read_graph(a.graph)
    try:
        dec = rc_decompose(g, a.ell)
    except (NotATree, ValueError) as err:
        raise UsageError(str(err)) from err
    _write(a.output, dec.dump())
    errs = check_decomposition(g, dec)
    print(f"L={dec.L} iterations={dec.iterations} rounds={dec.rounds} violations={len(errs)}", file=sys.stderr)
    for e in errs:
        print(e, file=sys.stderr)
    return FAIL if errs else OK


def cmd_lll(a) -> int:
    g = _read_graph(a.graph)
    events = sinkless_events(g)
    res = mt_resample(events, seed=a.seed, cap=a.cap)
    print(f"n={g.n} events={len(events.events)} iterations={res.iterations} outcome={res.outcome}")
    if not res.ok:
        return CAP
    labels = orientation_labels(g, events.edges, res.assignment)
    verdict = check_global(builtin("sinkless-orientation", max(g.max_degree(), 1)), g, labels)
    if a.labels:
        _write(a.labels, dump_labeling(labels))
    return OK if verdict.legal else FAIL


def cmd_decide(a) -> int:
    from .trees import TreeSpecError, search_feasible
    spec = make_spec(a.spec)
    try:
        res = search_feasible(spec, a.delta, a.w, time_limit=a.time_limit, max_builds=a.max_builds)
    except TreeSpecError as err:
        raise UsageError(str(err)) from err
    print(res.complexity)
    if a.dump and res.state is not None:
        _write(a.dump, res.state.dump(res.engine))
    return CAP if res.outcome == "cap" else OK


def cmd_experiment(a) -> int:
    sizes = parse_range(a.x)
    seeds = parse_range(a.seeds)
    rows = experiment_rows(a.spec, a.family, sizes, a.alg, seeds, k=a.k, delta=a.delta)
    try:
        fit = fit_loglog([r[1] for r in rows], [r[6] for r in rows])
    except ValueError:
        fit = None
    _write(a.output, rows_csv(rows, fit))
    return OK if all(r[7] == "legal" for r in rows) else FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localgap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("gen", help="generate a graph file")
    s.add_argument("family", choices=["hk", "tree", "regular", "ring", "path", "star"])
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--x", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--delta", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("run", help="run an algorithm and verify its output")
    s.add_argument("--graph", required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--alg", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--labels")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("decompose", help="rake/compress decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--ell", type=int, default=4)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("lll", help="sinkless orientation by resampling")
    s.add_argument("--graph", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int)
    s.add_argument("--labels")
    s.set_defaults(func=cmd_lll)

    s = sub.add_parser("decide", help="complexity of an LCL on bounded-degree trees")
    s.add_argument("--spec", required=True)
    s.add_argument("--delta", type=int, default=3)
    s.add_argument("--w", type=int)
    s.add_argument("--time-limit", type=float, default=600.0)
    s.add_argument("--max-builds", type=int, default=5000)
    s.add_argument("--dump")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("experiment", help="size sweep to CSV with a fitted log-log slope")
    s.add_argument("--spec", required=True)
    s.add_argument("--family", required=True, choices=["hk", "tree", "regular", "ring", "path", "star"])
    s.add_argument("--x", required=True, help="sizes: a..b, a..b:step or a,b,c")
    s.add_argument("--alg", required=True)
    s.add_argument("--seeds", default="0")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--delta", type=int, default=3)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.func(a)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
