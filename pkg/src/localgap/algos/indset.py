"""(α,β)-independent sets on paths via deterministic color reduction.

Members are an MIS of the α-th power of the path, restricted to vertices at least
α away from both endpoints. Consecutive members are then α+1..2α+1 apart, so every
gap holds between α and 2α ≤ β vertices.
"""
from __future__ import annotations

from typing import Sequence


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def _next_prime(q: int) -> int:
    while not _is_prime(q):
        q += 1
    return q


def _poly_eval(c: int, q: int, d: int, x: int) -> int:
    """Evaluate the degree-d polynomial over GF(q) whose coefficients are c's base-q digits."""
    acc = 0
    for _ in range(d + 1):
        acc = (acc * x + c % q) % q
        c //= q
    return acc


def _root_ceil(m: int, e: int) -> int:
    r = max(1, int(round(m ** (1.0 / e))))
    while r ** e < m:
        r += 1
    while r > 1 and (r - 1) ** e >= m:
        r -= 1
    return r


def _linial_step(colors: list[int], nbrs: list[list[int]], m: int, deg: int) -> tuple[list[int], int]:
    """One round of polynomial color reduction: m colors -> q^2 colors."""
    q, d = min(
        (_next_prime(max(deg * d + 1, _root_ceil(m, d + 1))), d) for d in range(1, 41)
    )
    new = []
    for v, c in enumerate(colors):
        others = [colors[u] for u in nbrs[v]]
        for x in range(q):
            y = _poly_eval(c, q, d, x)
            if all(_poly_eval(o, q, d, x) != y for o in others):
                new.append(x * q + y)
                break
        else:  # pragma: no cover - q > deg*d guarantees a free point
            raise RuntimeError("color reduction failed")
    return new, q * q


def color_reduce(ids: Sequence[int], nbrs: list[list[int]], deg: int) -> tuple[list[int], int, int]:
    """Proper (deg+1)-coloring from distinct ids. Returns (colors, palette, rounds)."""
    colors = list(ids)
    m = max(colors, default=0) + 1
    rounds = 0
    while True:
        new, m2 = _linial_step(colors, nbrs, m, deg)
        if m2 >= m:
            break
        colors, m = new, m2
        rounds += 1
    # drop one color class per round down to deg+1
    for c in range(m - 1, deg, -1):
        cls = [v for v, x in enumerate(colors) if x == c]
        if not cls:
            continue
        for v in cls:
            used = {colors[u] for u in nbrs[v]}
            colors[v] = next(x for x in range(deg + 1) if x not in used)
        rounds += 1
    return colors, deg + 1, rounds


def independent_set_path(path: Sequence[int], alpha: int, beta: int,
                         ids: Sequence[int] | None = None, with_rounds: bool = False):
    """(alpha, beta)-independent set of the path given as a vertex sequence.

    ``ids`` (parallel to ``path``) break symmetry; defaults to the vertex names.
    Rounds are counted on the original path (one power-graph round = alpha rounds).
    """
    if alpha < 1:
        raise ValueError("alpha >= 1")
    if beta < 2 * alpha:
        raise ValueError("need beta >= 2*alpha")
    n = len(path)
    ids = list(path) if ids is None else list(ids)
    cand = list(range(alpha, n - alpha))
    if not cand:
        return (frozenset(), 0) if with_rounds else frozenset()
    pos = {p: j for j, p in enumerate(cand)}
    nbrs = [[pos[p + o] for o in range(-alpha, alpha + 1) if o and (p + o) in pos] for p in cand]
    colors, palette, rounds = color_reduce([ids[p] for p in cand], nbrs, 2 * alpha)
    inset = [False] * len(cand)
    blocked = [False] * len(cand)
    for c in range(palette):
        for j, x in enumerate(colors):
            if x == c and not blocked[j]:
                inset[j] = True
                for u in nbrs[j]:
                    blocked[u] = True
        rounds += 1
    chosen = frozenset(path[cand[j]] for j in range(len(cand)) if inset[j])
    return (chosen, rounds * alpha) if with_rounds else chosen


def check_independent_set(path: Sequence[int], chosen, alpha: int, beta: int) -> list[str]:
    errs = []
    n = len(path)
    if n < alpha:
        return [] if not chosen else ["short path must get the empty set"]
    idx = [j for j, v in enumerate(path) if v in chosen]
    if idx and (idx[0] == 0 or idx[-1] == n - 1):
        errs.append("endpoint chosen")
    if any(b - a == 1 for a, b in zip(idx, idx[1:])):
        errs.append("not independent")
    bounds = [-1] + idx + [n]
    for a, b in zip(bounds, bounds[1:]):
        size = b - a - 1
        if not alpha <= size <= beta:
            errs.append(f"component of size {size}")
    return errs
