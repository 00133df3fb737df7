"""Constant-round ℓ-orientation of port-numbered cycles.

Orientation of v = the port v points through. Two neighbors are aligned when
exactly one points at the other; a run is a maximal aligned stretch.
"""
from __future__ import annotations

from ..sim import ViewAlgorithm


def _next(acc, u: int, p: int) -> tuple[int, int]:
    """Neighbor behind port p of u and the port leading onward past it."""
    w, q = acc.ports(u)[p - 1]
    return w, 3 - q


class _Orienter:
    def __init__(self, acc):
        self.acc = acc
        self.memo: dict[tuple[int, int], int] = {}

    def points_at(self, k: int, u: int, p: int) -> bool:
        """Does u point through port p under the stage-k orientation?"""
        return self.get(k, u) == p

    def aligned(self, k: int, u: int, p: int) -> bool:
        """Is u aligned with its neighbor behind port p?"""
        w, q = self.acc.ports(u)[p - 1]
        return (self.get(k, u) == p) != (self.get(k, w) == q)

    def get(self, k: int, u: int) -> int:
        key = (k, u)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._compute(k, u)
        return hit

    def _compute(self, k: int, u: int) -> int:
        if k <= 1:
            return 1
        if k == 2:
            return self._two(u)
        return self._double(k, u)

    # base case: runs of at least 2
    def _in_v1(self, u: int) -> bool:
        return self.aligned(1, u, 1) or self.aligned(1, u, 2)

    def _toward_each_other(self, k: int, u: int, p: int) -> bool:
        w, q = self.acc.ports(u)[p - 1]
        return self.get(k, u) == p and self.get(k, w) == q

    def _two(self, u: int) -> int:
        o = self.get(1, u)
        if self._in_v1(u):
            return o
        w, q = self.acc.ports(u)[o - 1]
        if not self._in_v1(w) and self._toward_each_other(1, u, o):
            # paired with w: the endpoint with the larger id turns around
            return 3 - o if self.acc.ident(u) > self.acc.ident(w) else o
        # V_3: copy the direction of the lower-id aligned neighbor
        cands = []
        for p in (1, 2):
            w, q = self.acc.ports(u)[p - 1]
            if self._in_v1(w):
                cands.append((self.acc.ident(w), p, w, q))
        _, p, w, q = min(cands)
        return 3 - p if self.get(1, w) == q else p

    # doubling step: runs of at least ceil(k/2) grow to at least k
    def _run_end(self, h: int, u: int, p: int, limit: int) -> tuple[int, int, int]:
        """Walk from u through port p while aligned; returns (steps, last vertex, port out of it)."""
        steps, cur, port = 0, u, p
        while steps < limit and self.aligned(h, cur, port):
            cur, port = _next(self.acc, cur, port)
            steps += 1
        return steps, cur, port

    def _double(self, k: int, u: int) -> int:
        h = (k + 1) // 2
        o = self.get(h, u)
        back, _, _ = self._run_end(h, u, 3 - o, k)
        ahead, head, hp = self._run_end(h, u, o, k)
        if back + ahead + 1 >= k:
            return o  # long run (or the whole cycle) stays
        # short run: its head points at the head of the next run, which points back
        nxt, nport = self.acc.ports(head)[hp - 1]
        far, _, _ = self._run_end(h, nxt, 3 - nport, k)
        if far + 1 >= k:
            return 3 - o  # join the long run ahead
        # two short runs facing each other: the one whose head has the larger id turns
        return 3 - o if self.acc.ident(head) > self.acc.ident(nxt) else o


def _uniform_small(acc, u: int, ell: int) -> int | None:
    """If the cycle has at most ell vertices, orient it uniformly from its min-id vertex."""
    cyc, cur, port = [u], u, 1
    for _ in range(ell):
        cur, port = _next(acc, cur, port)
        if cur == u:
            break
        cyc.append(cur)
    else:
        return None
    m = min(cyc, key=acc.ident)
    cur, port = m, 1
    while cur != u:
        cur, port = _next(acc, cur, port)
    return port


class OrientCycle(ViewAlgorithm):
    """A_ℓ; its round bound depends on ℓ only."""

    needs_ids = True

    def __init__(self, ell: int):
        if ell < 1:
            raise ValueError("ell >= 1")
        self.ell = ell
        self.name = f"orient:{ell}"

    @staticmethod
    def stage_radius(k: int) -> int:
        if k <= 1:
            return 0
        if k == 2:
            return 3
        return OrientCycle.stage_radius((k + 1) // 2) + 2 * k + 2

    def round_bound(self, n: int, delta: int) -> int:
        return max(self.stage_radius(self.ell), self.ell // 2 + 1)

    def output(self, acc, v: int, cache: dict):
        small = cache.setdefault("small", {})
        if v not in small:
            small[v] = _uniform_small(acc, v, self.ell)
        if small[v] is not None:
            return small[v]
        ori = cache.get("orient")
        if ori is None:
            ori = cache["orient"] = _Orienter(acc)
        return ori.get(self.ell, v)


def orient_cycle(ell: int) -> OrientCycle:
    return OrientCycle(ell)
