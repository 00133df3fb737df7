"""One-round randomized guesser for sinkless orientation (label = claimed out-port)."""
from __future__ import annotations

from ..sim import ViewAlgorithm


class SinklessGuess(ViewAlgorithm):
    """Every vertex claims a random port; in a mutual claim the higher random rank
    re-claims a port toward a neighbor that did not initially claim it back.
    Fails with constant probability per vertex, independent of n."""

    needs_bits = True
    name = "sinkless-guess"

    def round_bound(self, n: int, delta: int) -> int:
        return 1

    @staticmethod
    def _first(acc, u: int) -> int:
        return 1 + acc.rand(u, 0) % acc.deg(u)

    def output(self, acc, v: int, cache: dict):
        d = acc.deg(v)
        if d == 0:
            return 0
        p = self._first(acc, v)
        ports = acc.ports(v)
        w, q = ports[p - 1]
        if self._first(acc, w) != q:
            return p
        if acc.rand(v, 1) < acc.rand(w, 1):
            return p  # lower rank keeps its claim
        options = [i for i, (u, back) in enumerate(ports, 1) if u != w and self._first(acc, u) != back]
        if not options:
            return p
        return options[acc.rand(v, 2) % len(options)]
