"""Transitivity, weak mixing and mixing of F on a finite space.

A finite metric space carries the discrete topology, and so does Ran(F) under
d_H.  The open-set quantifiers therefore reduce to single points u and single
range elements A, and each condition becomes a statement about the set of
times n >= 1 with F^n(u) = A.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .multimap import MultiMap, orbit_masks, ran_masks
from .space import CompactSet, SetLike, as_mask
from .verdict import Verdict


@dataclass(frozen=True)
class HitTimes:
    """Times n >= 1 with F^n(u) = A.

    ``pre`` lists hits below ``transient``; ``periodic`` lists offsets o with
    F^(transient + o)(u) = A, each repeating with ``period``.
    """

    transient: int
    period: int
    pre: tuple[int, ...]
    periodic: tuple[int, ...]

    def __contains__(self, n: int) -> bool:
        if n < 1:
            return False
        if n < self.transient:
            return n in self.pre
        return (n - self.transient) % self.period in self.periodic

    def is_empty(self) -> bool:
        return not self.pre and not self.periodic

    def is_cofinite(self) -> bool:
        return len(self.periodic) == self.period

    def upto(self, limit: int) -> list[int]:
        return [n for n in range(1, limit + 1) if n in self]


def _hits(sets: list[int], t: int, p: int, target: int) -> HitTimes:
    pre = tuple(n for n in range(1, t) if sets[n] == target)
    periodic = tuple(o for o in range(p) if sets[t + o] == target)
    return HitTimes(t, p, pre, periodic)


def hit_times(F: MultiMap, u: int, A: SetLike) -> HitTimes:
    sets, t, p = orbit_masks(F, 1 << u)
    return _hits(sets, t, p, as_mask(A))


def _all_hits(F: MultiMap):
    targets = ran_masks(F)
    orbits = [orbit_masks(F, 1 << u) for u in range(F.size)]
    table = {}
    for u, (sets, t, p) in enumerate(orbits):
        for A in targets:
            table[u, A] = _hits(sets, t, p, A)
    return targets, orbits, table


def is_transitive(F: MultiMap) -> Verdict:
    """Every point's orbit visits every element of Ran(F) at some n >= 1."""
    targets, _, table = _all_hits(F)
    for u in range(F.size):
        for A in targets:
            if table[u, A].is_empty():
                return Verdict(False, {"u": u, "A": CompactSet.from_mask(A)})
    return Verdict(True)


def is_weakly_mixing(F: MultiMap) -> Verdict:
    """Any two (point, range element) pairs are hit at a common time n >= 1."""
    targets, orbits, table = _all_hits(F)
    for (u, A), h in table.items():
        if h.is_empty():
            return Verdict(False, {"u": u, "A": CompactSet.from_mask(A), "v": u, "B": CompactSet.from_mask(A)})
    # past max transient every hit pattern repeats with the lcm of the periods
    horizon = max(t for _, t, _ in orbits) + lcm(*(p for _, _, p in orbits))
    patterns: dict[int, tuple[int, int]] = {}
    for key, h in table.items():
        word = 0
        for n in range(1, horizon + 1):
            if n in h:
                word |= 1 << n
        patterns.setdefault(word, key)
    words = list(patterns)
    for i, w1 in enumerate(words):
        for w2 in words[i:]:
            if not w1 & w2:
                (u, A), (v, B) = patterns[w1], patterns[w2]
                return Verdict(False, {
                    "u": u, "A": CompactSet.from_mask(A),
                    "v": v, "B": CompactSet.from_mask(B), "horizon": horizon,
                })
    return Verdict(True, {"horizon": horizon})


def is_mixing(F: MultiMap) -> Verdict:
    """Every pair (u, A) is hit at all large n.

    Orbits are deterministic, so this forces Ran(F) to be a single set that
    every orbit ends up fixed at; the witness reports that structure.
    """
    targets, orbits, table = _all_hits(F)
    tails = {u: CompactSet.from_mask(sets[t]) if p == 1 else None for u, (sets, t, p) in enumerate(orbits)}
    for u in range(F.size):
        for A in targets:
            if not table[u, A].is_cofinite():
                return Verdict(False, {
                    "u": u, "A": CompactSet.from_mask(A),
                    "range_size": len(targets), "tail_period": orbits[u][2],
                })
    return Verdict(True, {"fixed_tail": tails[0], "range_size": len(targets)})
