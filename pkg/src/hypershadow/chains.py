"""delta-pseudo-orbit graphs on the hyperspace and chain properties.

Nodes are the nonempty subsets of X (as bitmasks).  There is an edge A -> B
when d_H(F(A), B) <= delta.  Since d_H only takes finitely many values, the
"for every delta > 0" quantifier is decided on the delta = 0 graph: for
0 < delta < (smallest positive distance) the edge relation is the same.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .multimap import MultiMap, ran_masks
from .space import CompactSet, SetLike, as_mask, rational
from .verdict import Verdict

DEFAULT_NODE_CAP = 12


class SpaceTooLarge(ValueError):
    """The hyperspace is too large for an exhaustive decision procedure."""


def node_cap() -> int:
    """Largest |X| for which the full hyperspace is explored (env HYPERSPACE_NODE_CAP)."""
    value = os.environ.get("HYPERSPACE_NODE_CAP")
    return int(value) if value else DEFAULT_NODE_CAP


def require_cap(F: MultiMap):
    cap = node_cap()
    if F.size > cap:
        raise SpaceTooLarge(
            f"|X| = {F.size} exceeds the hyperspace cap of {cap} points "
            f"({2**F.size - 1} nodes); use the targeted generators (e.g. the tent check) "
            "or raise HYPERSPACE_NODE_CAP"
        )


def iter_bits(bitset: int):
    """Yield the positions of the set bits of an arbitrary-size int."""
    while bitset:
        low = bitset & -bitset
        yield low.bit_length() - 1
        bitset ^= low


class HyperGraph:
    """The delta-edge relation over all nonempty subsets of X.

    Successor lists are computed on demand and shared between nodes with the
    same image.  Bitsets over nodes use bit position == node mask.
    """

    def __init__(self, F: MultiMap, delta):
        require_cap(F)
        self.F = F
        self.delta = rational(delta)
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        self._balls = F.space.ball(self.delta)
        self._succ: dict[int, tuple[int, ...]] = {}
        self._succ_bits: dict[int, int] = {}

    @property
    def nodes(self) -> range:
        return range(1, 1 << self.F.size)

    def _successors_of_image(self, C: int) -> tuple[int, ...]:
        out = self._succ.get(C)
        if out is None:
            balls = self._balls
            centers = [i for i in range(self.F.size) if C >> i & 1]
            near = 0
            for c in centers:
                near |= balls[c]
            need = [balls[c] & near for c in centers]
            found = []
            B = near
            while B:
                if all(B & r for r in need):
                    found.append(B)
                B = (B - 1) & near
            out = tuple(reversed(found))
            self._succ[C] = out
        return out

    def successors(self, A: int) -> tuple[int, ...]:
        """Masks B with d_H(F(A), B) <= delta, ascending."""
        return self._successors_of_image(self.F.image_mask(A))

    def succ_bits(self, A: int) -> int:
        C = self.F.image_mask(A)
        out = self._succ_bits.get(C)
        if out is None:
            out = 0
            for B in self._successors_of_image(C):
                out |= 1 << B
            self._succ_bits[C] = out
        return out

    def has_edge(self, A: int, B: int) -> bool:
        return bool(self.succ_bits(A) >> B & 1)

    def step(self, layer: int) -> int:
        """Union of the successors of every node in a node bitset."""
        out = 0
        for A in iter_bits(layer):
            out |= self.succ_bits(A)
        return out

    def reachable(self, start: int) -> int:
        """Bitset of nodes reachable from ``start`` by chains of length >= 0."""
        seen = 1 << start
        frontier = seen
        while frontier:
            nxt = self.step(frontier) & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    def predecessors(self) -> dict[int, list[int]]:
        pred: dict[int, list[int]] = {B: [] for B in self.nodes}
        for A in self.nodes:
            for B in self.successors(A):
                pred[B].append(A)
        return pred


def build_hypergraph(F: MultiMap, delta) -> HyperGraph:
    """The full delta-graph; every node's successor list is materialized."""
    graph = HyperGraph(F, delta)
    for A in graph.nodes:
        graph.successors(A)
    return graph


@dataclass(frozen=True)
class Chain:
    """A finite delta-pseudo-orbit starting at a singleton; length counts F-steps."""

    sets: tuple[CompactSet, ...]
    delta: Fraction

    @property
    def length(self) -> int:
        return len(self.sets) - 1

    def validate(self, F: MultiMap) -> None:
        if len(self.sets[0]) != 1:
            raise ValueError("a chain must start at a singleton")
        X = F.space
        for i, (A, B) in enumerate(zip(self.sets, self.sets[1:])):
            d = X.hausdorff_masks(F.image_mask(A.mask), B.mask)
            if d > self.delta:
                raise ValueError(f"step {i}: d_H(F(A), B) = {d} exceeds delta = {self.delta}")


def find_chain(F: MultiMap, delta, x: int, A: SetLike) -> Chain | None:
    """Shortest delta-chain from {x} to A (BFS), or None."""
    graph = HyperGraph(F, delta)
    start, target = 1 << x, as_mask(A)
    if not target:
        raise ValueError("target set must be nonempty")
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == target:
            path = []
            while node is not None:
                path.append(CompactSet.from_mask(node))
                node = parent[node]
            return Chain(tuple(reversed(path)), graph.delta)
        for nxt in graph.successors(node):
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    return None


def is_chain_transitive_at(F: MultiMap, delta) -> Verdict:
    """delta-chains exist from every x to every A in Ran(F), at this one delta."""
    graph = HyperGraph(F, delta)
    targets = ran_masks(F)
    for x in range(F.size):
        reach = graph.reachable(1 << x)
        for A in targets:
            if not reach >> A & 1:
                return Verdict(False, {"x": x, "A": CompactSet.from_mask(A)})
    return Verdict(True)


def is_chain_transitive(F: MultiMap) -> Verdict:
    """Chain transitivity for every delta > 0, decided on the delta = 0 graph."""
    return is_chain_transitive_at(F, 0)


@dataclass(frozen=True)
class LengthSpectrum:
    """The eventually periodic set of chain lengths from a start to a target.

    ``n`` is achievable iff ``n in prefix`` (for ``n < onset``) or
    ``(n - onset) % period in residues`` (for ``n >= onset``).
    """

    prefix: frozenset[int]
    onset: int
    period: int
    residues: frozenset[int]

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.onset:
            return n in self.prefix
        return (n - self.onset) % self.period in self.residues

    def is_empty(self) -> bool:
        return not self.prefix and not self.residues

    def is_cofinite(self) -> bool:
        return len(self.residues) == self.period

    def lengths(self, upto: int) -> list[int]:
        return [n for n in range(upto + 1) if n in self]

    def missing_residue(self) -> int | None:
        """Some n >= onset that is never achievable modulo period, or None if cofinite."""
        for o in range(self.period):
            if o not in self.residues:
                return self.onset + o
        return None


def _spectrum(graph: HyperGraph, x: int, target: int) -> LengthSpectrum:
    seen: dict[int, int] = {}
    hits: list[bool] = []
    layer = 1 << (1 << x)
    while layer not in seen:
        seen[layer] = len(hits)
        hits.append(bool(layer >> target & 1))
        layer = graph.step(layer)
    onset = seen[layer]
    period = len(hits) - onset
    prefix = frozenset(n for n in range(onset) if hits[n])
    residues = frozenset(o for o in range(period) if hits[onset + o])
    return LengthSpectrum(prefix, onset, period, residues)


def chain_length_spectrum(F: MultiMap, delta, x: int, A: SetLike) -> LengthSpectrum:
    """Exact set of n such that a delta-chain of length n runs from {x} to A.

    The layers (sets of nodes reachable in exactly n steps) live in a finite
    lattice, so their sequence is eventually periodic.
    """
    target = as_mask(A)
    if not target:
        raise ValueError("target set must be nonempty")
    return _spectrum(HyperGraph(F, delta), x, target)


def is_chain_mixing_at(F: MultiMap, delta) -> Verdict:
    graph = HyperGraph(F, delta)
    targets = ran_masks(F)
    for x in range(F.size):
        for A in targets:
            spec = _spectrum(graph, x, A)
            if not spec.is_cofinite():
                return Verdict(False, {
                    "x": x, "A": CompactSet.from_mask(A),
                    "missing": spec.missing_residue(), "period": spec.period,
                })
    return Verdict(True)


def is_chain_mixing(F: MultiMap) -> Verdict:
    """Chain mixing for every delta > 0, decided on the delta = 0 graph.

    On failure the witness names ``(x, A)`` and a length ``missing`` such that
    no chain has length ``missing + k * period`` for any k >= 0.
    """
    return is_chain_mixing_at(F, 0)
