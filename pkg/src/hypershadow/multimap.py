"""Multiple mappings F = {f1, ..., fm} acting set-valuedly on a finite space."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from .space import CompactSet, FiniteMetricSpace, SetLike, as_mask


@dataclass(frozen=True)
class MultiMap:
    """``m >= 1`` total point maps on ``space``, each stored as an index table."""

    space: FiniteMetricSpace = field(repr=False)
    maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        maps = tuple(tuple(int(v) for v in table) for table in self.maps)
        if not maps:
            raise ValueError("a MultiMap needs at least one map")
        n = self.space.size
        for k, table in enumerate(maps):
            if len(table) != n:
                raise ValueError(f"map {k} has {len(table)} entries, space has {n} points")
            for i, v in enumerate(table):
                if not 0 <= v < n:
                    raise ValueError(f"map {k} sends point {i} to index {v}, out of range")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "_image_cache", {})

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def size(self) -> int:
        return self.space.size

    @cached_property
    def point_images(self) -> tuple[int, ...]:
        """Mask of F(x) = {f1(x), ..., fm(x)} for every point x."""
        out = []
        for i in range(self.size):
            mask = 0
            for table in self.maps:
                mask |= 1 << table[i]
            out.append(mask)
        return tuple(out)

    def image_mask(self, mask: int) -> int:
        cache = self._image_cache
        out = cache.get(mask)
        if out is None:
            out = 0
            pim = self.point_images
            i = 0
            m = mask
            while m:
                if m & 1:
                    out |= pim[i]
                m >>= 1
                i += 1
            cache[mask] = out
        return out

    def component(self, k: int) -> "MultiMap":
        """The single map ``f_k`` as an m=1 system."""
        return MultiMap(self.space, (self.maps[k],))


@dataclass(frozen=True)
class OrbitTrace:
    """``sets[0..transient+period-1]`` are distinct; ``sets[transient+period] == sets[transient]``."""

    sets: tuple[CompactSet, ...]
    transient: int
    period: int

    def at(self, n: int) -> CompactSet:
        return self.sets[self.index(n)]

    def index(self, n: int) -> int:
        if n < self.transient:
            return n
        return self.transient + (n - self.transient) % self.period


def image(F: MultiMap, A: SetLike) -> CompactSet:
    mask = as_mask(A)
    if not mask:
        raise ValueError("image of the empty set is undefined")
    return CompactSet.from_mask(F.image_mask(mask))


def power_image(F: MultiMap, x: int, n: int) -> CompactSet:
    """F^n(x); F^0(x) is {x}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    mask = 1 << x
    for _ in range(n):
        mask = F.image_mask(mask)
    return CompactSet.from_mask(mask)


def power_image_by_words(F: MultiMap, x: int, n: int) -> CompactSet:
    """F^n(x) from all m**n compositions f_{i1} ... f_{in}; exponential, for cross-checks."""
    out = set()
    for word in product(F.maps, repeat=n):
        y = x
        for table in reversed(word):
            y = table[y]
        out.add(y)
    return CompactSet.of(out)


def orbit_masks(F: MultiMap, start: int) -> tuple[list[int], int, int]:
    seen: dict[int, int] = {}
    sets: list[int] = []
    mask = start
    while mask not in seen:
        seen[mask] = len(sets)
        sets.append(mask)
        mask = F.image_mask(mask)
    t = seen[mask]
    return sets, t, len(sets) - t


def orbit(F: MultiMap, A0: SetLike) -> OrbitTrace:
    start = as_mask(A0)
    if not start:
        raise ValueError("orbit needs a nonempty starting set")
    sets, t, p = orbit_masks(F, start)
    return OrbitTrace(tuple(CompactSet.from_mask(s) for s in sets), t, p)


def compose_power(F: MultiMap, k: int) -> MultiMap:
    """F^k as a multiple mapping: every composition of k component maps, deduplicated."""
    if k < 1:
        raise ValueError("k must be >= 1")
    tables = {tuple(range(F.size))}
    for _ in range(k):
        tables = {tuple(f[v] for v in t) for t in tables for f in F.maps}
    return MultiMap(F.space, tuple(sorted(tables)))


def ran_witnesses(F: MultiMap) -> dict[int, tuple[int, int]]:
    """Each mask in Ran(F) mapped to the first (x, n >= 1) with F^n(x) equal to it."""
    found: dict[int, tuple[int, int]] = {}
    for x in range(F.size):
        sets, t, p = orbit_masks(F, 1 << x)
        for n, s in enumerate(sets[1:], start=1):
            found.setdefault(s, (x, n))
        # sets[t] recurs at n = t + p >= 1 even when t == 0
        found.setdefault(sets[t], (x, t + p))
    return found


def ran(F: MultiMap) -> list[CompactSet]:
    """Ran(F) = {F^n(x) : n >= 1, x in X}, sorted by (size, members)."""
    return sorted((CompactSet.from_mask(s) for s in ran_witnesses(F)), key=lambda A: (len(A), A.members))


def ran_masks(F: MultiMap) -> list[int]:
    """Ran(F) as masks in discovery order (orbit of point 0 first, then 1, ...)."""
    return list(ran_witnesses(F))


def const_table(n: int, c: int) -> tuple[int, ...]:
    return (c,) * n


def permutation_table(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(perm)
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"not a permutation: {perm}")
    return perm


def identity(space: FiniteMetricSpace) -> MultiMap:
    return MultiMap(space, (tuple(range(space.size)),))


def tent_table(N: int) -> tuple[int, ...]:
    """Tent map 2x / 2-2x on the grid i/N, as an index table."""
    return tuple(2 * i if 2 * i <= N else 2 * N - 2 * i for i in range(N + 1))


def zero_table(N: int) -> tuple[int, ...]:
    return (0,) * (N + 1)
