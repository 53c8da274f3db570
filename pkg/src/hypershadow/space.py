"""Finite metric spaces with exact rational distances and their hyperspace.

Subsets of a space are handled internally as bitmasks (bit ``i`` set means
point ``i`` is a member).  :class:`CompactSet` is the public, validated
wrapper used at API boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence, Union

Rational = Fraction

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)


class MetricError(ValueError):
    """Raised when a distance matrix violates a metric axiom."""


def check_int64(q: Fraction) -> Fraction:
    if not (INT64_MIN <= q.numerator <= INT64_MAX and 0 < q.denominator <= INT64_MAX):
        raise OverflowError(f"rational {q} does not fit in 64-bit numerator/denominator")
    return q


def rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into a checked rational.

    Floats are rejected on purpose.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass 'p/q' strings")
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not a rational literal: {value!r}")
        value = Fraction(text)
    return check_int64(Fraction(value))


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True, order=True)
class CompactSet:
    """A nonempty set of point indices, stored strictly increasing."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("CompactSet must be nonempty")
        if any(i < 0 for i in members):
            raise ValueError("point indices must be nonnegative")
        if any(a >= b for a, b in zip(members, members[1:])):
            raise ValueError(f"members must be strictly increasing: {members}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, points: Iterable[int]) -> "CompactSet":
        return cls(tuple(sorted(set(points))))

    @classmethod
    def from_mask(cls, mask: int) -> "CompactSet":
        return cls(tuple(bits(mask)))

    @property
    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, i):
        return i in self.members

    def __repr__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


SetLike = Union[CompactSet, Iterable[int]]


def as_mask(A: Union[SetLike, int]) -> int:
    if isinstance(A, int):
        return A
    if isinstance(A, CompactSet):
        return A.mask
    return CompactSet.of(A).mask


def _scaled(rows) -> tuple[int, list[list[int]]]:
    """Common denominator and the integer matrix ``rows * scale``."""
    scale = 1
    for row in rows:
        for x in row:
            scale = lcm(scale, x.denominator)
    return scale, [[x.numerator * (scale // x.denominator) for x in row] for row in rows]


def validate_metric(matrix: Sequence[Sequence]) -> str | None:
    """Return ``None`` if ``matrix`` is a metric, else a description of the first violation.

    Raises ``ValueError`` for a non-square matrix or a negative entry.
    """
    n = len(matrix)
    rows = []
    for row in matrix:
        if len(row) != n:
            raise ValueError("distance matrix is not square")
        rows.append([Fraction(x) for x in row])
    _, d = _scaled(rows)
    for i in range(n):
        for j in range(n):
            if d[i][j] < 0:
                raise ValueError(f"negative entry at ({i},{j})")
    for i in range(n):
        if d[i][i] != 0:
            return f"zero diagonal at ({i},{i})"
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                return f"symmetry at ({i},{j})"
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] == 0:
                return f"positivity at ({i},{j})"
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    return f"triangle ({i},{j},{k})"
    return None


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        dist = tuple(tuple(rational(x) for x in row) for row in self.dist)
        if not labels:
            raise ValueError("a space needs at least one point")
        if len(dist) != len(labels):
            raise ValueError("distance matrix size does not match the number of labels")
        if len(set(labels)) != len(labels):
            raise ValueError("point labels must be unique")
        problem = validate_metric(dist)
        if problem is not None:
            raise MetricError(problem)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        scale, idist = _scaled(dist)
        object.__setattr__(self, "_scale", scale)
        object.__setattr__(self, "_idist", tuple(tuple(r) for r in idist))

    @classmethod
    def discrete(cls, labels: Iterable) -> "FiniteMetricSpace":
        labels = [str(s) for s in labels]
        n = len(labels)
        return cls(tuple(labels), tuple(tuple(Fraction(int(i != j)) for j in range(n)) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        return self.labels.index(str(label))

    @cached_property
    def distances(self) -> tuple[Fraction, ...]:
        """Distinct positive pairwise distances, ascending."""
        return tuple(sorted({x for row in self.dist for x in row if x > 0}))

    def ball(self, radius: Fraction, strict: bool = False) -> tuple[int, ...]:
        """Per point, the mask of points within ``radius`` (``<`` if strict, else ``<=``)."""
        out = []
        for row in self.dist:
            m = 0
            for j, x in enumerate(row):
                if (x < radius) if strict else (x <= radius):
                    m |= 1 << j
            out.append(m)
        return tuple(out)

    def hausdorff_masks(self, a: int, b: int) -> Fraction:
        if not a or not b:
            raise ValueError("Hausdorff distance needs nonempty sets")
        if a == b:
            return Fraction(0)
        return Fraction(self.hausdorff_scaled(a, b), self._scale)

    def hausdorff_scaled(self, a: int, b: int) -> int:
        """Hausdorff distance times the common denominator of the metric."""
        if a == b:
            return 0
        A, B = bits(a), bits(b)
        d = self._idist
        forward = max(min(d[i][j] for j in B) for i in A)
        backward = max(min(d[i][j] for i in A) for j in B)
        return max(forward, backward)

    @property
    def scale(self) -> int:
        """Common denominator of all distances."""
        return self._scale

    def scaled(self, q: Fraction) -> Fraction:
        """``q`` expressed in units of the metric's common denominator."""
        return q * self._scale


def grid_interval(N: int) -> FiniteMetricSpace:
    """The points ``i/N`` of [0, 1] with the usual distance."""
    if N < 1:
        raise ValueError("grid size N must be >= 1")
    labels = tuple(format_rational(Fraction(i, N)) for i in range(N + 1))
    dist = tuple(tuple(Fraction(abs(i - j), N) for j in range(N + 1)) for i in range(N + 1))
    return FiniteMetricSpace(labels, dist)


def hausdorff(A: SetLike, B: SetLike, X: FiniteMetricSpace) -> Fraction:
    a, b = as_mask(A), as_mask(B)
    if a >> X.size or b >> X.size:
        raise ValueError("set contains indices outside the space")
    return X.hausdorff_masks(a, b)


def diameter(X: FiniteMetricSpace) -> Fraction:
    return max((x for row in X.dist for x in row), default=Fraction(0))
