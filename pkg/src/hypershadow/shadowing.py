"""Shadowing and average shadowing of multiple mappings on finite spaces.

Pointwise shadowing is decided exactly.  A simulation relation (greatest
fixpoint) gives a fast certificate with one shadowing point per start; when
it is inconclusive, a subset construction over (pseudo-orbit node, set of
surviving orbit states) settles the question, because the shadowing point
may be chosen after seeing the whole pseudo-orbit.

Average shadowing is only ever refuted: the refuter searches a family of
periodic block pseudo-orbits and computes exact limit averages.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Literal

from .chains import HyperGraph, build_hypergraph
from .multimap import MultiMap, compose_power, orbit_masks, ran_witnesses
from .space import CompactSet, SetLike, as_mask, diameter, rational
from .verdict import Verdict

Kind = Literal["pointwise", "average"]


# --------------------------------------------------------------------------
# pointwise shadowing


@dataclass(frozen=True)
class SimulationRelation:
    """Pairs (pseudo node, orbit node) from which the orbit tracks every continuation."""

    epsilon: Fraction
    delta: Fraction
    pairs: frozenset[tuple[int, int]]

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (as_mask(a), as_mask(b)) in self.pairs

    def shadowers(self, x: int) -> list[int]:
        """Points y with ({x}, {y}) in the relation."""
        start = 1 << x
        return [b.bit_length() - 1 for (a, b) in self.pairs if a == start and b & (b - 1) == 0]


def orbit_nodes(F: MultiMap) -> set[int]:
    """Every F^n(y), n >= 0: the states a true orbit can be in."""
    out = set()
    for y in range(F.size):
        sets, _, _ = orbit_masks(F, 1 << y)
        out.update(sets)
    return out


def simulation_relation(F: MultiMap, epsilon, delta, graph: HyperGraph | None = None) -> SimulationRelation:
    """Greatest R with: (A, B) in R => d_H(A, B) < eps and (A', F(B)) in R for every delta-successor A'."""
    epsilon, delta = rational(epsilon), rational(delta)
    if graph is None:
        graph = build_hypergraph(F, delta)
    X = F.space
    eps = X.scaled(epsilon)
    onodes = orbit_nodes(F)
    pre_orbit: dict[int, list[int]] = {}
    for B in onodes:
        pre_orbit.setdefault(F.image_mask(B), []).append(B)
    pred = graph.predecessors()
    R = {(A, B) for A in graph.nodes for B in onodes if X.hausdorff_scaled(A, B) < eps}
    queue = deque()
    for A, B in list(R):
        FB = F.image_mask(B)
        if any((A2, FB) not in R for A2 in graph.successors(A)):
            R.discard((A, B))
            queue.append((A, B))
    while queue:
        A2, B2 = queue.popleft()
        for A in pred.get(A2, ()):
            for B in pre_orbit.get(B2, ()):
                if (A, B) in R:
                    R.discard((A, B))
                    queue.append((A, B))
    return SimulationRelation(epsilon, delta, frozenset(R))


def _unshadowable_chain(F: MultiMap, graph: HyperGraph, eps: Fraction, x: int) -> list[int] | None:
    """A delta-chain from {x} that no orbit follows within eps, or None.

    Searches states (A, T): A the current pseudo-orbit set, T the distinct
    current sets F^n(y) over points y that have stayed eps-close so far.
    Every node has the edge A -> F(A), so any finite chain extends to an
    infinite pseudo-orbit.
    """
    X = F.space
    start = 1 << x
    T0 = frozenset(1 << y for y in range(F.size) if X.hausdorff_scaled(start, 1 << y) < eps)
    parent = {(start, T0): None}
    queue = deque([(start, T0)])
    while queue:
        state = queue.popleft()
        A, T = state
        images = {F.image_mask(B) for B in T}
        for A2 in graph.successors(A):
            T2 = frozenset(B for B in images if X.hausdorff_scaled(A2, B) < eps)
            nxt = (A2, T2)
            if nxt in parent:
                continue
            parent[nxt] = state
            if not T2:
                path = [A2]
                s = state
                while s is not None:
                    path.append(s[0])
                    s = parent[s]
                return path[::-1]
            queue.append(nxt)
    return None


def shadowing_holds(F: MultiMap, epsilon, delta) -> Verdict:
    """Is every delta-pseudo-orbit of F eps-shadowed by some orbit F^n(y)?

    Witness on success: ``shadower`` maps each start x to one y shadowing
    every pseudo-orbit from {x}, or to None when the choice of y depends on
    the pseudo-orbit.  On failure: the start ``x`` and a finite ``chain`` no
    orbit stays eps-close to.
    """
    epsilon, delta = rational(epsilon), rational(delta)
    if epsilon <= 0 or delta < 0:
        raise ValueError("need epsilon > 0 and delta >= 0")
    graph = build_hypergraph(F, delta)
    eps = F.space.scaled(epsilon)
    rel = simulation_relation(F, epsilon, delta, graph)
    shadower: dict[int, int | None] = {}
    for x in range(F.size):
        ys = rel.shadowers(x)
        if ys:
            shadower[x] = min(ys)
            continue
        chain = _unshadowable_chain(F, graph, eps, x)
        if chain is not None:
            return Verdict(False, {
                "x": x, "epsilon": epsilon, "delta": delta,
                "chain": [CompactSet.from_mask(A) for A in chain],
            })
        shadower[x] = None
    return Verdict(True, {"epsilon": epsilon, "delta": delta, "shadower": shadower})


def critical_values(F: MultiMap) -> tuple[Fraction, ...]:
    """Distinct positive values of d_H on K(X); these are exactly the positive distances of X."""
    return F.space.distances


def has_shadowing(F: MultiMap) -> Verdict:
    """Shadowing for every eps > 0, with a modulus table.

    Verdicts only change at critical values: eps enters through ``d_H < eps``
    (constant on each (v_i, v_{i+1}]) and delta through ``d_H <= delta``
    (constant on each [v_i, v_{i+1})).  For each critical eps the table gives
    the largest critical delta that works; 0 stands for every delta below the
    smallest positive distance.
    """
    crit = critical_values(F)
    deltas = (Fraction(0),) + crit
    modulus: dict[Fraction, Fraction | None] = {}
    for eps in crit:
        best = None
        for d in deltas:
            if not shadowing_holds(F, eps, d):
                break
            best = d
        modulus[eps] = best
        if best is None:
            return Verdict(False, {"epsilon": eps, "modulus": modulus})
    return Verdict(True, {"modulus": modulus})


# --------------------------------------------------------------------------
# periodic pseudo-orbits


@dataclass(frozen=True)
class PeriodicPseudoOrbit:
    """The sequence prefix + cycle + cycle + ... of compact sets."""

    prefix: tuple[CompactSet, ...]
    cycle: tuple[CompactSet, ...]
    claimed_delta: Fraction
    kind: Kind = "pointwise"

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("cycle must be nonempty")
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        object.__setattr__(self, "claimed_delta", rational(self.claimed_delta))

    def __getitem__(self, i: int) -> CompactSet:
        P = len(self.prefix)
        if i < P:
            return self.prefix[i]
        return self.cycle[(i - P) % len(self.cycle)]

    def take(self, n: int) -> list[CompactSet]:
        return [self[i] for i in range(n)]

    def defects(self, F: MultiMap) -> tuple[list[Fraction], list[Fraction]]:
        """Step defects d_H(F(A_i), A_{i+1}) for the prefix steps and one cycle (with wrap)."""
        X = F.space
        P, L = len(self.prefix), len(self.cycle)
        pre = [X.hausdorff_masks(F.image_mask(self[i].mask), self[i + 1].mask) for i in range(P)]
        cyc = [X.hausdorff_masks(F.image_mask(self[P + j].mask), self[P + j + 1].mask) for j in range(L)]
        return pre, cyc

    def window_bound(self, F: MultiMap) -> int | None:
        """Least N with every window average (start k >= 1, length n >= N) below claimed_delta.

        None if no such N exists.
        """
        pre, cyc = self.defects(F)
        return _window_bound(pre, cyc, self.claimed_delta)

    def validate(self, F: MultiMap) -> None:
        if len(self[0]) != 1:
            raise ValueError("a pseudo-orbit must start at a singleton")
        if self.kind == "pointwise":
            pre, cyc = self.defects(F)
            worst = max(pre + cyc)
            if worst > self.claimed_delta:
                raise ValueError(f"step defect {worst} exceeds delta = {self.claimed_delta}")
        elif self.kind == "average":
            if self.claimed_delta <= 0 or self.window_bound(F) is None:
                raise ValueError(f"window averages do not stay below delta = {self.claimed_delta}")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")


def _window_bound(pre: list[Fraction], cyc: list[Fraction], delta: Fraction) -> int | None:
    P, L = len(pre), len(cyc)
    S = sum(cyc, Fraction(0))
    gap = delta * L - S
    if gap <= 0:
        return None
    # W[o][r]: sum of r consecutive cycle defects starting at offset o
    doubled = cyc + cyc
    W = []
    for o in range(L):
        row = [Fraction(0)]
        for r in range(L - 1):
            row.append(row[-1] + doubled[o + r])
        W.append(row)
    worst = 0

    def last_failure(c: Fraction, r: int, base: int) -> int:
        # windows of length base + q*L + r fail exactly for q*gap <= c
        if c < 0:
            return 0
        q_fail = c // gap
        return base + int(q_fail) * L + r

    for r in range(L):
        c = max(W[o][r] for o in range(L)) - delta * r
        worst = max(worst, last_failure(c, r, 0))
    for k in range(1, P):
        m = P - k
        running = Fraction(0)
        for n in range(1, m + 1):
            running += pre[k + n - 1]
            if running >= delta * n:
                worst = max(worst, n)
        for r in range(L):
            c = running + W[0][r] - delta * (m + r)
            worst = max(worst, last_failure(c, r, m))
    return worst + 1


def interleave_for_power(F: MultiMap, k: int, pseudo: PeriodicPseudoOrbit) -> PeriodicPseudoOrbit:
    """Turn a pseudo-orbit of F^k into one of F: B_{jk+r} = F^r(A_j) for 0 <= r < k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pseudo.validate(compose_power(F, k))

    def expand(sets):
        out = []
        for A in sets:
            mask = A.mask
            for _ in range(k):
                out.append(CompactSet.from_mask(mask))
                mask = F.image_mask(mask)
        return tuple(out)

    result = PeriodicPseudoOrbit(expand(pseudo.prefix), expand(pseudo.cycle), pseudo.claimed_delta, pseudo.kind)
    result.validate(F)
    return result


def _backward_run(F: MultiMap, A: int, length: int) -> list[int]:
    """Sets R_0, ..., R_{s-1} = A with F(R_i) = R_{i+1}, s <= length, as long as possible."""
    best: list[int] = []
    for a in range(F.size):
        sets, t, p = orbit_masks(F, 1 << a)
        hits = [n for n, s in enumerate(sets) if s == A]
        if not hits:
            continue
        n = hits[-1]
        if n >= t:
            # A is periodic in this orbit, so it recurs at n + j*p for every j
            while n < length - 1:
                n += p
        run = [sets[i if i < t else t + (i - t) % p] for i in range(max(0, n - length + 1), n + 1)]
        if len(run) > len(best):
            best = run
        if len(best) == length:
            break
    return best


def _block(F: MultiMap, x: int, A: int, N: int, delta: Fraction) -> PeriodicPseudoOrbit:
    run = _backward_run(F, A, N - 1)
    block = []
    mask = 1 << x
    for _ in range(2 * N - len(run)):
        block.append(mask)
        mask = F.image_mask(mask)
    block.extend(run)
    return PeriodicPseudoOrbit((), tuple(CompactSet.from_mask(b) for b in block), delta, "average")


def block_average_orbit(F: MultiMap, x: int, A: SetLike, N: int, delta=None) -> PeriodicPseudoOrbit:
    """The periodic block x, F(x), ..., F^N(x), R_{N-2}, ..., R_0 = A, then again from x.

    R is a run with F(R_i) = R_{i-1} ending at A, taken from a recorded orbit
    reaching A.  When no run of length N-1 exists (A is only hit early, in a
    transient), the forward orbit of x is continued instead so that the block
    keeps length 2N and at most two jumps.  ``delta`` defaults to 3D/N
    (1/N on a one-point space).
    """
    target = as_mask(A)
    if target not in ran_witnesses(F):
        raise ValueError(f"{CompactSet.from_mask(target)} is not in Ran(F)")
    if N < 2:
        raise ValueError("N must be >= 2")
    if delta is None:
        D = diameter(F.space)
        delta = Fraction(3) * D / N if D > 0 else Fraction(1, N)
    pseudo = _block(F, x, target, N, rational(delta))
    pseudo.validate(F)
    return pseudo


def limit_average_distance(F: MultiMap, y: int, pseudo: PeriodicPseudoOrbit) -> Fraction:
    """lim (1/n) sum_{i<n} d_H(F^i(y), A_i), exact.

    Both sequences are eventually periodic, so the running average converges
    to the mean over one common tail period.
    """
    X = F.space
    sets, t, p = orbit_masks(F, 1 << y)
    P, L = len(pseudo.prefix), len(pseudo.cycle)
    start, period = max(t, P), lcm(p, L)
    total = 0
    for i in range(start, start + period):
        Fy = sets[i] if i < t else sets[t + (i - t) % p]
        total += X.hausdorff_scaled(Fy, pseudo[i].mask)
    return Fraction(total, period * X.scale)


# --------------------------------------------------------------------------
# refuting average shadowing


@dataclass(frozen=True)
class RefutationEntry:
    delta: Fraction
    pseudo: PeriodicPseudoOrbit
    x: int
    A: CompactSet
    N: int
    min_average: Fraction


@dataclass(frozen=True)
class AverageRefutation:
    """For each delta, a delta-average-pseudo-orbit every orbit stays >= eps away from on average."""

    epsilon: Fraction
    per_delta: tuple[RefutationEntry, ...] = field(default_factory=tuple)


def default_block_cap(F: MultiMap, delta: Fraction) -> int:
    """Block sizes 2..N0 are searched, N0 the least N with 3D/N < delta."""
    D = diameter(F.space)
    return max(2, int(3 * D / delta) + 1)


def search_average_refutation(F: MultiMap, epsilon, delta, n_cap: int | None = None) -> RefutationEntry | None:
    """First block orbit (x, A, N) that is a delta-average-pseudo-orbit and eps-far from every orbit.

    Every block size N <= n_cap is tried; a candidate counts only if its
    window averages are verified exactly to stay below delta.
    """
    epsilon, delta = rational(epsilon), rational(delta)
    if delta <= 0:
        raise ValueError("delta must be > 0")
    if n_cap is None:
        n_cap = default_block_cap(F, delta)
    if epsilon > diameter(F.space):
        return None
    targets = list(ran_witnesses(F))
    for N in range(2, n_cap + 1):
        for x in range(F.size):
            for A in targets:
                pseudo = _block(F, x, A, N, delta)
                if pseudo.window_bound(F) is None:
                    continue
                best = min(limit_average_distance(F, y, pseudo) for y in range(F.size))
                if best >= epsilon:
                    return RefutationEntry(delta, pseudo, x, CompactSet.from_mask(A), N, best)
    return None


def refute_average_shadowing(F: MultiMap, epsilon, delta_schedule, n_cap: int | None = None) -> AverageRefutation | None:
    """A certificate that F lacks average shadowing at eps for every scheduled delta, or None.

    None is not a proof of average shadowing; the search covers one
    generator family only.
    """
    epsilon = rational(epsilon)
    entries = []
    for delta in delta_schedule:
        entry = search_average_refutation(F, epsilon, delta, n_cap)
        if entry is None:
            return None
        entries.append(entry)
    return AverageRefutation(epsilon, tuple(entries))


# --------------------------------------------------------------------------
# the zero + tent grid system


@dataclass(frozen=True)
class TentCheck:
    """Result of checking the spreading pseudo-orbit of the zero + tent system on a grid.

    ``first_failure[z]`` is the least n with d_H(F^n(z), A_n) >= eps, or None
    if the orbit of z eps-shadows the whole pseudo-orbit.
    """

    N: int
    epsilon: Fraction
    delta: Fraction
    pseudo: PeriodicPseudoOrbit
    pseudo_valid: bool
    first_failure: dict[int, int | None]
    terminal_index: int | None
    terminal_separated: bool
    two_point_form: bool

    @property
    def shadowable(self) -> bool:
        return any(n is None for n in self.first_failure.values())


def tent_system(N: int) -> MultiMap:
    from .multimap import tent_table, zero_table
    from .space import grid_interval

    return MultiMap(grid_interval(N), (zero_table(N), tent_table(N)))


def tent_pseudo_orbit(N: int, delta) -> PeriodicPseudoOrbit:
    """The pseudo-orbit {1/7}, {2/7, d}, {4/7, d, 3d}, {6/7, d, 3d, 7d}, ... on the grid i/N.

    Each extra point e is carried to tent(e) + d, or to tent(e) when that
    would leave [0, 1]; a fresh point d is added every step.  The state is
    finite, so the sequence is eventually periodic.
    """
    delta = rational(delta)
    if N % 14:
        raise ValueError("N must be even and divisible by 7")
    step = delta * N
    if delta <= 0 or delta > 1 or step.denominator != 1:
        raise ValueError(f"delta = {delta} is not a positive grid value for N = {N}")
    step = int(step)

    def tent(i):
        return 2 * i if 2 * i <= N else 2 * N - 2 * i

    state = (N // 7, frozenset())
    seen: dict[tuple, int] = {}
    sets: list[CompactSet] = []
    while state not in seen:
        seen[state] = len(sets)
        t, extra = state
        sets.append(CompactSet.of(extra | {t}))
        moved = {tent(e) + step if tent(e) + step <= N else tent(e) for e in extra}
        state = (tent(t), frozenset(moved | {step}))
    onset = seen[state]
    return PeriodicPseudoOrbit(tuple(sets[:onset]), tuple(sets[onset:]), delta, "pointwise")


def tent_counterexample_check(N: int, epsilon, delta) -> TentCheck:
    """Check that no grid point eps-shadows the spreading pseudo-orbit of {zero, tent}.

    Also checks that F^n(z) = {0, tent^n(z)} for n >= 1 and that a set A of
    the periodic part with a point above 1/2 stays more than eps away from
    every F^n(z), n >= 1.
    """
    epsilon = rational(epsilon)
    pseudo = tent_pseudo_orbit(N, delta)
    F = tent_system(N)
    X = F.space
    eps = X.scaled(epsilon)
    try:
        pseudo.validate(F)
        valid = True
    except ValueError:
        valid = False
    tent = F.maps[1]
    P, L = len(pseudo.prefix), len(pseudo.cycle)
    terminal = next((P + j for j, A in enumerate(pseudo.cycle) if A.members[-1] * 2 > N), None)
    first_failure: dict[int, int | None] = {}
    separated = terminal is not None
    two_point = True
    for z in range(N + 1):
        sets, t, p = orbit_masks(F, 1 << z)
        horizon = max(t, P) + lcm(p, L)
        fail = None
        point = z
        for n in range(horizon):
            Fz = sets[n] if n < t else sets[t + (n - t) % p]
            if n >= 1:
                point = tent[point]
                two_point &= Fz == (1 | 1 << point)
            if X.hausdorff_scaled(Fz, pseudo[n].mask) >= eps:
                fail = n
                break
        first_failure[z] = fail
        if terminal is not None:
            A = pseudo[terminal].mask
            for s in set(sets[1:]) | {sets[t]}:
                if not X.hausdorff_scaled(s, A) > eps:
                    separated = False
    return TentCheck(N, epsilon, pseudo.claimed_delta, pseudo, valid, first_failure, terminal, separated, two_point)
