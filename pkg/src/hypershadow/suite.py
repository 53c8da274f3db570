"""Worked-example corpus, random systems, and implication checks for the theorems.

Every theorem is an implication between properties.  A counterexample is a
system where the hypothesis holds and the conclusion fails, both decided
exactly.  Average shadowing can only be refuted, never certified, so checks
involving it raise *flags* instead of counterexamples.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal

from .chains import is_chain_mixing, is_chain_transitive
from .mixing import is_mixing, is_transitive, is_weakly_mixing
from .multimap import MultiMap, compose_power, permutation_table, tent_table, zero_table
from .shadowing import has_shadowing, refute_average_shadowing, tent_counterexample_check
from .space import FiniteMetricSpace, diameter, grid_interval

Provenance = Literal["worked-example", "random", "user-file", "targeted"]

# Implications checked by the suite:
#   constant-shadowing        f1 = c, f2(c) = c: f2 has (average) shadowing => F does
#   constant-properties       f1 = c, f2(c) = c: each of the five properties passes from f2 to F
#   power-shadowing           F has shadowing <=> F^k has shadowing
#   power-average             F has average shadowing <=> F^k does
#   shadowing-chain-mixing    with shadowing, chain mixing <=> mixing
#   average-chain-transitive  average shadowing => chain transitive
#   nontransitive-average     shadowing and not transitive => no average shadowing
THEOREMS = (
    "constant-shadowing",
    "constant-properties",
    "power-shadowing",
    "power-average",
    "shadowing-chain-mixing",
    "average-chain-transitive",
    "nontransitive-average",
)


@dataclass(frozen=True)
class SystemSpec:
    name: str
    mmap: MultiMap
    provenance: str = "user-file"
    seed: int | None = None

    @property
    def space(self) -> FiniteMetricSpace:
        return self.mmap.space


def corpus() -> list[SystemSpec]:
    abc = FiniteMetricSpace.discrete("abc")
    zero_one = grid_interval(1)
    grid98 = grid_interval(98)
    digits = FiniteMetricSpace.discrete("012")
    return [
        SystemSpec("const-ab", MultiMap(abc, ((0, 0, 0), (1, 1, 1))), "worked-example"),
        SystemSpec("binary01", MultiMap(zero_one, ((0, 0), (1, 1))), "worked-example"),
        SystemSpec("tent98", MultiMap(grid98, (zero_table(98), tent_table(98))), "worked-example"),
        SystemSpec("perm3", MultiMap(digits, (permutation_table((1, 2, 0)), permutation_table((2, 0, 1)))),
                   "worked-example"),
    ]


def corpus_system(name: str) -> SystemSpec:
    for spec in corpus():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown corpus system {name!r}; known: {[s.name for s in corpus()]}")


def random_metric(rng: random.Random, n: int) -> FiniteMetricSpace:
    """Shortest-path closure of random positive rational edge weights."""
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 4), rng.choice((1, 2, 3)))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return FiniteMetricSpace(tuple(str(i) for i in range(n)), tuple(tuple(r) for r in w))


def random_system(seed: int, n_points: int, m: int, metric: str = "mixed") -> SystemSpec:
    """Deterministic random system; ``metric`` is "discrete", "random" or "mixed" (seeded coin)."""
    if n_points < 1 or m < 1:
        raise ValueError("need n_points >= 1 and m >= 1")
    rng = random.Random(seed)
    if metric == "mixed":
        metric = rng.choice(("discrete", "random"))
    if metric == "discrete":
        space = FiniteMetricSpace.discrete(str(i) for i in range(n_points))
    elif metric == "random":
        space = random_metric(rng, n_points)
    else:
        raise ValueError(f"unknown metric kind {metric!r}")
    maps = tuple(tuple(rng.randrange(n_points) for _ in range(n_points)) for _ in range(m))
    return SystemSpec(f"random-{seed}", MultiMap(space, maps), "random", seed)


def constant_with_fixed_point(seed: int, n_points: int, metric: str = "mixed") -> SystemSpec:
    """F = {f1 = c, f2} with f2(c) = c: the setting of the constant-map theorems.

    A quarter of the draws make f2 constant too, the only case where f2 is
    transitive-like while fixing c.
    """
    rng = random.Random(seed)
    base = random_system(seed, n_points, 1, metric)
    c = rng.randrange(n_points)
    if rng.random() < 0.25:
        f2 = (c,) * n_points
    else:
        f2 = tuple(c if i == c else v for i, v in enumerate(base.mmap.maps[0]))
    return SystemSpec(f"const-fixed-{seed}", MultiMap(base.space, ((c,) * n_points, f2)), "targeted", seed)


def random_systems(seed: int, count: int, max_points: int, max_maps: int = 3) -> list[SystemSpec]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        s = rng.randrange(2**31)
        out.append(random_system(s, rng.randint(1, max_points), rng.randint(1, max_maps)))
    return out


# --------------------------------------------------------------------------
# theorem checks


@dataclass
class TheoremReport:
    theorem: str
    systems_tested: int = 0
    applicable: int = 0
    counterexamples: list[tuple[SystemSpec, dict]] = field(default_factory=list)
    flags: list[tuple[SystemSpec, dict]] = field(default_factory=list)
    caveats: list[str] = field(default_factory=list)


CAVEATS = {
    "constant-shadowing": ["average-shadowing half is refuter-only: a flag means f2 was refuted and F was not"],
    "constant-properties": ["hypothesis also requires f2(c) = c, which the argument for Ran(F) = {{c, f2^n(x)}} uses"],
    "power-average": ["refuter-only: a flag means F^k was refuted and F was not, at the same eps and schedule"],
    "average-chain-transitive": [
        "contrapositive, refuter-only: a flag means F is not chain transitive yet no block pseudo-orbit "
        "refuted average shadowing at the scheduled deltas"
    ],
    "nontransitive-average": [
        "contrapositive, refuter-only: a flag means F has shadowing, is not transitive, and average "
        "shadowing was not refuted at the scheduled deltas"
    ],
}


def refuter_parameters(F: MultiMap) -> tuple[Fraction, list[Fraction]]:
    """Default eps (a quarter of the smallest distance) and delta schedule (D/2, D/4, D/8)."""
    D = diameter(F.space)
    if D == 0:
        return Fraction(1), [Fraction(1, 2)]
    eps = F.space.distances[0] / 4
    return eps, [D / 2, D / 4, D / 8]


def _constant_pair(F: MultiMap) -> int | None:
    """c if F = {f1 = c, f2} with f2(c) = c, else None."""
    if F.m != 2:
        return None
    f1, f2 = F.maps
    c = f1[0]
    if any(v != c for v in f1) or f2[c] != c:
        return None
    return c


Outcome = tuple[str, dict]  # ("vacuous" | "ok" | "counterexample" | "flag", details)


def _check_constant_shadowing(F: MultiMap) -> Outcome:
    if _constant_pair(F) is None:
        return "vacuous", {}
    f2 = F.component(1)
    if has_shadowing(F) and not has_shadowing(f2):
        return "counterexample", {"property": "shadowing"}
    eps, schedule = refuter_parameters(F)
    if refute_average_shadowing(f2, eps, schedule) and not refute_average_shadowing(F, eps, schedule):
        return "flag", {"property": "average shadowing"}
    return "ok", {}


PROPERTIES: dict[str, Callable] = {
    "transitive": is_transitive,
    "weakly-mixing": is_weakly_mixing,
    "mixing": is_mixing,
    "chain-transitive": is_chain_transitive,
    "chain-mixing": is_chain_mixing,
}


def _check_constant_properties(F: MultiMap) -> Outcome:
    if _constant_pair(F) is None:
        return "vacuous", {}
    f2 = F.component(1)
    for name, check in PROPERTIES.items():
        if check(f2) and not check(F):
            return "counterexample", {"property": name}
    return "ok", {}


def _check_power_shadowing(F: MultiMap) -> Outcome:
    base = bool(has_shadowing(F))
    for k in (2, 3):
        if bool(has_shadowing(compose_power(F, k))) != base:
            return "counterexample", {"k": k, "F": base}
    return "ok", {}


def _check_power_average(F: MultiMap) -> Outcome:
    eps, schedule = refuter_parameters(F)
    base = refute_average_shadowing(F, eps, schedule)
    for k in (2, 3):
        if base is None and refute_average_shadowing(compose_power(F, k), eps, schedule):
            return "flag", {"k": k}
    return "ok", {}


def _check_shadowing_chain_mixing(F: MultiMap) -> Outcome:
    if not has_shadowing(F):
        return "vacuous", {}
    cm, mx = bool(is_chain_mixing(F)), bool(is_mixing(F))
    if cm != mx:
        return "counterexample", {"chain-mixing": cm, "mixing": mx}
    return "ok", {}


def _check_average_chain_transitive(F: MultiMap) -> Outcome:
    if is_chain_transitive(F):
        return "vacuous", {}
    eps, schedule = refuter_parameters(F)
    if refute_average_shadowing(F, eps, schedule) is None:
        return "flag", {"epsilon": eps, "schedule": schedule}
    return "ok", {}


def _check_nontransitive_average(F: MultiMap) -> Outcome:
    if not has_shadowing(F) or is_transitive(F):
        return "vacuous", {}
    eps, schedule = refuter_parameters(F)
    if refute_average_shadowing(F, eps, schedule) is None:
        return "flag", {"epsilon": eps, "schedule": schedule}
    return "ok", {}


CHECKS: dict[str, Callable[[MultiMap], Outcome]] = {
    "constant-shadowing": _check_constant_shadowing,
    "constant-properties": _check_constant_properties,
    "power-shadowing": _check_power_shadowing,
    "power-average": _check_power_average,
    "shadowing-chain-mixing": _check_shadowing_chain_mixing,
    "average-chain-transitive": _check_average_chain_transitive,
    "nontransitive-average": _check_nontransitive_average,
}


def _rebuild(spec: SystemSpec) -> MultiMap:
    space = FiniteMetricSpace(spec.space.labels, spec.space.dist)
    return MultiMap(space, spec.mmap.maps)


def check_theorem(theorem: str, systems: Iterable[SystemSpec]) -> TheoremReport:
    if theorem not in CHECKS:
        raise KeyError(f"unknown theorem id {theorem!r}; known: {list(CHECKS)}")
    check = CHECKS[theorem]
    report = TheoremReport(theorem, caveats=list(CAVEATS.get(theorem, [])))
    for spec in systems:
        report.systems_tested += 1
        status, details = check(spec.mmap)
        if status == "vacuous":
            continue
        report.applicable += 1
        if status == "counterexample":
            again, _ = check(_rebuild(spec))
            details = dict(details, reverified=again == "counterexample")
            report.counterexamples.append((spec, details))
        elif status == "flag":
            report.flags.append((spec, details))
    return report


def check_relation_examples(small_grid: int = 8) -> TheoremReport:
    """The non-implications: components with a property whose F lacks it."""
    report = TheoremReport("component-converse")
    perm3 = corpus_system("perm3")
    F = perm3.mmap
    for name in ("transitive", "weakly-mixing", "chain-transitive"):
        check = PROPERTIES[name]
        report.systems_tested += 1
        comps = [bool(check(F.component(k))) for k in range(F.m)]
        whole = bool(check(F))
        if not all(comps) or whole:
            report.counterexamples.append((perm3, {"property": name, "components": comps, "F": whole}))
    report.systems_tested += 1
    tent = tent_counterexample_check(98, Fraction(1, 49), Fraction(1, 98))
    if not tent.pseudo_valid or tent.shadowable:
        report.counterexamples.append((corpus_system("tent98"), {"property": "shadowing at eps=1/49"}))
    grid = grid_interval(small_grid)
    for name, table in (("zero", zero_table(small_grid)), ("tent", tent_table(small_grid))):
        report.systems_tested += 1
        if not has_shadowing(MultiMap(grid, (table,))):
            report.counterexamples.append((SystemSpec(f"{name}{small_grid}", MultiMap(grid, (table,)), "targeted"),
                                           {"property": "shadowing"}))
    report.caveats.append(
        f"component shadowing is decided exactly on grid N={small_grid}; on any finite grid it holds "
        "because delta below the grid step forces exact orbits"
    )
    report.applicable = report.systems_tested
    return report


def run_suite(seed: int = 1, count: int = 200, max_points: int = 5) -> list[TheoremReport]:
    """Every theorem over seeded random systems, targeted constant-map systems and the small corpus."""
    systems = random_systems(seed, count, max_points)
    rng = random.Random(seed + 1)
    systems += [constant_with_fixed_point(rng.randrange(2**31), rng.randint(1, max_points))
                for _ in range(max(20, count // 4))]
    systems += [s for s in corpus() if s.space.size <= max_points]
    reports = [check_theorem(t, systems) for t in THEOREMS]
    reports.append(check_relation_examples())
    return reports
