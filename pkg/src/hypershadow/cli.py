"""Command line entry point: load systems from JSON, run checks, print JSON reports."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .chains import SpaceTooLarge, is_chain_mixing, is_chain_mixing_at, is_chain_transitive, is_chain_transitive_at
from .mixing import is_mixing, is_transitive, is_weakly_mixing
from .multimap import MultiMap, permutation_table, tent_table, zero_table
from .shadowing import has_shadowing, refute_average_shadowing, shadowing_holds, tent_counterexample_check
from .space import CompactSet, FiniteMetricSpace, MetricError, diameter, format_rational, grid_interval, rational
from .suite import SystemSpec, corpus_system, refuter_parameters, run_suite
from .verdict import Verdict

PROPERTIES = ("chain-transitive", "chain-mixing", "transitive", "weakly-mixing", "mixing", "shadowing", "refute-average")
POINT_KEYS = {"x", "y", "u", "v", "z"}


class InputError(ValueError):
    """Bad system file or flags."""


# --------------------------------------------------------------------------
# loading


def _grid_builder(name: str, N: int) -> tuple[int, ...]:
    if name == "tent":
        table = tent_table(N)
        values = [2 * Fraction(i, N) if 2 * i <= N else 2 - 2 * Fraction(i, N) for i in range(N + 1)]
    elif name == "zero":
        table = zero_table(N)
        values = [Fraction(0)] * (N + 1)
    else:
        raise InputError(f"unknown builder {name!r}")
    for i, value in enumerate(values):
        if (value * N).denominator != 1 or value * N != table[i]:
            raise InputError(f"{name} not grid-closed for N={N}: point {i}/{N} maps to {value}")
    return table


def _build_map(entry, space: FiniteMetricSpace, grid: int | None) -> tuple[int, ...]:
    n = space.size
    if isinstance(entry, list):
        if len(entry) != n:
            raise InputError(f"map {entry} has {len(entry)} entries, space has {n} points")
        for v in entry:
            if not isinstance(v, int) or not 0 <= v < n:
                raise InputError(f"map index {v!r} out of range for {n} points")
        return tuple(entry)
    if not isinstance(entry, str):
        raise InputError(f"map must be an index list or a builder name, got {entry!r}")
    if entry.startswith("const:"):
        label = entry[len("const:"):]
        if label not in space.labels:
            raise InputError(f"const builder names unknown point {label!r}")
        return (space.index(label),) * n
    if entry.startswith("cycle:"):
        try:
            perm = tuple(int(v) for v in entry[len("cycle:"):].split(","))
            if len(perm) != n:
                raise ValueError
            return permutation_table(perm)
        except ValueError:
            raise InputError(f"{entry!r} is not a permutation of the {n} point indices") from None
    if grid is None:
        raise InputError(f"builder {entry!r} needs a grid system")
    return _grid_builder(entry, grid)


def parse_system(data: dict, name: str = "system") -> SystemSpec:
    grid = None
    try:
        if "grid" in data:
            grid = int(data["grid"]["N"])
            if grid < 1:
                raise InputError("grid N must be >= 1")
            space = grid_interval(grid)
        else:
            points = [str(p) for p in data["points"]]
            metric = data.get("metric", "discrete")
            if metric == "discrete":
                space = FiniteMetricSpace.discrete(points)
            else:
                space = FiniteMetricSpace(tuple(points), tuple(tuple(rational(v) for v in row) for row in metric))
        maps = tuple(_build_map(entry, space, grid) for entry in data["maps"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed system file: missing or invalid {exc}") from None
    except MetricError as exc:
        raise InputError(f"metric axiom violated: {exc}") from None
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not maps:
        raise InputError("a system needs at least one map")
    return SystemSpec(data.get("name", name), MultiMap(space, maps), "user-file")


def load_system(path) -> SystemSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: parse error: {exc}") from None
    return parse_system(data, path.stem)


def system_json(spec: SystemSpec) -> dict:
    X = spec.space
    return {
        "points": list(X.labels),
        "metric": [[format_rational(v) for v in row] for row in X.dist],
        "maps": [list(t) for t in spec.mmap.maps],
    }


def fingerprint(spec: SystemSpec) -> str:
    body = json.dumps(system_json(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


# --------------------------------------------------------------------------
# reporting


def to_json(value: Any, labels: tuple[str, ...], key: str | None = None) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, CompactSet):
        return [labels[i] for i in value]
    if isinstance(value, int):
        return labels[value] if key in POINT_KEYS else value
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if isinstance(k, Fraction):
                out[format_rational(k)] = to_json(v, labels, "value")
            elif isinstance(k, int) and key in {"shadower", "first_failure"}:
                out[labels[k]] = to_json(v, labels, "y" if key == "shadower" else "n")
            else:
                out[str(k)] = to_json(v, labels, k)
        return out
    if isinstance(value, (list, tuple)):
        return [to_json(v, labels, key) for v in value]
    return str(value)


def result(prop: str, verdict: Any, params: dict, witness: dict, labels, started: float | None) -> dict:
    entry = {
        "property": prop,
        "verdict": verdict,
        "parameters": {k: format_rational(v) if isinstance(v, Fraction) else to_json(v, labels, k)
                       for k, v in params.items()},
        "witness": to_json(witness, labels),
    }
    if started is not None:
        entry["wall_time_s"] = round(time.perf_counter() - started, 6)
    return entry


def check_property(spec: SystemSpec, prop: str, epsilon=None, deltas=(), timing=False) -> dict:
    F = spec.mmap
    labels = spec.space.labels
    started = time.perf_counter() if timing else None
    delta = deltas[0] if deltas else None
    if prop in ("chain-transitive", "chain-mixing"):
        if len(deltas) > 1:
            raise InputError(f"{prop} takes at most one --delta")
        if delta is None:
            v = is_chain_transitive(F) if prop == "chain-transitive" else is_chain_mixing(F)
            params = {"delta": "all > 0"}
        else:
            v = is_chain_transitive_at(F, delta) if prop == "chain-transitive" else is_chain_mixing_at(F, delta)
            params = {"delta": delta}
        return result(prop, v.holds, params, v.witness, labels, started)
    if prop in ("transitive", "weakly-mixing", "mixing"):
        check = {"transitive": is_transitive, "weakly-mixing": is_weakly_mixing, "mixing": is_mixing}[prop]
        v = check(F)
        return result(prop, v.holds, {}, v.witness, labels, started)
    if prop == "shadowing":
        if (epsilon is None) != (delta is None) or len(deltas) > 1:
            raise InputError("shadowing takes both --epsilon and one --delta, or neither")
        if epsilon is None:
            v = has_shadowing(F)
            return result(prop, v.holds, {"epsilon": "all > 0"}, v.witness, labels, started)
        v = shadowing_holds(F, epsilon, delta)
        witness = {k: w for k, w in v.witness.items() if k not in ("epsilon", "delta")}
        return result(prop, v.holds, {"epsilon": epsilon, "delta": delta}, witness, labels, started)
    if prop == "refute-average":
        if epsilon is None or not deltas:
            raise InputError("refute-average requires --epsilon and at least one --delta")
        ref = refute_average_shadowing(F, epsilon, deltas)
        witness = {}
        if ref is not None:
            witness = {"per_delta": [{
                "delta": e.delta, "x": e.x, "A": e.A, "N": e.N, "min_average": e.min_average,
                "block": list(e.pseudo.cycle),
            } for e in ref.per_delta]}
        verdict = "refuted" if ref is not None else "not refuted"
        return result(prop, verdict, {"epsilon": epsilon, "delta": list(deltas)}, witness, labels, started)
    raise InputError(f"unknown property {prop!r}; choose from {', '.join(PROPERTIES)}")


def tent_report(N: int, epsilon, delta, timing=False) -> dict:
    started = time.perf_counter() if timing else None
    try:
        chk = tent_counterexample_check(N, epsilon, delta)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    labels = grid_interval(N).labels
    witness = {
        "pseudo_orbit_valid": chk.pseudo_valid,
        "prefix": list(chk.pseudo.prefix),
        "cycle": list(chk.pseudo.cycle),
        "first_failure": chk.first_failure,
        "terminal_index": chk.terminal_index,
        "terminal_separated": chk.terminal_separated,
        "two_point_form": chk.two_point_form,
    }
    verdict = "shadowable" if chk.shadowable else "not shadowable"
    return result("tent-shadowing", verdict, {"N": N, "epsilon": chk.epsilon, "delta": chk.delta}, witness,
                  labels, started)


def envelope(spec: SystemSpec | None, results: list[dict]) -> dict:
    out: dict[str, Any] = {"tool": "hypershadow", "version": __version__, "results": results}
    if spec is not None:
        out["system"] = {"name": spec.name, "fingerprint": fingerprint(spec),
                         "points": spec.space.size, "maps": spec.mmap.m}
    return out


def write_csv(path, results: list[dict]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["property", "verdict", "epsilon", "delta", "witness"])
        for r in results:
            p = r["parameters"]
            w.writerow([r["property"], r["verdict"], p.get("epsilon", ""), json.dumps(p.get("delta", "")),
                        json.dumps(r["witness"], sort_keys=True, separators=(",", ":"))])


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> dict:
    spec = load_system(args.file)
    return envelope(spec, [check_property(spec, args.property, args.epsilon, args.delta or (), args.timing)])


def cmd_examples(args) -> dict:
    try:
        spec = corpus_system(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    F = spec.mmap
    results = []
    for prop in ("transitive", "weakly-mixing", "mixing", "chain-transitive", "chain-mixing", "shadowing"):
        try:
            results.append(check_property(spec, prop, timing=args.timing))
        except SpaceTooLarge as exc:
            results.append({"property": prop, "verdict": "skipped", "parameters": {}, "witness": {"reason": str(exc)}})
    if spec.space.size <= 12:
        eps, schedule = refuter_parameters(F)
        results.append(check_property(spec, "refute-average", eps, schedule, args.timing))
    if spec.name == "tent98":
        results.append(tent_report(98, Fraction(1, 49), Fraction(1, 98), args.timing))
    return envelope(spec, results)


def cmd_suite(args) -> dict:
    reports = run_suite(args.seed, args.count, args.max_points)
    out = []
    for r in reports:
        out.append({
            "theorem": r.theorem,
            "systems_tested": r.systems_tested,
            "applicable": r.applicable,
            "counterexamples": [{"system": s.name, "seed": s.seed, "details": to_json(d, s.space.labels)}
                                for s, d in r.counterexamples],
            "flags": [{"system": s.name, "seed": s.seed, "details": to_json(d, s.space.labels)} for s, d in r.flags],
            "caveats": r.caveats,
        })
    return {"tool": "hypershadow", "version": __version__,
            "parameters": {"seed": args.seed, "count": args.count, "max_points": args.max_points},
            "reports": out}


def cmd_tent(args) -> dict:
    return envelope(None, [tent_report(args.n, args.epsilon, args.delta, args.timing)])


def _rational_arg(text: str) -> Fraction:
    try:
        return rational(text)
    except (ValueError, ZeroDivisionError, OverflowError):
        raise argparse.ArgumentTypeError(f"not a rational 'p/q': {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypershadow", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--csv", metavar="PATH", help="also write one CSV row per property result")
    parser.add_argument("--timing", action="store_true", help="add wall times (reports stop being byte-stable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check one property of a system file")
    p.add_argument("file")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.add_argument("--epsilon", type=_rational_arg)
    p.add_argument("--delta", type=_rational_arg, action="append",
                   help="repeat to give a delta schedule (refute-average)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("examples", help="run every check on a built-in example")
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("suite", help="theorem implication checks over random systems")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-points", type=int, default=5)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("tent", help="the zero + tent pseudo-orbit check on the grid i/N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=_rational_arg, required=True)
    p.add_argument("--delta", type=_rational_arg, required=True)
    p.set_defaults(func=cmd_tent)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (InputError, SpaceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")
    if args.csv and "results" in report:
        write_csv(args.csv, report["results"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
