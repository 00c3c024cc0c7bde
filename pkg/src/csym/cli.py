"""Command-line front end: ``csym <subcommand> ...``.

Exit status is 0 on success, 1 when the mathematics refuses the input (a
violated precondition, a non-solution, ...), and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .csm import ClusterSymmetricMap, DomainError, Seedlet, is_invariant
from .laurent import DimensionError, LaurentPoly, as_fraction, cycle_notation, format_poly, normalize_type


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input helpers


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _range_list(text: str, what: str) -> list[int]:
    """``0..2`` or ``0,1,3``."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise UsageError(f"{what}: bad range {text!r}") from None
    return list(_ints(text, what))


def _params(text: str | None) -> tuple[dict[str, Fraction], tuple[int, ...]]:
    """Named (``k1=1,k2=0``) or positional (``1,0``) parameters."""
    if not text:
        return {}, ()
    if "=" not in text:
        return {}, _ints(text, "--params")
    named = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--params: expected name=value, got {part!r}")
        try:
            named[name.strip()] = as_fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--params: {value!r} is not a rational number") from None
    return named, ()


def _load_json(path: str) -> Any:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _parse(path: str, reader, params=None):
    data = _load_json(path)
    try:
        return reader(data, params) if params is not None else reader(data)
    except DomainError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_poly(path: str) -> LaurentPoly:
    return _parse(path, LaurentPoly.from_json)


def _load_map(path: str, params) -> ClusterSymmetricMap:
    return _parse(path, ClusterSymmetricMap.from_json, params)


def _builtin_spec(text: str) -> tuple[str, int]:
    table, sep, row = text.partition(":")
    if not sep:
        raise UsageError(f"--builtin: expected rank2:<i> or rank3:<i>, got {text!r}")
    try:
        return table, int(row)
    except ValueError:
        raise UsageError(f"--builtin: bad row {row!r}") from None


def _builtin(args):
    from .diophantine import builtin

    table, row = _builtin_spec(args.builtin)
    named, positional = _params(args.params)
    if named:
        from .diophantine import param_names

        names = param_names(table, row)
        missing = [n for n in names if n not in named]
        if missing:
            raise UsageError(f"--params: missing {missing}")
        positional = tuple(int(named[n]) for n in names)
    return builtin(table, row, positional)


def _load_seed(args):
    from .seed import Seed

    if getattr(args, "builtin", None):
        return _builtin(args)[0]
    if not getattr(args, "seed", None):
        raise UsageError("a seed is required (--seed FILE or --builtin rank3:i)")
    named, _ = _params(getattr(args, "params", None))
    return _parse(args.seed, Seed.from_json, named)


def _maps_from_args(args) -> list[ClusterSymmetricMap]:
    named, _ = _params(args.params) if getattr(args, "params", None) and "=" in args.params else ({}, ())
    maps = [_load_map(p, named) for p in (args.map or [])]
    if getattr(args, "sigma", None):
        for flag in ("s", "b", "r", "Z"):
            if getattr(args, flag) is None:
                raise UsageError(f"inline map needs --{flag}")
        sigma = _ints(args.sigma, "--sigma")
        Z = tuple(int(as_fraction(named.get(z, z))) for z in args.Z.split(","))
        maps.append(ClusterSymmetricMap(sigma, args.s, Seedlet(args.s, _ints(args.b, "--b"), args.r, Z)))
    if getattr(args, "builtin", None) and getattr(args, "mutations", False):
        maps.extend(_builtin(args)[1].generators)
    elif getattr(args, "seed", None) and getattr(args, "mutations", False):
        from .diophantine import mutations_of

        maps.extend(mutations_of(_load_seed(args)))
    if not maps:
        raise UsageError("no map given (use --map FILE, inline --sigma/--s/--b/--r/--Z, or --mutations)")
    return maps


def _names(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def _poly_text(F: LaurentPoly) -> str:
    return format_poly(F, _names(F.n))


# ---------------------------------------------------------------- subcommands


def cmd_invariants(args) -> tuple[Any, str]:
    from .hle import invariants_for_maps

    maps = _maps_from_args(args)
    eta, d = _ints(args.eta, "--eta"), _ints(args.d, "--d")
    report = invariants_for_maps(maps, eta, d)
    lines = [
        f"eta = {list(eta)}, d = {list(d)}",
        f"kernel dimension: {report.dimension}",
        f"filtered dimension: {report.filtered_dimension}",
    ]
    for i, e in enumerate(report.elements, start=1):
        T = normalize_type(e.poly)
        lines.append(f"[{i}] type {list(e.eta)}/{list(e.d)} full_support={str(e.top_support).lower()}")
        lines.append(f"    numerator: {_poly_text(T.T)}")
    return report.to_json(), "\n".join(lines)


def cmd_pairs(args) -> tuple[Any, str]:
    from .discover import find_pairs, format_pairs_table

    F = _load_poly(args.poly)
    if args.d:
        d = _ints(args.d, "--d")
        if len(d) != F.n:
            raise UsageError(f"--d has {len(d)} entries, polynomial has {F.n} variables")
        F = F.shift(tuple(-v for v in d))
    report = find_pairs(F)
    return report.to_json(), format_pairs_table(report)


def cmd_verify(args) -> tuple[Any, str]:
    F = _load_poly(args.poly)
    maps = _maps_from_args(args)
    results = [is_invariant(F, m) for m in maps]
    data = {"invariant": all(results), "per_map": results}
    text = "\n".join(f"{m}: invariant: {str(r).lower()}" for m, r in zip(maps, results))
    if len(maps) > 1:
        text += f"\ninvariant: {str(all(results)).lower()}"
    elif maps:
        text = f"invariant: {str(results[0]).lower()}"
    return data, text


def cmd_seed_set(args) -> tuple[Any, str]:
    from .seed import cluster_symmetric_set

    seed = _load_seed(args)
    entries = cluster_symmetric_set(seed)
    data = [{"sigma": list(e.sigma), "s": e.s, "sign": e.sign} for e in entries]
    text = "\n".join(
        f"sigma={cycle_notation(e.sigma):<12} image={list(e.sigma)} s={e.s} sign={'+' if e.sign > 0 else '-'}"
        for e in entries
    )
    return data, text + f"\n{len(entries)} symmetries"


def cmd_correspond(args) -> tuple[Any, str]:
    from .seed import corresponds

    seed = _load_seed(args)
    maps = _maps_from_args(args)
    results = [corresponds(m, seed) for m in maps]
    return {"corresponds": results}, "\n".join(f"{m}: corresponds: {str(r).lower()}" for m, r in zip(maps, results))


def cmd_seed_search(args) -> tuple[Any, str]:
    from .discover import cluster_symmetric_set_of
    from .seed import seed_search

    if args.poly:
        maps = cluster_symmetric_set_of(_load_poly(args.poly))
    else:
        maps = _maps_from_args(args)
    seeds = seed_search(maps, args.bound, limit=args.limit) if maps else []
    text = "\n".join(str(s) for s in seeds) or "no seed within bound"
    return [s.to_json() for s in seeds], text


def cmd_classify(args) -> tuple[Any, str]:
    from .seed import classify_rank2, classify_rank3

    seed = _load_seed(args)
    if seed.n == 2:
        c = classify_rank2(seed)
        return {"rank": 2, "row": c.row, "sigma": list(c.sigma), "sign": c.sign}, c.label()
    if seed.n == 3:
        label = classify_rank3(seed)
        return {"rank": 3, "class": label}, label
    raise DomainError(f"classification covers ranks 2 and 3, got rank {seed.n}")


def cmd_orbit(args) -> tuple[Any, str]:
    from .diophantine import orbit_enumerate

    _, eq = _builtin(args)
    start = _ints(args.start, "--start") if args.start else (1,) * eq.n
    orbit = orbit_enumerate(eq, start, args.bound)
    data = {"equation": eq.to_json(), "height_bound": args.bound, "orbit": [list(x) for x in orbit]}
    text = "\n".join(" ".join(str(v) for v in x) for x in orbit) + f"\n{len(orbit)} points"
    return data, text


def cmd_descend(args) -> tuple[Any, str]:
    from .diophantine import descend

    _, eq = _builtin(args)
    point = _ints(args.point, "--point")
    if len(point) != eq.n:
        raise UsageError(f"--point needs {eq.n} coordinates")
    word = descend(eq, point)
    return {"point": list(point), "word": word}, "word: " + (" ".join(str(k) for k in word) or "(empty)")


def _suite_job(job):
    from .diophantine import builtin, verify_orbit_equals_solutions

    table, i, params, bound = job
    _, eq = builtin(table, i, params)
    return verify_orbit_equals_solutions(eq, bound).to_json()


def cmd_markov_suite(args) -> tuple[Any, str]:
    from .diophantine import TABLES, parameter_grid

    rows = sorted(TABLES["rank3"]) if args.i == "all" else list(_ints(args.i, "--i"))
    for i in rows:
        if i not in TABLES["rank3"]:
            raise UsageError(f"--i: rank3 has rows 1..{len(TABLES['rank3'])}")
    kgrid = _range_list(args.kgrid, "--kgrid")
    jobs = [("rank3", i, p, args.bound) for i in rows for p in parameter_grid("rank3", i, kgrid)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]
    lines = [
        f"{r['equation']:<9} params={r['params']!s:<10} bound={r['bound']} "
        f"solutions={r['solution_count']:<5} orbit={r['orbit_size']:<5} {'PASS' if r['equal'] else 'FAIL'}"
        for r in results
    ]
    ok = all(r["equal"] for r in results)
    lines.append(f"{sum(r['equal'] for r in results)}/{len(results)} instances agree")
    return {"all_equal": ok, "instances": results}, "\n".join(lines)


# ---------------------------------------------------------------- parser


def _map_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", action="append", help="map JSON file (repeatable)")
    p.add_argument("--sigma", help="inline map: permutation image list, e.g. 2,3,4,5,1")
    p.add_argument("--s", type=int, help="inline map: direction")
    p.add_argument("--b", help="inline map: b vector")
    p.add_argument("--r", type=int, help="inline map: mutation degree")
    p.add_argument("--Z", help="inline map: Z coefficients z0,...,zr")
    p.add_argument("--params", help="parameters, k1=1,k2=0 (named) or 1,0 (table order)")


def _seed_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", help="seed JSON file")
    p.add_argument("--builtin", help="table row, e.g. rank3:7")


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    """Output flags, accepted before or after the subcommand."""
    p.add_argument("--format", choices=("text", "json"), default=default or "text")
    p.add_argument("--out", default=default, help="write output here instead of stdout")
    p.add_argument("--jobs", type=int, default=default or 1, help="worker processes for suites")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csym", description="Cluster symmetric maps, invariants and equations.")
    _global_flags(parser, None)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("invariants", help="solve the linear system for invariants of a given type")
    _map_flags(p)
    _seed_flags(p)
    p.add_argument("--mutations", action="store_true", help="use all mutations of the seed jointly")
    p.add_argument("--eta", required=True)
    p.add_argument("--d", required=True)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("pairs", help="find all non-trivial cluster symmetric pairs of a polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", help="divide the polynomial by x^d first")
    p.add_argument("--json-out", help="also write the JSON report here")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("verify", help="check invariance of a polynomial under maps")
    p.add_argument("--poly", required=True)
    _map_flags(p)
    _seed_flags(p)
    p.add_argument("--mutations", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("seed-set", help="cluster symmetric set of a seed")
    _seed_flags(p)
    p.add_argument("--params")
    p.set_defaults(func=cmd_seed_set)

    p = sub.add_parser("correspond", help="check map-seed correspondence")
    _map_flags(p)
    _seed_flags(p)
    p.set_defaults(func=cmd_correspond)

    p = sub.add_parser("seed-search", help="bounded search for a seed all maps correspond to")
    _map_flags(p)
    p.add_argument("--poly", help="use the maps fixing this polynomial")
    p.add_argument("--bound", type=int, default=3, help="entry bound for B")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_seed_search)

    p = sub.add_parser("classify", help="rank-2 or rank-3 classification of a seed")
    _seed_flags(p)
    p.add_argument("--params")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("orbit", help="mutation orbit under a height bound")
    p.add_argument("--builtin", required=True)
    p.add_argument("--params")
    p.add_argument("--bound", type=int, required=True, help="height bound")
    p.add_argument("--start")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("descend", help="height descent to the all-ones solution")
    p.add_argument("--builtin", required=True)
    p.add_argument("--params")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("markov-suite", help="compare orbit and brute-force solutions for rank-3 rows")
    p.add_argument("--i", default="all")
    p.add_argument("--kgrid", default="0..1")
    p.add_argument("--bound", type=int, default=100)
    p.set_defaults(func=cmd_markov_suite)
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        data, text = args.func(args)
    except UsageError as exc:
        print(f"csym: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, DimensionError) as exc:
        print(f"csym: {exc}", file=sys.stderr)
        return 1
    rendered = json.dumps(data, indent=2) + "\n" if args.format == "json" else text.rstrip("\n") + "\n"
    _emit(rendered, args.out)
    if getattr(args, "json_out", None):
        Path(args.json_out).write_text(json.dumps(data, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
