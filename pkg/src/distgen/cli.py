"""Command-line front end.

Data goes to stdout and diagnostics to stderr.  Exit codes: 0 success,
1 usage/IO/parse error, 2 validation failure, 3 numeric integrity error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, catalog, specfile
from .baseline import make_uniform01
from .errors import DistgenError, IntegrityError, SpecError, ValidationFailed
from .generator import build, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INTEGRITY = 3
RESIDUAL_TOL = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _load(path):
    try:
        return specfile.load(path)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _built(path):
    spec = _load(path)
    return build(spec)


def cmd_validate(path, out=None) -> int:
    out = out or sys.stdout
    report = validate(_load(path))
    print(report.render(), file=out)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_curve(path, start: float, stop: float, points: int, include_density: bool = False,
              out=None) -> int:
    out = out or sys.stdout
    if points < 2:
        raise _UsageError("--points must be at least 2")
    H = _built(path)
    xs = np.linspace(start, stop, points)
    cdf = H.eval_cdf(xs)
    rows = [xs, cdf]
    if include_density:
        rows.append(H.eval_density(xs))
    print("x,cdf,pdf" if include_density else "x,cdf", file=out)
    for vals in zip(*rows):
        print(",".join(_fmt(v) for v in vals), file=out)
    return EXIT_OK


def cmd_sample(path, count: int, seed: int, out=None) -> int:
    out = out or sys.stdout
    if count < 0:
        raise _UsageError("-n must be nonnegative")
    H = _built(path)
    for v in H.sample(count, seed):
        print(_fmt(v), file=out)
    return EXIT_OK


def cmd_support(path, grid: int = 1001, out=None) -> int:
    out = out or sys.stdout
    spec = _load(path)
    H = build(spec)
    exact = analysis.support_exact_if_T4(spec)
    if exact is not None:
        print(exact.render(), file=out)
    else:
        print("support certificate unavailable; reporting numeric scan", file=sys.stderr)
        print(analysis.numeric_support_scan(H, grid).render(), file=out)
    return EXIT_OK


def cmd_nature(path, out=None) -> int:
    out = out or sys.stdout
    spec = _load(path)
    build(spec)
    print(analysis.classify_nature(spec).render(), file=out)
    return EXIT_OK


def _preset_text(p: dict) -> str:
    return ", ".join(f"{k}={v:g}" for k, v in p.items())


def cmd_catalog(sub: str, name: str | None = None, grid: int = 101, out=None) -> int:
    out = out or sys.stdout
    if sub == "list":
        for n in catalog.list_entries():
            print(n, file=out)
        return EXIT_OK
    if name is None:
        raise _UsageError("catalog check needs an entry name")
    if grid < 2:
        raise _UsageError("--grid must be at least 2")
    try:
        entry = catalog.get_entry(name)
    except SpecError:
        raise SpecError(f"unknown entry {name!r}") from None
    G = make_uniform01()
    worst = 0.0
    for p in entry.presets:
        for route in entry.routes:
            r = catalog.reduction_residual(entry, p, G, grid, route)
            worst = max(worst, r)
            print(f"{name} ({_preset_text(p)}) via {route}: residual {r:.3e}", file=out)
    status = "ok" if worst <= RESIDUAL_TOL else "FAILED"
    print(f"max residual {worst:.3e} ({status})", file=out)
    return EXIT_OK if worst <= RESIDUAL_TOL else EXIT_INVALID


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="distgen", description="Build and inspect generated distribution families.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check the generator conditions of a spec file")
    v.add_argument("path")

    c = sub.add_parser("curve", help="CDF (and density) on an even grid, as CSV")
    c.add_argument("path")
    c.add_argument("--from", dest="start", type=float, required=True)
    c.add_argument("--to", dest="stop", type=float, required=True)
    c.add_argument("--points", type=int, default=101)
    c.add_argument("--density", action="store_true")

    s = sub.add_parser("sample", help="inverse-transform samples, one per line")
    s.add_argument("path")
    s.add_argument("-n", dest="count", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)

    su = sub.add_parser("support", help="support of H")
    su.add_argument("path")
    su.add_argument("--grid", type=int, default=1001)

    na = sub.add_parser("nature", help="discrete / continuous classification")
    na.add_argument("path")

    ca = sub.add_parser("catalog", help="list catalog entries or check their reductions")
    ca.add_argument("action", choices=["list", "check"])
    ca.add_argument("name", nargs="?")
    ca.add_argument("--grid", type=int, default=101)
    return p


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if args.command == "validate":
            return cmd_validate(args.path)
        if args.command == "curve":
            return cmd_curve(args.path, args.start, args.stop, args.points, args.density)
        if args.command == "sample":
            return cmd_sample(args.path, args.count, args.seed)
        if args.command == "support":
            return cmd_support(args.path, args.grid)
        if args.command == "nature":
            return cmd_nature(args.path)
        return cmd_catalog(args.action, args.name, args.grid)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(exc.report.render(), file=sys.stderr)
        return EXIT_INVALID
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except DistgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
