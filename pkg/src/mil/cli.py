"""``mil``: run verification scenarios and inspect groups."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .families import GROUP_FAMILIES, build_group
from .groups import CapExceeded
from .invariants import Budget
from .report import EXIT_CODES, EXIT_USAGE, INCONCLUSIVE, combine, render_json, render_text
from .scenarios import PARAM_KEYS, SCENARIOS, run_scenario


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mil", description=__doc__)
    ap.add_argument("--version", action="version", version=f"mil {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario (or 'all')")
    run.add_argument("scenario")
    for key in PARAM_KEYS:
        run.add_argument(f"--{key}", type=int, default=None)
    run.add_argument("--max-degree", type=int, default=None, help="largest degree any graded computation may reach")
    run.add_argument("--budget", type=int, default=None, help="largest number of monomials in one graded piece")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--report", choices=("json", "text"), default="text")
    run.add_argument("--recheck", action="store_true", help="re-verify every witness from the serialized report")
    run.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON output")
    run.add_argument("-o", "--output", default=None, help="write the report to a file instead of stdout")

    ls = sub.add_parser("list", help="list scenarios")
    ls.add_argument("--report", choices=("json", "text"), default="text")

    grp = sub.add_parser("group", help="build a group from a family spec, e.g. gu3:q=2:sub=Htilde")
    grp.add_argument("spec")
    grp.add_argument("--describe", action="store_true")
    return ap


def _budget(args) -> Budget:
    kw = {}
    if args.max_degree is not None:
        kw["max_degree"] = args.max_degree
    if args.budget is not None:
        kw["max_monomials"] = args.budget
    return Budget(**kw)


def _run_one(name: str, params: dict, seed: int, budget: Budget, recheck: bool):
    return run_scenario(name, params, seed, budget, recheck)


def cmd_run(args) -> int:
    names = sorted(SCENARIOS) if args.scenario == "all" else [args.scenario]
    if any(n not in SCENARIOS for n in names):
        raise UsageError(f"unknown scenario {args.scenario!r}; try 'mil list'")
    params = {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k) is not None}
    budget = _budget(args)
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            futs = [ex.submit(_run_one, n, params, args.seed, budget, args.recheck) for n in names]
            reports = [f.result() for f in futs]
    else:
        reports = [_run_one(n, params, args.seed, budget, args.recheck) for n in names]
    text = render_json(reports, __version__, args.timings) if args.report == "json" else render_text(reports)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_CODES[combine(r.status for r in reports)]


def cmd_list(args) -> int:
    rows = [
        {"name": s.name, "locator": s.locator, "anchor": s.anchor, "summary": s.summary, "defaults": s.defaults}
        for s in SCENARIOS.values()
    ]
    if args.report == "json":
        sys.stdout.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
    else:
        for r in rows:
            print(f"{r['name']:<20} {r['locator']}")
            print(f"{'':20} anchor: {r['anchor']}")
            print(f"{'':20} {r['summary']}; defaults {json.dumps(r['defaults'], sort_keys=True)}")
    return 0


def cmd_group(args) -> int:
    try:
        G = build_group(args.spec)
    except ValueError as exc:
        raise UsageError(f"{exc}; families: {', '.join(GROUP_FAMILIES)}") from None
    if args.describe:
        sys.stdout.write(json.dumps(G.describe(), indent=2, sort_keys=True) + "\n")
    else:
        print(f"{G!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "list":
            return cmd_list(args)
        return cmd_group(args)
    except UsageError as exc:
        print(f"mil: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"mil: {exc}", file=sys.stderr)
        return EXIT_CODES[INCONCLUSIVE]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
