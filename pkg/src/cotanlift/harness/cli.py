"""``cotanlift verify <scenario> ...``: run verification suites from a scenario file.

Every option can also come from the environment: ``COTANLIFT_FORMAT``,
``COTANLIFT_SAMPLES``, ``COTANLIFT_SEED``, ``COTANLIFT_TOLERANCE`` and
``COTANLIFT_SUITES`` (comma separated).  Flags win over the environment.

Exit codes: 0 all checks pass, 1 some check fails, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .report import FORMATS, UsageError, emit_report, run_suites
from .scenario import SUITES, ScenarioError, bundled_scenarios, load_scenario

ENV_PREFIX = "COTANLIFT_"

# thresholds replaced by --tolerance; witness thresholds and the oracle stay put
_EQUALITY_TOLERANCES = ("identity", "agreement", "machine")


def _env(name: str, cast=str):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cotanlift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the suites of a scenario")
    verify.add_argument("scenario", help="scenario JSON file or bundled scenario name")
    verify.add_argument("--format", choices=FORMATS, default=None)
    verify.add_argument("--samples", type=int, default=None)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument(
        "--tolerance", type=float, default=None,
        help="replace the equality thresholds (identity, agreement, machine)",
    )
    verify.add_argument(
        "--suite", action="append", choices=SUITES, default=None,
        help="run only this suite; repeatable",
    )
    sub.add_parser("list", help="list bundled scenarios")
    return parser


def _verify(args) -> int:
    fmt = args.format or _env("FORMAT") or "human"
    samples = args.samples if args.samples is not None else _env("SAMPLES", int)
    seed = args.seed if args.seed is not None else _env("SEED", int)
    tol = args.tolerance if args.tolerance is not None else _env("TOLERANCE", float)
    suites = args.suite
    if suites is None and _env("SUITES"):
        suites = [s.strip() for s in _env("SUITES").split(",") if s.strip()]
    if fmt not in FORMATS:
        raise UsageError(f"unknown report format {fmt!r}")
    if samples is not None and samples < 1:
        raise UsageError("--samples must be positive")
    if tol is not None and not tol > 0:
        raise UsageError("--tolerance must be positive")

    scenario = load_scenario(args.scenario)
    if samples is not None:
        scenario.samples = samples
    if seed is not None:
        scenario.seed = seed
    if tol is not None:
        for key in _EQUALITY_TOLERANCES:
            scenario.tolerances[key] = tol
    report = run_suites(scenario, suites)
    sys.stdout.write(emit_report(report, fmt))
    return report.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in bundled_scenarios():
                print(name)
            return 0
        return _verify(args)
    except (UsageError, ScenarioError) as exc:
        print(f"cotanlift: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
