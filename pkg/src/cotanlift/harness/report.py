"""Run suites over a scenario and render the outcome."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
import scipy

from .scenario import SUITES, Scenario
from .suites import Check, run_suite

__all__ = ["Report", "run_suites", "emit_report", "FORMATS", "UsageError"]

FORMATS = ("human", "machine")


class UsageError(ValueError):
    """Bad command-line or report options."""


@dataclass
class Report:
    scenario: str
    suites: dict
    metadata: dict = field(default_factory=dict)
    expected: str = "pass"

    @property
    def checks(self) -> list[Check]:
        return [c for checks in self.suites.values() for c in checks]

    @property
    def counts(self) -> dict:
        checks = self.checks
        passed = sum(c.passed for c in checks)
        return {"total": len(checks), "pass": passed, "fail": len(checks) - passed}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self, timestamp: bool = True) -> dict:
        meta = dict(self.metadata)
        if not timestamp:
            meta.pop("timestamp", None)
        return {
            "scenario": self.scenario,
            "overall": "pass" if self.passed else "fail",
            "expected": self.expected,
            "summary": self.counts,
            "metadata": meta,
            "suites": {
                name: [_check_dict(c) for c in checks] for name, checks in self.suites.items()
            },
        }


def _num(v):
    # strict JSON has no infinities; an evaluation error reports "inf"
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _check_dict(c: Check) -> dict:
    return {
        "id": c.id,
        "anchor": c.anchor,
        "relation": c.relation,
        "residual": _num(c.residual),
        "threshold": _num(c.threshold),
        "pass": c.passed,
        "witness": c.witness,
        "note": c.note,
    }


def _versions() -> dict:
    from .. import __version__

    return {
        "cotanlift": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def run_suites(scenario: Scenario, suites=None) -> Report:
    """Run the scenario's suites (or ``suites``) in catalogue order."""
    wanted = list(scenario.suites if suites is None else suites)
    unknown = [s for s in wanted if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite name(s): {', '.join(unknown)}")
    results = {name: run_suite(scenario, name) for name in SUITES if name in wanted}
    ids = [c.id for checks in results.values() for c in checks]
    assert len(ids) == len(set(ids)), "duplicate check ids"
    meta = {
        "seed": scenario.seed,
        "samples": scenario.samples,
        "tolerances": dict(scenario.tolerances),
        "versions": _versions(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return Report(scenario.name, results, meta, scenario.expect.get("overall", "pass"))


def _human(report: Report) -> str:
    rows = []
    for checks in report.suites.values():
        for c in checks:
            rows.append(
                (
                    "PASS" if c.passed else "FAIL",
                    c.id,
                    c.anchor,
                    f"{c.residual:.3e}",
                    f"{c.threshold:.1e}",
                    c.note,
                )
            )
    head = ("", "check", "anchor", "residual", "threshold", "note")
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(5)]
    lines = [f"scenario {report.scenario}  seed {report.metadata.get('seed')}  "
             f"samples {report.metadata.get('samples')}"]
    fmt = "  ".join(f"{{:{w}}}" for w in widths) + "  {}"
    lines.append(fmt.format(*head).rstrip())
    for r in rows:
        lines.append(fmt.format(*r).rstrip())
    for c in report.checks:
        if not c.passed and c.witness is not None:
            lines.append(f"witness for {c.id}: {c.witness}")
    k = report.counts
    lines.append(
        f"{k['pass']} passed, {k['fail']} failed: {'PASS' if report.passed else 'FAIL'}"
    )
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "human", timestamp: bool = True) -> str:
    """Render the report as a text table or as JSON with a fixed key order.

    Raises:
        UsageError: unknown format.
    """
    if fmt == "machine":
        return json.dumps(report.to_dict(timestamp), indent=2) + "\n"
    if fmt == "human":
        return _human(report)
    raise UsageError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")
