"""Scenario files, verification suites and the command-line runner."""

from .report import Report, UsageError, emit_report, run_suites
from .scenario import Scenario, ScenarioError, bundled_scenarios, load_scenario, parse_scenario
from .suites import ANCHORS, Check

__all__ = [
    "ANCHORS",
    "Check",
    "Report",
    "Scenario",
    "ScenarioError",
    "UsageError",
    "bundled_scenarios",
    "emit_report",
    "load_scenario",
    "parse_scenario",
    "run_suites",
]
