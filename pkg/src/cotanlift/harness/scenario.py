"""Scenario documents: a chart, a structure, a connection and what to verify.

Scenarios are JSON.  Component tables are keyed by index strings such as
``"k=1,i=1,j=2"`` (1-based); each value is a scalar field in the form read
by :func:`cotanlift.fields.parse_scalar_field`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from ..cotangent import TwoFormField, generalized_lift, omega_st
from ..errors import CotanliftError
from ..fields import Box, Polynomial, TensorField, parse_index_key, parse_scalar_field
from ..hypersurface import Hypersurface, canonical_plus, metric_compatible_form
from ..maps import SmoothMap, pushforward_connection, pushforward_structure
from ..structure import (
    AlmostComplexStructure,
    Connection,
    conjugated_structure,
    minimal_complex_connection,
    standard_structure,
)

__all__ = [
    "ScenarioError",
    "Scenario",
    "MapSetup",
    "NamedForm",
    "SUITES",
    "DEFAULT_TOLERANCES",
    "parse_scenario",
    "load_scenario",
    "bundled_scenarios",
    "bundled_path",
]

SUITES = (
    "lift_identity",
    "propgaud",
    "propimp",
    "lemdist",
    "propprop",
    "theoholo",
    "corollaries",
    "levi",
    "conormal",
    "proplag",
    "derivative_oracle",
)

DEFAULT_TOLERANCES = {
    "identity": 1e-10,  # exact identities on sampled points
    "agreement": 1e-9,  # equalities through a constructed connection
    "machine": 1e-12,  # equal formulas, rounding only
    "separation": 1e-6,  # a failing side of an iff must exceed this
    "lift_witness": 1e-3,  # witnesses for lifted-map holomorphy failures
    "oracle": 1e-5,  # finite-difference agreement, relative
}


class ScenarioError(CotanliftError, ValueError):
    """The scenario document is malformed or fails validation."""


@dataclass
class MapSetup:
    f: SmoothMap
    target_structure: AlmostComplexStructure
    target_connection: Connection
    target: str
    spec: dict


@dataclass
class NamedForm:
    name: str
    form: TwoFormField
    expect_lagrangian: bool | None = None
    spec: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    n: int
    domain: Box
    structure: AlmostComplexStructure
    connection: Connection
    suites: list
    samples: int = 200
    seed: int = 12345
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    structure_spec: dict = field(default_factory=dict)
    connection_spec: dict = field(default_factory=dict)
    map: MapSetup | None = None
    hypersurface: Hypersurface | None = None
    hypersurface_expect: dict = field(default_factory=dict)
    two_forms: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, repr=False)

    @property
    def connection_is_minimal(self) -> bool:
        return self.connection_spec.get("type") == "minimal_complex"


def _require(doc: dict, key: str, where: str = "scenario"):
    if key not in doc:
        raise ScenarioError(f"{where} is missing {key!r}")
    return doc[key]


def _component_table(spec: dict, n: int, names: tuple, domain: Box) -> TensorField:
    comps = {}
    table = spec.get("components", {})
    if not isinstance(table, dict):
        raise ScenarioError("components must be an object keyed by index strings")
    for key, val in table.items():
        idx = parse_index_key(key, names)
        if any(i >= n for i in idx):
            raise ScenarioError(f"index {key!r} exceeds dimension {n}")
        comps[idx] = parse_scalar_field(val, n, domain)
    return TensorField(n, len(names), comps, domain)


def _structure(spec: dict, n: int, domain: Box) -> AlmostComplexStructure:
    kind = spec.get("type", "standard")
    if kind == "standard":
        return standard_structure(n)
    if kind == "conjugated":
        pert = _component_table(
            {"components": spec.get("perturbation", {})}, n, ("i", "j"), domain
        )
        return conjugated_structure(pert, name="conjugated")
    if kind == "explicit":
        field_ = _component_table(spec, n, ("k", "l"), domain)
        return AlmostComplexStructure.from_tensor_field(field_, name="explicit")
    raise ScenarioError(f"unknown structure type {kind!r}")


def _connection(spec: dict, n: int, domain: Box, J: AlmostComplexStructure) -> Connection:
    kind = spec.get("type", "flat")
    if kind == "flat":
        return Connection.flat(n)
    if kind == "christoffel":
        return Connection.from_tensor_field(
            _component_table(spec, n, ("k", "i", "j"), domain), name="christoffel"
        )
    if kind == "minimal_complex":
        base = _connection(spec.get("base", {"type": "flat"}), n, domain, J)
        return minimal_complex_connection(J, base)
    if kind == "symmetrized":
        return _connection(_require(spec, "of", "symmetrized connection"), n, domain, J).symmetrized()
    if kind == "transposed":
        return _connection(_require(spec, "of", "transposed connection"), n, domain, J).transposed()
    raise ScenarioError(f"unknown connection type {kind!r}")


def _smooth_map(spec: dict, n: int) -> SmoothMap:
    kind = _require(spec, "type", "map")
    if kind == "translation":
        vec = spec.get("vector", [0.0] * n)
        if len(vec) != n:
            raise ScenarioError("translation vector has the wrong length")
        return SmoothMap.translation(vec)
    if kind == "linear":
        A = np.asarray(_require(spec, "matrix", "linear map"), dtype=float)
        if A.shape != (n, n) or abs(np.linalg.det(A)) < 1e-12:
            raise ScenarioError("linear map needs an invertible n x n matrix")
        return SmoothMap.linear(A)
    if kind == "square":
        if n != 2:
            raise ScenarioError("the square map is defined for n = 2")
        return SmoothMap.square()
    if kind == "conjugate":
        return SmoothMap.conjugation(n)
    if kind == "explicit":
        comps = [parse_scalar_field(c, n) for c in _require(spec, "components", "explicit map")]
        if len(comps) != n or not all(isinstance(c, Polynomial) for c in comps):
            raise ScenarioError("explicit maps need n polynomial components")
        inverse = None
        if "inverse" in spec:
            inv = [parse_scalar_field(c, n) for c in spec["inverse"]]
            if len(inv) != n:
                raise ScenarioError("explicit inverse needs n components")
            inverse = lambda y: np.array([c.value(y) for c in inv])  # noqa: E731
        return SmoothMap.from_polynomials(comps, inverse, name="explicit")
    raise ScenarioError(f"unknown map type {kind!r}")


def _two_form(spec: dict, n: int, J, nabla) -> NamedForm:
    kind = spec.get("type", "canonical")
    expect = spec.get("expect_lagrangian")
    if kind == "canonical":
        return NamedForm("canonical", omega_st(n), expect, spec)
    if kind == "canonical_plus":
        terms = [(float(c), str(a), str(b)) for c, a, b in spec.get("terms", [])]
        return NamedForm("canonical_plus", canonical_plus(n, terms), expect, spec)
    if kind == "metric_compatible":
        lifted = lambda xi: generalized_lift(nabla, J, xi)  # noqa: E731
        return NamedForm("metric_compatible", metric_compatible_form(lifted, n), expect, spec)
    raise ScenarioError(f"unknown two-form type {kind!r}")


def parse_scenario(doc: dict | str) -> Scenario:
    """Build and validate a :class:`Scenario` from a JSON document or its text.

    Raises:
        ScenarioError: on any structural or validation problem, including an
            odd dimension, an unknown suite, or an explicit structure whose
            square is not ``-I`` at one of 50 probe points.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        return _parse(doc)
    except ScenarioError:
        raise
    except CotanliftError as exc:
        raise ScenarioError(str(exc)) from exc


def _parse(doc: dict) -> Scenario:
    name = str(doc.get("name", "scenario"))
    n = _require(doc, "dimension")
    if not isinstance(n, int) or n < 2:
        raise ScenarioError("dimension must be a positive even integer")
    if n % 2:
        raise ScenarioError("dimension must be even")
    domain = Box.from_pairs(doc["domain"]) if "domain" in doc else Box.cube(n)
    if domain.n != n:
        raise ScenarioError("domain box dimension differs from dimension")

    suites = list(doc.get("suites", []))
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ScenarioError(f"unknown suite name(s): {', '.join(unknown)}")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in doc.get("tolerances", {}).items():
        if key not in tolerances:
            raise ScenarioError(f"unknown tolerance {key!r}")
        tolerances[key] = float(val)

    structure_spec = doc.get("structure", {"type": "standard"})
    J = _structure(structure_spec, n, domain)
    probes = domain.sample(np.random.default_rng(2024), 50)
    try:
        J.validate(probes, tol=1e-10)
    except CotanliftError as exc:
        raise ScenarioError(f"structure is not almost complex: {exc}") from exc

    connection_spec = doc.get("connection", {"type": "flat"})
    nabla = _connection(connection_spec, n, domain, J)

    scenario = Scenario(
        name=name,
        n=n,
        domain=domain,
        structure=J,
        connection=nabla,
        suites=suites,
        samples=int(doc.get("samples", 200)),
        seed=int(doc.get("seed", 12345)),
        tolerances=tolerances,
        structure_spec=structure_spec,
        connection_spec=connection_spec,
        expect=doc.get("expect", {}),
        source=doc,
    )

    if "map" in doc:
        mspec = doc["map"]
        f = _smooth_map(mspec, n)
        target = mspec.get("target", "same")
        if target == "same":
            J2, nabla2 = J, nabla
        elif target == "pushforward":
            J2, nabla2 = pushforward_structure(f, J), pushforward_connection(f, nabla)
        else:
            raise ScenarioError(f"unknown map target {target!r}")
        scenario.map = MapSetup(f, J2, nabla2, target, mspec)

    if "hypersurface" in doc:
        hspec = doc["hypersurface"]
        hbox = Box.from_pairs(hspec["domain"]) if "domain" in hspec else domain
        rho = parse_scalar_field(_require(hspec, "rho", "hypersurface"), n, hbox)
        scenario.hypersurface = Hypersurface(rho, hbox, hspec.get("name", "Gamma"))
        scenario.hypersurface_expect = dict(hspec.get("expect", {}))

    for fspec in doc.get("two_forms", []):
        scenario.two_forms.append(_two_form(fspec, n, J, nabla))

    if scenario.samples < 1:
        raise ScenarioError("samples must be positive")
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file, or a bundled scenario by name."""
    p = Path(path)
    if not p.exists():
        bundled = bundled_path(str(path))
        if bundled is None:
            raise ScenarioError(f"no scenario file or bundled scenario named {str(path)!r}")
        p = bundled
    return parse_scenario(p.read_text())


def _bundle_dir():
    return resources.files("cotanlift.harness") / "scenarios"


def bundled_scenarios() -> list[str]:
    return sorted(
        entry.name[: -len(".json")]
        for entry in _bundle_dir().iterdir()
        if entry.name.endswith(".json")
    )


def bundled_path(name: str) -> Any:
    name = name[: -len(".json")] if name.endswith(".json") else name
    entry = _bundle_dir() / f"{name}.json"
    return entry if entry.is_file() else None
