"""Verification suites run against a scenario.

Every check reduces to one of three shapes:

* ``bound``: a residual whose maximum over the samples must stay below a
  threshold;
* ``exceeds``: a residual that must rise above a threshold somewhere (a
  witness that two things differ);
* ``iff``: a criterion residual and a conclusion residual that must vanish
  together or be clearly nonzero together.  When both are nonzero the check
  passes as an expected inequality.

A sample that raises fails its check with the offending point attached and
the run moves on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..cotangent import (
    complete_lift_raw,
    d_theta_j,
    gamma,
    generalized_lift,
    generalized_lift_tensorial,
    horizontal_basis,
    horizontal_lift,
    horizontal_lift_closed_form,
    omega_st_matrix,
    sato_lift,
    sato_lift_closed_form,
    theta_of_tensor,
    vertical_projection,
)
from ..errors import CotanliftError, PreconditionError
from ..fields import CotangentPoint, finite_difference_gradient, finite_difference_jacobian
from ..hypersurface import (
    compatibility_residual,
    conormal_frame,
    default_probes,
    lagrangian_residual,
    levi_form,
    proplag_audit,
    strict_pseudoconvexity_check,
    totally_real_residual,
)
from ..maps import cotangent_lift_map, holomorphy_residual, z_commutator, z_d_block
from ..structure import (
    Connection,
    apply_j_first,
    apply_j_second,
    bracket_nabla_j,
    bracket_nabla_j_expanded,
    j_nijenhuis,
    j_nijenhuis_closed_form,
    l_condition_residual,
    minimal_complex_connection,
    nabla_j,
    nijenhuis,
    s_prime,
    s_tensor,
    torsion,
)
from .scenario import SUITES, Scenario

__all__ = ["Check", "ANCHORS", "SUITE_RUNNERS", "run_suite", "SampleSet"]

ANCHORS = {
    "def:almost-complex": "J^2 = -Id",
    "def:nijenhuis": "Nijenhuis tensor of J",
    "def:holomorphic-map": "J'(f(x)) df = df J(x)",
    "def:pushforward": "push-forward of J, of a (1,2) tensor, of a connection",
    "def:torsion": "torsion and the derived connections",
    "def:nabla-j": "covariant derivative of J",
    "def:minimal-connection": "almost complex connection with T = N_J / 4",
    "def:cotangent-lift": "lift of a diffeomorphism to T*M",
    "contraction:gamma": "contraction gamma and the forms theta, omega_st",
    "lift:complete": "complete lift J^c",
    "lift:sato": "Sato lift",
    "lift:horizontal": "horizontal lift J^H",
    "lift:generalized": "generalized horizontal lift J^G",
    "prop:propgaud": "J^G unchanged under nabla + L iff L(J.,.) = L(.,J.)",
    "prop:propgaudu": "block form of J^G and J^G = J^c + gamma(S)",
    "thm:propimp(1)": "J^G = Sato lift iff S = -J N_J / 2",
    "thm:propimp(2)": "J^G = J^H iff T(J.,.) = T(.,J.)",
    "thm:propimp(3)": "minimal connection: three lifts agree",
    "lemma:lemdist": "J^G on horizontal vectors and the vertical projection",
    "thm:propprop(1)": "projection is holomorphic",
    "thm:propprop(2)": "zero section is holomorphic",
    "thm:propprop(3)": "lift of f holomorphic iff f holomorphic and f_* S_1 = S_2",
    "thm:theoholo": "fiber multiplication holomorphic iff (nabla J)(J.,.) = (nabla J)(.,J.)",
    "cor:coco1": "J^G independent of the minimal connection",
    "cor:lemmeegal": "J^H(nabla) = J^G(symmetrized nabla)",
    "cor:corcor(1)": "fiber multiplication is Sato-holomorphic",
    "cor:corcor(2)": "fiber multiplication and J^H",
    "cor:corocoro(1)": "Sato lift of f holomorphic iff f holomorphic",
    "cor:corocoro(2)": "J^H lift of f holomorphic iff f holomorphic and brackets match",
    "def:levi-form": "Levi form -d(J^* d rho)(X, JX)",
    "def:strict-pseudoconvexity": "Levi form positive definite",
    "def:conormal-bundle": "covectors annihilating the tangent space",
    "def:totally-real": "tangent space meets its image only at zero",
    "def:lagrangian": "symplectic form vanishes on the tangent space",
    "prop:proplag": "never Lagrangian and compatible at once",
    "rem:omega-st-incompatible": "omega_st is not compatible with J^G",
    "oracle:derivatives": "closed-form derivatives against finite differences",
}


@dataclass
class Check:
    id: str
    anchor: str
    residual: float
    threshold: float
    passed: bool
    relation: str
    witness: list | None = None
    note: str = ""

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise KeyError(f"uncatalogued anchor {self.anchor!r}")


def _as_list(pt) -> list:
    if isinstance(pt, tuple):  # (base point, tangent vector) pairs report the point
        pt = pt[0]
    if hasattr(pt, "xi"):
        pt = pt.xi
    if isinstance(pt, CotangentPoint):
        return [float(v) for v in pt.stacked()]
    return [float(v) for v in np.ravel(pt)]


class _Failed(Exception):
    def __init__(self, point, exc):
        super().__init__(str(exc))
        self.point = point
        self.exc = exc


def _measure(fn: Callable, points: Sequence) -> np.ndarray:
    out = np.empty(len(points))
    for i, pt in enumerate(points):
        try:
            out[i] = float(fn(pt))
        except (CotanliftError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            raise _Failed(pt, exc) from exc
    return out


def _maxabs(A) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.abs(A).max()) if A.size else 0.0


@dataclass
class SampleSet:
    """Deterministic samples for one suite.

    Cotangent samples start with the zero fiber, then three unit-norm
    fibers, then fibers uniform in ``[-1, 1]^n``.
    """

    xs: np.ndarray
    xis: list
    rng: np.random.Generator

    @classmethod
    def draw(cls, scenario: Scenario, suite: str, count: int | None = None) -> "SampleSet":
        rng = np.random.default_rng([scenario.seed, SUITES.index(suite)])
        count = scenario.samples if count is None else count
        box = scenario.domain
        box = box.shrink(1e-3 * float(np.min(box.upper - box.lower)))
        xs = box.sample(rng, count)
        n = scenario.n
        ps = rng.uniform(-1.0, 1.0, size=(count, n))
        ps[0] = 0.0
        for i in range(1, min(4, count)):
            ps[i] /= np.linalg.norm(ps[i])
        return cls(xs, [CotangentPoint(x, p) for x, p in zip(xs, ps)], rng)


class _Recorder:
    def __init__(self, suite: str, scenario: Scenario):
        self.suite = suite
        self.s = scenario
        self.tol = scenario.tolerances
        self.checks: list[Check] = []

    def _id(self, name):
        return f"{self.suite}.{name}"

    def _error(self, name, anchor, threshold, relation, failed: _Failed):
        self.checks.append(
            Check(
                self._id(name), anchor, float("inf"), threshold, False, relation,
                _as_list(failed.point), f"evaluation error: {failed}",
            )
        )

    def bound(self, name, anchor, fn, points, threshold, note=""):
        try:
            vals = _measure(fn, points)
        except _Failed as failed:
            self._error(name, anchor, threshold, "bound", failed)
            return
        k = int(np.argmax(vals)) if len(vals) else 0
        worst = float(vals[k]) if len(vals) else 0.0
        ok = worst <= threshold
        self.checks.append(
            Check(
                self._id(name), anchor, worst, threshold, ok, "bound",
                None if ok else _as_list(points[k]), note,
            )
        )

    def exceeds(self, name, anchor, fn, points, threshold, note=""):
        try:
            vals = _measure(fn, points)
        except _Failed as failed:
            self._error(name, anchor, threshold, "exceeds", failed)
            return
        k = int(np.argmax(vals))
        worst = float(vals[k])
        self.checks.append(
            Check(
                self._id(name), anchor, worst, threshold, worst > threshold, "exceeds",
                _as_list(points[k]), note,
            )
        )

    def iff(self, name, anchor, criterion, conclusion, points, tol=None, separation=None):
        """Criterion and conclusion must hold together or fail together."""
        tol = self.tol["agreement"] if tol is None else tol
        sep = self.tol["separation"] if separation is None else separation
        try:
            crit = _measure(criterion, points)
            concl = _measure(conclusion, points)
        except _Failed as failed:
            self._error(name, anchor, tol, "iff", failed)
            return
        self.iff_values(name, anchor, crit, concl, points, tol, sep)

    def iff_values(self, name, anchor, crit, concl, points, tol, sep):
        def state(v):
            m = float(np.max(v))
            return "holds" if m <= tol else ("fails" if m > sep else "unclear")

        a, b = state(crit), state(concl)
        ok = a == b and a != "unclear"
        k = int(np.argmax(concl))
        if ok:
            note = "EQUALITY" if a == "holds" else "EXPECTED-INEQUALITY"
        else:
            note = f"criterion {a}, conclusion {b}"
        note += f"; criterion max {float(np.max(crit)):.3e}"
        self.checks.append(
            Check(
                self._id(name), anchor, float(np.max(concl)), tol, ok, "iff",
                _as_list(points[k]) if b != "holds" else None, note,
            )
        )

    def verdict(self, name, anchor, ok, residual, threshold, witness=None, note=""):
        self.checks.append(
            Check(
                self._id(name), anchor, float(residual), float(threshold), bool(ok),
                "verdict", None if witness is None else _as_list(witness), note,
            )
        )


# helpers shared by several suites


def _minimal(s: Scenario) -> Connection:
    return s.connection if s.connection_is_minimal else minimal_complex_connection(s.structure)


def _random_symmetric_connection(n: int, rng, scale: float = 0.3) -> Connection:
    C = rng.normal(scale=scale, size=(n, n, n))
    D = rng.normal(scale=scale, size=(n, n, n, n))
    C = 0.5 * (C + C.transpose(0, 2, 1))
    D = 0.5 * (D + D.transpose(0, 2, 1, 3))
    return Connection(n, lambda x: C + D @ x, "random symmetric")


def _push12(F: np.ndarray, R: np.ndarray) -> np.ndarray:
    G = np.linalg.inv(F)
    return np.einsum("ka,abc,bi,cj->kij", F, R, G, G)


def _sq(M: np.ndarray) -> float:
    return _maxabs(M @ M + np.eye(M.shape[0]))


def _is_standard(s: Scenario) -> bool:
    return s.structure_spec.get("type", "standard") == "standard"


# suites


def suite_lift_identity(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "lift_identity")
    J, nabla, n = s.structure, s.connection, s.n
    t = r.tol
    xs, xis = S.xs, S.xis
    r.bound("j_square", "def:almost-complex", J.square_residual, xs, t["identity"])
    r.bound("sato_square", "lift:sato", lambda xi: _sq(sato_lift(J, xi)), xis, t["identity"])
    r.bound(
        "horizontal_square", "lift:horizontal",
        lambda xi: _sq(horizontal_lift(nabla, J, xi)), xis, t["identity"],
    )
    r.bound(
        "generalized_square", "lift:generalized",
        lambda xi: _sq(generalized_lift(nabla, J, xi)), xis, t["identity"],
    )
    r.iff(
        "complete_square_iff_integrable", "lift:complete",
        lambda xi: _maxabs(nijenhuis(J, xi.x)),
        lambda xi: _sq(complete_lift_raw(J, xi)),
        xis, tol=t["identity"],
    )
    W = omega_st_matrix(n)
    r.bound(
        "complete_vs_d_theta_j", "lift:complete",
        lambda xi: _maxabs(complete_lift_raw(J, xi).T @ W - d_theta_j(J, xi)), xis, t["identity"],
    )
    r.bound(
        "j_nijenhuis_two_routes", "def:nijenhuis",
        lambda x: _maxabs(j_nijenhuis(J, x) - j_nijenhuis_closed_form(J, x)), xs, t["identity"],
    )
    r.bound(
        "sato_two_routes", "lift:sato",
        lambda xi: _maxabs(sato_lift(J, xi) - sato_lift_closed_form(J, xi)), xis, t["identity"],
    )
    r.bound(
        "horizontal_two_routes", "lift:horizontal",
        lambda xi: _maxabs(horizontal_lift(nabla, J, xi) - horizontal_lift_closed_form(nabla, J, xi)),
        xis, t["identity"],
    )
    r.bound(
        "generalized_two_routes", "prop:propgaudu",
        lambda xi: _maxabs(generalized_lift(nabla, J, xi) - generalized_lift_tensorial(nabla, J, xi)),
        xis, t["identity"],
    )

    def duality(xi):
        # transposed theta(R) against -omega_st(X, gamma(R) Y), random R, X, Y
        R = S.rng.normal(size=(n, n, n))
        X, Y = S.rng.normal(size=(2, 2 * n))
        lhs = theta_of_tensor(R, xi, Y, X)
        rhs = -(X @ W @ (gamma(R, xi) @ Y))
        return abs(lhs - rhs)

    r.bound("gamma_theta_duality", "contraction:gamma", duality, xis[:100], t["machine"])


def _good_l(B: np.ndarray, Jx: np.ndarray) -> np.ndarray:
    """``L(X, Y) = B(X, Y) - B(JX, JY)``, which satisfies ``L(J., .) = L(., J.)``."""
    return B - apply_j_first(apply_j_second(B, Jx), Jx)


def suite_propgaud(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "propgaud")
    J, nabla, n = s.structure, s.connection, s.n
    xis = S.xis
    B = S.rng.normal(size=(n, n, n))

    def lift_gap(Lfield):
        moved = nabla.plus(Lfield)
        return lambda xi: _maxabs(generalized_lift(nabla, J, xi) - generalized_lift(moved, J, xi))

    good = lambda x: _good_l(B, J(x))  # noqa: E731
    r.iff(
        "j_compatible_l_keeps_lift", "prop:propgaud",
        lambda xi: l_condition_residual(good(xi.x), J(xi.x)), lift_gap(good), xis,
        tol=r.tol["identity"],
    )
    r.iff(
        "generic_l_moves_lift", "prop:propgaud",
        lambda xi: l_condition_residual(B, J(xi.x)), lift_gap(B), xis,
        tol=r.tol["identity"],
    )
    if _is_standard(s):
        # complex multiplication and Euclidean pairing on the first complex line
        Lc = np.zeros((n, n, n))
        Lc[0, 0, 0], Lc[0, 1, 1], Lc[1, 0, 1], Lc[1, 1, 0] = 1.0, -1.0, 1.0, 1.0
        Le = np.zeros((n, n, n))
        Le[0] = np.eye(n)
        r.bound(
            "complex_multiplication_keeps_lift", "prop:propgaud",
            lift_gap(Lc), xis, r.tol["identity"],
        )
        r.exceeds(
            "euclidean_pairing_moves_lift", "prop:propgaud",
            lift_gap(Le), xis, r.tol["separation"],
        )


def suite_propimp(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "propimp")
    J, nabla = s.structure, s.connection
    t = r.tol
    xs, xis = S.xs, S.xis

    r.bound(
        "s_two_routes", "thm:propimp(1)",
        lambda x: _maxabs(s_tensor(nabla, J, x) - s_prime(nabla, J, x)), xs, t["identity"],
    )
    r.bound(
        "bracket_two_routes", "lift:horizontal",
        lambda x: _maxabs(bracket_nabla_j(nabla, J, x) - bracket_nabla_j_expanded(nabla, J, x)),
        xs, t["identity"],
    )
    r.iff(
        "generalized_equals_sato", "thm:propimp(1)",
        lambda xi: _maxabs(s_tensor(nabla, J, xi.x) + 0.5 * j_nijenhuis(J, xi.x)),
        lambda xi: _maxabs(generalized_lift(nabla, J, xi) - sato_lift(J, xi)),
        xis,
    )

    def torsion_criterion(xi):
        T, Jx = torsion(nabla, xi.x), J(xi.x)
        return _maxabs(apply_j_first(T, Jx) - apply_j_second(T, Jx))

    r.iff(
        "generalized_equals_horizontal", "thm:propimp(2)", torsion_criterion,
        lambda xi: _maxabs(generalized_lift(nabla, J, xi) - horizontal_lift(nabla, J, xi)),
        xis,
    )

    try:
        M = _minimal(s)
    except CotanliftError as exc:
        r.verdict("minimal_construction", "def:minimal-connection", False, np.inf, 0.0,
                  note=f"construction failed: {exc}")
        return
    r.bound(
        "minimal_parallel_j", "def:minimal-connection",
        lambda x: _maxabs(nabla_j(M, J, x)), xs, t["agreement"],
    )
    r.bound(
        "minimal_torsion", "def:minimal-connection",
        lambda x: _maxabs(torsion(M, x) - 0.25 * nijenhuis(J, x)), xs, t["agreement"],
    )

    def three_way(xi):
        G = generalized_lift(M, J, xi)
        return max(_maxabs(G - sato_lift(J, xi)), _maxabs(G - horizontal_lift(M, J, xi)))

    r.bound("minimal_three_way", "thm:propimp(3)", three_way, xis, t["agreement"])


def suite_lemdist(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "lemdist")
    J, nabla, n = s.structure, s.connection, s.n
    tol = r.tol["machine"]
    xis = S.xis
    vertical = np.vstack([np.zeros((n, n)), np.eye(n)])

    def horizontal_image(xi):
        Hb = horizontal_basis(nabla, xi)
        return _maxabs(generalized_lift(nabla, J, xi) @ Hb - Hb @ J(xi.x))

    def annihilates(xi):
        Hb = horizontal_basis(nabla, xi)
        return max(_maxabs(vertical_projection(nabla, xi, h)) for h in Hb.T)

    def identity_on_fiber(xi):
        return max(
            _maxabs(vertical_projection(nabla, xi, v) - e)
            for v, e in zip(vertical.T, np.eye(n))
        )

    def splitting_route(xi):
        # J (+) tJ written in the basis (horizontal | vertical), then changed back
        P = np.hstack([horizontal_basis(nabla, xi), vertical])
        Jx = J(xi.x)
        D = np.zeros((2 * n, 2 * n))
        D[:n, :n], D[n:, n:] = Jx, Jx.T
        return _maxabs(generalized_lift(nabla, J, xi) - P @ D @ np.linalg.inv(P))

    r.bound("horizontal_vectors", "lemma:lemdist", horizontal_image, xis, tol)
    r.bound("vertical_projection_kills_horizontal", "lemma:lemdist", annihilates, xis, tol)
    r.bound("vertical_projection_fixes_fiber", "lemma:lemdist", identity_on_fiber, xis, tol)
    r.bound("splitting_definition", "lift:generalized", splitting_route, xis, tol)


def suite_propprop(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "propprop")
    J, nabla, n = s.structure, s.connection, s.n
    t = r.tol
    xis = S.xis
    zero = [CotangentPoint(x, np.zeros(n)) for x in S.xs]
    lifts = {
        "sato": lambda xi: sato_lift(J, xi),
        "horizontal": lambda xi: horizontal_lift(nabla, J, xi),
        "generalized": lambda xi: generalized_lift(nabla, J, xi),
    }
    for kind, L in lifts.items():
        r.bound(
            f"projection_{kind}", "thm:propprop(1)",
            lambda xi, L=L: _maxabs(L(xi)[:n] - np.hstack([J(xi.x), np.zeros((n, n))])),
            xis, t["machine"],
        )
        r.bound(
            f"zero_section_{kind}", "thm:propprop(2)",
            lambda xi, L=L: _maxabs(L(xi)[:, :n] - np.vstack([J(xi.x), np.zeros((n, n))])),
            zero, t["machine"],
        )
    if s.map is None:
        return
    m = s.map
    f, J2, nabla2 = m.f, m.target_structure, m.target_connection
    ft = cotangent_lift_map(f)
    W = omega_st_matrix(n)

    def base_holo(xi):
        return holomorphy_residual(f, J, J2, xi.x)

    def tensor_gap(xi):
        y = f(xi.x)
        pushed = _push12(f.differential(xi.x), s_tensor(nabla, J, xi.x))
        return _maxabs(pushed - s_tensor(nabla2, J2, y))

    r.iff(
        "lift_holomorphic_iff", "thm:propprop(3)",
        lambda xi: max(base_holo(xi), tensor_gap(xi)),
        lambda xi: holomorphy_residual(
            ft, lifts["generalized"], lambda eta: generalized_lift(nabla2, J2, eta), xi
        ),
        xis, tol=t["agreement"], separation=t["lift_witness"],
    )
    r.bound(
        "lift_preserves_liouville", "def:cotangent-lift",
        lambda xi: _maxabs(
            ft.differential(xi).T @ np.concatenate([ft(xi).p, np.zeros(n)])
            - np.concatenate([xi.p, np.zeros(n)])
        ),
        xis, t["identity"],
    )
    r.bound(
        "lift_preserves_omega_st", "def:cotangent-lift",
        lambda xi: _maxabs(ft.differential(xi).T @ W @ ft.differential(xi) - W),
        xis, t["identity"],
    )
    if f.has_inverse:
        r.bound("map_inverse", "def:cotangent-lift", f.inverse_residual, S.xs, t["oracle"])


def suite_theoholo(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "theoholo")
    J, nabla, n = s.structure, s.connection, s.n
    a, b = float(S.rng.uniform(-1, 1)), float(S.rng.uniform(0.5, 1.5))
    xis = S.xis
    r.bound(
        "d_block_formula", "thm:theoholo",
        lambda xi: _maxabs(z_commutator(a, b, J, nabla, xi)[n:, :n] - z_d_block(a, b, J, nabla, xi)),
        xis, r.tol["identity"],
    )

    def criterion(xi):
        NJ, Jx = nabla_j(nabla, J, xi.x), J(xi.x)
        return _maxabs(apply_j_first(NJ, Jx) - apply_j_second(NJ, Jx))

    r.iff(
        "fiber_multiplication_iff", "thm:theoholo", criterion,
        lambda xi: _maxabs(z_commutator(a, b, J, nabla, xi)), xis,
    )


def _z_commutator_with(lift_at, a, b, J, xi) -> np.ndarray:
    from ..maps import fiber_multiplication

    Z = fiber_multiplication(a, b, J)
    dZ = Z.differential(xi)
    return dZ @ lift_at(xi) - lift_at(Z(xi)) @ dZ


def suite_corollaries(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "corollaries")
    J, nabla, n = s.structure, s.connection, s.n
    t = r.tol
    xis = S.xis
    a, b = float(S.rng.uniform(-1, 1)), float(S.rng.uniform(0.5, 1.5))

    r.bound(
        "horizontal_is_generalized_of_symmetrized", "cor:lemmeegal",
        lambda xi: _maxabs(horizontal_lift(nabla, J, xi) - generalized_lift(nabla.symmetrized(), J, xi)),
        xis, t["machine"],
    )
    try:
        M1 = _minimal(s)
        M2 = minimal_complex_connection(J, _random_symmetric_connection(n, S.rng))
    except CotanliftError as exc:
        r.verdict("minimal_construction", "def:minimal-connection", False, np.inf, 0.0,
                  note=f"construction failed: {exc}")
    else:
        r.bound(
            "minimal_connections_agree", "cor:coco1",
            lambda xi: _maxabs(generalized_lift(M1, J, xi) - generalized_lift(M2, J, xi)),
            xis, t["agreement"],
        )
    r.bound(
        "fiber_multiplication_sato", "cor:corcor(1)",
        lambda xi: _maxabs(_z_commutator_with(lambda e: sato_lift(J, e), a, b, J, xi)),
        xis, t["agreement"],
    )
    sym = nabla.symmetrized()

    def sym_criterion(xi):
        NJ, Jx = nabla_j(sym, J, xi.x), J(xi.x)
        return _maxabs(apply_j_first(NJ, Jx) - apply_j_second(NJ, Jx))

    r.iff(
        "fiber_multiplication_horizontal", "cor:corcor(2)", sym_criterion,
        lambda xi: _maxabs(_z_commutator_with(lambda e: horizontal_lift(nabla, J, e), a, b, J, xi)),
        xis,
    )
    if s.map is None:
        return
    m = s.map
    f, J2, nabla2 = m.f, m.target_structure, m.target_connection
    ft = cotangent_lift_map(f)
    base = lambda xi: holomorphy_residual(f, J, J2, xi.x)  # noqa: E731
    r.iff(
        "sato_lift_of_map", "cor:corocoro(1)", base,
        lambda xi: holomorphy_residual(ft, lambda e: sato_lift(J, e), lambda e: sato_lift(J2, e), xi),
        xis, tol=t["agreement"], separation=t["lift_witness"],
    )

    def bracket_gap(xi):
        pushed = _push12(f.differential(xi.x), bracket_nabla_j(nabla, J, xi.x))
        return _maxabs(pushed - bracket_nabla_j(nabla2, J2, f(xi.x)))

    r.iff(
        "horizontal_lift_of_map", "cor:corocoro(2)",
        lambda xi: max(base(xi), bracket_gap(xi)),
        lambda xi: holomorphy_residual(
            ft, lambda e: horizontal_lift(nabla, J, e), lambda e: horizontal_lift(nabla2, J2, e), xi
        ),
        xis, tol=t["agreement"], separation=t["lift_witness"],
    )


def _surface_points(s: Scenario, S: SampleSet, r: _Recorder, count: int):
    try:
        return s.hypersurface.find_points(S.rng, count)
    except CotanliftError as exc:
        r.verdict("surface_points", "def:levi-form", False, np.inf, 0.0, note=str(exc))
        return None


def _levi_fd(s: Scenario, x, X) -> float:
    """Levi value with ``d(J^* d rho)`` taken by finite differences."""
    J, hyp = s.structure, s.hypersurface
    alpha = lambda y: J(y).T @ hyp.gradient(y)  # noqa: E731
    D = finite_difference_jacobian(alpha, x)  # D[i, j] = d_j alpha_i
    W = D.T - D
    return float(-(X @ W @ (J(x) @ X)))


def suite_levi(s: Scenario, r: _Recorder) -> None:
    if s.hypersurface is None:
        r.verdict("hypersurface_present", "def:levi-form", False, np.inf, 0.0,
                  note="scenario has no hypersurface")
        return
    S = SampleSet.draw(s, "levi")
    J, hyp = s.structure, s.hypersurface
    pts = _surface_points(s, S, r, min(s.samples, 100))
    if pts is None:
        return
    tangents = []
    for x in pts:
        T = hyp.tangent_basis(x)
        tangents.append(T @ S.rng.normal(size=T.shape[1]))
    pairs = list(zip(pts, tangents))
    r.bound("on_surface", "def:levi-form", lambda q: abs(hyp.value(q[0])), pairs, hyp.on_tol)

    def oracle(q):
        L = levi_form(hyp, J, *q)
        return abs(L - _levi_fd(s, *q)) / max(1.0, abs(L))

    r.bound("finite_difference_oracle", "def:levi-form", oracle, pairs, r.tol["oracle"])
    expect = s.hypersurface_expect
    if "levi_scale" in expect:
        c = float(expect["levi_scale"])

        def scaled(q):
            L = levi_form(hyp, J, *q)
            target = c * float(q[1] @ q[1])
            return abs(L - target) / (abs(target) if c else 1.0)

        r.bound("levi_scale", "def:levi-form", scaled, pairs, r.tol["identity"])
    if "strict" in expect:
        want = bool(expect["strict"])
        verdicts = [strict_pseudoconvexity_check(hyp, J, x) for x in pts]
        got = [v.strict for v in verdicts]
        lows = [v.literal_min for v in verdicts]
        k = int(np.argmin(lows))
        ok = all(g == want for g in got)
        r.verdict(
            "strict_pseudoconvexity", "def:strict-pseudoconvexity", ok, lows[k], 0.0,
            None if ok else pts[k],
            note=f"expected {'strict' if want else 'not strict'}; min Levi value {lows[k]:.3e}",
        )


def _conormal_frames(s: Scenario, S: SampleSet, pts) -> list:
    frames = []
    for x in pts:
        t = float(S.rng.choice([-1.0, 1.0]) * S.rng.uniform(0.25, 1.0))
        frames.append(conormal_frame(s.hypersurface, x, t))
    return frames


def _project_to_surface(hyp, y, steps: int = 30):
    for _ in range(steps):
        g = hyp.gradient(y)
        step = hyp.value(y) / float(g @ g)
        y = y - step * g
        if abs(step) < 1e-15:
            break
    return y


def suite_conormal(s: Scenario, r: _Recorder) -> None:
    if s.hypersurface is None:
        r.verdict("hypersurface_present", "def:conormal-bundle", False, np.inf, 0.0,
                  note="scenario has no hypersurface")
        return
    S = SampleSet.draw(s, "conormal")
    J, hyp = s.structure, s.hypersurface
    pts = _surface_points(s, S, r, min(s.samples, 100))
    if pts is None:
        return
    frames = _conormal_frames(s, S, pts)
    t = r.tol

    r.bound(
        "annihilates_tangent", "def:conormal-bundle",
        lambda fr: _maxabs(fr.covector @ fr.tangent_basis), frames, t["machine"],
    )
    r.bound(
        "frame_rank", "def:conormal-bundle",
        lambda fr: 1.0 / np.linalg.svd(fr.basis, compute_uv=False).min(),
        frames, 1.0 / t["separation"],
        note="residual is the inverse smallest singular value",
    )

    def curve_oracle(fr, h=1e-4):
        # follow a curve in N*(Gamma) and compare its velocity with the frame
        v = fr.tangent_basis[:, 0]
        ends = []
        for sgn in (1.0, -1.0):
            y = _project_to_surface(hyp, fr.x + sgn * h * v)
            ends.append(np.concatenate([y, fr.t * hyp.gradient(y)]))
        vel = (ends[0] - ends[1]) / (2 * h)
        return _maxabs(vel - fr.basis[:, 0]) / max(1.0, _maxabs(fr.basis[:, 0]))

    r.bound("frame_matches_curves", "def:conormal-bundle", curve_oracle, frames, t["oracle"])

    for nf in s.two_forms:
        expect = nf.expect_lagrangian
        if expect is None:
            expect = nf.name == "canonical"
        fn = lambda fr, nf=nf: lagrangian_residual(nf.form, fr)  # noqa: E731
        if expect:
            r.bound(f"lagrangian_{nf.name}", "def:lagrangian", fn, frames, t["identity"])
        else:
            r.exceeds(f"not_lagrangian_{nf.name}", "def:lagrangian", fn, frames, t["separation"])

    sato_real = [totally_real_residual(lambda xi: sato_lift(J, xi), fr) for fr in frames]
    k = int(np.argmin(sato_real))
    r.verdict(
        "sato_totally_real", "def:totally-real", sato_real[k] > t["separation"],
        sato_real[k], t["separation"], frames[k].xi,
        note="residual is the smallest singular value over the samples",
    )


def suite_proplag(s: Scenario, r: _Recorder) -> None:
    if s.hypersurface is None:
        r.verdict("hypersurface_present", "prop:proplag", False, np.inf, 0.0,
                  note="scenario has no hypersurface")
        return
    S = SampleSet.draw(s, "proplag")
    J, nabla, hyp, n = s.structure, s.connection, s.hypersurface, s.n
    t = r.tol
    pts = _surface_points(s, S, r, min(s.samples, 100))
    if pts is None:
        return
    expect_strict = s.hypersurface_expect.get("strict", True)
    if not expect_strict:
        try:
            proplag_audit(s.two_forms[0].form if s.two_forms else None, hyp, J, nabla, pts[:5])
        except PreconditionError as exc:
            r.verdict("precondition_rejected", "prop:proplag", True, 0.0, 0.0, note=str(exc))
        else:
            r.verdict("precondition_rejected", "prop:proplag", False, 0.0, 0.0,
                      note="audit ran on a hypersurface that is not strictly pseudoconvex")
        return

    probes = default_probes(n, S.rng)
    lifted = lambda xi: generalized_lift(nabla, J, xi)  # noqa: E731
    for nf in s.two_forms:
        try:
            cert = proplag_audit(nf.form, hyp, J, nabla, pts, S.rng, t["identity"], probes)
        except CotanliftError as exc:
            r.verdict(f"disjunction_{nf.name}", "prop:proplag", False, np.inf, 0.0, note=str(exc))
            continue
        bad = cert.violations
        lag_min = float(np.min(cert.lagrangian))
        r.verdict(
            f"disjunction_{nf.name}", "prop:proplag", not bad, len(bad), 0,
            bad[0][0] if bad else None,
            note=f"{len(cert.points)} conormal samples; min Lagrangian residual {lag_min:.3e}",
        )
        if nf.name == "metric_compatible":
            comp = [c for c in cert.compatibility]
            worst = min(comp, key=lambda c: c.margin)
            ok = all(c.compatible for c in comp)
            r.verdict(
                "metric_compatible_is_compatible", "prop:proplag", ok, worst.margin, t["identity"],
                note="residual is the smallest positivity margin",
            )
        if nf.name == "canonical":
            # horizontal and vertical probes: omega_st(U, J^G U) vanishes on one of them
            def margin(fr):
                xi = fr.xi
                P = np.vstack([horizontal_basis(nabla, xi).T, np.eye(2 * n)[n:]])
                return compatibility_residual(nf.form, lifted, xi, P, t["identity"])

            frames = _conormal_frames(s, S, pts)
            results = [margin(fr) for fr in frames]
            k = int(np.argmax([c.margin for c in results]))
            worst = results[k]
            r.verdict(
                "omega_st_incompatible", "rem:omega-st-incompatible",
                all(c.margin <= t["identity"] for c in results), worst.margin, t["identity"],
                frames[k].xi,
                note="residual is the largest, over samples, of the smallest probe margin",
            )


def _field_pairs(s: Scenario) -> list:
    out = []
    for i, f in enumerate(s.structure.fields):
        out.append((f"structure_field_{i}", f, s.domain))
    for i, f in enumerate(s.connection.fields):
        out.append((f"connection_field_{i}", f, s.domain))
    if s.map is not None:
        for i, f in enumerate(s.map.f.fields):
            out.append((f"map_component_{i}", f, s.domain))
    if s.hypersurface is not None:
        out.append(("defining_function", s.hypersurface.rho, s.hypersurface.domain))
    return out


def _rel(a, b) -> float:
    return _maxabs(np.asarray(a) - np.asarray(b)) / max(1.0, _maxabs(a))


def suite_derivative_oracle(s: Scenario, r: _Recorder) -> None:
    S = SampleSet.draw(s, "derivative_oracle", min(s.samples, 100))
    tol = r.tol["oracle"]
    count = len(S.xs)

    def inner(box):
        return box.shrink(1e-3 * float(np.min(box.upper - box.lower))).sample(S.rng, count)

    seen = set()
    for name, f, box in _field_pairs(s):
        if id(f) in seen:
            continue
        seen.add(id(f))
        pts = inner(box)
        r.bound(
            f"{name}_gradient", "oracle:derivatives",
            lambda x, f=f: _rel(f.gradient(x), finite_difference_gradient(f, x)), pts, tol,
        )
        r.bound(
            f"{name}_hessian", "oracle:derivatives",
            lambda x, f=f: _rel(f.hessian(x), finite_difference_jacobian(f.gradient, x)), pts, tol,
        )
    J = s.structure
    r.bound(
        "structure_partials", "oracle:derivatives",
        lambda x: _rel(J.evaluate(x)[1], finite_difference_jacobian(J, x)), S.xs, tol,
    )
    if s.map is not None:
        f = s.map.f
        ft = cotangent_lift_map(f)
        n = s.n
        r.bound(
            "map_jacobian", "oracle:derivatives",
            lambda x: _rel(f.differential(x), finite_difference_jacobian(f, x)), S.xs, tol,
        )

        def lift_differential(xi):
            flat = lambda z: ft(CotangentPoint(z[:n], z[n:])).stacked()  # noqa: E731
            return _rel(ft.differential(xi), finite_difference_jacobian(flat, xi.stacked()))

        r.bound("cotangent_lift_differential", "oracle:derivatives", lift_differential, S.xis, tol)
        if s.map.target == "pushforward":
            J2 = s.map.target_structure
            ys = [f(x) for x in S.xs]
            r.bound(
                "pushed_structure_partials", "oracle:derivatives",
                lambda y: _rel(J2.evaluate(y)[1], finite_difference_jacobian(J2, y)), ys, tol,
            )


SUITE_RUNNERS = {
    "lift_identity": suite_lift_identity,
    "propgaud": suite_propgaud,
    "propimp": suite_propimp,
    "lemdist": suite_lemdist,
    "propprop": suite_propprop,
    "theoholo": suite_theoholo,
    "corollaries": suite_corollaries,
    "levi": suite_levi,
    "conormal": suite_conormal,
    "proplag": suite_proplag,
    "derivative_oracle": suite_derivative_oracle,
}


def run_suite(scenario: Scenario, name: str) -> list[Check]:
    """Run one named suite and return its checks."""
    rec = _Recorder(name, scenario)
    SUITE_RUNNERS[name](scenario, rec)
    return rec.checks
