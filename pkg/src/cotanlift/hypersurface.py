"""Real hypersurfaces, Levi forms and conormal bundles.

A hypersurface is ``{rho = 0}`` for a defining function with exact first and
second derivatives.  The audits here compare three pointwise properties of
the conormal bundle at sampled points: whether a two-form vanishes on it
(Lagrangian), whether a lifted structure moves it off itself (totally real),
and whether the two-form is compatible with the lifted structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .cotangent import TwoFormField, generalized_lift, omega_st
from .errors import DomainError, FrameError, ParameterError, PreconditionError, ShapeError
from .fields import Box, CotangentPoint
from .structure import AlmostComplexStructure, Connection

__all__ = [
    "DegenerateHypersurfaceError",
    "Hypersurface",
    "ConormalFrame",
    "LeviVerdict",
    "Compatibility",
    "ProplagCertificate",
    "levi_form",
    "levi_matrix",
    "strict_pseudoconvexity_check",
    "conormal_frame",
    "totally_real_residual",
    "lagrangian_residual",
    "compatibility_residual",
    "default_probes",
    "canonical_plus",
    "metric_compatible_form",
    "proplag_audit",
]


class DegenerateHypersurfaceError(DomainError):
    """The defining function has vanishing differential at the point."""


class Hypersurface:
    """The level set ``{rho = 0}`` inside a coordinate box."""

    def __init__(self, rho, domain: Box, name: str = "Gamma", on_tol: float = 1e-9):
        if rho.n != domain.n:
            raise ShapeError("defining function and domain dimensions differ")
        self.rho = rho
        self.domain = domain
        self.n = domain.n
        self.name = name
        self.on_tol = on_tol

    def value(self, x) -> float:
        return self.rho.value(x)

    def gradient(self, x) -> np.ndarray:
        return self.rho.gradient(x)

    def hessian(self, x) -> np.ndarray:
        return self.rho.hessian(x)

    def check_point(self, x) -> np.ndarray:
        """Return ``d rho(x)`` after checking ``x`` lies on the hypersurface."""
        x = np.asarray(x, dtype=float)
        r = self.value(x)
        if abs(r) > self.on_tol:
            raise PreconditionError(f"point {x.tolist()} is off the hypersurface (rho = {r:.2e})")
        g = self.gradient(x)
        if np.linalg.norm(g) < 1e-6:
            raise DegenerateHypersurfaceError(f"d rho vanishes at {x.tolist()}")
        return g

    def tangent_basis(self, x) -> np.ndarray:
        """Orthonormal basis of ``T_x Gamma`` as columns."""
        return null_space(self.check_point(x)[None, :])

    def find_points(
        self, rng: np.random.Generator, count: int, max_tries: int = 10000, xtol: float = 1e-12
    ) -> np.ndarray:
        """Points on the hypersurface by root finding along random rays.

        Each ray starts at a uniform interior seed, runs in a uniform random
        direction until it leaves the box, and is scanned for a sign change
        of ``rho``; the first bracket is refined with Brent's method.
        """
        found = []
        box = self.domain
        for _ in range(max_tries):
            if len(found) == count:
                break
            seed = box.sample(rng, 1)[0]
            d = rng.standard_normal(self.n)
            d /= np.linalg.norm(d)
            with np.errstate(divide="ignore"):
                exits = np.where(d > 0, (box.upper - seed) / d, (box.lower - seed) / d)
            t_max = float(np.min(exits[np.isfinite(exits)]))
            ts = np.linspace(0.0, t_max, 33)
            vals = np.array([self.value(seed + t * d) for t in ts])
            flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
            if not len(flips):
                continue
            k = flips[0]
            t = brentq(lambda s: self.value(seed + s * d), ts[k], ts[k + 1], xtol=xtol)
            x = seed + t * d
            if np.linalg.norm(self.gradient(x)) >= 1e-6:
                found.append(x)
        if len(found) < count:
            raise PreconditionError(
                f"found only {len(found)} of {count} points on {self.name} inside the box"
            )
        return np.array(found)


# Levi form


def levi_matrix(gamma: Hypersurface, J: AlmostComplexStructure, x) -> np.ndarray:
    """Coefficients of ``d(J^* d rho)`` at ``x``: ``d alpha(U, V) = U^T W V``.

    ``alpha_i = (d_k rho) J^k_i`` and ``W[j, i] = d_j alpha_i - d_i alpha_j``.
    """
    x = np.asarray(x, dtype=float)
    g = gamma.gradient(x)
    H = gamma.hessian(x)
    Jx, dJ = J.evaluate(x)
    # da[j, i] = d_j alpha_i
    da = H @ Jx + np.einsum("k,kij->ji", g, dJ)
    return da - da.T


def levi_form(gamma: Hypersurface, J: AlmostComplexStructure, x, X) -> float:
    """``-d(J^* d rho)(X, JX)`` for a tangent vector ``X`` at ``x``.

    Raises:
        PreconditionError: ``x`` is off the hypersurface or ``X`` is not tangent.
        DegenerateHypersurfaceError: ``d rho(x) = 0``.
    """
    x = np.asarray(x, dtype=float)
    X = np.asarray(X, dtype=float)
    g = gamma.check_point(x)
    if abs(g @ X) > 1e-9 * np.linalg.norm(g) * max(1.0, np.linalg.norm(X)):
        raise PreconditionError("X is not tangent to the hypersurface")
    W = levi_matrix(gamma, J, x)
    return float(-(X @ W @ (J(x) @ X)))


@dataclass
class LeviVerdict:
    """Outcome of a strict pseudoconvexity check at one point.

    ``literal_min`` is the smallest Levi value over unit vectors of
    ``T_x Gamma``; ``complex_min`` the same over the J-invariant part
    ``T_x Gamma ∩ J T_x Gamma``.  The verdict uses the literal minimum.
    """

    strict: bool
    literal_min: float
    complex_min: float
    tangent_dim: int
    complex_dim: int


def _min_on(Q: np.ndarray, B: np.ndarray) -> float:
    if B.shape[1] == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(B.T @ Q @ B).min())


def strict_pseudoconvexity_check(
    gamma: Hypersurface, J: AlmostComplexStructure, x, tol: float = 1e-10
) -> LeviVerdict:
    x = np.asarray(x, dtype=float)
    g = gamma.check_point(x)
    Jx = J(x)
    WJ = levi_matrix(gamma, J, x) @ Jx
    Q = -0.5 * (WJ + WJ.T)  # Levi value is X^T Q X
    T = null_space(g[None, :])
    H = null_space(np.vstack([g, g @ Jx]))
    lit = _min_on(Q, T)
    return LeviVerdict(lit > tol, lit, _min_on(Q, H), T.shape[1], H.shape[1])


# conormal bundle


@dataclass
class ConormalFrame:
    """Tangent data of the conormal bundle at ``xi = (x, t d rho(x))``.

    ``basis`` holds ``n`` columns of length ``2n``: ``(v; t Hess(rho) v)`` for
    an orthonormal basis ``v`` of ``T_x Gamma``, then the fiber direction
    ``(0; d rho(x))``.
    """

    x: np.ndarray
    t: float
    covector: np.ndarray
    tangent_basis: np.ndarray
    basis: np.ndarray

    @property
    def xi(self) -> CotangentPoint:
        return CotangentPoint(self.x, self.covector)


def conormal_frame(gamma: Hypersurface, x, t: float, zero_section: bool = False) -> ConormalFrame:
    """Frame of ``T_xi N*(Gamma)`` at the conormal point over ``x`` with scale ``t``.

    ``t = 0`` is only accepted with ``zero_section=True``.
    """
    if t == 0 and not zero_section:
        raise ParameterError("t = 0 is the zero section; pass zero_section=True")
    x = np.asarray(x, dtype=float)
    g = gamma.check_point(x)
    V = null_space(g[None, :])
    H = gamma.hessian(x)
    n = gamma.n
    horiz = np.vstack([V, t * H @ V])
    fiber = np.concatenate([np.zeros(n), g])[:, None]
    return ConormalFrame(x, float(t), t * g, V, np.hstack([horiz, fiber]))


def _orthonormal(B: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(B, compute_uv=False)
    if s.size < B.shape[1] or s.min() < 1e-10 * max(1.0, s.max()):
        raise FrameError("frame vectors are linearly dependent")
    Q, _ = np.linalg.qr(B)
    return Q


def totally_real_residual(J_lift, frame: ConormalFrame) -> float:
    """Smallest singular value of ``[Q | M Q]``.

    ``Q`` is an orthonormal basis of the frame span and ``M`` the lifted
    structure at the frame point.  The value is positive exactly when the
    span meets its image under ``M`` only in ``0`` (for a middle-dimensional
    span this means the two together fill ``T_xi T*M``).

    Raises:
        FrameError: the frame basis is rank deficient.
    """
    Q = _orthonormal(frame.basis)
    M = J_lift(frame.xi) if callable(J_lift) else np.asarray(J_lift)
    return float(np.linalg.svd(np.hstack([Q, M @ Q]), compute_uv=False).min())


def lagrangian_residual(omega: TwoFormField, frame: ConormalFrame) -> float:
    """``max |omega(b_i, b_j)|`` over pairs of frame vectors."""
    W = omega(frame.xi)
    B = frame.basis
    return float(np.abs(B.T @ W @ B).max())


@dataclass
class Compatibility:
    invariance: float
    margin: float
    witness: np.ndarray
    tol: float = 1e-10
    require_positivity: bool = True

    @property
    def compatible(self) -> bool:
        ok = self.invariance <= self.tol
        if self.require_positivity:
            ok = ok and self.margin > self.tol
        return ok


def default_probes(n: int, rng: np.random.Generator | None = None, extra: int = 16) -> np.ndarray:
    """Coordinate basis of ``T(T*M)`` plus random unit vectors, one per row."""
    rng = rng or np.random.default_rng(0)
    R = rng.standard_normal((extra, 2 * n))
    R /= np.linalg.norm(R, axis=1, keepdims=True)
    return np.vstack([np.eye(2 * n), R])


def compatibility_residual(
    omega: TwoFormField,
    J_lift,
    xi,
    probes: Sequence[np.ndarray] | None = None,
    tol: float = 1e-10,
    require_positivity: bool = True,
) -> Compatibility:
    """Invariance residual ``max |omega(MU, MV) - omega(U, V)|`` and positivity
    margin ``min omega(U, MU) / |U|^2`` over the probes.

    ``require_positivity=False`` drops the positivity half of the verdict.

    Raises:
        ParameterError: a probe vector is zero.
    """
    xi = xi if isinstance(xi, CotangentPoint) else CotangentPoint(*xi)
    W = omega(xi)
    M = J_lift(xi) if callable(J_lift) else np.asarray(J_lift)
    P = np.asarray(default_probes(xi.n) if probes is None else probes, dtype=float)
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms == 0):
        raise ParameterError("probe vectors must be nonzero")
    MP = P @ M.T
    inv = np.abs(MP @ W @ MP.T - P @ W @ P.T).max()
    tame = np.einsum("ia,ab,ib->i", P, W, MP) / norms**2
    k = int(np.argmin(tame))
    return Compatibility(float(inv), float(tame[k]), P[k], tol, require_positivity)


def canonical_plus(n: int, terms: Sequence[tuple[float, str, str]]) -> TwoFormField:
    """``omega_st`` plus constant terms ``c da ^ db`` named like ``("x2", "p1")``."""

    def slot(name: str) -> int:
        kind, idx = name[0], int(name[1:]) - 1
        if kind not in "xp" or not 0 <= idx < n:
            raise ParameterError(f"bad coordinate name {name!r}")
        return idx if kind == "x" else n + idx

    extra = np.zeros((2 * n, 2 * n))
    for c, a, b in terms:
        i, j = slot(a), slot(b)
        extra[i, j] += c
        extra[j, i] -= c
    base = omega_st(n)
    return TwoFormField(n, lambda xi: base(xi) + extra, "omega_st+extra")


def metric_compatible_form(
    J_lift, n: int, metric: Callable[[CotangentPoint], np.ndarray] | None = None
) -> TwoFormField:
    """``omega(U, V) = g(MU, V)`` with ``g`` the M-invariant average of a metric.

    ``g = (g0 + M^T g0 M) / 2`` for ``g0`` the identity unless given, so
    ``omega`` is antisymmetric, M-invariant and ``omega(U, MU) = |MU|_g^2``.
    The form is built pointwise; closedness is not part of the construction.
    """

    def evaluate(xi):
        M = J_lift(xi)
        g0 = np.eye(2 * n) if metric is None else metric(xi)
        g = 0.5 * (g0 + M.T @ g0 @ M)
        W = M.T @ g
        return 0.5 * (W - W.T)

    return TwoFormField(n, evaluate, "g(M.,.)")


@dataclass
class ProplagCertificate:
    """Per-sample Lagrangian residuals and compatibility verdicts."""

    points: list = field(default_factory=list)
    lagrangian: list = field(default_factory=list)
    compatibility: list = field(default_factory=list)
    tol: float = 1e-10

    @property
    def violations(self) -> list:
        """Samples where the conormal fiber is Lagrangian and the form compatible."""
        return [
            (xi, c.witness)
            for xi, lag, c in zip(self.points, self.lagrangian, self.compatibility)
            if lag <= self.tol and c.compatible
        ]

    @property
    def holds(self) -> bool:
        return not self.violations


def proplag_audit(
    omega: TwoFormField,
    gamma: Hypersurface,
    J: AlmostComplexStructure,
    nabla: Connection,
    points: np.ndarray,
    rng: np.random.Generator | None = None,
    tol: float = 1e-10,
    probes: np.ndarray | None = None,
) -> ProplagCertificate:
    """Audit "never Lagrangian and compatible at once" on conormal samples.

    For each base point a random nonzero fiber scale ``t`` picks the
    conormal point; the Lagrangian residual of the conormal tangent space and
    the compatibility of ``omega`` with the generalized horizontal lift are
    recorded.

    Raises:
        PreconditionError: the hypersurface is not strictly pseudoconvex at
            some audited point (the audit would be vacuous).
    """
    rng = rng or np.random.default_rng(0)
    for x in points:
        verdict = strict_pseudoconvexity_check(gamma, J, x, tol)
        if not verdict.strict:
            raise PreconditionError(
                f"{gamma.name} is not strictly pseudoconvex at {np.asarray(x).tolist()} "
                f"(min Levi value {verdict.literal_min:.3e})"
            )
    lifted = lambda xi: generalized_lift(nabla, J, xi)  # noqa: E731
    cert = ProplagCertificate(tol=tol)
    for x in points:
        t = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 1.0))
        frame = conormal_frame(gamma, x, t)
        cert.points.append(frame.xi)
        cert.lagrangian.append(lagrangian_residual(omega, frame))
        cert.compatibility.append(
            compatibility_residual(omega, lifted, frame.xi, probes, tol)
        )
    return cert
