"""Holomorphic maps, pushforwards and their lifts to the cotangent bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cotangent import LiftedStructure, generalized_lift
from .errors import CapabilityError, ParameterError, ShapeError
from .fields import CotangentPoint, Polynomial, finite_difference_jacobian
from .structure import (
    AlmostComplexStructure,
    Connection,
    apply_j_first,
    apply_j_second,
    nabla_j,
    s_tensor,
)

__all__ = [
    "SmoothMap",
    "CotangentMap",
    "HolomorphyAudit",
    "ZAudit",
    "holomorphy_residual",
    "pushforward_structure",
    "pushforward_connection",
    "pushforward_tensor12",
    "cotangent_lift_map",
    "lift_holomorphy_audit",
    "fiber_multiplication",
    "z_commutator",
    "z_d_block",
    "z_holomorphy_audit",
]


class SmoothMap:
    """A chart map with exact Jacobian and, optionally, Hessian and inverse.

    ``hessian(x)[a, b, c]`` is ``d_b d_c f^a``.
    """

    def __init__(
        self,
        n: int,
        forward: Callable[[np.ndarray], np.ndarray],
        jacobian: Callable[[np.ndarray], np.ndarray],
        hessian: Callable[[np.ndarray], np.ndarray] | None = None,
        inverse: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str = "f",
        fields: list | None = None,
    ):
        self.n = n
        self._forward = forward
        self._jacobian = jacobian
        self._hessian = hessian
        self._inverse = inverse
        self.name = name
        self.fields = fields or []

    @classmethod
    def from_polynomials(
        cls,
        components: Sequence[Polynomial],
        inverse: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str = "f",
    ) -> "SmoothMap":
        comps = list(components)
        n = len(comps)
        if any(c.n != n for c in comps):
            raise ShapeError("a chart map has n components in n variables")
        return cls(
            n,
            lambda x: np.array([c.value(x) for c in comps]),
            lambda x: np.array([c.gradient(x) for c in comps]),
            lambda x: np.array([c.hessian(x) for c in comps]),
            inverse,
            name,
            comps,
        )

    @classmethod
    def identity(cls, n: int) -> "SmoothMap":
        return cls.linear(np.eye(n), name="identity")

    @classmethod
    def translation(cls, c: Sequence[float]) -> "SmoothMap":
        c = np.asarray(c, dtype=float)
        n = c.size
        eye, zero = np.eye(n), np.zeros((n, n, n))
        return cls(n, lambda x: x + c, lambda x: eye, lambda x: zero, lambda y: y - c, "translation")

    @classmethod
    def linear(cls, A, name: str = "linear") -> "SmoothMap":
        A = np.array(A, dtype=float)
        n = A.shape[0]
        Ainv = np.linalg.inv(A)
        zero = np.zeros((n, n, n))
        return cls(n, lambda x: A @ x, lambda x: A, lambda x: zero, lambda y: Ainv @ y, name)

    @classmethod
    def square(cls) -> "SmoothMap":
        """``z -> z^2`` on ``C = R^2``, inverted by the principal square root."""
        x1, x2 = Polynomial.variables(2)

        def inverse(y):
            w = np.sqrt(complex(y[0], y[1]))
            return np.array([w.real, w.imag])

        return cls.from_polynomials([x1**2 - x2**2, 2.0 * x1 * x2], inverse, "square")

    @classmethod
    def conjugation(cls, n: int = 2) -> "SmoothMap":
        """Flip the sign of every even-numbered coordinate (complex conjugation)."""
        D = np.diag([1.0 if i % 2 == 0 else -1.0 for i in range(n)])
        return cls.linear(D, name="conjugation")

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self._forward(np.asarray(x, dtype=float)), dtype=float)

    def differential(self, x) -> np.ndarray:
        return np.asarray(self._jacobian(np.asarray(x, dtype=float)), dtype=float)

    jacobian = differential

    def hessian(self, x) -> np.ndarray:
        if self._hessian is None:
            raise CapabilityError(f"map {self.name} has no second derivatives")
        return np.asarray(self._hessian(np.asarray(x, dtype=float)), dtype=float)

    def inverse(self, y) -> np.ndarray:
        if self._inverse is None:
            raise CapabilityError(f"map {self.name} has no inverse")
        return np.asarray(self._inverse(np.asarray(y, dtype=float)), dtype=float)

    @property
    def has_inverse(self) -> bool:
        return self._inverse is not None

    @property
    def has_hessian(self) -> bool:
        return self._hessian is not None

    def inverse_residual(self, x) -> float:
        """Largest of ``|f^{-1}(f(x)) - x|`` and ``|df(x) d(f^{-1})(f(x)) - I|``.

        The inverse Jacobian is taken by finite differences of the inverse.
        """
        y = self(x)
        back = float(np.abs(self.inverse(y) - x).max())
        Dinv = finite_difference_jacobian(self.inverse, y, h=1e-6)
        jac = float(np.abs(self.differential(x) @ Dinv - np.eye(self.n)).max())
        return max(back, jac)


class CotangentMap:
    """A map of ``T*M`` with its exact ``2n x 2n`` differential."""

    def __init__(self, n, forward, differential, name="F"):
        self.n = n
        self._forward = forward
        self._differential = differential
        self.name = name

    def __call__(self, xi) -> CotangentPoint:
        xi = xi if isinstance(xi, CotangentPoint) else CotangentPoint(*xi)
        return self._forward(xi)

    def differential(self, xi) -> np.ndarray:
        xi = xi if isinstance(xi, CotangentPoint) else CotangentPoint(*xi)
        return self._differential(xi)


def holomorphy_residual(F, J_src, J_dst, pt) -> float:
    """Max-norm of ``J_dst(F(pt)) dF - dF J_src(pt)``.

    ``F`` is a :class:`SmoothMap` or :class:`CotangentMap`; ``J_src`` and
    ``J_dst`` are callables returning the structure matrix at a point
    (an :class:`AlmostComplexStructure` or a :class:`LiftedStructure`).
    """
    dF = F.differential(pt)
    A = np.asarray(J_src(pt))
    B = np.asarray(J_dst(F(pt)))
    if A.shape != B.shape or dF.shape != A.shape:
        raise ShapeError(
            f"differential {dF.shape} does not match structures {A.shape}, {B.shape}"
        )
    return float(np.abs(B @ dF - dF @ A).max())


def pushforward_structure(f: SmoothMap, J: AlmostComplexStructure) -> AlmostComplexStructure:
    """``f_*J(y) = df J(f^{-1}(y)) df^{-1}`` with exact partials in ``y``.

    Raises:
        CapabilityError: ``f`` has no inverse or no second derivatives.
    """
    if not f.has_inverse:
        raise CapabilityError(f"pushing forward along {f.name} needs its inverse")
    if not f.has_hessian:
        raise CapabilityError(f"pushing forward along {f.name} needs second derivatives")

    def evaluate(y):
        x = f.inverse(y)
        F = f.differential(x)
        G = np.linalg.inv(F)
        H = f.hessian(x)
        Jx, dJ = J.evaluate(x)
        J2 = F @ Jx @ G
        # partials in source coordinates, then chain rule with dx/dy = G
        dsrc = (
            np.einsum("kaq,ab,bl->klq", H, Jx, G)
            + np.einsum("ka,abq,bl->klq", F, dJ, G)
            - np.einsum("ka,abq,bl->klq", J2, H, G)
        )
        return J2, np.einsum("klq,qm->klm", dsrc, G)

    return AlmostComplexStructure(f.n, evaluate, None, f"{f.name}_*{J.name}")


def _push12(F: np.ndarray, R: np.ndarray) -> np.ndarray:
    G = np.linalg.inv(F)
    return np.einsum("ka,abc,bi,cj->kij", F, R, G, G)


def pushforward_tensor12(f: SmoothMap, R) -> Callable[[np.ndarray], np.ndarray]:
    """``(f_*R)(U, V) = df R(df^{-1}U, df^{-1}V)`` as a field on the target.

    ``R`` is a constant ``(n, n, n)`` array or a callable of the source point.
    """
    if not f.has_inverse:
        raise CapabilityError(f"pushing forward along {f.name} needs its inverse")
    Rf = R if callable(R) else (lambda x, R=np.asarray(R, dtype=float): R)

    def pushed(y):
        x = f.inverse(y)
        return _push12(f.differential(x), Rf(x))

    return pushed


def pushforward_connection(f: SmoothMap, nabla: Connection) -> Connection:
    """Christoffel symbols of ``f_*nabla``.

    ``G'^k_{ij} = F^k_a G^a_{bc} g^b_i g^c_j - (d_b d_c f^k) g^b_i g^c_j``
    with ``F = df`` and ``g = F^{-1}``.
    """
    if not (f.has_inverse and f.has_hessian):
        raise CapabilityError(f"pushing a connection along {f.name} needs inverse and Hessian")

    def christoffel(y):
        x = f.inverse(y)
        F = f.differential(x)
        G = np.linalg.inv(F)
        H = f.hessian(x)
        return _push12(F, nabla.christoffel(x)) - np.einsum("kbc,bi,cj->kij", H, G, G)

    return Connection(f.n, christoffel, f"{f.name}_*{nabla.name}")


def cotangent_lift_map(f: SmoothMap) -> CotangentMap:
    """``(x, p) -> (f(x), (df)^{-T} p)`` and its differential.

    The lower-left block of the differential is the ``x``-derivative of
    ``(df)^{-T} p``, namely ``-(df)^{-T} (d_j df)^T (df)^{-T} p`` in column
    ``j``; it needs the Hessian of ``f``.
    """
    if not f.has_hessian:
        raise CapabilityError(f"lifting {f.name} needs second derivatives")
    n = f.n

    def forward(xi):
        M = np.linalg.inv(f.differential(xi.x)).T
        return CotangentPoint(f(xi.x), M @ xi.p)

    def differential(xi):
        F = f.differential(xi.x)
        M = np.linalg.inv(F).T
        q = M @ xi.p
        star = -np.einsum("ib,abj,a->ij", M, f.hessian(xi.x), q)
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = F
        out[n:, :n] = star
        out[n:, n:] = M
        return out

    return CotangentMap(n, forward, differential, f"lift({f.name})")


@dataclass
class HolomorphyAudit:
    """Residual curves for the lift-holomorphy criterion over sample points.

    The hypothesis is "f is holomorphic and pushes S_1 to S_2"; the
    conclusion is "the cotangent lift of f is holomorphic for the
    generalized horizontal lifts".  The two must hold or fail together.
    """

    base_residual: np.ndarray
    tensor_residual: np.ndarray
    lift_residual: np.ndarray
    tol: float
    points: list = field(default_factory=list, repr=False)

    @property
    def hypothesis_holds(self) -> bool:
        return bool(
            np.all(self.base_residual <= self.tol) and np.all(self.tensor_residual <= self.tol)
        )

    @property
    def conclusion_holds(self) -> bool:
        return bool(np.all(self.lift_residual <= self.tol))

    @property
    def consistent(self) -> bool:
        return self.hypothesis_holds == self.conclusion_holds

    def witness(self):
        """Sample with the largest lift residual."""
        i = int(np.argmax(self.lift_residual))
        return self.points[i] if self.points else i


def lift_holomorphy_audit(
    f: SmoothMap,
    J1: AlmostComplexStructure,
    nabla1: Connection,
    J2: AlmostComplexStructure,
    nabla2: Connection,
    samples: Sequence[CotangentPoint],
    tol: float = 1e-9,
    lift1: LiftedStructure | Callable | None = None,
    lift2: LiftedStructure | Callable | None = None,
) -> HolomorphyAudit:
    """Check "lift of f holomorphic iff f holomorphic and f_*S_1 = S_2" on samples.

    ``lift1``/``lift2`` override the generalized horizontal lifts, e.g. to
    audit the Sato lifts.
    """
    ft = cotangent_lift_map(f)
    L1 = lift1 or (lambda xi: generalized_lift(nabla1, J1, xi))
    L2 = lift2 or (lambda xi: generalized_lift(nabla2, J2, xi))
    base, tens, lifted = [], [], []
    for xi in samples:
        x = xi.x
        y = f(x)
        base.append(holomorphy_residual(f, J1, J2, x))
        pushed = _push12(f.differential(x), s_tensor(nabla1, J1, x))
        tens.append(float(np.abs(pushed - s_tensor(nabla2, J2, y)).max()))
        lifted.append(holomorphy_residual(ft, L1, L2, xi))
    return HolomorphyAudit(np.array(base), np.array(tens), np.array(lifted), tol, list(samples))


# fiberwise multiplication


def fiber_multiplication(a: float, b: float, J: AlmostComplexStructure) -> CotangentMap:
    """``Z(x, p) = (x, (a + b tJ(x)) p)``, multiplication by ``a + ib`` on fibers.

    The differential is ``[[I, 0], [C, a + b tJ]]`` with ``C^i_j = b p_k d_j J^k_i``.

    Raises:
        ParameterError: ``b == 0``.
    """
    if b == 0:
        raise ParameterError("fiber multiplication needs b != 0")
    n = J.n

    def forward(xi):
        return CotangentPoint(xi.x, (a * np.eye(n) + b * J(xi.x).T) @ xi.p)

    def differential(xi):
        Jx, dJ = J.evaluate(xi.x)
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = np.eye(n)
        out[n:, :n] = b * np.einsum("k,kij->ij", xi.p, dJ)
        out[n:, n:] = a * np.eye(n) + b * Jx.T
        return out

    return CotangentMap(n, forward, differential, f"Z({a}+{b}i)")


def z_commutator(a, b, J, nabla, xi) -> np.ndarray:
    """``dZ J^G(xi) - J^G(Z(xi)) dZ`` computed directly."""
    Z = fiber_multiplication(a, b, J)
    dZ = Z.differential(xi)
    return dZ @ generalized_lift(nabla, J, xi) - generalized_lift(nabla, J, Z(xi)) @ dZ


def z_d_block(a, b, J, nabla, xi) -> np.ndarray:
    """Closed form of the lower-left commutator block,
    ``D^i_j = b p_k [J^l_j (nabla J)^k_{l,i} - J^l_i (nabla J)^k_{j,l}]``.
    """
    Jx = J(xi.x)
    NJ = nabla_j(nabla, J, xi.x)
    return b * (
        np.einsum("k,lj,kli->ij", xi.p, Jx, NJ) - np.einsum("k,li,kjl->ij", xi.p, Jx, NJ)
    )


@dataclass
class ZAudit:
    """Fiberwise multiplication audit: commutator, closed form and criterion."""

    commutator: np.ndarray
    formula_gap: np.ndarray
    criterion: np.ndarray
    tol: float

    @property
    def holomorphic(self) -> bool:
        return bool(np.all(self.commutator <= self.tol))

    @property
    def criterion_holds(self) -> bool:
        return bool(np.all(self.criterion <= self.tol))

    @property
    def consistent(self) -> bool:
        return self.holomorphic == self.criterion_holds


def z_holomorphy_audit(a, b, J, nabla, samples, tol: float = 1e-10) -> ZAudit:
    """Compare holomorphy of ``Z`` with ``(nabla J)(J., .) = (nabla J)(., J.)``.

    The commutator is linear in ``p`` and vanishes on the zero section, so
    the comparison is made over the whole sample set, not point by point.
    """
    if b == 0:
        raise ParameterError("fiber multiplication needs b != 0")
    n = J.n
    comm, gap, crit = [], [], []
    for xi in samples:
        C = z_commutator(a, b, J, nabla, xi)
        comm.append(float(np.abs(C).max()))
        gap.append(float(np.abs(C[n:, :n] - z_d_block(a, b, J, nabla, xi)).max()))
        Jx = J(xi.x)
        NJ = nabla_j(nabla, J, xi.x)
        mismatch = np.abs(apply_j_first(NJ, Jx) - apply_j_second(NJ, Jx)).max()
        crit.append(float(mismatch))
    return ZAudit(np.array(comm), np.array(gap), np.array(crit), tol)
