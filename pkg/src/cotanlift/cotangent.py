"""Canonical forms, contractions and lifted structures on the cotangent bundle.

Tangent vectors of ``T*M`` are stacked as ``(dx-part, dp-part)`` columns of
length ``2n``.  Lower-left blocks written with entries ``a^i_j`` are stored
at row ``i``, column ``j``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ParameterError, ShapeError, StructureError
from .fields import CotangentPoint
from .structure import (
    AlmostComplexStructure,
    Connection,
    bracket_nabla_j,
    j_nijenhuis,
    s_tensor,
)

__all__ = [
    "TwoFormField",
    "LiftedStructure",
    "LIFT_KINDS",
    "omega_st",
    "omega_st_matrix",
    "liouville",
    "gamma",
    "theta_of_tensor",
    "complete_lift_raw",
    "d_theta_j",
    "sato_lift",
    "sato_lift_closed_form",
    "horizontal_lift",
    "horizontal_lift_closed_form",
    "generalized_lift",
    "generalized_lift_tensorial",
    "horizontal_basis",
    "vertical_projection",
    "lift",
]


def _point(xi) -> CotangentPoint:
    return xi if isinstance(xi, CotangentPoint) else CotangentPoint(*xi)


def _block(J: np.ndarray, lower: np.ndarray) -> np.ndarray:
    n = J.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = J
    out[n:, :n] = lower
    out[n:, n:] = J.T
    return out


class TwoFormField:
    """A 2-form on ``T*M`` given by its coefficient matrix at each point.

    ``omega(U, V) = U^T W V`` with ``W = field(xi)``.  Antisymmetry is checked
    on every evaluation.
    """

    def __init__(self, n: int, evaluator: Callable[[CotangentPoint], np.ndarray], name="omega"):
        self.n = n
        self._evaluator = evaluator
        self.name = name

    def __call__(self, xi) -> np.ndarray:
        W = np.asarray(self._evaluator(_point(xi)), dtype=float)
        if W.shape != (2 * self.n, 2 * self.n):
            raise ShapeError(f"two-form matrix has shape {W.shape}")
        if np.abs(W + W.T).max() > 1e-12:
            raise StructureError(f"{self.name} is not antisymmetric")
        return W

    def pair(self, xi, U, V) -> float:
        return float(np.asarray(U) @ self(xi) @ np.asarray(V))

    def __add__(self, other: "TwoFormField") -> "TwoFormField":
        return TwoFormField(
            self.n, lambda xi: self(xi) + other(xi), f"{self.name}+{other.name}"
        )


def omega_st_matrix(n: int) -> np.ndarray:
    """Coefficients of ``-dx^k ^ dp^k``: ``omega(d_xk, d_pk) = -1``."""
    W = np.zeros((2 * n, 2 * n))
    W[:n, n:] = -np.eye(n)
    W[n:, :n] = np.eye(n)
    return W


def omega_st(n: int) -> TwoFormField:
    """The canonical symplectic form ``d(theta)``."""
    if n % 2:
        raise ShapeError("dimension must be even")
    W = omega_st_matrix(n)
    W.setflags(write=False)
    return TwoFormField(n, lambda xi: W, "omega_st")


def liouville(xi) -> np.ndarray:
    """Covector of ``theta = p_i dx^i`` at ``xi``: ``(p, 0)``."""
    xi = _point(xi)
    return np.concatenate([xi.p, np.zeros(xi.n)])


def gamma(R: np.ndarray, xi) -> np.ndarray:
    """Matrix of the contraction of a (1,2) tensor, lower-left ``a^i_j = p_k R^k_{j,i}``."""
    xi = _point(xi)
    R = np.asarray(R, dtype=float)
    n = xi.n
    if R.shape != (n, n, n):
        raise ShapeError("gamma expects a (1,2) tensor")
    out = np.zeros((2 * n, 2 * n))
    out[n:, :n] = np.einsum("k,kji->ij", xi.p, R)
    return out


def theta_of_tensor(R: np.ndarray, xi, *vectors) -> float:
    """``theta(R)(X_1..X_q) = p_k R^k_{i_1..i_q} (dpi X_1)^{i_1} ... (dpi X_q)^{i_q}``.

    ``R`` has one upper index followed by ``q >= 1`` lower ones; the
    arguments are tangent vectors of ``T*M`` of length ``2n``.
    """
    xi = _point(xi)
    R = np.asarray(R, dtype=float)
    q = R.ndim - 1
    if q < 1:
        raise ParameterError("theta(R) needs at least one covariant slot")
    if len(vectors) != q:
        raise ParameterError(f"expected {q} vectors, got {len(vectors)}")
    out = np.tensordot(xi.p, R, axes=1)
    for X in vectors:
        X = np.asarray(X, dtype=float)
        if X.shape != (2 * xi.n,):
            raise ShapeError("arguments must be tangent vectors of T*M")
        out = np.tensordot(X[: xi.n], out, axes=([0], [0]))
    return float(out)


# lifted structures


def complete_lift_raw(J: AlmostComplexStructure, xi) -> np.ndarray:
    """Matrix of ``J^c``; lower-left ``p_k (d_j J^k_i - d_i J^k_j)``.

    ``J^c`` squares to ``-I`` only where ``N_J`` vanishes.
    """
    xi = _point(xi)
    Jx, dJ = J.evaluate(xi.x)
    # dJ[k, i, j] = d_j J^k_i
    pd = np.einsum("k,kij->ij", xi.p, dJ)
    return _block(Jx, pd - pd.T)


def d_theta_j(J: AlmostComplexStructure, xi) -> np.ndarray:
    """Coefficient matrix of ``d(theta(J))`` with ``theta(J) = p_k J^k_l dx^l``.

    Built from the exact partials of the 1-form coefficients, independently
    of :func:`complete_lift_raw`; ``d(alpha)(U, V) = U^T W V``.
    """
    xi = _point(xi)
    n = xi.n
    Jx, dJ = J.evaluate(xi.x)
    # partial[a, b] = d_a alpha_b over all 2n coordinates
    partial = np.zeros((2 * n, 2 * n))
    partial[:n, :n] = np.einsum("k,klm->ml", xi.p, dJ)
    partial[n:, :n] = Jx
    return partial - partial.T


def sato_lift(J: AlmostComplexStructure, xi) -> np.ndarray:
    """``J^c - gamma(J N_J) / 2``."""
    xi = _point(xi)
    return complete_lift_raw(J, xi) - 0.5 * gamma(j_nijenhuis(J, xi.x), xi)


def sato_lift_closed_form(J: AlmostComplexStructure, xi) -> np.ndarray:
    """Same lift from the block ``B^i_j`` written out in coordinates."""
    xi = _point(xi)
    Jx, dJ = J.evaluate(xi.x)
    p = xi.p
    lin = np.einsum("k,kij->ij", p, dJ)  # p_k d_j J^k_i
    quad = np.einsum("k,ks,qi,sjq->ij", p, Jx, Jx, dJ)  # p_k J^k_s J^q_i d_q J^s_j
    return _block(Jx, 0.5 * (lin - lin.T + quad - quad.T))


def horizontal_lift(nabla: Connection, J: AlmostComplexStructure, xi) -> np.ndarray:
    """``J^c + gamma([tilde-nabla J])``."""
    xi = _point(xi)
    return complete_lift_raw(J, xi) + gamma(bracket_nabla_j(nabla, J, xi.x), xi)


def horizontal_lift_closed_form(nabla: Connection, J: AlmostComplexStructure, xi) -> np.ndarray:
    """Block form with lower-left ``tG_{i,l} J^l_j - tG_{j,l} J^l_i``, ``tG`` symmetrized."""
    xi = _point(xi)
    Jx = J(xi.x)
    G = nabla.christoffel(xi.x)
    Gt = np.einsum("k,kil->il", xi.p, 0.5 * (G + G.transpose(0, 2, 1)))
    M = Gt @ Jx
    return _block(Jx, M - M.T)


def generalized_lift(nabla: Connection, J: AlmostComplexStructure, xi) -> np.ndarray:
    """``J (+) tJ`` with respect to the splitting by the horizontal space of ``nabla``.

    Lower-left ``G_{l,i} J^l_j - G_{j,l} J^l_i`` with ``G_{a,b} = p_k G^k_{ab}``.
    """
    xi = _point(xi)
    Jx = J(xi.x)
    Gp = np.einsum("k,kab->ab", xi.p, nabla.christoffel(xi.x))
    return _block(Jx, Gp.T @ Jx - (Gp @ Jx).T)


def generalized_lift_tensorial(nabla: Connection, J: AlmostComplexStructure, xi) -> np.ndarray:
    """``J^c + gamma(S)``."""
    xi = _point(xi)
    return complete_lift_raw(J, xi) + gamma(s_tensor(nabla, J, xi.x), xi)


def horizontal_basis(nabla: Connection, xi) -> np.ndarray:
    """Columns ``(e_i ; G_{i,1}..G_{i,n})`` spanning the horizontal space at ``xi``."""
    xi = _point(xi)
    Gp = np.einsum("k,kab->ab", xi.p, nabla.christoffel(xi.x))
    return np.vstack([np.eye(xi.n), Gp.T])


def vertical_projection(nabla: Connection, xi, Y) -> np.ndarray:
    """Fiber component of ``Y`` along the horizontal space: ``Y_p - G_{j,.} Y_x^j``."""
    xi = _point(xi)
    Y = np.asarray(Y, dtype=float)
    n = xi.n
    if Y.shape != (2 * n,):
        raise ShapeError("Y must be a tangent vector of T*M")
    Gp = np.einsum("k,kab->ab", xi.p, nabla.christoffel(xi.x))
    return Y[n:] - Gp.T @ Y[:n]


LIFT_KINDS = ("complete_raw", "sato", "horizontal", "generalized")


class LiftedStructure:
    """A lifted endomorphism field on ``T*M`` tagged with its kind.

    Calling it at a cotangent point returns the ``2n x 2n`` matrix.
    """

    def __init__(self, kind: str, J: AlmostComplexStructure, nabla: Connection | None = None):
        if kind not in LIFT_KINDS:
            raise ParameterError(f"unknown lift kind {kind!r}")
        if kind in ("horizontal", "generalized") and nabla is None:
            raise ParameterError(f"{kind} lift needs a connection")
        self.kind = kind
        self.J = J
        self.nabla = nabla
        self.n = J.n

    def __call__(self, xi) -> np.ndarray:
        if self.kind == "complete_raw":
            return complete_lift_raw(self.J, xi)
        if self.kind == "sato":
            return sato_lift(self.J, xi)
        if self.kind == "horizontal":
            return horizontal_lift(self.nabla, self.J, xi)
        return generalized_lift(self.nabla, self.J, xi)

    def block_residual(self, xi) -> float:
        """Deviation from the block shape ``[[J, 0], [*, tJ]]``."""
        xi = _point(xi)
        M = self(xi)
        Jx = self.J(xi.x)
        n = self.n
        return float(
            max(
                np.abs(M[:n, n:]).max(),
                np.abs(M[:n, :n] - Jx).max(),
                np.abs(M[n:, n:] - Jx.T).max(),
            )
        )

    def square_residual(self, xi) -> float:
        M = self(xi)
        return float(np.abs(M @ M + np.eye(2 * self.n)).max())


def lift(kind: str, J: AlmostComplexStructure, nabla: Connection | None = None) -> LiftedStructure:
    return LiftedStructure(kind, J, nabla)
