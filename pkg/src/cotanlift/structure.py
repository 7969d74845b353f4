"""Almost complex structures, connections and the base tensors built from them.

Conventions
-----------
* ``J[k, l]`` is ``J^k_l``; it acts on column vectors, ``(JX)^k = J^k_l X^l``.
* Partials are appended as the last axis: ``dJ[k, l, m] = d_m J^k_l``.
* ``G[k, i, j]`` is the Christoffel symbol with ``nabla_{d_i} d_j = G^k_{ij} d_k``.
* A (1,2) tensor ``R[k, i, j]`` holds the ``d_k`` component of ``R(d_i, d_j)``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConstructionError, ShapeError, StructureError
from .fields import Box, Polynomial, TensorField, build_tensor_field

__all__ = [
    "AlmostComplexStructure",
    "Connection",
    "standard_structure",
    "conjugated_structure",
    "nijenhuis",
    "j_nijenhuis",
    "j_nijenhuis_closed_form",
    "torsion",
    "derived_connections",
    "nabla_j",
    "s_tensor",
    "s_prime",
    "bracket_nabla_j",
    "bracket_nabla_j_expanded",
    "minimal_complex_connection",
    "l_condition_residual",
    "apply_j_first",
    "apply_j_second",
    "apply_j_output",
]


# small tensor helpers


def apply_j_first(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Components of ``R(J., .)``."""
    return np.einsum("kaj,ai->kij", R, J)


def apply_j_second(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Components of ``R(., J.)``."""
    return np.einsum("kia,aj->kij", R, J)


def apply_j_output(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Components of ``J R(., .)``."""
    return np.einsum("ka,aij->kij", J, R)


def _swap(R: np.ndarray) -> np.ndarray:
    """Components of ``R(Y, X)`` from those of ``R(X, Y)``."""
    return R.transpose(0, 2, 1)


class AlmostComplexStructure:
    """A (1,1) tensor field with ``J^2 = -Id``.

    Wraps an evaluator returning ``(J, dJ)`` at a chart point.  Use
    :meth:`from_tensor_field`, :func:`standard_structure` or
    :func:`conjugated_structure` rather than calling this directly.
    """

    def __init__(
        self,
        n: int,
        evaluator: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
        domain: Box | None = None,
        name: str = "J",
        fields: list | None = None,
        constant: bool = False,
    ):
        if n < 2 or n % 2:
            raise ShapeError("dimension must be even")
        self.n = n
        self._evaluator = evaluator
        self.domain = domain
        self.name = name
        self.constant = constant
        # scalar fields backing the components, exposed for derivative audits
        self.fields = fields or []

    @classmethod
    def from_tensor_field(cls, field: TensorField, name: str = "J") -> "AlmostComplexStructure":
        if field.rank != 2:
            raise ShapeError("an almost complex structure is a (1,1) tensor")
        constant = all(
            isinstance(f, Polynomial) and f.degree == 0 for f in field.fields()
        )
        return cls(field.n, field.evaluate, field.domain, name, field.fields(), constant)

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ShapeError(f"expected point of length {self.n}")
        return self._evaluator(x)

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)[0]

    def square_residual(self, x) -> float:
        J = self(x)
        return float(np.abs(J @ J + np.eye(self.n)).max())

    def validate(self, points: np.ndarray, tol: float = 1e-10) -> None:
        """Raise :class:`StructureError` naming the worst point if ``J^2 != -I``."""
        worst, where = 0.0, None
        for x in points:
            r = self.square_residual(x)
            if r > worst:
                worst, where = r, x
        if worst > tol:
            raise StructureError(
                f"J^2 + I has max residual {worst:.3e} at {np.asarray(where).tolist()}"
            )


def _standard_matrix(n: int) -> np.ndarray:
    if n < 2 or n % 2:
        raise ShapeError("dimension must be even")
    J = np.zeros((n, n))
    for a in range(0, n, 2):
        J[a + 1, a] = 1.0
        J[a, a + 1] = -1.0
    return J


def standard_structure(n: int) -> AlmostComplexStructure:
    """The constant structure ``J d_{2k-1} = d_{2k}``, ``J d_{2k} = -d_{2k-1}``."""
    comps = {}
    J = _standard_matrix(n)
    for k, l in zip(*np.nonzero(J)):
        comps[(k, l)] = J[k, l]
    return AlmostComplexStructure.from_tensor_field(
        build_tensor_field(n, 2, comps), name="J_st"
    )


def conjugated_structure(
    perturbation: TensorField, base: np.ndarray | None = None, name: str = "A J A^-1"
) -> AlmostComplexStructure:
    """``J = A J0 A^{-1}`` with ``A = I + perturbation`` and ``J0`` constant.

    ``J0`` defaults to the standard structure.  ``J^2 = -I`` holds exactly in
    exact arithmetic whatever the perturbation, and generically ``J`` is not
    integrable once ``n >= 4``.  Derivatives use
    ``dJ = dA J0 A^{-1} - J dA A^{-1}``.
    """
    n = perturbation.n
    J0 = _standard_matrix(n) if base is None else np.asarray(base, dtype=float)
    if not np.allclose(J0 @ J0, -np.eye(n), atol=1e-12):
        raise StructureError("base matrix does not square to -I")

    def evaluate(x):
        P, dP = perturbation.evaluate(x)
        A = np.eye(n) + P
        Ainv = np.linalg.inv(A)
        J = A @ J0 @ Ainv
        # dJ[:, :, m] = dA_m J0 Ainv - J dA_m Ainv
        dJ = np.einsum("kam,ab,bl->klm", dP, J0, Ainv) - np.einsum(
            "ka,abm,bl->klm", J, dP, Ainv
        )
        return J, dJ

    return AlmostComplexStructure(
        n, evaluate, perturbation.domain, name, perturbation.fields()
    )


# Nijenhuis tensor


def nijenhuis(J: AlmostComplexStructure, x) -> np.ndarray:
    """Components of ``N_J(X,Y) = [JX,JY] - J[X,JY] - J[JX,Y] - [X,Y]``.

    On coordinate fields ``[d_i, d_j] = 0`` and the brackets reduce to
    ``[Jd_i, Jd_j]^k = J^m_i d_m J^k_j - J^m_j d_m J^k_i``,
    ``[d_i, Jd_j]^k = d_i J^k_j`` and ``[Jd_i, d_j]^k = -d_j J^k_i``.
    """
    Jx, dJ = J.evaluate(x)
    lie = np.einsum("mi,kjm->kij", Jx, dJ)  # J^m_i d_m J^k_j
    mixed = np.einsum("ks,sji->kij", Jx, dJ)  # J^k_s d_i J^s_j
    return lie - _swap(lie) - mixed + _swap(mixed)


def j_nijenhuis(J: AlmostComplexStructure, x) -> np.ndarray:
    """Components of ``J N_J`` (composition route)."""
    return apply_j_output(nijenhuis(J, x), J(x))


def j_nijenhuis_closed_form(J: AlmostComplexStructure, x) -> np.ndarray:
    """Components of ``J N_J`` from the expanded coordinate expression.

    ``-d_j J^k_i + d_i J^k_j + J^k_s J^q_i d_q J^s_j - J^k_s J^q_j d_q J^s_i``
    """
    Jx, dJ = J.evaluate(x)
    d_i_Jkj = dJ.transpose(0, 2, 1)  # [k, i, j] = d_i J^k_j
    quad = np.einsum("ks,qi,sjq->kij", Jx, Jx, dJ)
    return -_swap(d_i_Jkj) + d_i_Jkj + quad - _swap(quad)


# connections


class Connection:
    """An affine connection given by its Christoffel symbols ``G^k_{ij}``."""

    def __init__(
        self,
        n: int,
        christoffel: Callable[[np.ndarray], np.ndarray],
        name: str = "nabla",
        fields: list | None = None,
    ):
        self.n = n
        self._christoffel = christoffel
        self.name = name
        self.fields = fields or []

    @classmethod
    def flat(cls, n: int) -> "Connection":
        zero = np.zeros((n, n, n))
        return cls(n, lambda x: zero, "flat")

    @classmethod
    def from_tensor_field(cls, field: TensorField, name: str = "nabla") -> "Connection":
        if field.rank != 3:
            raise ShapeError("Christoffel symbols form a rank-3 array")
        return cls(field.n, field.value, name, field.fields())

    @classmethod
    def constant(cls, gamma: np.ndarray, name: str = "nabla") -> "Connection":
        gamma = np.array(gamma, dtype=float)
        n = gamma.shape[0]
        if gamma.shape != (n, n, n):
            raise ShapeError("Christoffel array must be n x n x n")
        gamma.setflags(write=False)
        return cls(n, lambda x: gamma, name)

    def christoffel(self, x) -> np.ndarray:
        return np.asarray(self._christoffel(np.asarray(x, dtype=float)), dtype=float)

    def __call__(self, x) -> np.ndarray:
        return self.christoffel(x)

    def plus(self, L: Callable[[np.ndarray], np.ndarray] | np.ndarray, name=None) -> "Connection":
        """The connection ``nabla + L`` for a (1,2) tensor field ``L``."""
        Lf = L if callable(L) else (lambda x, L=np.asarray(L, dtype=float): L)
        return Connection(
            self.n, lambda x: self.christoffel(x) + Lf(x), name or f"{self.name}+L", self.fields
        )

    def transposed(self) -> "Connection":
        """``nabla - T``, with symbols ``G^k_{ji}``."""
        return Connection(
            self.n, lambda x: _swap(self.christoffel(x)), f"bar({self.name})", self.fields
        )

    def symmetrized(self) -> "Connection":
        """``nabla - T/2``, with symbols ``(G^k_{ij} + G^k_{ji}) / 2``."""

        def sym(x):
            G = self.christoffel(x)
            return 0.5 * (G + _swap(G))

        return Connection(self.n, sym, f"tilde({self.name})", self.fields)


def torsion(nabla: Connection, x) -> np.ndarray:
    """``T^k_{ij} = G^k_{ij} - G^k_{ji}``."""
    G = nabla.christoffel(x)
    return G - _swap(G)


def derived_connections(nabla: Connection) -> tuple[Connection, Connection]:
    """Return ``(nabla - T, nabla - T/2)``."""
    return nabla.transposed(), nabla.symmetrized()


def nabla_j(nabla: Connection, J: AlmostComplexStructure, x) -> np.ndarray:
    """``(nabla J)(X,Y) = nabla_X JY - J nabla_X Y``.

    In coordinates ``d_i J^k_j - J^k_l G^l_{ij} + J^l_j G^k_{il}``.
    """
    Jx, dJ = J.evaluate(x)
    G = nabla.christoffel(x)
    return (
        dJ.transpose(0, 2, 1)
        - np.einsum("kl,lij->kij", Jx, G)
        + np.einsum("lj,kil->kij", Jx, G)
    )


def s_tensor(nabla: Connection, J: AlmostComplexStructure, x) -> np.ndarray:
    """``S(X,Y) = -(nabla J)(X,Y) + (nabla J)(Y,X) + T(JX,Y) - J T(X,Y)``."""
    NJ = nabla_j(nabla, J, x)
    T = torsion(nabla, x)
    Jx = J(x)
    return -NJ + _swap(NJ) + apply_j_first(T, Jx) - apply_j_output(T, Jx)


def s_prime(nabla: Connection, J: AlmostComplexStructure, x) -> np.ndarray:
    """``S'(d_i, d_j) = -nabla_{d_i}(J d_j) + bar-nabla_{d_j}(J d_i)`` on coordinate fields.

    ``S'`` is not tensorial, but on coordinate fields it agrees with ``S``
    since ``[d_i, d_j] = 0``.
    """
    Jx, dJ = J.evaluate(x)
    G = nabla.christoffel(x)
    # nabla_{d_i}(J d_j)^k = d_i J^k_j + G^k_{il} J^l_j
    cov = dJ.transpose(0, 2, 1) + np.einsum("kil,lj->kij", G, Jx)
    # bar-nabla_{d_j}(J d_i)^k = d_j J^k_i + G^k_{lj} J^l_i
    bar = dJ + np.einsum("klj,li->kij", G, Jx)
    return -cov + bar


def bracket_nabla_j(nabla: Connection, J: AlmostComplexStructure, x) -> np.ndarray:
    """``[tilde-nabla J](X,Y) = -(tilde-nabla J)(X,Y) + (tilde-nabla J)(Y,X)``."""
    NJ = nabla_j(nabla.symmetrized(), J, x)
    return -NJ + _swap(NJ)


def bracket_nabla_j_expanded(nabla: Connection, J: AlmostComplexStructure, x) -> np.ndarray:
    """Same tensor as :func:`bracket_nabla_j`, expanded through the torsion of ``nabla``.

    ``-(nabla J)(X,Y) + (nabla J)(Y,X) + T(X,JY)/2 + T(JX,Y)/2 - J T(X,Y)``
    """
    NJ = nabla_j(nabla, J, x)
    T = torsion(nabla, x)
    Jx = J(x)
    return (
        -NJ
        + _swap(NJ)
        + 0.5 * apply_j_second(T, Jx)
        + 0.5 * apply_j_first(T, Jx)
        - apply_j_output(T, Jx)
    )


# minimal almost complex connections

# weights of the three correction terms; alternatives are tried only if the
# primary choice fails its self-check (normalisations of N_J differ in print)
_CORRECTION_WEIGHTS = [
    (0.25, 0.25, 0.5),
    (-0.25, -0.25, -0.5),
    (0.25, 0.25, -0.5),
    (0.25, -0.25, 0.5),
    (0.125, 0.125, 0.25),
]


def _correction(Jx: np.ndarray, D: np.ndarray, w: tuple) -> np.ndarray:
    """``Q(X,Y) = w0 (D_{JY} J)X + w1 J (D_Y J)X + w2 J (D_X J)Y``.

    ``D[k, m, l]`` holds ``((nabla0_{d_m} J) d_l)^k``.
    """
    return (
        w[0] * np.einsum("aj,kai->kij", Jx, D)
        + w[1] * np.einsum("kb,bji->kij", Jx, D)
        + w[2] * np.einsum("kb,bij->kij", Jx, D)
    )


def _minimal_residuals(nabla, J, points) -> tuple[float, float]:
    nj = tors = 0.0
    for x in points:
        nj = max(nj, float(np.abs(nabla_j(nabla, J, x)).max()))
        tors = max(
            tors, float(np.abs(torsion(nabla, x) - 0.25 * nijenhuis(J, x)).max())
        )
    return nj, tors


def minimal_complex_connection(
    J: AlmostComplexStructure,
    base: Connection | None = None,
    probes: np.ndarray | None = None,
    tol: float = 1e-9,
) -> Connection:
    """An almost complex connection with torsion ``N_J / 4``.

    Starting from a symmetric connection ``nabla0`` (the flat chart
    connection by default) returns ``nabla0 - Q`` with the classical
    correction ``Q(X,Y) = 1/4 [(nabla0_{JY} J)X + J((nabla0_Y J)X) +
    2 J((nabla0_X J)Y)]``.

    The result is checked against both defining properties, ``nabla J = 0``
    and ``T = N_J / 4``, at ``probes`` (a fixed pseudo-random set inside the
    structure's domain when omitted).  Alternative correction weights are
    tried if the check fails; if none passes a :class:`ConstructionError` is
    raised.

    Raises:
        ConstructionError: no correction passes the self-check.
        ShapeError: ``base`` is not symmetric or has the wrong dimension.
    """
    n = J.n
    base = base if base is not None else Connection.flat(n)
    if base.n != n:
        raise ShapeError("base connection dimension differs from J")
    if probes is None:
        box = J.domain if J.domain is not None else Box.cube(n, -0.5, 0.5)
        probes = box.shrink(1e-3 * float(np.min(box.upper - box.lower))).sample(
            np.random.default_rng(7), 6
        )
    for x in probes:
        if np.abs(torsion(base, x)).max() > 1e-12:
            raise ShapeError("the starting connection must be symmetric")

    def build(w):
        def christoffel(x):
            D = nabla_j(base, J, x)
            return base.christoffel(x) - _correction(J(x), D, w)

        return Connection(n, christoffel, f"minimal({base.name})", base.fields)

    first = None
    for w in _CORRECTION_WEIGHTS:
        nabla = build(w)
        nj, tors = _minimal_residuals(nabla, J, probes)
        if nj <= tol and tors <= tol:
            return nabla
        first = first or (w, nj, tors)
    raise ConstructionError(
        "minimal complex connection failed its self-check "
        f"(weights {first[0]}: |nabla J| = {first[1]:.2e}, |T - N/4| = {first[2]:.2e})"
    )


def l_condition_residual(L: np.ndarray, J: np.ndarray) -> float:
    """Max-norm of ``L(J d_i, d_j) - L(d_i, J d_j)`` over all slots.

    Zero exactly when ``nabla`` and ``nabla + L`` give the same generalized
    horizontal lift.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 3 or len(set(L.shape)) != 1:
        raise ShapeError("L must be a (1,2) tensor")
    return float(np.abs(apply_j_first(L, J) - apply_j_second(L, J)).max())
