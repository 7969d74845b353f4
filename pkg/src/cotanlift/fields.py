"""Exact-derivative scalar and tensor fields on a single chart.

Every component function used by the library (structure components,
Christoffel symbols, defining functions, map components) is a polynomial or a
quotient of polynomials in the chart coordinates.  Values, gradients and
Hessians are computed in closed form, so downstream identities only carry
rounding error.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ParameterError, ShapeError

__all__ = [
    "Box",
    "CotangentPoint",
    "Polynomial",
    "Rational",
    "TensorField",
    "chart_point",
    "eval_field",
    "finite_difference_gradient",
    "finite_difference_jacobian",
    "build_tensor_field",
    "parse_scalar_field",
    "parse_index_key",
]


def chart_point(coords: Iterable[float]) -> np.ndarray:
    """Validate chart coordinates and return them as a float array.

    The chart dimension must be even and at least 2, and every coordinate
    finite.
    """
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"chart point must be a vector, got shape {x.shape}")
    if x.size < 2 or x.size % 2:
        raise ShapeError("dimension must be even")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"non-finite chart coordinates {x}")
    return x


class CotangentPoint:
    """A point ``(x, p)`` of the cotangent bundle over the chart."""

    __slots__ = ("x", "p")

    def __init__(self, x, p):
        x = chart_point(x)
        p = np.asarray(p, dtype=float)
        if p.shape != x.shape:
            raise ShapeError(f"fiber has shape {p.shape}, base has {x.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError("non-finite fiber coordinates")
        self.x = x
        self.p = p

    @property
    def n(self) -> int:
        return self.x.size

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    def __iter__(self):
        yield self.x
        yield self.p

    def __repr__(self) -> str:
        return f"CotangentPoint(x={self.x.tolist()}, p={self.p.tolist()})"


class Box:
    """Axis-aligned coordinate box ``[lo_1, hi_1] x ... x [lo_n, hi_n]``."""

    def __init__(self, lower: Sequence[float], upper: Sequence[float]):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ShapeError("box bounds must be vectors of equal length")
        if np.any(lower >= upper):
            raise ParameterError("box lower bounds must be below upper bounds")
        self.lower = lower
        self.upper = upper

    @classmethod
    def cube(cls, n: int, lo: float = -1.0, hi: float = 1.0) -> "Box":
        return cls(np.full(n, lo), np.full(n, hi))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "Box":
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ShapeError("domain must be a list of [lo, hi] pairs")
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self) -> int:
        return self.lower.size

    def contains(self, x: np.ndarray, slack: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= self.lower - slack) and np.all(x <= self.upper + slack)
        )

    def shrink(self, margin: float) -> "Box":
        return Box(self.lower + margin, self.upper - margin)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform points, one per row."""
        return rng.uniform(self.lower, self.upper, size=(count, self.n))

    def corners(self) -> np.ndarray:
        return np.array(list(product(*zip(self.lower, self.upper))))

    def to_pairs(self) -> list:
        return [[float(a), float(b)] for a, b in zip(self.lower, self.upper)]

    def __repr__(self) -> str:
        return f"Box({self.to_pairs()})"


def _check_domain(domain: Box | None, x: np.ndarray) -> None:
    if domain is not None and not domain.contains(x, slack=1e-12):
        raise DomainError(f"point {x.tolist()} outside domain {domain.to_pairs()}")


class Polynomial:
    """Polynomial in ``n`` chart coordinates stored as a monomial table.

    ``exponents`` has one row per monomial, ``coeffs`` the matching
    coefficients.  Instances are immutable; arithmetic returns new objects.

    >>> x1, x2 = Polynomial.variables(2)
    >>> f = x1 * x2 + x2**3
    >>> f.value([1.0, 2.0]), f.gradient([1.0, 2.0]).tolist()
    (10.0, [2.0, 13.0])
    """

    def __init__(
        self,
        exponents: np.ndarray,
        coeffs: np.ndarray,
        n: int | None = None,
        domain: Box | None = None,
    ):
        exponents = np.asarray(exponents, dtype=int)
        coeffs = np.asarray(coeffs, dtype=float)
        if exponents.ndim != 2:
            if n is None:
                raise ShapeError("cannot infer dimension of empty polynomial")
            exponents = exponents.reshape(0, n)
        if n is not None and exponents.shape[1] != n:
            raise ShapeError(f"exponent rows have length {exponents.shape[1]}, expected {n}")
        if np.any(exponents < 0):
            raise ParameterError("negative exponents are not polynomial")
        if coeffs.shape != (exponents.shape[0],):
            raise ShapeError("one coefficient per monomial required")
        if domain is not None and domain.n != exponents.shape[1]:
            raise ShapeError("domain dimension does not match polynomial")
        # merge duplicate monomials and drop zeros
        table: dict[tuple, float] = {}
        for e, c in zip(map(tuple, exponents), coeffs):
            table[e] = table.get(e, 0.0) + float(c)
        table = {e: c for e, c in table.items() if c != 0.0}
        self.n = exponents.shape[1]
        self.domain = domain
        if table:
            self.exponents = np.array(sorted(table), dtype=int)
            self.coeffs = np.array([table[tuple(e)] for e in self.exponents])
        else:
            self.exponents = np.zeros((0, self.n), dtype=int)
            self.coeffs = np.zeros(0)
        self.exponents.setflags(write=False)
        self.coeffs.setflags(write=False)

    # construction helpers

    @classmethod
    def from_terms(
        cls, terms: Mapping[Sequence[int], float], n: int, domain: Box | None = None
    ) -> "Polynomial":
        exps = [tuple(e) for e in terms]
        return cls(np.array(exps, dtype=int).reshape(-1, n), list(terms.values()), n, domain)

    @classmethod
    def constant(cls, c: float, n: int, domain: Box | None = None) -> "Polynomial":
        return cls(np.zeros((1, n), dtype=int), [c], n, domain)

    @classmethod
    def zero(cls, n: int, domain: Box | None = None) -> "Polynomial":
        return cls(np.zeros((0, n), dtype=int), [], n, domain)

    @classmethod
    def variable(cls, i: int, n: int, domain: Box | None = None) -> "Polynomial":
        """The coordinate function ``x_{i+1}`` (0-based ``i``)."""
        e = np.zeros((1, n), dtype=int)
        e[0, i] = 1
        return cls(e, [1.0], n, domain)

    @classmethod
    def variables(cls, n: int, domain: Box | None = None) -> list["Polynomial"]:
        return [cls.variable(i, n, domain) for i in range(n)]

    def with_domain(self, domain: Box | None) -> "Polynomial":
        return Polynomial(self.exponents, self.coeffs, self.n, domain)

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise ShapeError("polynomials live on charts of different dimension")
            return other
        if np.isscalar(other):
            return Polynomial.constant(float(other), self.n)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(
            np.vstack([self.exponents, other.exponents]),
            np.concatenate([self.coeffs, other.coeffs]),
            self.n,
            self.domain or other.domain,
        )

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.exponents, -self.coeffs, self.n, self.domain)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not len(self.coeffs) or not len(other.coeffs):
            return Polynomial.zero(self.n, self.domain or other.domain)
        exps = (self.exponents[:, None, :] + other.exponents[None, :, :]).reshape(-1, self.n)
        coeffs = np.outer(self.coeffs, other.coeffs).ravel()
        return Polynomial(exps, coeffs, self.n, self.domain or other.domain)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ParameterError("only non-negative integer powers are supported")
        out = Polynomial.constant(1.0, self.n, self.domain)
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / float(other))
        if isinstance(other, Polynomial):
            return Rational(self, other, self.domain or other.domain)
        return NotImplemented

    # calculus

    def derivative(self, i: int) -> "Polynomial":
        e = self.exponents[:, i]
        mask = e > 0
        exps = self.exponents[mask].copy()
        exps[:, i] -= 1
        return Polynomial(exps, self.coeffs[mask] * e[mask], self.n, self.domain)

    @cached_property
    def _first(self) -> list["Polynomial"]:
        return [self.derivative(i) for i in range(self.n)]

    @cached_property
    def _second(self) -> list[list["Polynomial"]]:
        return [[d.derivative(j) for j in range(self.n)] for d in self._first]

    def _raw(self, x: np.ndarray) -> float:
        if not len(self.coeffs):
            return 0.0
        return float(self.coeffs @ np.prod(x[None, :] ** self.exponents, axis=1))

    def _prepare(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ShapeError(f"expected point of length {self.n}, got shape {x.shape}")
        _check_domain(self.domain, x)
        return x

    def value(self, x) -> float:
        return self._raw(self._prepare(x))

    def gradient(self, x) -> np.ndarray:
        x = self._prepare(x)
        return np.array([d._raw(x) for d in self._first])

    def hessian(self, x) -> np.ndarray:
        x = self._prepare(x)
        return np.array([[d._raw(x) for d in row] for row in self._second])

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        x = self._prepare(x)
        return self._raw(x), np.array([d._raw(x) for d in self._first])

    @property
    def is_zero(self) -> bool:
        return not len(self.coeffs)

    @property
    def degree(self) -> int:
        return int(self.exponents.sum(axis=1).max()) if len(self.coeffs) else 0

    def to_terms(self) -> list:
        return [[float(c), e.tolist()] for c, e in zip(self.coeffs, self.exponents)]

    def __repr__(self) -> str:
        if self.is_zero:
            return "Polynomial(0)"
        parts = []
        for c, e in zip(self.coeffs, self.exponents):
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " + ".join(parts) + ")"


class Rational:
    """Quotient ``num / den`` of two polynomials.

    The denominator must not vanish on the declared domain.  This is spot
    checked at the box corners and at a fixed set of random points when the
    field is built; a vanishing sample raises :class:`DomainError`.
    """

    def __init__(
        self,
        num: Polynomial,
        den: Polynomial,
        domain: Box | None = None,
        spot_checks: int = 64,
    ):
        if num.n != den.n:
            raise ShapeError("numerator and denominator dimensions differ")
        if den.is_zero:
            raise DomainError("zero denominator")
        self.n = num.n
        self.domain = domain
        self.num = num.with_domain(None)
        self.den = den.with_domain(None)
        if den.degree > 0:
            if domain is None:
                raise DomainError("rational fields must declare a domain box")
            probes = np.vstack(
                [domain.corners(), domain.sample(np.random.default_rng(0), spot_checks)]
            )
            vals = np.array([self.den._raw(p) for p in probes])
            if np.any(np.abs(vals) < 1e-12) or np.ptp(np.sign(vals)) > 0:
                raise DomainError("denominator vanishes on the declared domain")

    def _prepare(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ShapeError(f"expected point of length {self.n}, got shape {x.shape}")
        _check_domain(self.domain, x)
        return x

    def value(self, x) -> float:
        x = self._prepare(x)
        return self.num._raw(x) / self.den._raw(x)

    def gradient(self, x) -> np.ndarray:
        return self.evaluate(x)[1]

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        x = self._prepare(x)
        N, D = self.num._raw(x), self.den._raw(x)
        dN = np.array([d._raw(x) for d in self.num._first])
        dD = np.array([d._raw(x) for d in self.den._first])
        return N / D, (dN * D - N * dD) / D**2

    def hessian(self, x) -> np.ndarray:
        x = self._prepare(x)
        N, D = self.num._raw(x), self.den._raw(x)
        dN = np.array([d._raw(x) for d in self.num._first])
        dD = np.array([d._raw(x) for d in self.den._first])
        hN = np.array([[d._raw(x) for d in row] for row in self.num._second])
        hD = np.array([[d._raw(x) for d in row] for row in self.den._second])
        return (
            hN / D
            - (np.outer(dN, dD) + np.outer(dD, dN)) / D**2
            - N * hD / D**2
            + 2.0 * N * np.outer(dD, dD) / D**3
        )

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __repr__(self) -> str:
        return f"Rational({self.num!r} / {self.den!r})"


ScalarField = Polynomial | Rational


def eval_field(f: ScalarField, x) -> tuple[float, np.ndarray]:
    """Exact value and gradient of ``f`` at ``x``."""
    return f.evaluate(x)


def finite_difference_gradient(f, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar field (or scalar callable).

    Only used to cross-check the closed-form derivatives.
    """
    if not h > 0:
        raise ParameterError("step h must be positive")
    value = f.value if hasattr(f, "value") else f
    x = np.asarray(x, dtype=float)
    grad = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        grad[i] = (value(x + e) - value(x - e)) / (2 * h)
    return grad


def finite_difference_jacobian(
    func: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-5
) -> np.ndarray:
    """Central differences of an array-valued function.

    The derivative direction is appended as the last axis, matching the
    layout of :meth:`TensorField.evaluate`.
    """
    if not h > 0:
        raise ParameterError("step h must be positive")
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        cols.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)


class TensorField:
    """Multi-index array of scalar fields.

    Index order follows the written form: an entry ``R^k_{i,j}`` is stored
    at ``[k, i, j]``.  Only nonzero components are stored.
    """

    def __init__(
        self,
        n: int,
        rank: int,
        components: Mapping[tuple, ScalarField],
        domain: Box | None = None,
    ):
        self.n = n
        self.rank = rank
        self.domain = domain
        comps = {}
        for idx, f in components.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != rank or any(not 0 <= i < n for i in idx):
                raise ShapeError(f"index {idx} invalid for rank {rank}, dimension {n}")
            if f.n != n:
                raise ShapeError(f"component {idx} lives in dimension {f.n}, expected {n}")
            if not f.is_zero:
                comps[idx] = f
        self.components = comps

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.rank

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Component values and their partials (derivative index last)."""
        x = np.asarray(x, dtype=float)
        _check_domain(self.domain, x)
        vals = np.zeros(self.shape)
        ders = np.zeros(self.shape + (self.n,))
        for idx, f in self.components.items():
            v, g = f.evaluate(x)
            vals[idx] = v
            ders[idx] = g
        return vals, ders

    def value(self, x) -> np.ndarray:
        return self.evaluate(x)[0]

    def fields(self) -> list[ScalarField]:
        return list(self.components.values())


def build_tensor_field(
    n: int,
    rank: int,
    components: Mapping[tuple, ScalarField | float],
    domain: Box | None = None,
) -> TensorField:
    """Assemble a tensor field; numeric entries become constant polynomials."""
    comps = {}
    for idx, f in components.items():
        if np.isscalar(f):
            f = Polynomial.constant(float(f), n)
        comps[idx] = f
    return TensorField(n, rank, comps, domain)


# JSON-side helpers


def parse_index_key(key: str, names: Sequence[str]) -> tuple:
    """Parse ``"k=1,i=1,j=2"`` into a 0-based index tuple ordered by ``names``.

    A bare ``"1,1,2"`` is accepted positionally.
    """
    parts = [p.strip() for p in key.split(",") if p.strip()]
    if len(parts) != len(names):
        raise ShapeError(f"index key {key!r} needs {len(names)} entries")
    if all("=" in p for p in parts):
        found = {}
        for p in parts:
            name, val = (s.strip() for s in p.split("=", 1))
            found[name] = int(val)
        if set(found) != set(names):
            raise ShapeError(f"index key {key!r} must name exactly {list(names)}")
        idx = tuple(found[nm] for nm in names)
    else:
        idx = tuple(int(p) for p in parts)
    if any(i < 1 for i in idx):
        raise ShapeError(f"indices in {key!r} are 1-based")
    return tuple(i - 1 for i in idx)


def _parse_poly(spec, n: int) -> Polynomial:
    if isinstance(spec, (int, float)):
        return Polynomial.constant(float(spec), n)
    if isinstance(spec, dict) and "terms" in spec:
        spec = spec["terms"]
    if not isinstance(spec, list):
        raise ShapeError(f"cannot read polynomial from {spec!r}")
    exps, coeffs = [], []
    for term in spec:
        coef, exp = term
        exp = list(exp)
        if len(exp) != n:
            raise ShapeError(f"monomial exponent {exp} has wrong length for n={n}")
        exps.append(exp)
        coeffs.append(float(coef))
    return Polynomial(np.array(exps, dtype=int).reshape(-1, n), coeffs, n)


def parse_scalar_field(spec, n: int, domain: Box | None = None) -> ScalarField:
    """Read a scalar field from its JSON form.

    Accepted forms: a number (constant), a list of ``[coef, [e_1..e_n]]``
    monomial terms, ``{"terms": [...]}``, or ``{"num": ..., "den": ...}``.
    """
    if isinstance(spec, dict) and "num" in spec:
        return Rational(_parse_poly(spec["num"], n), _parse_poly(spec["den"], n), domain)
    return _parse_poly(spec, n).with_domain(domain)
