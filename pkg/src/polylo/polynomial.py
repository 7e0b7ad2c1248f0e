"""Sparse polynomials with exact coefficients and per-coordinate sign models."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial, lcm, prod
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .linalg import Matrix, _norm
from .scalar import GaussianRational, Scalar, format_scalar, is_real, to_scalar

__all__ = ["Monomial", "PolynomialSpec", "RandomModel"]

# a monomial is a sorted tuple of (variable, exponent) pairs with exponent >= 1
Monomial = Tuple[Tuple[int, int], ...]


def _mono(exps: Union[Mapping[int, int], Iterable[Tuple[int, int]]]) -> Monomial:
    items = exps.items() if isinstance(exps, Mapping) else exps
    acc: Dict[int, int] = {}
    for v, e in items:
        if e < 0:
            raise ValueError("negative exponent")
        if e:
            acc[int(v)] = acc.get(int(v), 0) + int(e)
    return tuple(sorted(acc.items()))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return _mono(list(a) + list(b))


class PolynomialSpec:
    """Polynomial in ``n_vars`` variables (0-based) as a monomial -> coefficient map.

    Zero coefficients are never stored.
    """

    __slots__ = ("n_vars", "terms", "degree")

    def __init__(self, n_vars: int, terms: Optional[Mapping[Any, Any]] = None):
        self.n_vars = int(n_vars)
        acc: Dict[Monomial, Scalar] = {}
        for m, c in (terms or {}).items():
            mono = _mono(m)
            for v, _ in mono:
                if not 0 <= v < self.n_vars:
                    raise ValueError(f"variable {v} out of range")
            acc[mono] = _norm(acc.get(mono, 0) + to_scalar(c))
        self.terms: Dict[Monomial, Scalar] = {m: c for m, c in acc.items() if c != 0}
        self.degree = max((sum(e for _, e in m) for m in self.terms), default=0)

    # constructors
    @classmethod
    def constant(cls, n_vars: int, c: Any) -> "PolynomialSpec":
        return cls(n_vars, {(): c})

    @classmethod
    def variable(cls, n_vars: int, i: int) -> "PolynomialSpec":
        return cls(n_vars, {((i, 1),): 1})

    @classmethod
    def linear(cls, coeffs: Sequence[Any], constant: Any = 0) -> "PolynomialSpec":
        t: Dict[Monomial, Any] = {((i, 1),): c for i, c in enumerate(coeffs)}
        t[()] = constant
        return cls(len(coeffs), t)

    @classmethod
    def from_quadratic_form(cls, A: Matrix, b: Optional[Sequence[Any]] = None, c: Any = 0) -> "PolynomialSpec":
        """x^T A x + b^T x + c (A need not be symmetric)."""
        n = A.n_rows
        t: Dict[Monomial, Any] = {}
        for i in range(n):
            for j in range(n):
                if A[i, j] != 0:
                    m = _mono([(i, 1), (j, 1)])
                    t[m] = _norm(t.get(m, 0) + A[i, j])
        for i, v in enumerate(b or []):
            t[((i, 1),)] = _norm(t.get(((i, 1),), 0) + to_scalar(v))
        t[()] = _norm(t.get((), 0) + to_scalar(c))
        return cls(n, t)

    # arithmetic
    def __add__(self, other: "PolynomialSpec") -> "PolynomialSpec":
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = _norm(t.get(m, 0) + c)
        return PolynomialSpec(max(self.n_vars, other.n_vars), t)

    __radd__ = __add__

    def __neg__(self) -> "PolynomialSpec":
        return PolynomialSpec(self.n_vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "PolynomialSpec") -> "PolynomialSpec":
        return self + (-self._coerce(other))

    def __mul__(self, other: Any) -> "PolynomialSpec":
        other = self._coerce(other)
        t: Dict[Monomial, Any] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = _norm(t.get(m, 0) + c1 * c2)
        return PolynomialSpec(max(self.n_vars, other.n_vars), t)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PolynomialSpec":
        out = PolynomialSpec.constant(self.n_vars, 1)
        for _ in range(e):
            out = out * self
        return out

    def _coerce(self, x: Any) -> "PolynomialSpec":
        return x if isinstance(x, PolynomialSpec) else PolynomialSpec.constant(self.n_vars, x)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PolynomialSpec):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"x{v + 1}" + (f"^{e}" if e > 1 else "") for v, e in m)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # structure
    def is_real(self) -> bool:
        return all(is_real(c) for c in self.terms.values())

    def is_linear(self) -> bool:
        return self.degree <= 1

    def variables(self) -> List[int]:
        return sorted({v for m in self.terms for v, _ in m})

    def linear_coefficients(self) -> Tuple[List[Scalar], Scalar]:
        if not self.is_linear():
            raise ValueError("polynomial is not linear")
        coeffs: List[Scalar] = [0] * self.n_vars
        for m, c in self.terms.items():
            if m:
                coeffs[m[0][0]] = c
        return coeffs, self.terms.get((), 0)

    def quadratic_parts(self) -> Tuple[Matrix, List[Scalar], Scalar]:
        """(A, b, c) with f = x^T A x + b^T x + c and A symmetric.

        Off-diagonal A_ij is half the coefficient of x_i x_j; A_ii is the
        coefficient of x_i^2.
        """
        if self.degree > 2:
            raise ValueError("polynomial is not quadratic")
        n = self.n_vars
        A = [[0] * n for _ in range(n)]
        b: List[Scalar] = [0] * n
        for m, c in self.terms.items():
            deg = sum(e for _, e in m)
            if deg == 2:
                if len(m) == 1:
                    i = m[0][0]
                    A[i][i] = c
                else:
                    (i, _), (j, _) = m
                    half = _norm(c * Fraction(1, 2))
                    A[i][j] = half
                    A[j][i] = half
            elif deg == 1:
                b[m[0][0]] = c
        return Matrix(A), b, self.terms.get((), 0)

    # evaluation
    def evaluate(self, x: Sequence[Any]) -> Scalar:
        xs = [to_scalar(v) for v in x]
        total: Any = 0
        for m, c in self.terms.items():
            term: Any = c
            for v, e in m:
                term = term * xs[v] ** e
            total = total + term
        return _norm(total)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on every row of ``X`` (shape ``(N, n_vars)``), same dtype as X.

        Coefficients must be integers when X is an integer array; callers scale
        first (see :meth:`integer_scaled`).
        """
        out = np.zeros(X.shape[0], dtype=X.dtype)
        if X.dtype == object:
            out[:] = 0
        for m, c in self.terms.items():
            term = np.full(X.shape[0], c, dtype=X.dtype) if X.dtype != object else np.array([c] * X.shape[0], dtype=object)
            for v, e in m:
                col = X[:, v]
                term = term * (col ** e if e > 1 else col)
            out = out + term
        return out

    def integer_scaled(self) -> Tuple["PolynomialSpec", int]:
        """(L f, L) with L the least common denominator of the real coefficients."""
        if not self.is_real():
            raise ValueError("complex coefficients")
        L = lcm(*[Fraction(c).denominator for c in self.terms.values()]) if self.terms else 1
        return PolynomialSpec(self.n_vars, {m: c * L for m, c in self.terms.items()}), L

    def substitute_signs(self, signs: Sequence[int]) -> "PolynomialSpec":
        """f(s_1 x_1, ..., s_n x_n) for signs s_i in {-1, 1}."""
        t = {}
        for m, c in self.terms.items():
            s = prod(signs[v] ** e for v, e in m)
            t[m] = c * s
        return PolynomialSpec(self.n_vars, t)

    # serialization (1-based variable keys)
    def to_json(self) -> dict:
        return {"n": self.n_vars,
                "terms": [{"exps": {str(v + 1): e for v, e in m}, "coef": format_scalar(c)}
                          for m, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj: dict) -> "PolynomialSpec":
        t: Dict[Monomial, Any] = {}
        for term in obj["terms"]:
            m = _mono({int(k) - 1: int(e) for k, e in term.get("exps", {}).items()})
            t[m] = _norm(t.get(m, 0) + to_scalar(term["coef"]))
        return cls(int(obj["n"]), t)


_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class RandomModel:
    """Independent coordinates, each Rademacher, lazy Rademacher or shifted.

    ``kinds[i]`` is ``"rademacher"``, ``"lazy"`` or ``("shifted", s)``; a
    shifted coordinate takes the values s - 1 and s + 1 with probability 1/2.
    """

    kinds: Tuple[Any, ...]

    @classmethod
    def rademacher(cls, n: int) -> "RandomModel":
        return cls(("rademacher",) * n)

    @classmethod
    def lazy(cls, n: int) -> "RandomModel":
        return cls(("lazy",) * n)

    @classmethod
    def shifted(cls, shifts: Sequence[Any]) -> "RandomModel":
        return cls(tuple(("shifted", to_scalar(s)) for s in shifts))

    @classmethod
    def named(cls, name: str, n: int, shifts: Optional[Sequence[Any]] = None) -> "RandomModel":
        if name == "rademacher":
            return cls.rademacher(n)
        if name == "lazy":
            return cls.lazy(n)
        if name == "shifted":
            return cls.shifted(shifts if shifts is not None else [0] * n)
        raise ValueError(f"unknown model {name!r}")

    @property
    def n(self) -> int:
        return len(self.kinds)

    def support(self, i: int) -> List[Tuple[Scalar, Fraction]]:
        k = self.kinds[i]
        if k == "rademacher":
            return [(-1, _HALF), (1, _HALF)]
        if k == "lazy":
            return [(-1, _QUARTER), (0, _HALF), (1, _QUARTER)]
        if isinstance(k, tuple) and k[0] == "shifted":
            s = to_scalar(k[1])
            return [(_norm(s - 1), _HALF), (_norm(s + 1), _HALF)]
        raise ValueError(f"unknown coordinate kind {k!r}")

    def outcome_count(self) -> int:
        return prod(len(self.support(i)) for i in range(self.n))

    def integer_supports(self) -> bool:
        return all(type(v) is int for i in range(self.n) for v, _ in self.support(i))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` draws as an (count, n) array (int64 when all values are integers)."""
        ints = self.integer_supports()
        X = np.empty((count, self.n), dtype=np.int64 if ints else object)
        for i in range(self.n):
            sup = self.support(i)
            vals = np.array([v for v, _ in sup], dtype=np.int64 if ints else object)
            if len(sup) == 2:
                idx = rng.integers(0, 2, count)
            else:
                # lazy: one uniform draw out of four cells -1, 0, 0, 1
                idx = np.array([0, 1, 1, 2])[rng.integers(0, 4, count)]
            X[:, i] = vals[idx]
        return X
