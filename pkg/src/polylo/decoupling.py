"""Exact checks of the decoupling inequalities at small sizes.

Every check returns ``(lhs, rhs, holds)`` with both sides exact rationals.
The right-hand sides are built from the explicit witnesses the inequalities'
proofs construct (the maximising shift, the functions psi and phi), not from
a search over all functions.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import lcm
from typing import Any, Dict, NamedTuple, Optional, Sequence

import numpy as np

from . import _config
from .anticoncentration import max_point_probability
from .polynomial import PolynomialSpec, RandomModel
from .scalar import is_real, to_scalar

__all__ = [
    "DecouplingResult",
    "verify_jensen_decoupling",
    "verify_quadratic_decoupling",
    "verify_triple_decoupling",
]


class DecouplingResult(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    holds: bool


def verify_jensen_decoupling(pred: Sequence[Sequence[Any]], p_E: Sequence[Any], p_F: Sequence[Any],
                             k: int) -> DecouplingResult:
    """Pr[E(E, F)]^(k+1) <= Pr[E(E_0, F) and ... and E(E_k, F)] on finite spaces.

    ``pred[e][f]`` is the event's indicator; ``p_E`` and ``p_F`` are the
    outcome weights (each summing to 1).
    """
    pE = [Fraction(x) for x in p_E]
    pF = [Fraction(x) for x in p_F]
    if sum(pE) != 1 or sum(pF) != 1 or min(pE + pF, default=0) < 0:
        raise ValueError("weights must be nonnegative and sum to 1")
    if len(pred) != len(pE) or any(len(row) != len(pF) for row in pred):
        raise ValueError("predicate table shape does not match the outcome spaces")
    if k < 0:
        raise ValueError("k must be nonnegative")
    cond = [sum((pE[e] for e in range(len(pE)) if pred[e][f]), Fraction(0)) for f in range(len(pF))]
    lhs = sum((pF[f] * cond[f] for f in range(len(pF))), Fraction(0))
    rhs = sum((pF[f] * cond[f] ** (k + 1) for f in range(len(pF))), Fraction(0))
    return DecouplingResult(lhs, rhs, lhs ** (k + 1) <= rhs)


def _signs(m: int) -> np.ndarray:
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(product((-1, 1), repeat=m)), dtype=np.int64)


def _scaled_parts(f: PolynomialSpec):
    """(A2, b2, S) with 2 S f's quadratic part = x^T A2 x and linear part b2 / (2 S): integers when real."""
    A, b, _ = f.quadratic_parts()
    vals = list(A.data.reshape(-1)) + list(b)
    if all(is_real(v) for v in vals):
        S = lcm(*[Fraction(v).denominator for v in vals]) if vals else 1
        A2 = np.array([[int(Fraction(x) * S) for x in row] for row in A.data], dtype=object).reshape(A.shape)
        b2 = np.array([int(Fraction(x) * S) for x in b], dtype=object)
        bound = max([abs(int(x)) for x in A2.reshape(-1)] + [abs(int(x)) for x in b2] + [1])
        if bound * (f.n_vars + 1) ** 2 * 16 < 2**62:
            return A2.astype(np.int64), b2.astype(np.int64), S
        return A2, b2, S
    A2 = A.data.copy()
    b2 = np.empty(len(b), dtype=object)
    b2[:] = b
    return A2, b2, 1


def _check_partition(n: int, parts: Sequence[Sequence[int]]) -> None:
    flat = [i for p in parts for i in p]
    if sorted(flat) != list(range(n)):
        raise ValueError("index sets must partition the variables")


def verify_quadratic_decoupling(f: PolynomialSpec, X: Sequence[int], Y: Sequence[int], k: int, *,
                                cap: Optional[int] = None) -> DecouplingResult:
    """Multi-copy decoupling for a quadratic f and a split {X, Y}.

    rhs = max over shifts x in {-1, 1}^X of the probability that, for k
    independent copies xi^(i) of xi[X], every
    (xi^(i) - x)^T A[X, Y] xi[Y] + psi0(x, xi^(i)) = 0, where
    psi0(x, u) = (u^T A_XX u - x^T A_XX x + b_X^T (u - x)) / 2.
    """
    if f.degree > 2:
        raise ValueError("polynomial is not quadratic")
    n = f.n_vars
    X, Y = list(X), list(Y)
    _check_partition(n, [X, Y])
    if k < 1:
        raise ValueError("k must be positive")
    limit = _config.get_cap("outcome", cap)
    if 2 ** (len(X) * (k + 1) + len(Y)) > limit:
        raise ValueError("instance exceeds the enumeration cap")
    lhs = max_point_probability(f, RandomModel.rademacher(n)).probability
    A2, b2, S = _scaled_parts(f)
    AXX = A2[np.ix_(X, X)]
    AXY = A2[np.ix_(X, Y)]
    bX = b2[X]
    U = _signs(len(X)).astype(A2.dtype)
    V = _signs(len(Y)).astype(A2.dtype)
    quadU = np.einsum("ti,ij,tj->t", U, AXX, U) if len(X) else np.zeros(len(U), dtype=A2.dtype)
    best = Fraction(-1)
    for t_x, x in enumerate(U):
        # 2 S times the event's left side: 2 (u - x)^T AXY v + (qu - qx + bX.(u - x))
        diff = U - x
        lin = 2 * (diff @ AXY) @ V.T if len(Y) and len(X) else np.zeros((len(U), len(V)), dtype=A2.dtype)
        psi = quadU - quadU[t_x] + (diff @ bX if len(X) else 0)
        val = lin + np.asarray(psi).reshape(-1, 1)
        hits = (val == 0).sum(axis=0)
        p_per_y = [Fraction(int(h), len(U)) for h in hits]
        prob = sum((p ** k for p in p_per_y), Fraction(0)) / len(V)
        if prob > best:
            best = prob
    return DecouplingResult(lhs, best, lhs ** (k + 1) <= best)


_LAZY = {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}


def verify_triple_decoupling(f: PolynomialSpec, X: Sequence[int], Y: Sequence[int], Z: Sequence[int],
                             *, max_part: int = 3) -> DecouplingResult:
    """Three-way decoupling with lazy differences.

    alpha = xi[X] - xi'[X], beta = xi[Y] - xi'[Y] (entries in {-2, 0, 2}, i.e.
    twice lazy Rademacher; scaling does not change any event), gamma = xi[Z].
    rhs = sum over (alpha, beta) with alpha^T A_XY beta = 0 of
    P(alpha) P(beta) max over consistent (x, y) of
    Pr_gamma[alpha^T A_XZ gamma = phi1 and beta^T A_YZ gamma = psi1].
    """
    if f.degree > 2:
        raise ValueError("polynomial is not quadratic")
    n = f.n_vars
    X, Y, Z = list(X), list(Y), list(Z)
    _check_partition(n, [X, Y, Z])
    if max(len(X), len(Y), len(Z)) > max_part:
        raise ValueError(f"parts larger than {max_part} exceed the exhaustive budget")
    lhs = max_point_probability(f, RandomModel.rademacher(n)).probability
    A2, b2, S = _scaled_parts(f)
    sub = lambda R, C: A2[np.ix_(R, C)]
    AXX, AYY, AXY, AXZ, AYZ = sub(X, X), sub(Y, Y), sub(X, Y), sub(X, Z), sub(Y, Z)
    bX, bY = b2[X], b2[Y]
    SX, SY, G = _signs(len(X)), _signs(len(Y)), _signs(len(Z))

    def q(M, u):
        return u @ M @ u if len(u) else 0

    rhs = Fraction(0)
    # group (xi_X, xi'_X) pairs by alpha
    by_alpha: Dict[tuple, list] = {}
    for u in SX:
        for x in SX:
            by_alpha.setdefault(tuple(int(a) for a in u - x), []).append((u, x))
    by_beta: Dict[tuple, list] = {}
    for v in SY:
        for y in SY:
            by_beta.setdefault(tuple(int(a) for a in v - y), []).append((v, y))
    for alpha, xs in by_alpha.items():
        a = np.array(alpha, dtype=A2.dtype)
        pa = _prob_lazy(alpha)
        aXZ = a @ AXZ if len(X) and len(Z) else np.zeros(len(Z), dtype=A2.dtype)
        for beta, ys in by_beta.items():
            bvec = np.array(beta, dtype=A2.dtype)
            if len(X) and len(Y) and (a @ AXY @ bvec) != 0:
                continue
            pb = _prob_lazy(beta)
            bYZ = bvec @ AYZ if len(Y) and len(Z) else np.zeros(len(Z), dtype=A2.dtype)
            left1 = 2 * (G @ aXZ) if len(Z) else np.zeros(len(G), dtype=A2.dtype)
            left2 = 2 * (G @ bYZ) if len(Z) else np.zeros(len(G), dtype=A2.dtype)
            best = 0
            for u, x in xs:
                phi0 = q(AXX, u) - q(AXX, x) + (bX @ (u - x) if len(X) else 0)
                for v, y in ys:
                    # 2 S phi1 and 2 S psi1
                    phi1 = -2 * (a @ AXY @ y if len(X) and len(Y) else 0) - phi0
                    psi0 = q(AYY, v) - q(AYY, y) + (bY @ (v - y) if len(Y) else 0)
                    psi1 = -2 * (bvec @ AXY.T @ u if len(X) and len(Y) else 0) - psi0
                    hits = int(np.count_nonzero((left1 == phi1) & (left2 == psi1)))
                    best = max(best, hits)
            rhs += pa * pb * Fraction(best, len(G))
    return DecouplingResult(lhs, rhs, lhs ** 4 <= rhs)


def _prob_lazy(vec) -> Fraction:
    p = Fraction(1)
    for a in vec:
        p *= _LAZY[a]
    return p
