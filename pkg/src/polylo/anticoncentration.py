"""Point probabilities of polynomials in independent random signs.

Exact distributions come from enumerating every outcome of the sign vector.
For real coefficients and integer-valued models the enumeration runs on
integer numpy arrays in chunks, with integer outcome weights, so the final
probabilities are exact rationals.  Anything else (complex or fractional
values) goes through the same loop on object arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _config
from .linalg import _norm, exact_div
from .polynomial import PolynomialSpec, RandomModel
from .rng import make_rng
from .scalar import Scalar, scalar_key, to_scalar
from .submatrices import clopper_pearson
from .tensor import Tensor, collapse, is_reducible

__all__ = [
    "OutcomeCapError",
    "PointProbabilityReport",
    "MonteCarloReport",
    "exact_distribution",
    "max_point_probability",
    "linear_distribution",
    "linear_max_point_probability",
    "monte_carlo_point_probability",
    "collapse_reducible_probability",
    "difference_of_products_distribution",
]


class OutcomeCapError(RuntimeError):
    """Exact enumeration would exceed the outcome cap."""


@dataclass(frozen=True)
class PointProbabilityReport:
    """Most likely value ``z`` and its probability.

    Ties are broken towards the smallest value in (re, im) order.
    """

    z: Scalar
    probability: Fraction
    support_size: int
    mode: str = "exact"


@dataclass(frozen=True)
class MonteCarloReport:
    z: Scalar
    hits: int
    samples: int
    seed: int
    confidence: float
    interval: Tuple[float, float]

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.samples)


def _weights(model: RandomModel, i: int) -> Tuple[List[Scalar], List[int], int]:
    sup = model.support(i)
    den = lcm(*[p.denominator for _, p in sup])
    return [v for v, _ in sup], [int(p * den) for _, p in sup], den


def _decode(start: int, stop: int, radices: List[int]) -> np.ndarray:
    """Mixed-radix digits of ``start..stop-1``, first coordinate most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, len(radices)), dtype=np.int64)
    for j in range(len(radices) - 1, -1, -1):
        out[:, j] = idx % radices[j]
        idx //= radices[j]
    return out


def exact_distribution(f: PolynomialSpec, model: Optional[RandomModel] = None, *, cap: Optional[int] = None,
                       chunk: int = 1 << 20) -> Dict[Scalar, Fraction]:
    """Exact law of f(xi) as a map value -> probability.

    Only variables that occur in f are enumerated; the rest cannot change the
    value.
    """
    model = model or RandomModel.rademacher(f.n_vars)
    if model.n < f.n_vars:
        raise ValueError("model has fewer coordinates than the polynomial has variables")
    used = f.variables()
    local = {v: k for k, v in enumerate(used)}
    g = PolynomialSpec(len(used), {tuple((local[v], e) for v, e in m): c for m, c in f.terms.items()})
    supports = [_weights(model, v) for v in used]
    radices = [len(s[0]) for s in supports]
    total = prod(radices)
    limit = _config.get_cap("outcome", cap)
    if total > limit:
        raise OutcomeCapError(f"{total} outcomes exceed the cap {limit}; use Monte Carlo")
    den_total = prod(s[2] for s in supports)
    fast = g.is_real() and all(type(v) is int for s in supports for v in s[0])
    if fast:
        gi, L = g.integer_scaled()
        vmax = max([abs(v) for s in supports for v in s[0]] + [1])
        bound = sum(abs(int(c)) * vmax ** sum(e for _, e in m) for m, c in gi.terms.items())
        wmax = prod(max(s[1]) for s in supports)
        dtype = np.int64 if bound < 2**62 else object
        wdtype = np.int64 if wmax * total < 2**62 else object
    else:
        gi, L, dtype, wdtype = g, 1, object, object
    acc: Dict[Any, Any] = {}
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        digits = _decode(start, stop, radices)
        X = np.empty(digits.shape, dtype=dtype)
        W = np.ones(stop - start, dtype=wdtype)
        for j, (vals, ws, _) in enumerate(supports):
            X[:, j] = np.array(vals, dtype=dtype)[digits[:, j]]
            W = W * np.array(ws, dtype=wdtype)[digits[:, j]]
        vals = gi.evaluate_batch(X) if g.terms else np.zeros(stop - start, dtype=dtype)
        if dtype is object or wdtype is object:
            for v, w in zip(vals, W):
                key = _norm(v)
                acc[key] = acc.get(key, 0) + int(w)
        else:
            uniq, inv = np.unique(vals, return_inverse=True)
            sums = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(sums, inv.reshape(-1), W)
            for u, s in zip(uniq.tolist(), sums.tolist()):
                acc[u] = acc.get(u, 0) + s
    out: Dict[Scalar, Fraction] = {}
    for v, w in acc.items():
        key = _norm(exact_div(v, L)) if L != 1 else _norm(v)
        out[key] = out.get(key, Fraction(0)) + Fraction(int(w), den_total)
    return out


def _argmax(dist: Dict[Scalar, Fraction]) -> Tuple[Scalar, Fraction]:
    best = max(dist.values())
    z = min((v for v, p in dist.items() if p == best), key=scalar_key)
    return z, best


def max_point_probability(f: PolynomialSpec, model: Optional[RandomModel] = None, *,
                          cap: Optional[int] = None) -> PointProbabilityReport:
    model = model or RandomModel.rademacher(f.n_vars)
    dist = exact_distribution(f, model, cap=cap)
    z, p = _argmax(dist)
    return PointProbabilityReport(z, p, len(dist))


def linear_distribution(coeffs: Sequence[Any], model: Optional[RandomModel] = None, *,
                        constant: Any = 0, cap: Optional[int] = None) -> Dict[Scalar, Fraction]:
    """Law of sum_i c_i xi_i + constant by sequential convolution of value maps."""
    cs = [to_scalar(c) for c in coeffs]
    model = model or RandomModel.rademacher(len(cs))
    limit = _config.get_cap("outcome", cap)
    dist: Dict[Scalar, Fraction] = {to_scalar(constant): Fraction(1)}
    for i, c in enumerate(cs):
        if c == 0:
            continue
        nxt: Dict[Scalar, Fraction] = {}
        for v, p in model.support(i):
            step = _norm(c * v)
            for x, q in dist.items():
                key = _norm(x + step)
                nxt[key] = nxt.get(key, 0) + p * q
        dist = nxt
        if len(dist) > limit:
            raise OutcomeCapError(f"value set grew past the cap {limit}")
    return dist


def linear_max_point_probability(coeffs: Sequence[Any], model: Optional[RandomModel] = None, *,
                                 cap: Optional[int] = None) -> PointProbabilityReport:
    dist = linear_distribution(coeffs, model, cap=cap)
    z, p = _argmax(dist)
    return PointProbabilityReport(z, p, len(dist), "dp")


def monte_carlo_point_probability(f: PolynomialSpec, z: Any, model: Optional[RandomModel] = None,
                                  samples: int = 10_000, seed: int = 0, *,
                                  confidence: float = 0.99, chunk: int = 1 << 18) -> MonteCarloReport:
    """Frequency of f(xi) = z over seeded draws, with a Clopper-Pearson interval."""
    if samples < 1:
        raise ValueError("samples must be positive")
    model = model or RandomModel.rademacher(f.n_vars)
    z = to_scalar(z)
    rng = make_rng(seed)
    exact_int = f.is_real() and model.integer_supports()
    if exact_int:
        gi, L = f.integer_scaled()
        target = _norm(z * L)
        # a non-integer target is never hit by an integer-valued polynomial
        int_target = target if type(target) is int else None
    hits = 0
    done = 0
    while done < samples:
        t = min(chunk, samples - done)
        X = model.sample(rng, t)
        if exact_int:
            if int_target is not None:
                vals = gi.evaluate_batch(X.astype(object) if _overflow_risk(gi, X) else X)
                hits += int(np.count_nonzero(vals == int(int_target)))
        else:
            vals = f.evaluate_batch(X.astype(object))
            hits += sum(1 for v in vals if _norm(v) == z)
        done += t
    return MonteCarloReport(z, hits, samples, seed, confidence, clopper_pearson(hits, samples, confidence))


def _overflow_risk(g: PolynomialSpec, X: np.ndarray) -> bool:
    vmax = int(np.abs(X).max()) if X.size else 0
    bound = sum(abs(int(c)) * max(vmax, 1) ** sum(e for _, e in m) for m, c in g.terms.items())
    return bound >= 2**62


def collapse_reducible_probability(T: Tensor, model: Optional[RandomModel] = None, *,
                                   cap: Optional[int] = None) -> Fraction:
    """Exact probability that collapse(T, x) is reducible, x drawn from ``model``."""
    if T.d < 3:
        raise ValueError("collapse must leave at least two axes")
    n = T.dims[-1]
    model = model or RandomModel.rademacher(n)
    supports = [model.support(i) for i in range(n)]
    radices = [len(s) for s in supports]
    total = prod(radices)
    limit = _config.get_cap("outcome", cap)
    if total > limit:
        raise OutcomeCapError(f"{total} outcomes exceed the cap {limit}")
    prob = Fraction(0)
    for digits in _decode(0, total, radices):
        x = [supports[i][int(dg)][0] for i, dg in enumerate(digits)]
        p = prod((supports[i][int(dg)][1] for i, dg in enumerate(digits)), start=Fraction(1))
        if is_reducible(collapse(T, x)) is not None:
            prob += p
    return prob


def _combine(a: Dict[Scalar, Fraction], b: Dict[Scalar, Fraction], op) -> Dict[Scalar, Fraction]:
    out: Dict[Scalar, Fraction] = {}
    for x, p in a.items():
        for y, q in b.items():
            key = _norm(op(x, y))
            out[key] = out.get(key, 0) + p * q
    return out


def difference_of_products_distribution(first: Sequence[Sequence[int]], second: Sequence[Sequence[int]],
                                        model: Optional[RandomModel] = None) -> Dict[Scalar, Fraction]:
    """Exact law of prod_j L_j - prod_j L'_j where each L is the sum of a block of coordinates.

    Blocks must be pairwise disjoint, so the block sums are independent and
    their laws (one DP each) combine by product and difference convolution.
    """
    blocks = [tuple(b) for b in list(first) + list(second)]
    flat = [i for b in blocks for i in b]
    if len(flat) != len(set(flat)):
        raise ValueError("blocks must be disjoint")
    model = model or RandomModel.rademacher(max(flat, default=-1) + 1)

    def block_law(b):
        sub = RandomModel(tuple(model.kinds[i] for i in b))
        return linear_distribution([1] * len(b), sub)

    def prod_law(group):
        law: Dict[Scalar, Fraction] = {1: Fraction(1)}
        for b in group:
            law = _combine(law, block_law(b), lambda x, y: x * y)
        return law

    return _combine(prod_law(first), prod_law(second), lambda x, y: x - y)
