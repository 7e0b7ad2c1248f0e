"""Sampling testers for tensor reducibility and matrix rank.

Both testers draw small sub-blocks uniformly with replacement and compare the
observed bad fraction against a threshold.  Exactly reducible tensors have no
irreducible sub-blocks at all, so the tensor tester never rejects them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, prod
from typing import Any, Iterable, Optional, Sequence, Tuple

import numpy as np

from . import _config
from ._minors import index_sets
from .linalg import Matrix
from .rng import make_rng, random_subsets
from .submatrices import EnumerationCapError, singular_fraction
from .tensor import Tensor, batch_reducible, gather_paired, gather_product, working_array

__all__ = [
    "TesterConfig",
    "Verdict",
    "default_threshold",
    "tensor_reducibility_tester",
    "exact_irreducible_fraction",
    "matrix_rank_tester",
    "tuple_counting_bad_fraction",
    "tuple_counting_check",
]


@dataclass(frozen=True)
class TesterConfig:
    """``side`` defaults to 2^(d-1); ``threshold`` overrides (eps/2)^(2^(d-1))."""

    samples: int
    seed: int = 0
    epsilon: Fraction = Fraction(1, 4)
    side: Optional[int] = None
    threshold: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.threshold is not None:
            object.__setattr__(self, "threshold", Fraction(self.threshold))
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.side is not None and self.side < 1:
            raise ValueError("side must be positive")


@dataclass(frozen=True)
class Verdict:
    decision: str
    observed_bad_fraction: Fraction
    threshold: Fraction
    bad: int = 0
    samples: int = 0

    @property
    def accept(self) -> bool:
        return self.decision == "accept"

    def to_json(self) -> dict:
        return {"decision": self.decision, "observed_bad_fraction": str(self.observed_bad_fraction),
                "threshold": str(self.threshold), "bad": self.bad, "samples": self.samples}


def _verdict(bad: int, samples: int, threshold: Fraction) -> Verdict:
    frac = Fraction(bad, samples)
    return Verdict("reject" if frac > threshold else "accept", frac, threshold, bad, samples)


def default_threshold(eps: Any, d: int) -> Fraction:
    return (Fraction(eps) / 2) ** (2 ** (d - 1))


def _side(T: Tensor, config: TesterConfig) -> int:
    side = config.side if config.side is not None else 2 ** (T.d - 1)
    if min(T.dims) < side:
        raise ValueError(f"every side must be at least {side}, got dims {T.dims}")
    return side


def tensor_reducibility_tester(T: Tensor, config: TesterConfig, *, chunk: int = 4096) -> Verdict:
    """Sample side^d subtensors; reject iff the irreducible fraction exceeds the threshold."""
    if T.d < 2:
        raise ValueError("tensor must have at least two axes")
    side = _side(T, config)
    thr = config.threshold if config.threshold is not None else default_threshold(config.epsilon, T.d)
    W = working_array(T)
    rng = make_rng(config.seed)
    bad = 0
    done = 0
    while done < config.samples:
        t = min(chunk, config.samples - done)
        idx = [random_subsets(rng, n, side, t) for n in T.dims]
        bad += int(np.count_nonzero(~batch_reducible(gather_paired(W, idx))))
        done += t
    return _verdict(bad, config.samples, thr)


def exact_irreducible_fraction(T: Tensor, side: int, *, cap: Optional[int] = None,
                               chunk_elems: int = 4_000_000) -> Fraction:
    """Fraction of all side x ... x side subtensors that are irreducible."""
    if T.d < 2:
        raise ValueError("tensor must have at least two axes")
    if side < 1 or min(T.dims) < side:
        raise ValueError(f"side {side} does not fit dims {T.dims}")
    total = prod(comb(n, side) for n in T.dims)
    limit = _config.get_cap("subtensor", cap)
    if total > limit:
        raise EnumerationCapError(f"{total} subtensors exceed the cap {limit}")
    W = working_array(T)
    lists = [index_sets(n, side) for n in T.dims]
    per_first = total // len(lists[0])
    step = max(1, chunk_elems // max(1, per_first * side ** T.d))
    bad = 0
    for s in range(0, len(lists[0]), step):
        stack = gather_product(W, [lists[0][s:s + step]] + lists[1:])
        bad += int(np.count_nonzero(~batch_reducible(stack)))
    return Fraction(bad, total)


def matrix_rank_tester(A: Matrix, r: int, config: TesterConfig) -> Verdict:
    """Sample r x r submatrices; reject iff the nonsingular fraction exceeds epsilon."""
    if not 1 <= r <= min(A.shape):
        raise ValueError("r must lie between 1 and min(n, m)")
    thr = config.threshold if config.threshold is not None else config.epsilon
    stats = singular_fraction(A, r, "sampled", samples=config.samples, seed=config.seed)
    return _verdict(stats.nonsingular, config.samples, thr)


def _normalize(dist: Iterable[Tuple[Iterable[int], Any]], n: int):
    masks, probs = [], []
    for s, p in dist:
        p = Fraction(p)
        items = list(s)
        if p < 0 or any(not 0 <= i < n for i in items):
            raise ValueError("malformed distribution entry")
        mask = 0
        for i in items:
            mask |= 1 << i
        masks.append(mask)
        probs.append(p)
    if sum(probs) != 1:
        raise ValueError("probabilities must sum to 1")
    return masks, probs


def tuple_counting_bad_fraction(dist: Sequence[Tuple[Iterable[int], Any]], n: int, r: int,
                                p: Any) -> Fraction:
    """Fraction of r-subsets S of range(n) with Pr[S within I] < p/2."""
    masks, probs = _normalize(dist, n)
    half = Fraction(p) / 2
    bad = 0
    for S in combinations(range(n), r):
        sm = sum(1 << i for i in S)
        if sum((q for m, q in zip(masks, probs) if m & sm == sm), Fraction(0)) < half:
            bad += 1
    return Fraction(bad, comb(n, r))


def tuple_counting_check(dist: Sequence[Tuple[Iterable[int], Any]], n: int, r: int,
                         delta: Any, p: Any) -> bool:
    """If Pr[|I| >= (1 - delta) n] >= p, at most a 2 r delta fraction of r-subsets are bad."""
    delta, p = Fraction(delta), Fraction(p)
    masks, probs = _normalize(dist, n)
    big = sum((q for m, q in zip(masks, probs) if bin(m).count("1") >= (1 - delta) * n), Fraction(0))
    if big < p:
        raise ValueError("distribution does not satisfy Pr[|I| >= (1 - delta) n] >= p")
    return tuple_counting_bad_fraction(dist, n, r, p) <= 2 * r * delta
