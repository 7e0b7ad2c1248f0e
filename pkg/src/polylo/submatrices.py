"""Statistics over r x r submatrices: singular fractions, disjoint nonsingular
blocks and balanced block partitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from . import _config
from ._minors import count_nonsingular_all, nonsingular_mask_pairs
from .linalg import DimensionError, Matrix, det, submatrix
from .rng import make_rng, random_subsets

__all__ = [
    "EnumerationCapError",
    "SubmatrixStats",
    "singular_fraction",
    "nonsingular_fraction",
    "clopper_pearson",
    "disjoint_nonsingular_blocks",
    "count_disjoint_nonsingular",
    "BalancedPartitionError",
    "balanced_partition",
]


class EnumerationCapError(RuntimeError):
    """Exact enumeration would exceed the configured cap; use sampled mode."""


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Two-sided exact binomial confidence interval."""
    if trials == 0:
        return 0.0, 1.0
    a = 1.0 - confidence
    lo = 0.0 if successes == 0 else float(stats.beta.ppf(a / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(stats.beta.ppf(1 - a / 2, successes + 1, trials - successes))
    return lo, hi


@dataclass(frozen=True)
class SubmatrixStats:
    """Counts of nonsingular r x r submatrices.

    In exact mode ``total`` is C(n_rows, r) * C(n_cols, r); in sampled mode it is
    the number of (uniform, with replacement) draws.
    """

    r: int
    total: int
    nonsingular: int
    mode: str = "exact"
    sample_count: Optional[int] = None
    seed: Optional[int] = None
    confidence: Optional[float] = None
    interval: Optional[Tuple[float, float]] = field(default=None, compare=False)

    @property
    def fraction(self) -> Fraction:
        """Fraction of nonsingular submatrices."""
        return Fraction(self.nonsingular, self.total) if self.total else Fraction(0)

    @property
    def singular_fraction(self) -> Fraction:
        return 1 - self.fraction


def singular_fraction(M: Matrix, r: int, mode: str = "exact", *, samples: int = 10_000,
                      seed: int = 0, cap: Optional[int] = None,
                      confidence: float = 0.95) -> SubmatrixStats:
    """Count nonsingular r x r submatrices of ``M``, exactly or by sampling.

    Sampled mode draws row and column sets independently and uniformly from a
    seeded stream and reports a Clopper-Pearson interval for the nonsingular
    fraction at the given confidence.
    """
    n, m = M.shape
    if not 0 <= r <= min(n, m):
        raise DimensionError(f"r={r} must lie in [0, {min(n, m)}]")
    if mode == "exact":
        total = comb(n, r) * comb(m, r)
        limit = _config.get_cap("submatrix", cap)
        if total > limit:
            raise EnumerationCapError(
                f"{total} submatrices exceed the exact cap {limit}; use mode='sampled'")
        return SubmatrixStats(r, total, count_nonsingular_all(M, r))
    if mode == "sampled":
        if samples < 1:
            raise ValueError("samples must be positive")
        rng = make_rng(seed)
        rs = random_subsets(rng, n, r, samples)
        cs = random_subsets(rng, m, r, samples)
        hits = int(np.count_nonzero(nonsingular_mask_pairs(M, rs, cs)))
        return SubmatrixStats(r, samples, hits, "sampled", samples, seed, confidence,
                              clopper_pearson(hits, samples, confidence))
    raise ValueError(f"unknown mode {mode!r}")


def nonsingular_fraction(M: Matrix, r: int) -> Fraction:
    """Exact fraction of nonsingular r x r submatrices."""
    return singular_fraction(M, r).fraction


def disjoint_nonsingular_blocks(M: Matrix, d: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Greedy maximal family of column-disjoint nonsingular d x d submatrices.

    Column d-tuples are scanned in lexicographic order; a tuple is taken when it
    avoids every column already used and the submatrix is nonsingular.  The
    result is maximal (no further disjoint nonsingular block exists), which is
    all the counting argument for disjoint blocks needs.
    """
    d = M.n_rows if d is None else d
    if M.n_rows != d:
        raise DimensionError(f"matrix must have exactly d={d} rows")
    used: set = set()
    taken = []
    rows = list(range(d))
    for cols in combinations(range(M.n_cols), d):
        if used.intersection(cols):
            continue
        if det(submatrix(M, rows, cols)) != 0:
            taken.append(cols)
            used.update(cols)
    return taken


def count_disjoint_nonsingular(M: Matrix, d: Optional[int] = None) -> int:
    return len(disjoint_nonsingular_blocks(M, d))


class BalancedPartitionError(RuntimeError):
    def __init__(self, message: str, block_fractions: Dict[Tuple[int, int], float]):
        super().__init__(message)
        self.block_fractions = block_fractions


def _block_ok(block: Matrix, r: int, threshold: Fraction, cap: int, seed: int,
              samples: int, confidence: float) -> Tuple[bool, float]:
    total = comb(block.n_rows, r) * comb(block.n_cols, r)
    if total <= cap:
        f = singular_fraction(block, r, cap=cap).fraction
        return f > threshold, float(f)
    # sampled: accept only if the lower confidence bound clears the threshold
    st = singular_fraction(block, r, "sampled", samples=samples, seed=seed, confidence=confidence)
    return st.interval[0] > threshold, float(st.fraction)


def balanced_partition(M: Matrix, q: int, r: int, eps, seed: int = 0, max_tries: int = 200, *,
                       cap: Optional[int] = None, samples: int = 4000,
                       confidence: float = 0.99) -> Tuple[Tuple[int, ...], ...]:
    """Split [n] into q equal parts so every block ``M[I_i, I_j]`` keeps more than
    an eps/2 fraction of nonsingular r x r submatrices.

    Random equal partitions (seeded permutations cut into consecutive runs) are
    tried until one qualifies.  Blocks are checked exactly when under the cap;
    otherwise a block passes only if the lower end of a Clopper-Pearson interval
    at ``confidence`` exceeds eps/2.
    """
    n = M.n_rows
    if not M.is_square():
        raise DimensionError("balanced_partition needs a square matrix")
    if q < 1 or n % q:
        raise ValueError(f"q={q} must divide n={n}")
    eps = Fraction(eps)
    threshold = eps / 2
    limit = _config.get_cap("submatrix", cap)
    size = n // q
    rng = make_rng(seed)
    best: Dict[Tuple[int, int], float] = {}
    best_score = -1.0
    for attempt in range(max_tries):
        perm = rng.permutation(n)
        parts = tuple(tuple(sorted(int(x) for x in perm[i * size:(i + 1) * size])) for i in range(q))
        fractions: Dict[Tuple[int, int], float] = {}
        ok_all = True
        for i in range(q):
            for j in range(q):
                ok, f = _block_ok(submatrix(M, parts[i], parts[j]), r, threshold, limit,
                                  seed + 1 + attempt * q * q + i * q + j, samples, confidence)
                fractions[(i, j)] = f
                ok_all &= ok
        if ok_all:
            return parts
        score = min(fractions.values())
        if score > best_score:
            best, best_score = fractions, score
    raise BalancedPartitionError(
        f"no qualifying partition in {max_tries} tries (threshold {threshold})", best)
