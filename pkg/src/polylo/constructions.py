"""Concrete objects: the anticoncentration counterexample, corner matrices,
seeded low-rank matrices and rank-1 tensors with corruptions, power sums."""

from __future__ import annotations

from itertools import product
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import Matrix
from .polynomial import Monomial, PolynomialSpec
from .rng import make_rng
from .tensor import Tensor

__all__ = [
    "counterexample_parts",
    "make_counterexample",
    "make_corner_matrix",
    "make_random_low_rank",
    "make_random_rank1_tensor",
    "make_power_sum",
]


def counterexample_parts(n: int, d: int, part_size: Optional[int] = None) -> List[Tuple[int, ...]]:
    """The 2d disjoint index blocks (0-based), taken from the lowest indices."""
    if d < 1:
        raise ValueError("d must be positive")
    if part_size is None:
        if n < 4 * d:
            raise ValueError(f"n must be at least 4d = {4 * d}")
        part_size = 2 * (n // (4 * d))
    if part_size < 1 or 2 * d * part_size > n:
        raise ValueError("parts do not fit in n variables")
    return [tuple(range(j * part_size, (j + 1) * part_size)) for j in range(2 * d)]


def make_counterexample(n: int, d: int, part_size: Optional[int] = None) -> PolynomialSpec:
    """L_1 ... L_d - L_{d+1} ... L_{2d} with L_j the sum of the j-th block, expanded."""
    parts = counterexample_parts(n, d, part_size)
    terms: Dict[Monomial, int] = {}
    for sign, group in ((1, parts[:d]), (-1, parts[d:])):
        for pick in product(*group):
            m = tuple((v, 1) for v in sorted(pick))
            terms[m] = terms.get(m, 0) + sign
    return PolynomialSpec(n, terms)


def make_corner_matrix(n: int, ell: int) -> Matrix:
    """0/1 symmetric matrix with ones where j >= n - ell + i or i >= n - ell + j (1-based)."""
    if not 0 <= ell <= n:
        raise ValueError("need 0 <= ell <= n")
    rows = [[1 if (j >= n - ell + i or i >= n - ell + j) else 0 for j in range(1, n + 1)]
            for i in range(1, n + 1)]
    return Matrix(rows)


def _nonzero_ints(rng: np.random.Generator, size, bound: int) -> np.ndarray:
    mag = rng.integers(1, bound + 1, size)
    return mag * np.where(rng.integers(0, 2, size) == 1, 1, -1)


def _corrupt(rng: np.random.Generator, arr: np.ndarray, cells: np.ndarray, bound: int) -> None:
    # a nonzero shift guarantees the cell really changes
    shifts = _nonzero_ints(rng, len(cells), bound)
    for cell, s in zip(cells, shifts):
        arr[tuple(cell)] = int(arr[tuple(cell)]) + int(s)


def make_random_low_rank(n: int, r: int, seed: int = 0, corrupt_count: int = 0, symmetric: bool = False,
                         *, m: Optional[int] = None, bound: int = 3) -> Matrix:
    """Sum of r outer products of vectors with entries in {-bound..bound} minus 0, then corruptions.

    Corrupted cells are distinct.  In the symmetric case they are distinct
    cells on or above the diagonal, each mirrored.
    """
    m = n if m is None else m
    if symmetric and m != n:
        raise ValueError("symmetric matrices are square")
    if r > min(n, m) or r < 0:
        raise ValueError("need 0 <= r <= min(n, m)")
    rng = make_rng(seed)
    A = np.zeros((n, m), dtype=np.int64)
    for _ in range(r):
        u = _nonzero_ints(rng, n, bound)
        v = u if symmetric else _nonzero_ints(rng, m, bound)
        sign = int(_nonzero_ints(rng, 1, 1)[0]) if symmetric else 1
        A += sign * np.outer(u, v)
    A = A.astype(object)
    if symmetric:
        pool = np.array([(i, j) for i in range(n) for j in range(i, n)])
    else:
        pool = np.array([(i, j) for i in range(n) for j in range(m)])
    if corrupt_count > len(pool):
        raise ValueError("more corruptions than cells")
    if corrupt_count:
        cells = pool[rng.choice(len(pool), corrupt_count, replace=False)]
        _corrupt(rng, A, cells, bound)
        if symmetric:
            for i, j in cells:
                A[j, i] = A[i, j]
    return Matrix(A.tolist())


def make_random_rank1_tensor(dims: Sequence[int], seed: int = 0, corrupt_count: int = 0, *,
                             factors: Optional[Sequence[Sequence[Any]]] = None, bound: int = 3) -> Tensor:
    """u_1 x ... x u_d with nonzero small-integer factors (or the given ones), then corruptions."""
    dims = tuple(int(x) for x in dims)
    rng = make_rng(seed)
    if factors is None:
        factors = [_nonzero_ints(rng, k, bound) for k in dims]
    elif [len(f) for f in factors] != list(dims):
        raise ValueError("factor lengths must match dims")
    arr = np.ones((), dtype=object)
    for f in factors:
        arr = np.multiply.outer(arr, np.array(list(f), dtype=object))
    total = int(np.prod(dims))
    if corrupt_count > total:
        raise ValueError("more corruptions than cells")
    if corrupt_count:
        flat = rng.choice(total, corrupt_count, replace=False)
        _corrupt(rng, arr, np.array(np.unravel_index(flat, dims)).T, bound)
    return Tensor(arr.tolist())


def make_power_sum(n: int, d: int, *, cap: int = 10**6) -> PolynomialSpec:
    """(x_1 + ... + x_n)^d, fully expanded."""
    if comb(n + d - 1, d) > cap:
        raise ValueError("expansion exceeds the term cap")
    return PolynomialSpec.linear([1] * n) ** d
