"""Vectorized exact minors.

Real matrices are first scaled row by row to integers (which preserves the
singularity of every submatrix).  Determinants of many small submatrices are
then evaluated at once with the Leibniz formula on numpy integer arrays.  The
dtype is int64 only when a Hadamard-style bound proves no intermediate value
can overflow; otherwise the same code runs on object arrays of Python ints.
"""

from __future__ import annotations

from itertools import combinations, permutations
from math import comb, factorial
from typing import Iterator, Optional

import numpy as np

from .linalg import Matrix, det, int_det, integer_rows

_INT64_SAFE = 2**62


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_PERMS = {r: [(p, _perm_sign(p)) for p in permutations(range(r))] for r in range(1, 5)}


def integer_array(M: Matrix) -> Optional[np.ndarray]:
    """Row-scaled integer copy of a real matrix as an object array, or None if complex."""
    if not M.is_real():
        return None
    rows, _ = integer_rows(M.rows())
    arr = np.empty((M.n_rows, M.n_cols), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            arr[i, j] = x
    return arr


def fit_dtype(arr: np.ndarray, degree: int) -> np.ndarray:
    """Convert to int64 when products of ``degree`` entries summed ``degree!`` times fit."""
    if arr.size == 0:
        return arr.astype(np.int64)
    bound = max(abs(int(x)) for x in arr.reshape(-1))
    if bound == 0 or factorial(max(degree, 1)) * bound ** max(degree, 1) * 4 < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr.astype(object)


def batched_det(sub: np.ndarray) -> np.ndarray:
    """Determinants of a stack of r x r integer matrices (shape ``(..., r, r)``)."""
    r = sub.shape[-1]
    lead = sub.shape[:-2]
    if r == 0:
        return np.ones(lead, dtype=sub.dtype)
    if r <= 4:
        total = None
        for p, s in _PERMS[r]:
            term = sub[..., 0, p[0]]
            for i in range(1, r):
                term = term * sub[..., i, p[i]]
            if s < 0:
                term = -term
            total = term if total is None else total + term
        return total
    flat = sub.reshape((-1, r, r))
    out = np.empty(flat.shape[0], dtype=object)
    for t in range(flat.shape[0]):
        out[t] = int_det([[int(x) for x in row] for row in flat[t]])
    return out.reshape(lead)


def index_sets(n: int, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(combinations(range(n), r)), dtype=np.int64).reshape(-1, r)


def _chunks(total: int, size: int) -> Iterator[slice]:
    for start in range(0, total, size):
        yield slice(start, min(total, start + size))


def count_nonsingular_all(M: Matrix, r: int, chunk_elems: int = 4_000_000) -> int:
    """Exact number of nonsingular r x r submatrices of M."""
    n, m = M.shape
    if r > min(n, m):
        return 0
    if r == 0:
        return 1
    A = integer_array(M)
    if A is None:
        return sum(1 for I in combinations(range(n), r) for J in combinations(range(m), r)
                   if det(M.submatrix(I, J)) != 0)
    A = fit_dtype(A, r)
    rows = index_sets(n, r)
    cols = index_sets(m, r)
    per_row = max(1, chunk_elems // max(1, len(cols) * r * r))
    count = 0
    for sl in _chunks(len(rows), per_row):
        rs = rows[sl]
        sub = A[rs[:, None, :, None], cols[None, :, None, :]]
        d = batched_det(sub)
        count += int(np.count_nonzero(d != 0))
    return count


def nonsingular_mask_pairs(M: Matrix, row_sets: np.ndarray, col_sets: np.ndarray) -> np.ndarray:
    """Boolean array: is ``M[row_sets[t], col_sets[t]]`` nonsingular, for each t."""
    r = row_sets.shape[1]
    if r == 0:
        return np.ones(len(row_sets), dtype=bool)
    A = integer_array(M)
    if A is None:
        return np.array([det(M.submatrix(I, J)) != 0 for I, J in zip(row_sets, col_sets)], dtype=bool)
    A = fit_dtype(A, r)
    out = np.empty(len(row_sets), dtype=bool)
    step = max(1, 4_000_000 // max(1, r * r))
    for sl in _chunks(len(row_sets), step):
        sub = A[row_sets[sl][:, :, None], col_sets[sl][:, None, :]]
        out[sl] = batched_det(sub) != 0
    return out


def total_submatrices(n: int, m: int, r: int) -> int:
    return comb(n, r) * comb(m, r)
