from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
import sympy
from hypothesis import given, strategies as st

from polylo.constructions import make_corner_matrix
from polylo.linalg import Matrix, rank, submatrix
from polylo.submatrices import (BalancedPartitionError, EnumerationCapError, balanced_partition, clopper_pearson,
                                count_disjoint_nonsingular, disjoint_nonsingular_blocks, nonsingular_fraction,
                                singular_fraction)

from test_linalg import int_matrices, sym


def brute_nonsingular(M: Matrix, r: int) -> int:
    S = sym(M)
    return sum(1 for I in combinations(range(M.n_rows), r) for J in combinations(range(M.n_cols), r)
               if S.extract(list(I), list(J)).det() != 0)


def test_identity_r2():
    s = singular_fraction(Matrix.identity(4), 2)
    assert (s.nonsingular, s.total) == (6, 36)
    assert s.singular_fraction == Fraction(5, 6)


def test_zero_r1():
    s = singular_fraction(Matrix.zeros(4), 1)
    assert (s.nonsingular, s.total) == (0, 16)


def test_corner_r1():
    s = singular_fraction(make_corner_matrix(8, 2), 1)
    assert (s.nonsingular, s.total) == (6, 64)


def test_cap_error_points_to_sampling():
    with pytest.raises(EnumerationCapError, match="sampled"):
        singular_fraction(Matrix.identity(10), 3, cap=100)


@given(int_matrices(max_n=5), st.integers(1, 3))
def test_exact_count_matches_bruteforce(M, r):
    if r > min(M.shape):
        return
    s = singular_fraction(M, r)
    assert s.total == comb(M.n_rows, r) * comb(M.n_cols, r)
    assert s.nonsingular == brute_nonsingular(M, r)


def test_big_integer_entries_use_exact_path():
    big = 10**15
    M = Matrix([[big, big + 1, 1], [big - 1, big, 2], [3, 5, big]])
    assert singular_fraction(M, 2).nonsingular == brute_nonsingular(M, 2)


def test_sampled_is_reproducible():
    M = Matrix([[1, 2, 0, 1], [0, 1, 1, 0], [2, 4, 0, 2], [1, 1, 1, 1]])
    a = singular_fraction(M, 2, "sampled", samples=500, seed=7)
    b = singular_fraction(M, 2, "sampled", samples=500, seed=7)
    assert a == b and a.total == 500


def test_sampled_interval_coverage():
    M = Matrix([[1, 2, 0, 1, 3], [0, 1, 1, 0, 2], [2, 4, 0, 2, 6], [1, 1, 1, 1, 1], [0, 0, 1, 1, 0]])
    exact = float(nonsingular_fraction(M, 2))
    hits = 0
    for seed in range(1000):
        lo, hi = singular_fraction(M, 2, "sampled", samples=200, seed=seed, confidence=0.95).interval
        hits += lo <= exact <= hi
    assert hits >= 950


def test_clopper_pearson_edges():
    assert clopper_pearson(0, 10)[0] == 0.0
    assert clopper_pearson(10, 10)[1] == 1.0
    lo, hi = clopper_pearson(5, 10)
    assert lo < 0.5 < hi


@pytest.mark.parametrize("M, expected", [
    (Matrix([[1, 0, 1, 0], [0, 1, 0, 1]]), 2),
    (Matrix.zeros(2, 6), 0),
    (Matrix([[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]]), 1),
])
def test_count_disjoint_examples(M, expected):
    assert count_disjoint_nonsingular(M, 2) == expected


@given(int_matrices(max_n=6))
def test_disjoint_blocks_are_disjoint_nonsingular_and_maximal(M):
    d = M.n_rows
    if d > M.n_cols:
        return
    blocks = disjoint_nonsingular_blocks(M, d)
    used = [c for b in blocks for c in b]
    assert len(used) == len(set(used))
    assert all(rank(submatrix(M, range(d), b)) == d for b in blocks)
    free = [c for c in range(M.n_cols) if c not in used]
    assert all(rank(submatrix(M, range(d), b)) < d for b in combinations(free, d))


@given(int_matrices(max_n=6))
def test_rank_superadditivity(M):
    n, m = M.shape
    R = rank(M)
    for I in [range(k) for k in range(n + 1)] + [range(k, n) for k in range(n)]:
        for J in [range(k) for k in range(m + 1)] + [range(k, m) for k in range(m)]:
            I, J = list(I), list(J)
            rI = rank(submatrix(M, I, range(m))) if I else 0
            rJ = rank(submatrix(M, range(n), J)) if J else 0
            rIJ = rank(submatrix(M, I, J)) if I and J else 0
            assert R >= rI + rJ - rIJ


@given(int_matrices(max_n=6))
def test_rank_monotonicity(M):
    for r in range(1, min(3, *M.shape) + 1):
        fr = nonsingular_fraction(M, r)
        for k in range(1, r + 1):
            assert nonsingular_fraction(M, k) >= fr / comb(r, k)


@given(int_matrices(max_n=8).filter(lambda M: M.n_rows <= 2))
def test_disjoint_vs_total(M):
    d, n = M.shape
    if d > n:
        return
    m = count_disjoint_nonsingular(M, d)
    assert nonsingular_fraction(M, d) <= Fraction(m * d * d, n)


def test_balanced_partition_all_ones():
    parts = balanced_partition(Matrix.ones(6), 2, 1, Fraction(1, 2), seed=1)
    assert sorted(i for p in parts for i in p) == list(range(6))
    assert all(len(p) == 3 for p in parts)


def test_balanced_partition_block_diagonal():
    n = 8
    M = Matrix([[1 if (i < 4) == (j < 4) else 0 for j in range(n)] for i in range(n)])
    parts = balanced_partition(M, 2, 1, Fraction(1, 4), seed=3)
    for P in parts:
        for Q in parts:
            assert nonsingular_fraction(submatrix(M, P, Q), 1) > Fraction(1, 8)


def test_balanced_partition_failure_reports_blocks():
    with pytest.raises(BalancedPartitionError) as info:
        balanced_partition(Matrix.zeros(4), 2, 1, Fraction(1, 2), max_tries=5)
    assert set(info.value.block_fractions) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_balanced_partition_q_must_divide():
    with pytest.raises(ValueError):
        balanced_partition(Matrix.ones(5), 2, 1, Fraction(1, 2))
