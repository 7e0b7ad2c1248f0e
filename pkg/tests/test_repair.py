from fractions import Fraction
from itertools import combinations
from math import ceil

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polylo.constructions import make_corner_matrix, make_random_low_rank, make_random_rank1_tensor
from polylo.linalg import Matrix, hamming, rank, submatrix
from polylo.repair import (RankBoundError, RepairError, fix_symmetry, low_rank_approx, robust_check,
                           robust_principal_submatrix, symmetric_low_rank_repair, symmetrize_robust,
                           tensor_repair, tensor_repair_report)
from polylo.submatrices import singular_fraction
from polylo.tensor import Tensor, is_reducible, tensor_product


def check_outcome(A, out):
    assert out.changed_entries == hamming(A, out.output)
    assert out.changed_fraction == Fraction(out.changed_entries, A.data.size)


# low_rank_approx

def test_low_rank_rank1_unchanged():
    A = Matrix([[1, 2, 3], [2, 4, 6], [-1, -2, -3]])
    out = low_rank_approx(A, 2)
    assert out.output == A and out.changed_entries == 0


def test_low_rank_diag_unchanged():
    A = Matrix.diag([1, 0, 0, 0])
    out = low_rank_approx(A, 2)
    assert out.output == A and out.changed_entries == 0


def test_low_rank_k1_branch():
    A = Matrix([[1, 1], [1, 0]])
    out = low_rank_approx(A, 2)
    assert out.output == Matrix.zeros(2) and out.changed_entries == 3
    assert out.witness["alpha"] == 1


@settings(max_examples=40)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(1, 3), st.integers(0, 6), st.integers(0, 10**6))
def test_low_rank_postcondition(n, m, r, corrupt, seed):
    r = min(r, n, m)
    A = make_random_low_rank(n, max(r - 1, 0), seed, min(corrupt, n * m), m=m)
    out = low_rank_approx(A, r)
    check_outcome(A, out)
    assert rank(out.output) < r


def test_low_rank_bad_r():
    with pytest.raises(Exception):
        low_rank_approx(Matrix.ones(2, 3), 3)


# robust principal submatrix

def test_robust_examples():
    assert robust_principal_submatrix(Matrix.zeros(4), 2, Fraction(1, 4)) == (0, (0, 1, 2, 3))
    assert robust_principal_submatrix(Matrix.ones(4, 4), 1, Fraction(1, 4)) == (1, (0, 1, 2, 3))
    k, I = robust_principal_submatrix(Matrix.diag([1, 0, 0, 0]), 1, Fraction(1, 4))
    assert (k, I) == (0, (1, 2, 3))
    assert robust_check(Matrix.diag([1, 0, 0, 0]), I, 0, 1)


def test_robust_rank_bound():
    with pytest.raises(RankBoundError):
        robust_principal_submatrix(Matrix.identity(3), 1, Fraction(1, 4))


@settings(max_examples=40)
@given(st.integers(2, 7), st.integers(0, 3), st.integers(0, 10**6), st.sampled_from([Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]))
def test_robust_minimal_and_sized(n, q, seed, gamma):
    q = min(q, n)
    A = make_random_low_rank(n, q, seed, 0, True)
    k, I = robust_principal_submatrix(A, q, gamma)
    assert rank(submatrix(A, I, I)) <= k
    assert len(I) >= (1 - (q - k) * gamma) * n
    # minimality: no smaller k has a large enough low-rank principal block
    for kk in range(k):
        size = max(0, ceil((1 - (q - kk) * gamma) * n))
        assert not any(rank(submatrix(A, J, J)) <= kk for J in combinations(range(n), size))


# symmetrize_robust

def test_symmetrize_symmetric_fixed():
    u, v = [1, 2, 0, -1, 3], [0, 1, 1, 2, -1]
    A = Matrix.outer(u, u) + Matrix.outer(v, v)
    assert rank(A) == 2
    assert symmetrize_robust(A, 2) == A


def test_symmetrize_zero():
    assert symmetrize_robust(Matrix.zeros(3), 0) == Matrix.zeros(3)


def test_symmetrize_rank1():
    A = Matrix.outer([1, 2, 1], [1, 2, 3])
    B = symmetrize_robust(A, 1)
    assert B.is_symmetric() and rank(B) == 1
    assert rank(Matrix(B.rows() + A.rows())) == 1


# fix_symmetry

def test_fix_symmetry_symmetric_input():
    A = Matrix([[1, 2], [2, 4]])
    out = fix_symmetry(A, 1)
    assert out.output == A and out.changed_entries == 0


def test_fix_symmetry_nilpotent():
    A = Matrix([[0, 1], [0, 0]])
    out = fix_symmetry(A, 1)
    check_outcome(A, out)
    assert out.output.is_symmetric() and rank(out.output) <= 1
    assert out.changed_entries <= 4


def test_fix_symmetry_rank_error():
    with pytest.raises(RankBoundError):
        fix_symmetry(Matrix.identity(2), 1)


@settings(max_examples=60)
@given(st.integers(2, 7), st.integers(1, 3), st.integers(0, 3), st.integers(0, 10**6))
def test_fix_symmetry_postcondition(n, q, flips, seed):
    q = min(q, n)
    rng = np.random.default_rng(seed)
    # rank <= q non-symmetric inputs: nearly symmetric products with a few off-pattern rows
    U = rng.integers(-2, 3, (n, q))
    V = U.copy()
    for _ in range(flips):
        V[rng.integers(0, n), rng.integers(0, q)] += 1
    A = Matrix((U @ V.T).tolist())
    try:
        out = fix_symmetry(A, q)
    except RepairError:
        return
    check_outcome(A, out)
    assert out.output.is_symmetric() and rank(out.output) <= q


# symmetric_low_rank_repair

def test_sym_repair_rank1_unchanged():
    A = Matrix([[1, -2], [-2, 4]])
    out = symmetric_low_rank_repair(A, 2)
    assert out.output == A and out.changed_entries == 0


def test_sym_repair_corner():
    A = make_corner_matrix(8, 2)
    out = symmetric_low_rank_repair(A, 1)
    assert out.output == Matrix.zeros(8)
    assert out.changed_entries == 6


def test_sym_repair_corrupted_rank1():
    A = make_random_low_rank(8, 1, 7, 3, True)
    out = symmetric_low_rank_repair(A, 2)
    assert out.output.is_symmetric() and rank(out.output) <= 1
    assert out.changed_fraction <= Fraction(12, 64)


def test_sym_repair_requires_symmetric():
    with pytest.raises(ValueError):
        symmetric_low_rank_repair(Matrix([[0, 1], [0, 0]]), 1)


@settings(max_examples=60)
@given(st.integers(3, 8), st.integers(1, 3), st.integers(0, 8), st.integers(0, 10**6))
def test_sym_repair_converse(n, r, corrupt, seed):
    A = make_random_low_rank(n, r - 1, seed, min(corrupt, n), True)
    out = symmetric_low_rank_repair(A, r)
    check_outcome(A, out)
    assert out.output.is_symmetric() and rank(out.output) < r
    alpha = singular_fraction(A, r).fraction
    assert alpha < r * r * out.changed_fraction + Fraction(r * r, n)


@settings(max_examples=30)
@given(st.integers(3, 8), st.integers(1, 3), st.integers(0, 8), st.integers(0, 10**6))
def test_sym_repair_idempotent(n, r, corrupt, seed):
    A = make_random_low_rank(n, r - 1, seed, min(corrupt, n), True)
    once = symmetric_low_rank_repair(A, r).output
    assert symmetric_low_rank_repair(once, r).changed_entries == 0


# tensor_repair

def test_tensor_rank1_unchanged():
    T = tensor_product(tensor_product([1, 2, -1], [3, 1, 1]), [2, -1, 5])
    out = tensor_repair(T, Fraction(1, 10))
    assert out.output == T and out.changed_entries == 0


def test_tensor_all_ones_one_zero():
    T = Tensor.ones([3, 3, 3])
    arr = T.data.copy()
    arr[1, 2, 0] = 0
    Tc = Tensor(arr.tolist())
    # every anchor sees the zero in at least 1/8 of its anchored 2x2x2 subtensors
    out = tensor_repair(Tc, Fraction(1, 4))
    assert out.output == Tensor.ones([3, 3, 3])
    assert out.changed_fraction == Fraction(1, 27)


def test_tensor_far_from_reducible():
    T = Tensor.from_slices([[[1, 0], [0, 1]], [[0, 1], [0, 0]]])
    assert tensor_repair(T, Fraction(1, 100)) is None
    res, diag = tensor_repair_report(T, Fraction(1, 100))
    assert res is None and "stage3_fractions" in diag


def test_tensor_sparse_goes_to_zero():
    T = Tensor.zeros([4, 4, 4])
    arr = T.data.copy()
    arr[0, 0, 0] = 5
    out = tensor_repair(Tensor(arr.tolist()), Fraction(1, 4))
    assert out.output.is_zero() and out.witness["stage"] == 1


@settings(max_examples=25)
@given(st.integers(2, 4), st.integers(0, 10**6), st.integers(0, 3))
def test_tensor_repair_postcondition(side, seed, corrupt):
    T = make_random_rank1_tensor([side + 1, side, side], seed, corrupt)
    out = tensor_repair(T, Fraction(1, 2), seed)
    if out is not None:
        check_outcome(T, out)
        assert is_reducible(out.output) is not None
        assert tensor_repair(out.output, Fraction(1, 2), seed).changed_entries == 0


def test_tensor_repair_deterministic():
    T = make_random_rank1_tensor([5, 5, 5], 3, 2)
    a = tensor_repair(T, Fraction(1, 10), 11)
    b = tensor_repair(T, Fraction(1, 10), 11)
    assert a.output == b.output and a.witness["anchor"] == b.witness["anchor"]


def test_outcome_json():
    out = low_rank_approx(Matrix([[1, 1], [1, 0]]), 2)
    js = out.to_json()
    assert js["changed_entries"] == 3 and js["changed_fraction"] == "3/4"
