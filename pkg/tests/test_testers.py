from fractions import Fraction
from itertools import combinations, product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polylo.constructions import make_random_low_rank, make_random_rank1_tensor
from polylo.linalg import Matrix
from polylo.rng import make_rng
from polylo.submatrices import singular_fraction
from polylo.tensor import Tensor, is_reducible, subtensor
from polylo.testers import (TesterConfig as Config, Verdict, default_threshold, exact_irreducible_fraction,
                            matrix_rank_tester, tensor_reducibility_tester, tuple_counting_bad_fraction,
                            tuple_counting_check)


def blown_up_two_slice(rep=4):
    base = np.zeros((2, 2, 2), dtype=int)
    base[0, 0, 0] = base[1, 1, 0] = base[0, 1, 1] = 1
    arr = base.repeat(rep, 0).repeat(rep, 1).repeat(rep, 2)
    return Tensor(arr.tolist())


def brute_irreducible_fraction(T, side):
    sets = [list(combinations(range(n), side)) for n in T.dims]
    bad = total = 0
    for choice in product(*sets):
        total += 1
        bad += is_reducible(subtensor(T, *choice)) is None
    return Fraction(bad, total)


def random_subset_distribution(rng, n, max_support=6):
    """Random explicit distribution over subsets of range(n) with rational weights."""
    k = int(rng.integers(1, max_support + 1))
    sets = [tuple(int(i) for i in np.flatnonzero(rng.integers(0, 2, n))) for _ in range(k)]
    w = [int(x) for x in rng.integers(1, 10, k)]
    total = sum(w)
    return [(s, Fraction(x, total)) for s, x in zip(sets, w)]


def brute_bad_fraction(dist, n, r, p):
    bad = 0
    for S in combinations(range(n), r):
        mass = sum((q for s, q in dist if set(S) <= set(s)), Fraction(0))
        bad += mass < Fraction(p) / 2
    return Fraction(bad, comb(n, r))


def tuple_instance(rng):
    """A random instance (dist, n, r, delta, p) satisfying the size precondition."""
    n = int(rng.integers(1, 9))
    r = int(rng.integers(1, min(3, n) + 1))
    dist = random_subset_distribution(rng, n)
    delta = Fraction(int(rng.integers(0, n + 1)), n)
    big = sum((q for s, q in dist if len(s) >= (1 - delta) * n), Fraction(0))
    if big == 0:
        dist = dist[:-1] + [(tuple(range(n)), dist[-1][1])]
        big = sum((q for s, q in dist if len(s) >= (1 - delta) * n), Fraction(0))
    return dist, n, r, delta, big


def test_config_validation():
    with pytest.raises(ValueError):
        Config(0)
    with pytest.raises(ValueError):
        Config(10, epsilon=0)
    with pytest.raises(ValueError):
        Config(10, epsilon=2)
    assert Config(5, epsilon="1/3").epsilon == Fraction(1, 3)


def test_default_threshold():
    assert default_threshold(Fraction(1, 4), 3) == Fraction(1, 8) ** 4
    assert default_threshold(1, 2) == Fraction(1, 4)


def test_verdict_rule():
    v = tensor_reducibility_tester(Tensor.zeros([4, 4, 4]), Config(50))
    assert v.accept and v.observed_bad_fraction == 0
    assert isinstance(v, Verdict) and v.to_json()["decision"] == "accept"


def test_rank1_accepts():
    T = make_random_rank1_tensor([5, 6, 4], 3)
    v = tensor_reducibility_tester(T, Config(300, 9))
    assert v.accept and v.observed_bad_fraction == 0


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.integers(0, 2**63))
def test_one_sided(gen_seed, tester_seed):
    T = make_random_rank1_tensor([4, 5, 4], gen_seed)
    assert tensor_reducibility_tester(T, Config(100, tester_seed)).observed_bad_fraction == 0


def test_side_too_small():
    with pytest.raises(ValueError):
        tensor_reducibility_tester(Tensor.ones([3, 3, 3]), Config(10))


def test_blown_up_rejected_nearly_always():
    T = blown_up_two_slice()
    assert exact_irreducible_fraction(T, 4) == Fraction(39304, 42875)
    rejects = sum(not tensor_reducibility_tester(T, Config(400, s)).accept for s in range(200))
    assert rejects >= 198


def test_exact_fraction_examples():
    assert exact_irreducible_fraction(Tensor.ones([3, 3, 3]), 4 // 2) == 0
    assert exact_irreducible_fraction(Tensor(Matrix.identity(4).rows()), 2) == Fraction(1, 6)
    arr = np.multiply.outer([1, 2, 3, 1], [2, 1, 1, 3]).astype(object)
    arr[1, 2] += 1
    assert exact_irreducible_fraction(Tensor(arr.tolist()), 2) == Fraction(1, 4)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(0, 4))
def test_exact_fraction_vs_brute(seed, corrupt):
    T = make_random_rank1_tensor([3, 4, 3], seed, corrupt, bound=2)
    assert exact_irreducible_fraction(T, 2) == brute_irreducible_fraction(T, 2)


def test_exact_fraction_cap():
    with pytest.raises(Exception):
        exact_irreducible_fraction(Tensor.ones([8, 8, 8]), 4, cap=100)


def test_sampling_consistency():
    T = make_random_rank1_tensor([6, 6, 6], 5, 20)
    exact = float(exact_irreducible_fraction(T, 4))
    far = sum(abs(float(tensor_reducibility_tester(T, Config(2000, s)).observed_bad_fraction) - exact) > 0.05
              for s in range(300))
    assert far < 3


def test_sampling_reproducible():
    T = blown_up_two_slice(2)
    a = tensor_reducibility_tester(T, Config(500, 42))
    b = tensor_reducibility_tester(T, Config(500, 42), chunk=37)
    assert a == b


def test_matrix_tester_examples():
    low = make_random_low_rank(6, 1, 2)
    v = matrix_rank_tester(low, 2, Config(500, 1))
    assert v.accept and v.observed_bad_fraction == 0
    assert matrix_rank_tester(Matrix.zeros(5), 2, Config(100)).accept
    assert singular_fraction(Matrix.identity(4), 2).fraction == Fraction(1, 6)
    v = matrix_rank_tester(Matrix.identity(4), 2, Config(20000, 3, Fraction(1, 12)))
    assert not v.accept and v.threshold == Fraction(1, 12)


def test_tuple_counting_examples():
    assert tuple_counting_check([(range(5), 1)], 5, 2, 0, 1)
    assert tuple_counting_bad_fraction([(range(5), 1)], 5, 3, 1) == 0
    n = 6
    dist = [(tuple(i for i in range(n) if i != j), Fraction(1, n)) for j in range(n)]
    assert tuple_counting_check(dist, n, 2, Fraction(1, 6), 1)
    assert tuple_counting_bad_fraction(dist, n, 2, 1) == 0


def test_tuple_counting_errors():
    with pytest.raises(ValueError):
        tuple_counting_check([((0,), Fraction(1, 2))], 3, 1, 0, 1)
    with pytest.raises(ValueError):
        tuple_counting_check([((5,), 1)], 3, 1, 0, 1)
    with pytest.raises(ValueError):
        tuple_counting_check([((0,), 1)], 3, 1, 0, 1)


@given(st.integers(0, 2**32))
def test_tuple_counting_lemma_random(seed):
    dist, n, r, delta, p = tuple_instance(make_rng(seed))
    assert tuple_counting_bad_fraction(dist, n, r, p) == brute_bad_fraction(dist, n, r, p)
    assert tuple_counting_check(dist, n, r, delta, p)
