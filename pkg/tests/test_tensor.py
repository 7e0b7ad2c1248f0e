from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polylo.linalg import DimensionError, Matrix, rank
from polylo.tensor import (AxisPartition, Tensor, all_partitions, batch_reducible, collapse, factorize, flatten,
                           is_reducible, is_reducible_wrt, recombine, subtensor, tensor_product)

TWO_SLICE = Tensor.from_slices([[[1, 0], [0, 1]], [[0, 1], [0, 0]]])
SWAP = Tensor.from_slices([[[1, 0], [0, 1]], [[0, 1], [1, 0]]])


@st.composite
def tensors(draw, max_d=4, max_side=3, lo=-2, hi=2):
    d = draw(st.integers(2, max_d))
    dims = [draw(st.integers(1, max_side)) for _ in range(d)]
    n = int(np.prod(dims))
    return Tensor.from_entries(dims, [draw(st.integers(lo, hi)) for _ in range(n)])


@st.composite
def vectors(draw, n, lo=-3, hi=3):
    return [draw(st.integers(lo, hi)) for _ in range(n)]


def flatten_oracle(T: Tensor, P: AxisPartition):
    dims = T.dims
    rows = list(product(*[range(dims[j]) for j in P.J1]))
    cols = list(product(*[range(dims[j]) for j in P.J2]))
    out = []
    for r in rows:
        line = []
        for c in cols:
            idx = [0] * T.d
            for j, v in zip(P.J1, r):
                idx[j] = v
            for j, v in zip(P.J2, c):
                idx[j] = v
            line.append(T[tuple(idx)])
        out.append(line)
    return Matrix(out)


def test_partition_canonical_and_parse():
    P = AxisPartition.parse("2,3|1")
    assert P.J1 == (0,) and P.J2 == (1, 2)
    assert str(P) == "1|2,3"
    assert [str(p) for p in all_partitions(3)] == ["1|2,3", "1,2|3", "1,3|2"]
    assert len(all_partitions(4)) == 7
    with pytest.raises(ValueError):
        AxisPartition.parse("1,2|")


def test_flatten_examples():
    M = [[1, 2], [3, 4]]
    assert flatten(Tensor(M), AxisPartition.parse("1|2")) == Matrix(M)
    assert flatten(Tensor.ones([2, 2, 2]), AxisPartition.parse("1|2,3")) == Matrix.ones(2, 4)
    T = Tensor([[[1 if (i == j and k == 0) else 0 for k in range(2)] for j in range(2)] for i in range(2)])
    F = flatten(T, AxisPartition.parse("1,2|3"))
    assert F.shape == (4, 2)
    assert F == Matrix([[1, 0], [0, 0], [0, 0], [1, 0]])


@given(tensors())
def test_flatten_matches_index_oracle(T):
    for P in all_partitions(T.d):
        assert flatten(T, P) == flatten_oracle(T, P)


def test_reducible_examples():
    assert all(is_reducible_wrt(Tensor.ones([2, 2, 2]), P) for P in all_partitions(3))
    assert not is_reducible_wrt(Tensor([[1, 0], [0, 1]]), AxisPartition.parse("1|2"))
    T = tensor_product(tensor_product([1, 2], [3, -1]), [2, 5])
    assert is_reducible_wrt(T, AxisPartition.parse("1|2,3"))
    assert is_reducible(Tensor.ones([3, 3, 3])) == AxisPartition.parse("1|2,3")
    assert is_reducible(TWO_SLICE) is None
    assert is_reducible(Tensor.zeros([2, 3, 2])) is not None
    with pytest.raises(DimensionError):
        is_reducible(Tensor([1, 2, 3]))


@given(tensors())
def test_reducible_iff_some_flattening_rank_le1(T):
    expected = [P for P in all_partitions(T.d) if rank(flatten_oracle(T, P)) <= 1]
    got = is_reducible(T)
    assert (got is None) == (not expected)
    if got is not None:
        assert got == expected[0]


@given(tensors(max_d=4, max_side=3))
def test_batch_reducible_agrees(T):
    stack = np.array(T.data.tolist(), dtype=np.int64)[None]
    assert bool(batch_reducible(stack)[0]) == (is_reducible(T) is not None)


def test_subtensor_examples():
    T = Tensor.from_entries([2, 3, 2], list(range(12)))
    assert subtensor(T, range(2), range(3), range(2)) == T
    assert subtensor(T, [1], [2], [0]).entries == (T[1, 2, 0],)
    assert subtensor(Tensor.ones([4, 4, 4]), [0, 3], [1, 2], [0, 2]) == Tensor.ones([2, 2, 2])
    with pytest.raises(IndexError):
        subtensor(T, [2], [0], [0])


def test_collapse_examples():
    assert collapse(SWAP, [1, 1]) == Tensor([[1, 1], [1, 1]])
    assert collapse(SWAP, [1, 0]) == Tensor([[1, 0], [0, 1]])
    assert collapse(SWAP, [1, -1]) == Tensor([[1, -1], [-1, 1]])
    with pytest.raises(DimensionError):
        collapse(SWAP, [1, 2, 3])


@given(tensors(), st.data())
def test_collapse_linear(T, data):
    n = T.dims[-1]
    x, y = data.draw(vectors(n)), data.draw(vectors(n))
    assert collapse(T, x) + collapse(T, y) == collapse(T, [a + b for a, b in zip(x, y)])


@given(tensors(), st.data())
def test_collapse_commutes_with_subtensor(T, data):
    x = data.draw(vectors(T.dims[-1]))
    sets = [sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=1))) for n in T.dims[:-1]]
    lhs = subtensor(collapse(T, x), *sets)
    rhs = collapse(subtensor(T, *sets, range(T.dims[-1])), x)
    assert lhs == rhs


def test_tensor_product_examples():
    assert tensor_product([1, 2], [3, 4]) == Tensor([[3, 4], [6, 8]])
    assert tensor_product(Tensor.ones([2, 2]), Tensor.zeros([3])).is_zero()
    assert rank(flatten(tensor_product([1, 2], [3, 4]), AxisPartition.parse("1|2"))) <= 1


@given(tensors(max_d=2, max_side=3), tensors(max_d=2, max_side=3))
def test_product_flattening_rank_le1(T1, T2):
    T = tensor_product(T1, T2)
    P = AxisPartition(tuple(range(T1.d)), tuple(range(T1.d, T.d)))
    assert rank(flatten(T, P)) <= 1


@given(st.data())
def test_factorize_recombine_roundtrip(data):
    d = data.draw(st.integers(2, 4))
    dims = [data.draw(st.integers(1, 3)) for _ in range(d)]
    factors = [data.draw(vectors(k)) for k in dims]
    arr = np.ones((), dtype=object)
    for f in factors:
        arr = np.multiply.outer(arr, np.array(f, dtype=object))
    T = Tensor(arr.tolist())
    for P in all_partitions(d):
        parts = factorize(T, P)
        assert parts is not None
        assert recombine(*parts, P) == T
    assert factorize(TWO_SLICE, AxisPartition.parse("1|2,3")) is None


def test_json_roundtrip():
    T = Tensor.from_entries([2, 1, 2], ["1/2", 0, {"re": "1", "im": "2"}, -3])
    assert Tensor.from_json(T.to_json()) == T
