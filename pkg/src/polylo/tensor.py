"""Dense exact tensors, flattenings, subtensors and reducibility.

Axes are 0-based.  A tensor is reducible with respect to an axis bipartition
``{J1, J2}`` when its flattening across that split has rank at most one; it is
reducible when that happens for some nontrivial bipartition.  The zero tensor
is reducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm, prod
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import DimensionError, Matrix, _norm, _obj_array, exact_div, rank
from .scalar import GaussianRational, format_scalar, is_real, to_scalar

__all__ = [
    "Tensor",
    "AxisPartition",
    "all_partitions",
    "flatten",
    "is_reducible_wrt",
    "is_reducible",
    "subtensor",
    "collapse",
    "tensor_product",
    "factorize",
    "recombine",
    "batch_rank_le1",
    "batch_reducible",
    "integer_tensor",
    "working_array",
    "gather_product",
    "gather_paired",
]


class Tensor:
    """Immutable dense d-dimensional array of exact scalars (d >= 1)."""

    __slots__ = ("data", "axis_labels")

    def __init__(self, data: Any, axis_labels: Optional[Sequence[Sequence[int]]] = None, *,
                 _trusted: bool = False):
        if _trusted:
            arr = data
        elif isinstance(data, Tensor):
            arr = data.data
        elif isinstance(data, Matrix):
            arr = data.data
        else:
            src = data
            if isinstance(src, np.ndarray) and src.dtype != object:
                src = src.tolist()
            arr = _obj_array(src, _depth(src))
        if arr.ndim < 1:
            raise DimensionError("a tensor needs at least one axis")
        arr.flags.writeable = False
        self.data = arr
        if axis_labels is None:
            self.axis_labels = tuple(tuple(range(n)) for n in arr.shape)
        else:
            self.axis_labels = tuple(tuple(a) for a in axis_labels)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Tensor":
        arr = np.empty(tuple(dims), dtype=object)
        arr[...] = 0
        return cls(arr, _trusted=True)

    @classmethod
    def ones(cls, dims: Sequence[int]) -> "Tensor":
        arr = np.empty(tuple(dims), dtype=object)
        arr[...] = 1
        return cls(arr, _trusted=True)

    @classmethod
    def from_entries(cls, dims: Sequence[int], entries: Sequence[Any]) -> "Tensor":
        dims = tuple(int(x) for x in dims)
        if len(entries) != prod(dims):
            raise DimensionError("entries length must equal the product of dims")
        arr = np.empty(len(entries), dtype=object)
        for i, x in enumerate(entries):
            arr[i] = to_scalar(x)
        return cls(arr.reshape(dims), _trusted=True)

    @classmethod
    def from_slices(cls, slices: Sequence[Any]) -> "Tensor":
        """Stack (d-1)-dimensional slices along a new last axis."""
        parts = [Tensor(s).data for s in slices]
        return cls(np.ascontiguousarray(np.stack(parts, axis=-1)), _trusted=True)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def d(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def entries(self) -> Tuple[Any, ...]:
        return tuple(self.data.reshape(-1))

    def __getitem__(self, idx):
        return self.data[idx]

    def is_zero(self) -> bool:
        return not any(x != 0 for x in self.data.reshape(-1))

    def is_real(self) -> bool:
        return all(is_real(x) for x in self.data.reshape(-1))

    def nnz(self) -> int:
        return int(sum(1 for x in self.data.reshape(-1) if x != 0))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.all(self.data == other.data))

    def __hash__(self) -> int:
        return hash((self.dims, self.entries))

    def __add__(self, other: "Tensor") -> "Tensor":
        if self.dims != other.dims:
            raise DimensionError("shape mismatch")
        return _wrap(self.data + other.data)

    def __sub__(self, other: "Tensor") -> "Tensor":
        if self.dims != other.dims:
            raise DimensionError("shape mismatch")
        return _wrap(self.data - other.data)

    def __repr__(self) -> str:
        return f"Tensor(dims={self.dims}, entries={[str(x) for x in self.entries]})"

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "entries": [format_scalar(x) for x in self.data.reshape(-1)]}

    @classmethod
    def from_json(cls, obj: dict) -> "Tensor":
        return cls.from_entries(obj["dims"], obj["entries"])

    def as_matrix(self) -> Matrix:
        if self.d != 2:
            raise DimensionError("only 2-dimensional tensors are matrices")
        return Matrix(self.data.copy(), _trusted=True)


def _is_leaf_pair(x: Any) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and not any(isinstance(y, (list, tuple)) for y in x)


def _depth(x: Any) -> int:
    """Nesting depth; below the top level a 2-tuple of scalars is a (re, im) leaf."""
    d = 0
    while isinstance(x, (list, tuple, np.ndarray)) and not (d > 0 and _is_leaf_pair(x)):
        if len(x) == 0:
            return d + 1
        x = x[0]
        d += 1
    return d


def _wrap(arr: np.ndarray) -> Tensor:
    out = np.empty(arr.shape, dtype=object)
    of = out.reshape(-1)
    for i, x in enumerate(arr.reshape(-1)):
        of[i] = _norm(x)
    return Tensor(out, _trusted=True)


@dataclass(frozen=True)
class AxisPartition:
    """Unordered nontrivial bipartition of the axes, stored with axis 0 in ``J1``."""

    J1: Tuple[int, ...]
    J2: Tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(set(self.J1))), tuple(sorted(set(self.J2)))
        if not a or not b or set(a) & set(b):
            raise ValueError("partition sides must be disjoint and nonempty")
        if min(b) < min(a):
            a, b = b, a
        object.__setattr__(self, "J1", a)
        object.__setattr__(self, "J2", b)

    @property
    def d(self) -> int:
        return len(self.J1) + len(self.J2)

    def validate(self, d: int) -> None:
        if sorted(self.J1 + self.J2) != list(range(d)):
            raise ValueError(f"{self} is not a partition of the {d} axes")

    @classmethod
    def parse(cls, text: str) -> "AxisPartition":
        """Parse ``"1|2,3"`` (1-based axes)."""
        left, right = text.split("|")
        return cls(tuple(int(x) - 1 for x in left.split(",")),
                   tuple(int(x) - 1 for x in right.split(",")))

    def __str__(self) -> str:
        return ",".join(str(j + 1) for j in self.J1) + "|" + ",".join(str(j + 1) for j in self.J2)

    def to_json(self) -> list:
        return [[j + 1 for j in self.J1], [j + 1 for j in self.J2]]


def all_partitions(d: int) -> List[AxisPartition]:
    """The 2^(d-1) - 1 nontrivial bipartitions, sorted by (|J1|, J1)."""
    out = []
    rest = list(range(1, d))
    for k in range(0, d - 1):
        for extra in combinations(rest, k):
            J1 = (0,) + extra
            out.append(AxisPartition(J1, tuple(j for j in range(d) if j not in J1)))
    return sorted(out, key=lambda p: (len(p.J1), p.J1))


def _flat_array(arr: np.ndarray, P: AxisPartition, lead: int = 0) -> np.ndarray:
    """Reshape ``arr`` (with ``lead`` batch axes first) to (..., r1, r2)."""
    axes = list(range(lead)) + [lead + j for j in P.J1] + [lead + j for j in P.J2]
    t = np.transpose(arr, axes)
    shape = arr.shape
    r1 = prod(shape[lead + j] for j in P.J1)
    r2 = prod(shape[lead + j] for j in P.J2)
    return t.reshape(shape[:lead] + (r1, r2))


def flatten(T: Tensor, P: AxisPartition) -> Matrix:
    """Flattening across ``P``: rows index the axes in J1, columns those in J2,
    each multi-index mapped to a flat index row-major over ascending axes."""
    P.validate(T.d)
    return Matrix(np.ascontiguousarray(_flat_array(T.data, P)), _trusted=True)


def is_reducible_wrt(T: Tensor, P: AxisPartition) -> bool:
    return rank(flatten(T, P)) <= 1


def is_reducible(T: Tensor) -> Optional[AxisPartition]:
    """First partition (canonical order) witnessing reducibility, or None."""
    if T.d < 2:
        raise DimensionError("reducibility needs at least two axes")
    for P in all_partitions(T.d):
        if is_reducible_wrt(T, P):
            return P
    return None


def subtensor(T: Tensor, *index_sets: Iterable[int]) -> Tensor:
    """``T[S_1, ..., S_d]`` with the order inside each S_j preserved."""
    if len(index_sets) == 1 and T.d != 1:
        index_sets = tuple(index_sets[0])
    sets = [list(s) for s in index_sets]
    if len(sets) != T.d:
        raise DimensionError(f"need {T.d} index sets")
    for ax, (s, n) in enumerate(zip(sets, T.dims)):
        for i in s:
            if not 0 <= i < n:
                raise IndexError(f"index {i} out of range on axis {ax}")
    arr = T.data[np.ix_(*sets)]
    labels = [[T.axis_labels[a][i] for i in s] for a, s in enumerate(sets)]
    return Tensor(np.ascontiguousarray(arr), labels, _trusted=True)


def collapse(T: Tensor, x: Sequence[Any]) -> Tensor:
    """Contract the last axis with ``x``: entry ``sum_i T(..., i) x_i``."""
    if T.d < 2:
        raise DimensionError("collapse needs at least two axes")
    xs = [to_scalar(v) for v in x]
    if len(xs) != T.dims[-1]:
        raise DimensionError(f"x has length {len(xs)}, last side is {T.dims[-1]}")
    vec = np.empty(len(xs), dtype=object)
    vec[:] = xs
    if not xs:
        return Tensor.zeros(T.dims[:-1])
    return _wrap(np.tensordot(T.data, vec, axes=([T.d - 1], [0])))


def tensor_product(T1: Any, T2: Any) -> Tensor:
    a = T1 if isinstance(T1, Tensor) else Tensor(T1)
    b = T2 if isinstance(T2, Tensor) else Tensor(T2)
    return _wrap(np.multiply.outer(a.data, b.data))


def factorize(T: Tensor, P: AxisPartition) -> Optional[Tuple[Tensor, Tensor]]:
    """Factors ``(T1, T2)`` over the axes of J1 and J2 with ``T = T1 (x) T2`` after
    moving axes back into place, or None when the flattening has rank > 1.

    ``T1`` is the flattening's pivot column and ``T2`` the pivot row divided by
    the pivot entry.
    """
    F = flatten(T, P)
    if rank(F) > 1:
        return None
    d1 = tuple(T.dims[j] for j in P.J1)
    d2 = tuple(T.dims[j] for j in P.J2)
    nz = [(i, j) for i in range(F.n_rows) for j in range(F.n_cols) if F[i, j] != 0]
    if not nz:
        return Tensor.zeros(d1), Tensor.zeros(d2)
    p, q = nz[0]
    pv = F[p, q]
    col = np.empty(F.n_rows, dtype=object)
    col[:] = [F[i, q] for i in range(F.n_rows)]
    row = np.empty(F.n_cols, dtype=object)
    row[:] = [exact_div(F[p, j], pv) for j in range(F.n_cols)]
    return Tensor(col.reshape(d1), _trusted=True), Tensor(row.reshape(d2), _trusted=True)


def recombine(T1: Tensor, T2: Tensor, P: AxisPartition) -> Tensor:
    """Inverse of :func:`factorize`: outer product with axes restored to 0..d-1."""
    outer = np.multiply.outer(T1.data, T2.data)
    order = list(P.J1) + list(P.J2)
    inv = [order.index(a) for a in range(len(order))]
    return _wrap(np.ascontiguousarray(np.transpose(outer, inv)))


# ---------------------------------------------------------------- batched checks

def integer_tensor(T: Tensor) -> Optional[np.ndarray]:
    """A common integer multiple of a real tensor (object ints), or None if complex.

    Multiplying every entry by one nonzero constant changes no rank, so all
    reducibility questions can be asked of the integer copy.
    """
    flat = T.data.reshape(-1)
    if not all(is_real(x) for x in flat):
        return None
    dens = [x.denominator for x in flat if isinstance(x, Fraction)]
    m = lcm(*dens) if dens else 1
    out = np.empty(flat.shape, dtype=object)
    for i, x in enumerate(flat):
        out[i] = int(x * m)
    return out.reshape(T.dims)


def working_array(T: Tensor) -> np.ndarray:
    """int64 copy when 2x2 minors cannot overflow, else object (ints or Q(i))."""
    A = integer_tensor(T)
    if A is None:
        return T.data
    bound = max((abs(int(x)) for x in A.reshape(-1)), default=0)
    if 2 * bound * bound < 2**62:
        return A.astype(np.int64)
    return A


def batch_rank_le1(M: np.ndarray) -> np.ndarray:
    """For a stack of matrices (shape ``(N, a, b)``), whether each has rank <= 1.

    With pivot ``M[p, q]`` (first nonzero entry) the matrix has rank <= 1 iff
    ``M * M[p, q] == outer(M[:, q], M[p, :])`` entrywise.
    """
    N, a, b = M.shape
    if N == 0:
        return np.zeros(0, dtype=bool)
    nz = (M != 0).reshape(N, a * b)
    has = nz.any(axis=1)
    piv = np.argmax(nz, axis=1)
    p, q = piv // b, piv % b
    idx = np.arange(N)
    pv = M[idx, p, q]
    row = M[idx, p, :]
    col = M[idx, :, q]
    lhs = M * pv[:, None, None]
    rhs = col[:, :, None] * row[:, None, :]
    ok = (lhs == rhs).reshape(N, a * b).all(axis=1)
    return ok | ~has


def batch_reducible(stack: np.ndarray, partitions: Optional[Sequence[AxisPartition]] = None) -> np.ndarray:
    """Reducibility of each tensor in ``stack`` (shape ``(N, s_1, ..., s_d)``)."""
    d = stack.ndim - 1
    parts = all_partitions(d) if partitions is None else partitions
    out = np.zeros(stack.shape[0], dtype=bool)
    for P in parts:
        todo = ~out
        if not todo.any():
            break
        out[todo] = batch_rank_le1(_flat_array(stack[todo], P, lead=1))
    return out


def gather_product(A: np.ndarray, index_lists: Sequence[np.ndarray]) -> np.ndarray:
    """All subtensors ``A[S_1, ..., S_d]`` for ``S_j`` ranging over the rows of
    ``index_lists[j]`` (shape ``(C_j, s_j)``); result shape ``(prod C_j, s_1, ..., s_d)``."""
    d = A.ndim
    idx = []
    for j, L in enumerate(index_lists):
        shape = [1] * (2 * d)
        shape[j] = L.shape[0]
        shape[d + j] = L.shape[1]
        idx.append(L.reshape(shape))
    sub = A[tuple(idx)]
    return sub.reshape((-1,) + sub.shape[d:])


def gather_paired(A: np.ndarray, index_lists: Sequence[np.ndarray]) -> np.ndarray:
    """Subtensors ``A[S_1[t], ..., S_d[t]]`` for each t (all lists share length N)."""
    d = A.ndim
    idx = []
    for j, L in enumerate(index_lists):
        shape = [L.shape[0]] + [1] * d
        shape[1 + j] = L.shape[1]
        idx.append(L.reshape(shape))
    return A[tuple(idx)]
