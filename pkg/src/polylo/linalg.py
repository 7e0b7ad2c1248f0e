"""Exact dense matrices over Q(i) and the elimination routines behind them.

Everything here is exact.  Determinants use fraction-free (Bareiss)
elimination after clearing denominators row by row; ranks use the same
elimination on integer rows when the matrix is real, and ordinary Gaussian
elimination over Q(i) otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .scalar import GaussianRational, Scalar, format_scalar, is_real, to_scalar

__all__ = [
    "Matrix",
    "DimensionError",
    "det",
    "rank",
    "submatrix",
    "exact_div",
    "integer_rows",
    "int_rank",
    "int_det",
    "rref",
    "inverse",
    "solve_rows",
    "hamming",
]


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit an operation."""


def exact_div(a: Scalar, b: Scalar) -> Scalar:
    """``a / b`` without ever producing a float."""
    if isinstance(a, GaussianRational) or isinstance(b, GaussianRational):
        if isinstance(a, GaussianRational):
            return a / b
        return GaussianRational._raw(Fraction(a), Fraction(0)) / b
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


def _norm(x: Any) -> Scalar:
    if type(x) is int:
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    return to_scalar(x)


def _nested_shape(data: Any, ndim: int) -> Tuple[int, ...]:
    shape = []
    cur = data
    for _ in range(ndim):
        if not isinstance(cur, (list, tuple, np.ndarray)):
            raise DimensionError(f"expected a {ndim}-dimensional array")
        shape.append(len(cur))
        if len(cur) == 0:
            break
        cur = cur[0]
    return tuple(shape) + (0,) * (ndim - len(shape))


def _flatten_nested(data: Any, ndim: int, out: list) -> None:
    if ndim == 0:
        out.append(_norm(data))
        return
    for x in data:
        _flatten_nested(x, ndim - 1, out)


def _obj_array(data: Any, ndim: int) -> np.ndarray:
    """Object array of canonical scalars; pairs like ``(re, im)`` stay leaves."""
    if isinstance(data, np.ndarray) and data.dtype != object:
        data = data.tolist()
    shape = data.shape if isinstance(data, np.ndarray) else _nested_shape(data, ndim)
    if len(shape) != ndim:
        raise DimensionError(f"expected a {ndim}-dimensional array, got {len(shape)} dimensions")
    flat: list = []
    if isinstance(data, np.ndarray):
        flat = [_norm(x) for x in data.reshape(-1)]
    else:
        _flatten_nested(data, ndim, flat)
    size = int(np.prod(shape)) if shape else 1
    if len(flat) != size:
        raise DimensionError("ragged input")
    arr = np.empty(size, dtype=object)
    for i, x in enumerate(flat):
        arr[i] = x
    return arr.reshape(shape)


class Matrix:
    """Immutable dense matrix of exact scalars.

    Entries live in a numpy object array (``.data``) so fancy indexing and
    ``@`` work, but no floating point is ever involved.  ``row_labels`` and
    ``col_labels`` are optional index sets carried along by :func:`submatrix`.
    """

    __slots__ = ("data", "row_labels", "col_labels", "_hash")

    def __init__(self, data: Any, row_labels: Optional[Sequence[int]] = None,
                 col_labels: Optional[Sequence[int]] = None, *, _trusted: bool = False):
        if _trusted:
            arr = data
        elif isinstance(data, Matrix):
            arr = data.data
        else:
            rows = list(data) if not isinstance(data, np.ndarray) else data
            if not isinstance(rows, np.ndarray) and len(rows) == 0:
                arr = np.empty((0, 0), dtype=object)
            else:
                arr = _obj_array(rows, 2)
        arr.flags.writeable = False
        self.data = arr
        self.row_labels = tuple(row_labels) if row_labels is not None else None
        self.col_labels = tuple(col_labels) if col_labels is not None else None
        self._hash = None

    # construction helpers
    @classmethod
    def zeros(cls, n_rows: int, n_cols: Optional[int] = None) -> "Matrix":
        n_cols = n_rows if n_cols is None else n_cols
        arr = np.zeros((n_rows, n_cols), dtype=object)
        arr[...] = 0
        return cls(arr, _trusted=True)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        arr = np.zeros((n, n), dtype=object)
        arr[...] = 0
        for i in range(n):
            arr[i, i] = 1
        return cls(arr, _trusted=True)

    @classmethod
    def ones(cls, n_rows: int, n_cols: Optional[int] = None) -> "Matrix":
        n_cols = n_rows if n_cols is None else n_cols
        arr = np.empty((n_rows, n_cols), dtype=object)
        arr[...] = 1
        return cls(arr, _trusted=True)

    @classmethod
    def diag(cls, values: Sequence[Any]) -> "Matrix":
        m = cls.zeros(len(values))
        arr = m.data.copy()
        for i, v in enumerate(values):
            arr[i, i] = _norm(v)
        return cls(arr, _trusted=True)

    @classmethod
    def from_entries(cls, n_rows: int, n_cols: int, entries: Sequence[Any]) -> "Matrix":
        if len(entries) != n_rows * n_cols:
            raise DimensionError("entries length must equal n_rows * n_cols")
        arr = np.empty((n_rows, n_cols), dtype=object)
        flat = arr.reshape(-1)
        for i, x in enumerate(entries):
            flat[i] = to_scalar(x)
        return cls(arr, _trusted=True)

    @classmethod
    def outer(cls, u: Sequence[Any], v: Sequence[Any]) -> "Matrix":
        return cls([[to_scalar(a) * to_scalar(b) for b in v] for a in u])

    # basic properties
    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> Tuple[Scalar, ...]:
        return tuple(self.data.reshape(-1))

    def rows(self) -> List[List[Scalar]]:
        return [list(r) for r in self.data]

    def __getitem__(self, idx):
        return self.data[idx]

    def __iter__(self):
        return iter(self.rows())

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def is_real(self) -> bool:
        return all(is_real(x) for x in self.data.reshape(-1))

    def is_zero(self) -> bool:
        return not any(x != 0 for x in self.data.reshape(-1))

    def is_symmetric(self) -> bool:
        return self.is_square() and bool(np.all(self.data == self.data.T))

    def nnz(self) -> int:
        return int(sum(1 for x in self.data.reshape(-1) if x != 0))

    @property
    def T(self) -> "Matrix":
        return Matrix(np.ascontiguousarray(self.data.T), self.col_labels, self.row_labels, _trusted=True)

    def transpose(self) -> "Matrix":
        return self.T

    # arithmetic
    def _wrap(self, arr: np.ndarray) -> "Matrix":
        out = np.empty(arr.shape, dtype=object)
        of, af = out.reshape(-1), arr.reshape(-1)
        for i, x in enumerate(af):
            of[i] = _norm(x)
        return Matrix(out, _trusted=True)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return self._wrap(self.data + other.data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return self._wrap(self.data - other.data)

    def __neg__(self) -> "Matrix":
        return self._wrap(-self.data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.n_cols != other.n_rows:
            raise DimensionError("inner dimensions differ")
        if self.n_cols == 0:
            return Matrix.zeros(self.n_rows, other.n_cols)
        return self._wrap(self.data @ other.data)

    def scale(self, c: Any) -> "Matrix":
        c = to_scalar(c)
        return self._wrap(self.data * c)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.data == other.data))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.data)
        return f"Matrix([{body}])"

    # serialization
    def to_json(self) -> dict:
        return {"rows": self.n_rows, "cols": self.n_cols,
                "entries": [format_scalar(x) for x in self.data.reshape(-1)]}

    @classmethod
    def from_json(cls, obj: dict) -> "Matrix":
        return cls.from_entries(int(obj["rows"]), int(obj["cols"]), obj["entries"])

    # linear algebra shortcuts
    def det(self) -> Scalar:
        return det(self)

    def rank(self) -> int:
        return rank(self)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        return submatrix(self, rows, cols)


# ---------------------------------------------------------------- elimination

def integer_rows(rows: Sequence[Sequence[Scalar]]) -> Tuple[List[List[int]], Fraction]:
    """Scale each real row to a primitive integer row.

    Returns the integer rows and the product of the scale factors, so that
    ``det(original) = det(integer rows) / factor``.  Row scaling preserves rank
    and the (non)singularity of every submatrix.
    """
    out = []
    factor = Fraction(1)
    for row in rows:
        dens = [x.denominator for x in row if isinstance(x, Fraction)]
        m = lcm(*dens) if dens else 1
        ints = [int(x * m) for x in row]
        out.append(ints)
        factor *= m
    return out, factor


def int_det(rows: List[List[int]]) -> int:
    """Bareiss determinant of a square integer matrix (rows are copied)."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def int_rank(rows: List[List[int]]) -> int:
    """Rank of an integer matrix via fraction-free elimination (rows are copied)."""
    a = [list(r) for r in rows]
    n_rows = len(a)
    if n_rows == 0:
        return 0
    n_cols = len(a[0])
    r = 0
    prev = 1
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = None
        for i in range(r, n_rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        rr = a[r]
        for i in range(r + 1, n_rows):
            ri = a[i]
            f = ri[c]
            for j in range(c + 1, n_cols):
                ri[j] = (p * ri[j] - f * rr[j]) // prev
            ri[c] = 0
        prev = p
        r += 1
    return r


def _gauss_int_rows(rows: Sequence[Sequence[Scalar]]) -> Tuple[List[List[Scalar]], Fraction]:
    """Clear denominators of complex rows; entries become Gaussian integers."""
    out = []
    factor = Fraction(1)
    for row in rows:
        dens = []
        for x in row:
            if isinstance(x, Fraction):
                dens.append(x.denominator)
            elif isinstance(x, GaussianRational):
                dens += [x.re.denominator, x.im.denominator]
        m = lcm(*dens) if dens else 1
        out.append([_norm(x * m) for x in row])
        factor *= m
    return out, factor


def _bareiss_generic(a: List[List[Scalar]]) -> Scalar:
    """Bareiss over Gaussian integers; every division below is exact."""
    n = len(a)
    sign = 1
    prev: Scalar = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                a[i][j] = exact_div(akk * a[i][j] - aik * a[k][j], prev)
        prev = akk
    return _norm(sign * a[n - 1][n - 1])


def _as_rows(M: Any) -> List[List[Scalar]]:
    if isinstance(M, Matrix):
        return M.rows()
    return [[_norm(x) for x in r] for r in M]


def det(M: Any) -> Scalar:
    """Exact determinant via fraction-free elimination."""
    rows = _as_rows(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionError("determinant needs a square matrix")
    if n == 0:
        return 1
    if all(is_real(x) for r in rows for x in r):
        ints, factor = integer_rows(rows)
        return _norm(Fraction(int_det(ints)) / factor)
    gints, factor = _gauss_int_rows(rows)
    return exact_div(_bareiss_generic(gints), factor)


def rref(rows: Sequence[Sequence[Scalar]]) -> Tuple[List[List[Scalar]], List[int]]:
    """Reduced row echelon form over Q(i); returns (nonzero rows, pivot columns)."""
    a = [[_norm(x) for x in r] for r in rows]
    if not a:
        return [], []
    n_rows, n_cols = len(a), len(a[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [exact_div(x, p) for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [_norm(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(M: Any) -> int:
    """Exact rank over Q(i)."""
    rows = _as_rows(M)
    if not rows or not rows[0]:
        return 0
    if all(is_real(x) for r in rows for x in r):
        return int_rank(integer_rows(rows)[0])
    return len(rref(rows)[0])


def submatrix(M: Matrix, rows: Iterable[int], cols: Iterable[int]) -> Matrix:
    """``M[I, J]`` with the index order of ``rows`` and ``cols`` preserved (0-based)."""
    I, J = list(rows), list(cols)
    for i in I:
        if not 0 <= i < M.n_rows:
            raise IndexError(f"row index {i} out of range")
    for j in J:
        if not 0 <= j < M.n_cols:
            raise IndexError(f"column index {j} out of range")
    arr = M.data[np.ix_(I, J)] if I and J else np.empty((len(I), len(J)), dtype=object)
    rl = [M.row_labels[i] for i in I] if M.row_labels else I
    cl = [M.col_labels[j] for j in J] if M.col_labels else J
    return Matrix(np.ascontiguousarray(arr), rl, cl, _trusted=True)


def inverse(M: Matrix) -> Matrix:
    n = M.n_rows
    if not M.is_square():
        raise DimensionError("inverse needs a square matrix")
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M.rows())]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return Matrix([r[n:] for r in red])


def solve_rows(basis: Sequence[Sequence[Scalar]], targets: Sequence[Sequence[Scalar]]) -> List[Optional[List[Scalar]]]:
    """Express each target row as a combination of the (independent) basis rows.

    Returns a coefficient list per target, or ``None`` when the target is not in
    the span.
    """
    k = len(basis)
    if k == 0:
        return [[] if all(x == 0 for x in t) else None for t in targets]
    # columns of the system are basis rows; solve c^T B = t via B^T c = t
    out: List[Optional[List[Scalar]]] = []
    m = len(basis[0])
    bt = [[basis[i][j] for i in range(k)] for j in range(m)]
    for t in targets:
        aug = [bt[j] + [t[j]] for j in range(m)]
        red, piv = rref(aug)
        if k in piv:
            out.append(None)
            continue
        coeffs: List[Scalar] = [0] * k
        for row, p in zip(red, piv):
            coeffs[p] = row[k]
        out.append(coeffs)
    return out


def hamming(A: Any, B: Any) -> int:
    """Number of entries where two equally shaped exact arrays differ."""
    a = A.data if hasattr(A, "data") else np.asarray(A, dtype=object)
    b = B.data if hasattr(B, "data") else np.asarray(B, dtype=object)
    if a.shape != b.shape:
        raise DimensionError("shape mismatch")
    return int(np.count_nonzero(a != b))
