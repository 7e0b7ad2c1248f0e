"""Local-to-global repair.

Each routine follows a constructive existence argument step by step, with the
free choices (which submatrix, which anchor, which partition) fixed by
deterministic search orders so that outputs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, isqrt, prod
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _config
from ._minors import batched_det, fit_dtype, index_sets, integer_array
from .linalg import (DimensionError, Matrix, det, exact_div, hamming, inverse, rank, rref,
                     solve_rows, submatrix)
from .rng import make_rng
from .scalar import format_scalar
from .submatrices import singular_fraction
from .tensor import (AxisPartition, Tensor, all_partitions, batch_rank_le1, batch_reducible,
                     gather_paired, gather_product, is_reducible_wrt, working_array, _flat_array,
                     _wrap)

__all__ = [
    "RepairOutcome",
    "RepairError",
    "RankBoundError",
    "low_rank_approx",
    "robust_principal_submatrix",
    "symmetrize_robust",
    "fix_symmetry",
    "symmetric_low_rank_repair",
    "tensor_repair",
]


class RepairError(RuntimeError):
    """A constructive step could not be carried out (its hypothesis failed)."""


class RankBoundError(ValueError):
    """Input rank exceeds the declared bound."""


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction) or type(x).__name__ == "GaussianRational":
        return format_scalar(x)
    if isinstance(x, AxisPartition):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


@dataclass
class RepairOutcome:
    output: Union[Matrix, Tensor]
    changed_entries: int
    changed_fraction: Fraction
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"output": self.output.to_json(), "changed_entries": self.changed_entries,
                "changed_fraction": format_scalar(self.changed_fraction),
                "witness": _jsonable(self.witness)}


def _outcome(before, after, witness) -> RepairOutcome:
    c = hamming(before, after)
    return RepairOutcome(after, c, Fraction(c, before.data.size) if before.data.size else Fraction(0),
                         witness)


# ---------------------------------------------------------------- low rank

def _nonsingular_fraction(A: Matrix, k: int, cap: int, seed: int, samples: int) -> Tuple[Fraction, str]:
    n, m = A.shape
    if comb(n, k) * comb(m, k) <= cap:
        return singular_fraction(A, k, cap=cap).fraction, "exact"
    st = singular_fraction(A, k, "sampled", samples=samples, seed=seed)
    return st.fraction, "sampled"


def _extension_counts(A: Matrix, k: int, pairs_I: np.ndarray, pairs_J: np.ndarray,
                      Aint: np.ndarray) -> np.ndarray:
    """For each (I, J) of size k-1, the number of (i, j) with A[I+i, J+j] nonsingular."""
    n, m = A.shape
    P = len(pairs_I)
    counts = np.zeros(P, dtype=np.int64)
    rows_all = np.arange(n)
    cols_all = np.arange(m)
    step = max(1, 2_000_000 // max(1, n * m * k * k))
    for s in range(0, P, step):
        I = pairs_I[s:s + step]
        J = pairs_J[s:s + step]
        B = len(I)
        ri = np.concatenate([np.broadcast_to(I[:, None, :], (B, n, k - 1)),
                             np.broadcast_to(rows_all[None, :, None], (B, n, 1))], axis=2)
        cj = np.concatenate([np.broadcast_to(J[:, None, :], (B, m, k - 1)),
                             np.broadcast_to(cols_all[None, :, None], (B, m, 1))], axis=2)
        sub = Aint[ri[:, :, None, :, None], cj[:, None, :, None, :]]
        d = batched_det(sub)
        counts[s:s + step] = np.count_nonzero((d != 0).reshape(B, -1), axis=1)
    return counts


def low_rank_approx(A: Matrix, r: int, *, cap: Optional[int] = None, seed: int = 0,
                    samples: int = 20_000) -> RepairOutcome:
    """Matrix of rank < r close to ``A`` when few r x r submatrices are nonsingular.

    With alpha the nonsingular r x r fraction, take the least k >= 1 whose
    nonsingular k x k fraction f_k satisfies f_k^r <= alpha^k.  For k = 1 the
    answer is zero.  Otherwise pick (I, J) of size k-1 with ``A[I, J]``
    invertible and the fewest nonsingular one-step extensions (lexicographic
    tie-break) and return ``A[:, J] A[I, J]^-1 A[I, :]``, which agrees with A on
    rows I, columns J, and every (i, j) whose extension is singular.
    """
    n, m = A.shape
    if not 1 <= r <= min(n, m):
        raise DimensionError(f"r={r} must lie in [1, {min(n, m)}]")
    limit = _config.get_cap("submatrix", cap)
    alpha, alpha_mode = _nonsingular_fraction(A, r, limit, seed, samples)
    fracs: Dict[int, Fraction] = {}
    k = r
    for kk in range(1, r + 1):
        fk = alpha if kk == r else _nonsingular_fraction(A, kk, limit, seed + kk, samples)[0]
        fracs[kk] = fk
        if fk ** r <= alpha ** kk:
            k = kk
            break
    witness: Dict[str, Any] = {"alpha": alpha, "alpha_mode": alpha_mode, "k": k,
                               "fractions": {str(a): b for a, b in fracs.items()}}
    if k == 1:
        B = Matrix.zeros(n, m)
    else:
        Aint = integer_array(A)
        if Aint is None:
            I, J, cnt = _best_anchor_generic(A, k)
            search = "exhaustive"
        else:
            Aint = fit_dtype(Aint, k)
            rs = index_sets(n, k - 1)
            cs = index_sets(m, k - 1)
            n_pairs = len(rs) * len(cs)
            if n_pairs * n * m <= limit:
                pi = np.repeat(rs, len(cs), axis=0)
                pj = np.tile(cs, (len(rs), 1))
                search = "exhaustive"
            else:
                rng = make_rng(seed, 1)
                t = min(samples, n_pairs)
                pick = np.sort(rng.choice(n_pairs, size=t, replace=False))
                pi, pj = rs[pick // len(cs)], cs[pick % len(cs)]
                search = "sampled"
            dets = batched_det(Aint[pi[:, :, None], pj[:, None, :]])
            ok = np.flatnonzero(dets != 0)
            if len(ok) == 0:
                raise RepairError("no nonsingular (k-1) x (k-1) anchor found")
            counts = _extension_counts(A, k, pi[ok], pj[ok], Aint)
            best = ok[int(np.argmin(counts))]
            I, J, cnt = tuple(int(x) for x in pi[best]), tuple(int(x) for x in pj[best]), int(counts.min())
        M = submatrix(A, I, J)
        B = submatrix(A, range(n), J) @ inverse(M) @ submatrix(A, I, range(m))
        witness.update({"I": list(I), "J": list(J), "extensions": cnt, "anchor_search": search})
    out = _outcome(A, B, witness)
    # recorded, not enforced: the bound the existence argument gives
    out.witness["within_bound"] = out.changed_entries ** r <= alpha * (n * m) ** r
    return out


def _best_anchor_generic(A: Matrix, k: int):
    n, m = A.shape
    best = None
    for I in combinations(range(n), k - 1):
        for J in combinations(range(m), k - 1):
            if det(submatrix(A, I, J)) == 0:
                continue
            cnt = sum(1 for i in range(n) if i not in I for j in range(m) if j not in J
                      if det(submatrix(A, I + (i,), J + (j,))) != 0)
            if best is None or cnt < best[2]:
                best = (I, J, cnt)
    if best is None:
        raise RepairError("no nonsingular (k-1) x (k-1) anchor found")
    return best


# ---------------------------------------------------------------- robust rank

def _floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational."""
    return isqrt(x.numerator // x.denominator)


def _size_threshold(n: int, t: int, gamma_sq: Fraction) -> int:
    """ceil((1 - t*gamma) * n) with gamma = sqrt(gamma_sq)."""
    return n - _floor_sqrt(Fraction(t * n) ** 2 * gamma_sq)


def robust_principal_submatrix(A: Matrix, q: int, gamma: Any = None, *, gamma_sq: Any = None,
                               cap: Optional[int] = None) -> Tuple[int, Tuple[int, ...]]:
    """Least k in 0..q such that some I with |I| >= (1 - (q-k) gamma) n has
    rank(A[I, I]) <= k, with a witness I (extended greedily while the rank
    stays at most k).

    ``gamma`` may be given directly (rational) or through its square, which is
    how irrational values like q*sqrt(rho) are handled exactly.
    """
    if not A.is_square():
        raise DimensionError("square matrix required")
    n = A.n_rows
    if rank(A) > q:
        raise RankBoundError(f"rank(A) exceeds q={q}")
    if gamma_sq is None:
        if gamma is None:
            raise ValueError("gamma or gamma_sq is required")
        g = Fraction(gamma)
        if g <= 0:
            raise ValueError("gamma must be positive")
        gamma_sq = g * g
    gamma_sq = Fraction(gamma_sq)
    limit = _config.get_cap("submatrix", cap)
    for k in range(q + 1):
        s = max(0, _size_threshold(n, q - k, gamma_sq))
        I = _find_low_rank_principal(A, s, k, limit)
        if I is not None:
            I = list(I)
            for i in range(n):
                if i not in I and rank(submatrix(A, sorted(I + [i]), sorted(I + [i]))) <= k:
                    I.append(i)
            return k, tuple(sorted(I))
    raise AssertionError("k = q always qualifies")


def _find_low_rank_principal(A: Matrix, s: int, k: int, limit: int) -> Optional[Tuple[int, ...]]:
    n = A.n_rows
    if s <= k:
        return tuple(range(s))
    if comb(n, s) <= limit:
        for I in combinations(range(n), s):
            if rank(submatrix(A, I, I)) <= k:
                return I
        return None
    # greedy fallback: drop the index whose removal lowers the rank most
    I = list(range(n))
    while len(I) > s:
        cur = rank(submatrix(A, I, I))
        if cur <= k:
            break
        best = min(I, key=lambda i: (rank(submatrix(A, [x for x in I if x != i], [x for x in I if x != i])), i))
        I.remove(best)
    return tuple(I) if rank(submatrix(A, I, I)) <= k else None


def robust_check(A: Matrix, I: Sequence[int], k: int, slack: int) -> bool:
    """Exhaustively confirm rank(A[I', I']) = k for every I' in I missing at most ``slack`` indices."""
    I = list(I)
    for drop in range(0, min(slack, len(I)) + 1):
        for D in combinations(I, drop):
            J = [i for i in I if i not in D]
            if rank(submatrix(A, J, J)) != k:
                return False
    return True


# ---------------------------------------------------------------- symmetry

def _asym_neighbours(A: Matrix) -> List[set]:
    n = A.n_rows
    return [{j for j in range(n) if A[i, j] != A[j, i]} for i in range(n)]


def symmetrize_robust(A: Matrix, r: int) -> Matrix:
    """Symmetric matrix with the row space of ``A`` (of rank r, robustly).

    Builds V, r indices avoiding rows with many asymmetric positions and
    mutually free of asymmetric pairs, chosen greedily (smallest admissible
    index) so that the columns A[:, V] stay independent; then returns
    ``A[V, :]^T A[V, V]^-1 A[V, :]``.
    """
    if not A.is_square():
        raise DimensionError("square matrix required")
    n = A.n_rows
    if r == 0:
        if not A.is_zero():
            raise RepairError("r = 0 needs the zero matrix")
        return Matrix.zeros(n)
    if A.is_symmetric():
        if rank(A) != r:
            raise RepairError(f"symmetric input has rank {rank(A)}, not {r}")
        return A
    N = _asym_neighbours(A)
    bad_total = sum(len(s) for s in N)
    # |N(i)| >= sqrt(rho) n  with rho n^2 = bad_total
    I_bad = {i for i in range(n) if len(N[i]) ** 2 >= bad_total}
    V: List[int] = []
    cols = [list(A.data[:, j]) for j in range(n)]
    for step in range(r):
        banned = set(I_bad).union(*(N[v] for v in V)) if V else set(I_bad)
        cand = [i for i in range(n) if i not in banned and i not in V]
        chosen = None
        for v in cand:
            if len(rref([cols[u] for u in V + [v]])[0]) == step + 1:
                chosen = v
                break
        if chosen is None:
            raise RepairError(f"greedy step {step + 1} of {r} found no admissible index "
                              f"({len(cand)} candidates); robustness hypothesis fails")
        V.append(chosen)
    AVV = submatrix(A, V, V)
    if det(AVV) == 0:
        raise RepairError(f"A[V, V] is singular for V = {V}")
    AV = submatrix(A, V, range(n))
    return AV.T @ inverse(AVV) @ AV


def fix_symmetry(A: Matrix, q: int, *, cap: Optional[int] = None) -> RepairOutcome:
    """Symmetric matrix of rank <= q near a nearly symmetric ``A`` of rank <= q.

    Steps: robust principal submatrix I with gamma = q sqrt(rho); transpose when
    Delta1 > Delta2; C = symmetrize_robust(A[I, I]); write
    A[Ic, I] = P C + Q with Q spanned by Delta1 extra rows; assemble
    B[I, I] = C, B[Ic, I] = PC + Q, B[Ic, Ic] = P C P^T + P Q^T + Q P^T.
    """
    if not A.is_square():
        raise DimensionError("square matrix required")
    n = A.n_rows
    if rank(A) > q:
        raise RankBoundError(f"rank(A) exceeds q={q}")
    if A.is_symmetric():
        return _outcome(A, A, {"symmetric_input": True})
    if q == 0:
        return _outcome(A, Matrix.zeros(n), {"k": 0})
    bad = sum(1 for i in range(n) for j in range(n) if A[i, j] != A[j, i])
    rho = Fraction(bad, n * n)
    k, I = robust_principal_submatrix(A, q, gamma_sq=q * q * rho, cap=cap)
    Ic = tuple(i for i in range(n) if i not in I)
    d1 = rank(submatrix(A, range(n), I)) - k
    d2 = rank(submatrix(A, I, range(n))) - k
    transposed = d1 > d2
    W = A.T if transposed else A
    if transposed:
        d1, d2 = d2, d1
    B = _assemble(W, I, Ic, k, d1)
    if transposed:
        B = B.T
    if not B.is_symmetric() or rank(B) > q:
        raise RepairError("assembled matrix violates symmetry or the rank bound")
    return _outcome(A, B, {"rho": rho, "k": k, "I": list(I), "delta1": d1, "delta2": d2,
                           "transposed": transposed})


def _assemble(W: Matrix, I: Tuple[int, ...], Ic: Tuple[int, ...], k: int, d1: int) -> Matrix:
    n = W.n_rows
    WII = submatrix(W, I, I)
    C = symmetrize_robust(WII, k)
    if not Ic:
        return C
    Y0 = submatrix(W, Ic, I).rows()
    base, _ = rref(WII.rows())
    # extend a basis of rowspace(W[I, I]) by rows of W[Ic, I], in index order
    extra: List[List[Any]] = []
    for row in Y0:
        if len(rref(base + extra + [row])[0]) > len(base) + len(extra):
            extra.append(row)
    if len(extra) != d1:
        raise RepairError(f"expected {d1} extra directions, found {len(extra)}")
    full = base + extra
    coeffs = solve_rows(full, Y0)
    Q_rows, Y_rows = [], []
    for row, c in zip(Y0, coeffs):
        q_row = [sum((c[len(base) + t] * extra[t][j] for t in range(len(extra))), 0)
                 for j in range(len(I))]
        Q_rows.append(q_row)
        Y_rows.append([a - b for a, b in zip(row, q_row)])
    Q = Matrix(Q_rows)
    # P with Y = P C, using an independent set of rows of C
    c_rows = C.rows()
    piv_rows: List[int] = []
    for i in range(len(I)):
        if len(rref([c_rows[t] for t in piv_rows + [i]])[0]) == len(piv_rows) + 1:
            piv_rows.append(i)
    sol = solve_rows([c_rows[t] for t in piv_rows], Y_rows)
    if any(s is None for s in sol):
        raise RepairError("rows of W[Ic, I] - Q leave the row space of C")
    P_rows = []
    for s in sol:
        row = [0] * len(I)
        for t, v in zip(piv_rows, s):
            row[t] = v
        P_rows.append(row)
    P = Matrix(P_rows)
    low = P @ C + Q
    corner = P @ C @ P.T + P @ Q.T + Q @ P.T
    arr = np.empty((n, n), dtype=object)
    arr[np.ix_(I, I)] = C.data
    arr[np.ix_(Ic, I)] = low.data
    arr[np.ix_(I, Ic)] = low.data.T
    arr[np.ix_(Ic, Ic)] = corner.data
    return Matrix(arr, _trusted=True)


def symmetric_low_rank_repair(A: Matrix, r: int, *, cap: Optional[int] = None,
                              seed: int = 0) -> RepairOutcome:
    """Symmetric matrix of rank < r near a symmetric ``A``: low_rank_approx then fix_symmetry(q = r-1)."""
    if not A.is_symmetric():
        raise ValueError("symmetric input required")
    first = low_rank_approx(A, r, cap=cap, seed=seed)
    second = fix_symmetry(first.output, r - 1, cap=cap)
    out = _outcome(A, second.output, {"alpha": first.witness["alpha"],
                                      "low_rank": first.witness, "fix_symmetry": second.witness,
                                      "stage_changes": [first.changed_entries, second.changed_entries]})
    return out


# ---------------------------------------------------------------- tensors

def _anchored_index_lists(dims, anchor, side, rng, limit, samples):
    """Index lists for side-``side`` subtensors containing ``anchor``.

    Returns (stack-ready per-axis arrays, mode) or None when no such subtensor
    exists.  Exact when the count is at most ``limit``, else ``samples`` draws.
    """
    if any(n < side for n in dims):
        return None
    others = [np.array([i for i in range(n) if i != a], dtype=np.int64) for n, a in zip(dims, anchor)]
    total = prod(comb(n - 1, side - 1) for n in dims)
    if total <= limit:
        lists = []
        for o, a in zip(others, anchor):
            c = index_sets(len(o), side - 1)
            lists.append(np.concatenate([np.full((len(c), 1), a), o[c]], axis=1))
        return lists, "exact"
    lists = []
    for o, a in zip(others, anchor):
        keys = rng.random((samples, len(o)))
        pick = np.argpartition(keys, side - 2, axis=1)[:, :side - 1] if side > 1 else np.zeros((samples, 0), int)
        lists.append(np.concatenate([np.full((samples, 1), a), o[pick]], axis=1))
    return lists, "sampled"


def _stage2_fraction(W, anchor, side, rng, limit, samples, shared=None) -> Tuple[Fraction, str, int]:
    anchored_total = prod(comb(n - 1, side - 1) for n in W.shape)
    if shared is not None and 0 < anchored_total <= limit:
        return Fraction(shared.anchored(anchor), anchored_total), "exact", anchored_total
    res = _anchored_index_lists(W.shape, anchor, side, rng, limit, samples)
    if res is None:
        return Fraction(0), "vacuous", 0
    lists, mode = res
    if mode == "exact":
        stack = gather_product(W, lists)
    else:
        stack = gather_paired(W, lists)
    bad = int(np.count_nonzero(~batch_reducible(stack)))
    return Fraction(bad, len(stack)), mode, len(stack)


class _GlobalIrreducible:
    """Irreducibility of every side^d subtensor, computed once and shared by all anchors."""

    def __init__(self, W: np.ndarray, side: int):
        self.lists = [index_sets(n, side) for n in W.shape]
        self.bad = ~batch_reducible(gather_product(W, self.lists))
        self.bad = self.bad.reshape([len(L) for L in self.lists]).astype(np.int64)
        # membership[j][i, c]: index i lies in the c-th index set of axis j
        self.members = []
        for n, L in zip(W.shape, self.lists):
            m = np.zeros((n, len(L)), dtype=np.int64)
            m[L, np.arange(len(L))[:, None]] = 1
            self.members.append(m)

    def anchored(self, anchor: Tuple[int, ...]) -> int:
        out = self.bad
        for j in range(len(anchor) - 1, -1, -1):
            out = out @ self.members[j][anchor[j]]
        return int(out)


def _stage3_fractions(W, anchor, parts, rng, limit, samples) -> Tuple[List[Fraction], str]:
    dims = W.shape
    lists = []
    total = prod(n - 1 for n in dims)
    others = [np.array([i for i in range(n) if i != a], dtype=np.int64) for n, a in zip(dims, anchor)]
    if total == 0:
        return [Fraction(0)] * len(parts), "vacuous"
    if total <= limit:
        for o, a in zip(others, anchor):
            lists.append(np.stack([np.full(len(o), a), o], axis=1))
        stack = gather_product(W, lists)
        mode = "exact"
    else:
        for o, a in zip(others, anchor):
            lists.append(np.stack([np.full(samples, a), o[rng.integers(0, len(o), samples)]], axis=1))
        stack = gather_paired(W, lists)
        mode = "sampled"
    out = []
    for P in parts:
        ok = batch_rank_le1(_flat_array(stack, P, lead=1))
        out.append(Fraction(int(np.count_nonzero(~ok)), len(stack)))
    return out, mode


def _reconstruct(T: Tensor, anchor: Tuple[int, ...], P: AxisPartition) -> Tensor:
    data = T.data
    idx1 = tuple(slice(None) if j in P.J1 else anchor[j] for j in range(T.d))
    idx2 = tuple(anchor[j] if j in P.J1 else slice(None) for j in range(T.d))
    left = data[idx1]    # axes J1
    right = data[idx2]   # axes J2
    piv = data[anchor]
    outer = np.multiply.outer(left, right)
    order = list(P.J1) + list(P.J2)
    inv = [order.index(a) for a in range(T.d)]
    prodarr = np.transpose(outer, inv)
    out = np.empty(prodarr.shape, dtype=object)
    of = out.reshape(-1)
    for i, x in enumerate(prodarr.reshape(-1)):
        of[i] = exact_div(x, piv)
    return Tensor(out, _trusted=True)


def tensor_repair(T: Tensor, eps: Any, seed: int = 0, *, anchor_samples: int = 48,
                  stage2_cap: int = 5000, stage3_cap: int = 200_000,
                  samples: int = 2000) -> Optional[RepairOutcome]:
    """Make ``T`` reducible by changing few entries, or return None.

    With l = 2^(d-1) - 1 and delta = (eps/2)^(l+1):

    1. at most an eps/2 fraction of nonzero entries: return zero;
    2. among nonzero anchors (all of them, or a seeded sample of
       ``anchor_samples``) prefer the one through which the fewest
       side-2^(d-1) subtensors are irreducible, breaking ties by the stage 3
       score and then by sample order;
    3. take the partition (canonical order on ties) under which the fewest
       anchored 2 x ... x 2 subtensors are not reducible; give up if that
       fraction exceeds eps/2;
    4. T'(i) = T(i_J1, a_J2) T(a_J1, i_J2) / T(a).

    The stage 2 threshold delta^(l/(l+1)) = (eps/2)^l is reported in the
    witness but not enforced: at small sizes it is far below what even one
    corrupted entry produces, while the stage 3 threshold still certifies the
    result.
    """
    if T.d < 2:
        raise DimensionError("tensor repair needs at least two axes")
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    d = T.d
    ell = 2 ** (d - 1) - 1
    half = eps / 2
    nz_frac = Fraction(T.nnz(), T.size)
    witness: Dict[str, Any] = {"delta": half ** (ell + 1), "nonzero_fraction": nz_frac}
    if nz_frac <= half:
        witness["stage"] = 1
        return _outcome(T, Tensor.zeros(T.dims), witness)
    W = working_array(T)
    rng = make_rng(seed)
    nz = np.argwhere(W != 0)
    order = np.arange(len(nz))
    if len(nz) > anchor_samples:
        order = rng.choice(len(nz), size=anchor_samples, replace=False)
    parts = all_partitions(d)
    side = 2 ** (d - 1)
    best = None
    shared = None
    if min(T.dims) >= side and prod(comb(n, side) for n in T.dims) <= stage2_cap * min(len(order), 8):
        shared = _GlobalIrreducible(W, side)
    for rank_pos, t in enumerate(order):
        a = tuple(int(x) for x in nz[t])
        f2, mode2, n2 = _stage2_fraction(W, a, side, make_rng(seed, 2 + rank_pos), stage2_cap, samples, shared)
        f3s, mode3 = _stage3_fractions(W, a, parts, make_rng(seed, 100_000 + rank_pos), stage3_cap, samples)
        p_best = min(range(len(parts)), key=lambda i: (f3s[i], i))
        key = (f2, f3s[p_best], rank_pos)
        if best is None or key < best[0]:
            best = (key, a, p_best, f2, mode2, f3s, mode3)
    _, anchor, p_idx, f2, mode2, f3s, mode3 = best
    P = parts[p_idx]
    witness.update({"stage": 3, "anchor": list(anchor), "anchors_examined": len(order),
                    "stage2_fraction": f2, "stage2_mode": mode2,
                    "stage2_threshold": half ** ell, "stage2_within_threshold": f2 <= half ** ell,
                    "partition": P, "stage3_fractions": {str(p): f for p, f in zip(parts, f3s)},
                    "stage3_mode": mode3, "stage3_threshold": half})
    if f3s[p_idx] > half:
        witness["failed"] = "no partition has at most an eps/2 fraction of bad anchored subtensors"
        return None
    out = _reconstruct(T, anchor, P)
    if not is_reducible_wrt(out, P):
        raise RepairError("reconstruction is not reducible")
    return _outcome(T, out, witness)


def tensor_repair_report(T: Tensor, eps: Any, seed: int = 0, **kw) -> Tuple[Optional[RepairOutcome], Dict[str, Any]]:
    """Like :func:`tensor_repair` but also returns the diagnostics when it fails."""
    res = tensor_repair(T, eps, seed, **kw)
    if res is not None:
        return res, res.witness
    # rerun the selection to expose the failing diagnostics
    return None, _diagnose(T, eps, seed, **kw)


def _diagnose(T, eps, seed, **kw) -> Dict[str, Any]:
    eps = Fraction(eps)
    W = working_array(T)
    nz = np.argwhere(W != 0)
    parts = all_partitions(T.d)
    diag = {"nonzero_fraction": Fraction(T.nnz(), T.size), "threshold": eps / 2}
    if len(nz):
        a = tuple(int(x) for x in nz[0])
        f3s, _ = _stage3_fractions(W, a, parts, make_rng(seed), kw.get("stage3_cap", 200_000),
                                   kw.get("samples", 2000))
        diag["first_anchor"] = list(a)
        diag["stage3_fractions"] = {str(p): f for p, f in zip(parts, f3s)}
    return diag
