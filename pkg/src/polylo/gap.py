"""Symmetric generalized arithmetic progressions over Gaussian-rational vectors.

A symmetric GAP is stored as the map (a_1..a_r) -> sum a_i v_i on the box
|a_i| <= N_i, never as its image.  ``minimal_cover`` is a bounded search:
its answer is the best GAP inside a declared candidate space, hence only an
upper bound on the true minimum volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import _config
from .linalg import _norm, exact_div
from .scalar import Scalar, imag_part, real_part, scalar_key, to_scalar

__all__ = [
    "SymmetricGAP",
    "CoverQuery",
    "CoverResult",
    "gap_volume",
    "gap_contains",
    "cover_candidates",
    "minimal_cover",
    "count_Z_V",
    "count_Z_V_formula",
]

Vector = Tuple[Scalar, ...]


def _vec(v: Any) -> Vector:
    if isinstance(v, (list, tuple)):
        return tuple(to_scalar(x) for x in v)
    return (to_scalar(v),)


def _vkey(v: Vector):
    return tuple(scalar_key(x) for x in v)


@dataclass(frozen=True)
class SymmetricGAP:
    generators: Tuple[Vector, ...]
    bounds: Tuple[int, ...]

    def __post_init__(self):
        gens = tuple(_vec(g) for g in self.generators)
        bounds = tuple(int(b) for b in self.bounds)
        if len(gens) != len(bounds):
            raise ValueError("one bound per generator")
        if any(b < 0 for b in bounds):
            raise ValueError("bounds must be nonnegative")
        if len({len(g) for g in gens}) > 1:
            raise ValueError("generators must share one ambient dimension")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "bounds", bounds)

    @property
    def rank(self) -> int:
        return len(self.bounds)

    @property
    def volume(self) -> int:
        return gap_volume(self)

    def point(self, coeffs: Sequence[int], dim: int) -> Vector:
        out = [0] * dim
        for a, g in zip(coeffs, self.generators):
            for j in range(dim):
                out[j] = out[j] + a * g[j]
        return tuple(_norm(x) for x in out)

    def to_json(self) -> dict:
        from .scalar import format_scalar
        return {"generators": [[format_scalar(x) for x in g] for g in self.generators],
                "bounds": list(self.bounds)}

    @classmethod
    def from_json(cls, obj: dict) -> "SymmetricGAP":
        from .scalar import parse_scalar
        return cls(tuple(tuple(parse_scalar(x) for x in g) for g in obj["generators"]), tuple(obj["bounds"]))


def gap_volume(g: SymmetricGAP) -> int:
    return prod(2 * b + 1 for b in g.bounds)


def gap_contains(g: SymmetricGAP, u: Any, *, cap: Optional[int] = None) -> bool:
    """Whether u = sum a_i v_i for some integers |a_i| <= N_i, by enumerating the box."""
    u = _vec(u)
    if g.rank and len(g.generators[0]) != len(u):
        raise ValueError("dimension mismatch")
    limit = _config.get_cap("gap", cap)
    if g.volume > limit:
        raise ValueError(f"volume {g.volume} exceeds the cap {limit}")
    for coeffs in product(*[range(-b, b + 1) for b in g.bounds]):
        if g.point(coeffs, len(u)) == u:
            return True
    return False


@dataclass(frozen=True)
class CoverQuery:
    values: Tuple[Vector, ...]
    max_rank: int = 1
    outliers_allowed: int = 0
    generator_bound: int = 4
    volume_cap: int = 10_000

    def __post_init__(self):
        vals = tuple(_vec(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not 0 <= self.outliers_allowed <= len(vals):
            raise ValueError("outliers_allowed must lie between 0 and the number of values")
        if len({len(v) for v in vals}) > 1:
            raise ValueError("values must share one ambient dimension")
        if self.generator_bound < 1:
            raise ValueError("generator_bound must be positive")


@dataclass(frozen=True)
class CoverResult:
    gap: SymmetricGAP
    covered: Tuple[int, ...]
    upper_bound: bool = True

    @property
    def volume(self) -> int:
        return self.gap.volume

    def to_json(self) -> dict:
        return {"gap": self.gap.to_json(), "volume": self.volume,
                "covered": [i + 1 for i in self.covered], "upper_bound": self.upper_bound}


# realified coordinates: a Gaussian-rational vector of length k becomes 2k rationals
def _real(v: Vector) -> List[Fraction]:
    out: List[Fraction] = []
    for x in v:
        out += [real_part(x), imag_part(x)]
    return out


def _canonical(v: Vector) -> Vector:
    for c in _real(v):
        if c != 0:
            return v if c > 0 else tuple(_norm(-x) for x in v)
    return v


def cover_candidates(values: Sequence[Vector], generator_bound: int) -> List[Vector]:
    """Nonzero values and pairwise differences divided by 1..generator_bound, sign-canonical, sorted."""
    base = set()
    vals = [_vec(v) for v in values]
    for i, a in enumerate(vals):
        base.add(a)
        for b in vals[i + 1:]:
            base.add(tuple(_norm(x - y) for x, y in zip(a, b)))
    out = set()
    for w in base:
        if all(x == 0 for x in w):
            continue
        for t in range(1, generator_bound + 1):
            out.add(_canonical(tuple(_norm(exact_div(x, t)) for x in w)))
    return sorted(out, key=_vkey)


def _as_int(q: Fraction) -> Optional[int]:
    return int(q) if q.denominator == 1 else None


def _multiple(u: List[Fraction], v: List[Fraction]) -> Optional[Fraction]:
    """t with u = t v (v nonzero), else None."""
    j = next(i for i, c in enumerate(v) if c != 0)
    t = u[j] / v[j]
    return t if all(a == t * b for a, b in zip(u, v)) else None


def _reps1(u: List[Fraction], v: List[Fraction]) -> List[Tuple[int]]:
    t = _multiple(u, v)
    a = _as_int(t) if t is not None else None
    return [] if a is None else [(abs(a),)]


def _reps2(u: List[Fraction], v1: List[Fraction], v2: List[Fraction], B: int) -> List[Tuple[int, int]]:
    """Coefficient magnitudes (|a1|, |a2|) of all u = a1 v1 + a2 v2 with |a_i| <= B."""
    c = _multiple(v2, v1)
    if c is None:
        # independent: find a nonsingular 2x2 row pair and solve
        k = len(v1)
        for i in range(k):
            for j in range(i + 1, k):
                det = v1[i] * v2[j] - v1[j] * v2[i]
                if det != 0:
                    a1 = (u[i] * v2[j] - u[j] * v2[i]) / det
                    a2 = (v1[i] * u[j] - v1[j] * u[i]) / det
                    if a1.denominator == 1 and a2.denominator == 1 and all(
                            x == a1 * p + a2 * q for x, p, q in zip(u, v1, v2)):
                        return [(abs(int(a1)), abs(int(a2)))] if max(abs(a1), abs(a2)) <= B else []
                    return []
        return []
    t = _multiple(u, v1) if any(u) else Fraction(0)
    if t is None:
        return []
    out = []
    for a2 in range(-B, B + 1):
        a1 = t - c * a2
        if a1.denominator == 1 and abs(a1) <= B:
            out.append((abs(int(a1)), abs(a2)))
    return out


def _best_box(reps: List[List[Tuple[int, ...]]], need: int, rank: int) -> Optional[Tuple[Tuple[int, ...], int]]:
    """Smallest-volume bounds covering at least ``need`` values given each value's representations."""
    if need == 0:
        return (0,) * rank, 1
    if rank == 1:
        mins = sorted(min(a for (a,) in r) for r in reps if r)
        if len(mins) < need:
            return None
        N = mins[need - 1]
        return (N,), 2 * N + 1
    best = None
    for N1 in sorted({a for r in reps for a, _ in r} | {0}):
        mins = sorted(min(b for a, b in r if a <= N1) for r in reps if any(a <= N1 for a, _ in r))
        if len(mins) < need:
            continue
        N2 = mins[need - 1]
        vol = (2 * N1 + 1) * (2 * N2 + 1)
        if best is None or vol < best[1]:
            best = ((N1, N2), vol)
    return best


def _covered(reps: List[List[Tuple[int, ...]]], bounds: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(i for i, r in enumerate(reps) if any(all(a <= b for a, b in zip(rep, bounds)) for rep in r))


def minimal_cover(query: CoverQuery, *, cap: Optional[int] = None) -> Optional[CoverResult]:
    """Minimum-volume symmetric GAP of rank <= max_rank (<= 2) covering all but the allowed outliers.

    Search space: rank 0; rank 1 over :func:`cover_candidates`; rank 2 over
    unordered pairs of candidates with coefficients at most half the volume
    cap.  Ties go to the lower rank, then the lexicographically smaller
    generators.
    """
    if query.max_rank > 2:
        raise ValueError("bounded search is only complete for rank at most 2")
    vals = query.values
    need = len(vals) - query.outliers_allowed
    dim = len(vals[0]) if vals else 1
    best: Optional[Tuple[Tuple, CoverResult]] = None

    def offer(gens: Tuple[Vector, ...], reps, rank: int) -> None:
        nonlocal best
        found = _best_box(reps, need, rank)
        if found is None or found[1] > query.volume_cap:
            return
        bounds, vol = found
        key = (vol, rank, tuple(_vkey(g) for g in gens))
        if best is None or key < best[0]:
            best = (key, CoverResult(SymmetricGAP(gens, bounds), _covered(reps, bounds)))

    zero_reps = [[()] if all(x == 0 for x in v) else [] for v in vals]
    if sum(1 for r in zero_reps if r) >= need:
        best = ((1, 0, ()), CoverResult(SymmetricGAP((), ()), _covered(zero_reps, ())))
    if query.max_rank == 0:
        return best[1] if best else None
    cands = cover_candidates(vals, query.generator_bound)
    limit = _config.get_cap("gap", cap)
    pairs = len(cands) * (len(cands) - 1) // 2 if query.max_rank == 2 else 0
    if len(cands) + pairs > limit:
        raise ValueError(f"{len(cands) + pairs} candidate generator sets exceed the cap {limit}")
    rv = [_real(v) for v in vals]
    rc = [_real(c) for c in cands]
    for g, v in zip(cands, rc):
        offer((g,), [_reps1(u, v) for u in rv], 1)
    if query.max_rank == 2:
        for i in range(len(cands)):
            for j in range(i + 1, len(cands)):
                top = min(best[0][0] if best else query.volume_cap, query.volume_cap)
                B = (top - 1) // 2
                offer((cands[i], cands[j]), [_reps2(u, rc[i], rc[j], B) for u in rv], 2)
    return best[1] if best else None


def _boxes(r: int, V: int) -> List[Tuple[int, ...]]:
    """All (N_1..N_r) with prod(2 N_i + 1) <= V."""
    out = []

    def rec(prefix: Tuple[int, ...], budget: int) -> None:
        if len(prefix) == r:
            out.append(prefix)
            return
        N = 0
        while 2 * N + 1 <= budget:
            rec(prefix + (N,), budget // (2 * N + 1))
            N += 1

    rec((), V)
    return out


def count_Z_V(r: int, m: int, V: int, *, cap: Optional[int] = None) -> int:
    """|Z(V)|: integer r x m matrices lying in some box with row bounds N_i, prod(2 N_i + 1) <= V.

    Enumerates every box's matrices into one set, so overlaps are counted once.
    """
    if r < 0 or m < 0 or V < 1:
        raise ValueError("need r, m >= 0 and V >= 1")
    boxes = _boxes(r, V)
    limit = _config.get_cap("gap", cap)
    work = sum(prod((2 * N + 1) ** m for N in box) for box in boxes)
    if work > limit:
        raise ValueError(f"{work} matrices to enumerate exceed the cap {limit}")
    seen = set()
    for box in boxes:
        rows = [list(product(range(-N, N + 1), repeat=m)) for N in box]
        seen.update(product(*rows))
    return len(seen)


def count_Z_V_formula(r: int, m: int, V: int) -> int:
    """Same count, grouping matrices by their exact row maxima M_i (fits iff prod(2 M_i + 1) <= V)."""
    def exact(M: int) -> int:
        return 1 if M == 0 else (2 * M + 1) ** m - (2 * M - 1) ** m
    return sum(prod(exact(M) for M in box) for box in _boxes(r, V))
