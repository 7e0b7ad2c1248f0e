from fractions import Fraction
from itertools import combinations, product
from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from polylo.gap import (CoverQuery, SymmetricGAP, count_Z_V, count_Z_V_formula, cover_candidates, gap_contains,
                        gap_volume, minimal_cover)
from polylo.scalar import GaussianRational

small_int = st.integers(-6, 6)


@st.composite
def gaps(draw, dim=1, max_rank=2):
    r = draw(st.integers(0, max_rank))
    gens = [tuple(draw(small_int) for _ in range(dim)) for _ in range(r)]
    bounds = [draw(st.integers(0, 3)) for _ in range(r)]
    return SymmetricGAP(tuple(gens), tuple(bounds))


def box_points(gens, bounds):
    dim = len(gens[0]) if gens else 1
    pts = set()
    for a in product(*[range(-b, b + 1) for b in bounds]):
        pts.add(tuple(sum(ai * g[j] for ai, g in zip(a, gens)) for j in range(dim)))
    return pts


def brute_min_volume(query):
    """Smallest qualifying volume over the same search space, by direct box enumeration."""
    vals = [tuple(v) for v in query.values]
    need = len(vals) - query.outliers_allowed
    best = None
    if sum(all(x == 0 for x in v) for v in vals) >= need:
        best = 1
    cands = cover_candidates(vals, query.generator_bound)
    gen_sets = [(g,) for g in cands]
    if query.max_rank == 2:
        gen_sets += list(combinations(cands, 2))
    for gens in gen_sets:
        r = len(gens)
        for bounds in product(range(query.volume_cap // 2 + 1), repeat=r):
            vol = prod(2 * b + 1 for b in bounds)
            if vol > query.volume_cap or (best is not None and vol >= best):
                continue
            pts = box_points(gens, bounds)
            if sum(v in pts for v in vals) >= need:
                best = vol
    return best


def test_volume_examples():
    assert gap_volume(SymmetricGAP((), ())) == 1
    assert gap_volume(SymmetricGAP(((3,),), (2,))) == 5
    assert gap_volume(SymmetricGAP(((1,), (7,)), (1, 2))) == 15


def test_contains_examples():
    g = SymmetricGAP(((3,),), (2,))
    assert gap_contains(g, 6)
    assert not gap_contains(g, 4)
    assert gap_contains(g, 0)
    assert gap_contains(SymmetricGAP((), ()), 0)
    assert gap_contains(SymmetricGAP(((1, 2), (0, 1)), (1, 1)), (1, 3))


def test_contains_errors():
    with pytest.raises(ValueError):
        gap_contains(SymmetricGAP(((1, 2),), (1,)), 3)
    with pytest.raises(ValueError):
        gap_contains(SymmetricGAP(((1,),), (10,)), 3, cap=5)
    with pytest.raises(ValueError):
        SymmetricGAP(((1,),), (-1,))


@given(gaps(dim=2), st.tuples(small_int, small_int))
def test_negation_symmetry(g, u):
    assert gap_contains(g, u) == gap_contains(g, tuple(-x for x in u))


@given(gaps(), st.data())
def test_points_are_contained(g, data):
    coeffs = [data.draw(st.integers(-b, b)) for b in g.bounds]
    assert gap_contains(g, g.point(coeffs, 1))


def test_gap_json_roundtrip():
    g = SymmetricGAP(((Fraction(1, 2), GaussianRational(1, 2)),), (3,))
    assert SymmetricGAP.from_json(g.to_json()) == g


def test_cover_examples():
    res = minimal_cover(CoverQuery((2, 4, 6)))
    assert res.gap.generators == ((2,),) and res.gap.bounds == (3,) and res.volume == 7
    assert res.upper_bound and res.covered == (0, 1, 2)
    res = minimal_cover(CoverQuery((0, 0, 0)))
    assert res.gap.rank == 0 and res.volume == 1
    assert minimal_cover(CoverQuery((1, GaussianRational(0, 1)))) is None


def test_cover_outliers_and_rank2():
    res = minimal_cover(CoverQuery((2, 4, 6, 101), outliers_allowed=1))
    assert res.volume == 7 and res.covered == (0, 1, 2)
    res = minimal_cover(CoverQuery(((1, 0), (0, 1), (1, 1)), max_rank=2))
    assert res.gap.rank == 2 and res.volume == 9
    assert minimal_cover(CoverQuery(((1, 0), (0, 1)), max_rank=1)) is None


def test_cover_errors():
    with pytest.raises(ValueError):
        minimal_cover(CoverQuery((1, 2), max_rank=3))
    with pytest.raises(ValueError):
        CoverQuery((1, 2), outliers_allowed=3)
    with pytest.raises(ValueError):
        CoverQuery(((1,), (1, 2)))


@settings(max_examples=40)
@given(st.lists(st.integers(-8, 8), min_size=1, max_size=6), st.integers(0, 2), st.integers(1, 2))
def test_cover_sound(values, outliers, rank):
    outliers = min(outliers, len(values))
    res = minimal_cover(CoverQuery(tuple(values), rank, outliers, generator_bound=4, volume_cap=200))
    if res is None:
        return
    inside = [i for i, v in enumerate(values) if gap_contains(res.gap, v)]
    assert set(res.covered) <= set(inside)
    assert len(res.covered) >= len(values) - outliers


@settings(max_examples=25)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.integers(0, 1), st.integers(1, 8))
def test_cover_minimal_rank1(values, outliers, bound):
    q = CoverQuery(tuple(values), 1, outliers, generator_bound=bound, volume_cap=40)
    res = minimal_cover(q)
    brute = brute_min_volume(q)
    assert (res.volume if res else None) == brute


@settings(max_examples=10)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.integers(0, 1))
def test_cover_minimal_rank2(values, outliers):
    q = CoverQuery(tuple(values), 2, outliers, generator_bound=2, volume_cap=15)
    res = minimal_cover(q)
    assert (res.volume if res else None) == brute_min_volume(q)


def test_cover_minimal_rank2_vectors():
    q = CoverQuery(((1, 0), (0, 1), (2, 1), (1, -1)), 2, 0, generator_bound=2, volume_cap=25)
    assert minimal_cover(q).volume == brute_min_volume(q)


def brute_Z_V(r, m, V):
    seen = set()
    R = (V - 1) // 2
    for M in product(range(-R, R + 1), repeat=r * m):
        rows = [M[i * m:(i + 1) * m] for i in range(r)]
        if prod(2 * max((abs(x) for x in row), default=0) + 1 for row in rows) <= V:
            seen.add(M)
    return len(seen)


def test_Z_V_examples():
    assert count_Z_V(1, 1, 3) == 3
    assert count_Z_V(1, 2, 3) == 9
    assert all(count_Z_V(r, m, 1) == 1 for r in range(3) for m in range(3))


@pytest.mark.parametrize("r,m", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)])
def test_Z_V_matches_brute_and_formula(r, m):
    counts = [count_Z_V(r, m, V) for V in range(1, 12)]
    assert counts == [brute_Z_V(r, m, V) for V in range(1, 12)]
    assert counts == [count_Z_V_formula(r, m, V) for V in range(1, 12)]
    assert counts == sorted(counts)
