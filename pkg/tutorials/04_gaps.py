"""
Symmetric generalized arithmetic progressions
=============================================
"""

from polylo.gap import CoverQuery, SymmetricGAP, count_Z_V, count_Z_V_formula, gap_contains, minimal_cover
from polylo.scalar import GaussianRational

g = SymmetricGAP(generators=((3,),), bounds=(2,))
print(g.volume, [u for u in range(-8, 9) if gap_contains(g, u)])

# Smallest progression through 2, 4, 6.
print(minimal_cover(CoverQuery((2, 4, 6))).to_json())

# Dropping one outlier lets the far value go.
print(minimal_cover(CoverQuery((2, 4, 6, 101), outliers_allowed=1)).to_json())

# 1 and i are not multiples of one generator, but two generators work.
print(minimal_cover(CoverQuery((1, GaussianRational(0, 1)))))
print(minimal_cover(CoverQuery((1, GaussianRational(0, 1)), max_rank=2)).to_json())

# Counting integer r x m matrices that fit a box of volume at most V.
for V in (1, 3, 9, 15):
    print(V, count_Z_V(2, 2, V), count_Z_V_formula(2, 2, V))
