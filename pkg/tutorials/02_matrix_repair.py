"""
Repairing matrices with few nonsingular submatrices
===================================================

A matrix where almost every r x r submatrix is singular is close to a
matrix of rank below r.  This script measures that on a few inputs.
"""

from polylo.constructions import make_corner_matrix, make_random_low_rank
from polylo.linalg import Matrix, rank
from polylo.repair import fix_symmetry, low_rank_approx, symmetric_low_rank_repair
from polylo.submatrices import singular_fraction

# Exact count of nonsingular 2 x 2 submatrices of the 4 x 4 identity.
print(singular_fraction(Matrix.identity(4), 2))

# A symmetric rank-1 matrix with three corrupted entry pairs.
A = make_random_low_rank(8, 1, seed=7, corrupt_count=3, symmetric=True)
print(A)
alpha = singular_fraction(A, 2).fraction
out = symmetric_low_rank_repair(A, 2)
print("alpha =", alpha, " changed =", out.changed_entries, " rank =", rank(out.output))

# The corner matrix: the repair to rank 0 must erase every one, and the
# number of ones scales like alpha * n^2.
for n in (16, 32, 64):
    ell = n // 8
    C = make_corner_matrix(n, ell)
    res = symmetric_low_rank_repair(C, 1)
    print(n, ell, res.changed_fraction, res.witness["alpha"])

# The non-symmetric stage alone, and the symmetry fixer on a 2 x 2 nilpotent.
print(low_rank_approx(Matrix([[1, 1], [1, 0]]), 2).output)
fixed = fix_symmetry(Matrix([[0, 1], [0, 0]]), 1)
print(fixed.output, fixed.changed_entries)
