"""
Testing and repairing tensor reducibility
=========================================

A d-tensor is reducible when some flattening has rank at most 1.  The
tester samples 2^(d-1)-sided subtensors; the repair rebuilds the tensor
from one anchor entry.
"""

from fractions import Fraction

import numpy as np

from polylo.constructions import make_random_rank1_tensor
from polylo.repair import tensor_repair
from polylo.tensor import Tensor, all_partitions, flatten, is_reducible
from polylo.testers import TesterConfig, exact_irreducible_fraction, tensor_reducibility_tester

T = Tensor.from_slices([[[1, 0], [0, 1]], [[0, 1], [0, 0]]])
for P in all_partitions(3):
    print(P, flatten(T, P).rank())
print("reducible:", is_reducible(T))

# Blow every index up four times: the tensor stays far from reducible.
big = Tensor(np.asarray(T.data.tolist()).repeat(4, 0).repeat(4, 1).repeat(4, 2).tolist())
print("exact irreducible fraction:", exact_irreducible_fraction(big, 4))
v = tensor_reducibility_tester(big, TesterConfig(samples=400, seed=3))
print(v.decision, v.observed_bad_fraction, v.threshold)

# A clean rank-1 tensor is never rejected.
clean = make_random_rank1_tensor([6, 6, 6], seed=5)
print(tensor_reducibility_tester(clean, TesterConfig(samples=400, seed=3)).decision)

# Two corrupted entries are found and undone.
dirty = make_random_rank1_tensor([6, 6, 6], seed=5, corrupt_count=2)
out = tensor_repair(dirty, Fraction(1, 10), seed=0)
print(out.changed_entries, out.output == clean, out.witness["partition"], out.witness["anchor"])
