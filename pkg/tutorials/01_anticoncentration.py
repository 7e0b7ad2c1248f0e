"""
Point probabilities of polynomials in random signs
==================================================

Run with ``python tutorials/01_anticoncentration.py``.
"""

from fractions import Fraction
from math import comb

from polylo.anticoncentration import (difference_of_products_distribution, linear_max_point_probability,
                                      max_point_probability, monte_carlo_point_probability)
from polylo.constructions import counterexample_parts, make_counterexample, make_power_sum
from polylo.experiments import format_csv, run_experiment_scaling
from polylo.polynomial import RandomModel

# A sum of n signs hits its most likely value with probability C(n, n/2) / 2^n.
for n in (4, 10, 20):
    rep = linear_max_point_probability([1] * n)
    print(n, rep.z, rep.probability, rep.probability == Fraction(comb(n, n // 2), 2 ** n))

# Distinct powers of two never collide, so every sum is equally likely.
print(linear_max_point_probability([2 ** i for i in range(10)]).probability)

# Squaring the sum can only make values pile up.
print(max_point_probability(make_power_sum(3, 2)).probability)

# L1 L2 - L3 L4 with four disjoint blocks of signs vanishes with probability
# of order 1/n.  Small n is enumerated; larger n uses the block-sum shortcut.
f = make_counterexample(8, 2)
print(len(f.terms), "monomials;", max_point_probability(f))
for n in (8, 16, 24, 48):
    parts = counterexample_parts(n, 2)
    p0 = difference_of_products_distribution(parts[:2], parts[2:])[0]
    print(f"n={n:3d}  Pr[f=0]={float(p0):.4f}  n*Pr={n * float(p0):.3f}")

# Monte Carlo agrees with the exact value inside its 99% interval.
mc = monte_carlo_point_probability(make_counterexample(24, 2), 0, samples=200_000, seed=1)
print(float(mc.estimate), mc.interval)

# The lazy model puts mass 1/2 on zero for each coordinate.
print(linear_max_point_probability([1, 1, 1], RandomModel.lazy(3)).probability)

# The same numbers as a reproducible CSV table.
rows = run_experiment_scaling("counterexample", [8, 16, 24], 2)
print(format_csv("scaling", rows, {"kind": "counterexample", "d": 2}))
