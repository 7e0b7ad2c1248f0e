import csv
import io
from fractions import Fraction
from math import comb

import pytest

from polylo.anticoncentration import exact_distribution
from polylo.experiments import KINDS, build_polynomial, format_csv, run_experiment_scaling, run_tester_roc
from polylo.polynomial import PolynomialSpec


def parse(text):
    header, body = text.split("\n", 1)
    return header, list(csv.DictReader(io.StringIO(body)))


def test_counterexample_row():
    (row,) = run_experiment_scaling("counterexample", [8], 2, mode="exact")
    assert row["mode"] == "exact" and row["z"] == "0" and Fraction(row["rho"]) == Fraction(19, 32)
    assert float(row["n_rho"]) == 8 * 19 / 32


def test_single_variable_parts():
    f = PolynomialSpec(4, {((0, 1), (1, 1)): 1, ((2, 1), (3, 1)): -1})
    oracle = max(exact_distribution(f).values())
    (row,) = run_experiment_scaling("counterexample", [4], 2, mode="exact", part_size=1)
    assert Fraction(row["rho"]) == oracle == Fraction(1, 2)


def test_power_sum_linear_binomial():
    ns = list(range(4, 21))
    rows = run_experiment_scaling("power_sum", ns, 1, mode="exact")
    assert [Fraction(r["rho"]) for r in rows] == [Fraction(comb(n, n // 2), 2 ** n) for n in ns]


def test_auto_falls_back_to_mc():
    rows = run_experiment_scaling("power_sum", [30], 2, mode="auto", samples=2000, cap=1000)
    assert rows[0]["mode"] == "mc"
    lo, hi = float(rows[0]["ci_low"]), float(rows[0]["ci_high"])
    assert lo <= float(rows[0]["rho"]) <= hi


def test_mc_ci_contains_exact():
    (ex,) = run_experiment_scaling("counterexample", [16], 2, mode="exact")
    (mc,) = run_experiment_scaling("counterexample", [16], 2, mode="mc", samples=50_000, seed=3)
    assert float(mc["ci_low"]) <= float(Fraction(ex["rho"])) <= float(mc["ci_high"])


def test_random_quadratic_rank():
    rows = run_experiment_scaling("random_quadratic_rank", [4, 6], 2, r=2, seed=1, mode="exact")
    for n, row in zip([4, 6], rows):
        f = build_polynomial("random_quadratic_rank", n, 2, r=2, seed=1)
        assert Fraction(row["rho"]) == max(exact_distribution(f).values())


def test_scaling_errors():
    with pytest.raises(ValueError):
        run_experiment_scaling("nope", [8], 2)
    with pytest.raises(ValueError):
        run_experiment_scaling("counterexample", [8], 2, mode="fast")
    assert set(KINDS) == {"counterexample", "power_sum", "random_quadratic_rank"}


def test_bit_exact_reruns():
    a = format_csv("scaling", run_experiment_scaling("counterexample", [8, 16, 40], 2, samples=5000, seed=9,
                                                     cap=70_000), {"seed": 9})
    b = format_csv("scaling", run_experiment_scaling("counterexample", [8, 16, 40], 2, samples=5000, seed=9,
                                                     cap=70_000), {"seed": 9})
    assert a == b
    r1 = format_csv("roc", run_tester_roc([4, 4, 4], Fraction(1, 4), [20, 50], 5, 2), {"seed": 2})
    r2 = format_csv("roc", run_tester_roc([4, 4, 4], Fraction(1, 4), [20, 50], 5, 2), {"seed": 2})
    assert r1 == r2


def test_csv_header_and_wall_time():
    rows = run_experiment_scaling("power_sum", [4], 1, wall_time=True)
    header, parsed = parse(format_csv("scaling", rows, {"kind": "power_sum", "d": 1}, wall_time=True))
    assert header == "# polylo scaling v1 kind=power_sum d=1"
    assert list(parsed[0]) == ["n", "mode", "z", "rho", "ci_low", "ci_high", "n_rho", "sqrt_n_rho", "wall_time"]
    with pytest.raises(ValueError):
        format_csv("other", rows, {})


def test_roc_clean_never_rejects():
    rows = run_tester_roc([4, 4, 4], Fraction(1, 4), [10, 100], 10, 0)
    clean = [r for r in rows if r["input"] == "clean"]
    assert len(clean) == 2 and all(r["rejects"] == 0 for r in clean)
    dirty = [r for r in rows if r["input"] == "corrupted"]
    assert all(r["corrupted_entries"] == 16 for r in dirty)


def test_roc_heavily_corrupted():
    rows = run_tester_roc([8, 8, 8], Fraction(1, 4), [400], 20, 0, corrupt_fraction=Fraction(1, 2))
    dirty = next(r for r in rows if r["input"] == "corrupted")
    assert float(dirty["reject_rate"]) >= 0.99


def test_roc_zero_trials():
    assert run_tester_roc([4, 4, 4], Fraction(1, 4), [10], 0) == []
    with pytest.raises(ValueError):
        run_tester_roc([4, 4, 4], Fraction(1, 4), [10], -1)
