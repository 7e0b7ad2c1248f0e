"""Scaling tables and tester ROC tables, written as versioned CSV.

The first line of every table is a ``#`` comment naming the table kind, its
column version and the full parameter set, so a CSV can be regenerated from
its own header.  Wall-clock times are left out unless asked for; without
them the output is bit-identical for a fixed seed.
"""

from __future__ import annotations

import csv
import io
import time
from fractions import Fraction
from math import sqrt
from typing import Any, Dict, List, Optional, Sequence

from . import _config
from .anticoncentration import (
    OutcomeCapError,
    difference_of_products_distribution,
    exact_distribution,
    linear_distribution,
    monte_carlo_point_probability,
)
from .constructions import counterexample_parts, make_counterexample, make_power_sum, make_random_low_rank, \
    make_random_rank1_tensor
from .polynomial import PolynomialSpec, RandomModel
from .scalar import format_scalar, scalar_key
from .testers import TesterConfig, tensor_reducibility_tester

__all__ = [
    "SCALING_VERSION",
    "ROC_VERSION",
    "KINDS",
    "build_polynomial",
    "run_experiment_scaling",
    "run_tester_roc",
    "format_csv",
]

SCALING_VERSION = 1
ROC_VERSION = 1
KINDS = ("counterexample", "power_sum", "random_quadratic_rank")


def build_polynomial(kind: str, n: int, d: int, *, r: int = 1, seed: int = 0,
                     part_size: Optional[int] = None) -> PolynomialSpec:
    if kind == "counterexample":
        return make_counterexample(n, d, part_size)
    if kind == "power_sum":
        return make_power_sum(n, d)
    if kind == "random_quadratic_rank":
        A = make_random_low_rank(n, r, seed, 0, True)
        return PolynomialSpec.from_quadratic_form(A)
    raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")


def _exact_law(kind: str, n: int, d: int, model: RandomModel, f: PolynomialSpec, cap: Optional[int],
               part_size: Optional[int] = None):
    # both of these shortcuts compute the same law as enumeration, much faster
    if kind == "counterexample" and all(k == "rademacher" for k in model.kinds):
        parts = counterexample_parts(n, d, part_size)
        return difference_of_products_distribution(parts[:d], parts[d:], model)
    if kind == "power_sum" and d == 1:
        return linear_distribution([1] * n, model, cap=cap)
    return exact_distribution(f, model, cap=cap)


def _argmax(law: Dict[Any, Fraction]):
    best = max(law.values())
    return min((v for v, p in law.items() if p == best), key=scalar_key), best


def _fmt_float(x: float) -> str:
    return repr(float(x))


def run_experiment_scaling(kind: str, n_list: Sequence[int], d: int, model: str = "rademacher",
                           mode: str = "auto", seed: int = 0, *, r: int = 1, z: Any = 0,
                           samples: int = 100_000, confidence: float = 0.99, cap: Optional[int] = None,
                           part_size: Optional[int] = None, wall_time: bool = False) -> List[Dict[str, Any]]:
    """One row per n: the point probability rho and the normalized columns n*rho, sqrt(n)*rho.

    Exact rows report the most likely value and its probability.  Monte Carlo
    rows estimate Pr[f = z] with a Clopper-Pearson interval.  ``auto`` goes
    exact when the enumeration fits the cap.  ``part_size`` overrides the
    counterexample's default block size 2 * floor(n / 4d).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if mode not in ("auto", "exact", "mc"):
        raise ValueError("mode must be auto, exact or mc")
    rows = []
    for i, n in enumerate(n_list):
        t0 = time.perf_counter()
        f = build_polynomial(kind, n, d, r=r, seed=seed, part_size=part_size)
        rm = RandomModel.named(model, n)
        law = None
        if mode != "mc":
            try:
                law = _exact_law(kind, n, d, rm, f, cap, part_size)
            except OutcomeCapError:
                if mode == "exact":
                    raise
        if law is not None:
            zz, rho = _argmax(law)
            lo = hi = float(rho)
            row = {"n": n, "mode": "exact", "z": format_scalar(zz), "rho": str(rho),
                   "ci_low": _fmt_float(lo), "ci_high": _fmt_float(hi)}
            val = float(rho)
        else:
            rep = monte_carlo_point_probability(f, z, rm, samples, seed + i, confidence=confidence)
            val = float(rep.estimate)
            row = {"n": n, "mode": "mc", "z": format_scalar(rep.z), "rho": _fmt_float(val),
                   "ci_low": _fmt_float(rep.interval[0]), "ci_high": _fmt_float(rep.interval[1])}
        row["n_rho"] = _fmt_float(n * val)
        row["sqrt_n_rho"] = _fmt_float(sqrt(n) * val)
        if wall_time:
            row["wall_time"] = f"{time.perf_counter() - t0:.6f}"
        rows.append(row)
    return rows


def run_tester_roc(dims: Sequence[int], eps: Any, samples_list: Sequence[int], trials: int, seed: int = 0, *,
                   corrupt_fraction: Any = Fraction(1, 4), wall_time: bool = False) -> List[Dict[str, Any]]:
    """Reject rates of the tensor tester on clean and corrupted rank-1 tensors.

    Trial t uses generator seed ``seed + t``; the tester in that trial uses
    the same seed on its own stream, so rows do not depend on evaluation order.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    dims = [int(x) for x in dims]
    total = 1
    for x in dims:
        total *= x
    corrupt = int(Fraction(corrupt_fraction) * total)
    rows = []
    if trials == 0:
        return rows
    inputs = {
        "clean": [make_random_rank1_tensor(dims, seed + t) for t in range(trials)],
        "corrupted": [make_random_rank1_tensor(dims, seed + t, corrupt) for t in range(trials)],
    }
    for s in samples_list:
        for label, tensors in inputs.items():
            t0 = time.perf_counter()
            rejects = sum(
                0 if tensor_reducibility_tester(T, TesterConfig(s, seed + t + 1, eps)).accept else 1
                for t, T in enumerate(tensors))
            row = {"samples": s, "input": label, "corrupted_entries": 0 if label == "clean" else corrupt,
                   "trials": trials, "rejects": rejects, "reject_rate": _fmt_float(rejects / trials)}
            if wall_time:
                row["wall_time"] = f"{time.perf_counter() - t0:.6f}"
            rows.append(row)
    return rows


SCALING_COLUMNS = ["n", "mode", "z", "rho", "ci_low", "ci_high", "n_rho", "sqrt_n_rho"]
ROC_COLUMNS = ["samples", "input", "corrupted_entries", "trials", "rejects", "reject_rate"]


def format_csv(table: str, rows: List[Dict[str, Any]], params: Dict[str, Any], wall_time: bool = False) -> str:
    """CSV text with a versioned ``#`` header comment."""
    if table == "scaling":
        cols, version = list(SCALING_COLUMNS), SCALING_VERSION
    elif table == "roc":
        cols, version = list(ROC_COLUMNS), ROC_VERSION
    else:
        raise ValueError(f"unknown table {table!r}")
    if wall_time:
        cols.append("wall_time")
    buf = io.StringIO()
    desc = " ".join(f"{k}={v}" for k, v in params.items())
    buf.write(f"# polylo {table} v{version} {desc}\n")
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
