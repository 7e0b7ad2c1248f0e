"""Command-line entry point.

Exit codes: 0 success, 1 a property check failed or a tester rejected,
2 bad input (unreadable file, malformed JSON, invalid parameters, cap hit).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, List, Optional, Sequence

from . import __version__
from .anticoncentration import (
    OutcomeCapError,
    exact_distribution,
    linear_max_point_probability,
    max_point_probability,
    monte_carlo_point_probability,
)
from .constructions import (
    make_corner_matrix,
    make_counterexample,
    make_power_sum,
    make_random_low_rank,
    make_random_rank1_tensor,
)
from .experiments import format_csv, run_experiment_scaling, run_tester_roc
from .gap import CoverQuery, count_Z_V, gap_contains, gap_volume, minimal_cover
from .io import dump_json, read_gap, read_matrix, read_polynomial, read_tensor, read_values
from .linalg import DimensionError, det, rank
from .polynomial import RandomModel
from .repair import RepairError, RankBoundError, fix_symmetry, low_rank_approx, symmetric_low_rank_repair, \
    tensor_repair_report
from .scalar import format_scalar, parse_scalar
from .submatrices import EnumerationCapError, singular_fraction
from .tensor import AxisPartition, collapse, flatten, is_reducible
from .testers import TesterConfig, matrix_rank_tester, tensor_reducibility_tester

__all__ = ["main", "build_parser"]


class InputError(Exception):
    pass


def _emit(args, obj: Any) -> None:
    dump_json(obj, args.out)


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _scalars(text: str) -> List[Any]:
    return [parse_scalar(x) for x in text.replace(" ", "").split(",") if x]


# ---------------------------------------------------------------- handlers

def cmd_rank(args) -> int:
    _emit(args, {"rank": rank(read_matrix(args.file))})
    return 0


def cmd_det(args) -> int:
    M = read_matrix(args.file)
    if not M.is_square():
        raise InputError("det needs a square matrix")
    _emit(args, {"det": format_scalar(det(M))})
    return 0


def cmd_singular_fraction(args) -> int:
    M = read_matrix(args.file)
    s = singular_fraction(M, args.r, args.mode, samples=args.samples, seed=args.seed, cap=args.cap)
    out = {"r": s.r, "mode": s.mode, "total": s.total, "nonsingular": s.nonsingular,
           "singular_fraction": s.singular_fraction, "nonsingular_fraction": s.fraction}
    if s.mode == "sampled":
        out.update(seed=s.seed, confidence=s.confidence, interval=list(s.interval))
    _emit(args, out)
    return 0


def cmd_tensor(args) -> int:
    T = read_tensor(args.file)
    if args.action == "reducible":
        P = is_reducible(T)
        _emit(args, {"reducible": P is not None, "partition": None if P is None else str(P)})
        return 0 if P is not None else 1
    if args.action == "flatten":
        if not args.partition:
            raise InputError("--partition is required")
        P = AxisPartition.parse(args.partition)
        _emit(args, flatten(T, P))
        return 0
    if args.x is None:
        raise InputError("--x is required")
    _emit(args, collapse(T, _scalars(args.x)))
    return 0


def cmd_test(args) -> int:
    cfg = TesterConfig(args.samples, args.seed, Fraction(args.eps), args.side,
                       None if args.threshold is None else Fraction(args.threshold))
    if args.kind == "tensor":
        v = tensor_reducibility_tester(read_tensor(args.file), cfg)
    else:
        if args.r is None:
            raise InputError("--r is required")
        v = matrix_rank_tester(read_matrix(args.file), args.r, cfg)
    _emit(args, v)
    return 0 if v.accept else 1


def cmd_repair(args) -> int:
    if args.kind == "tensor":
        res, diag = tensor_repair_report(read_tensor(args.file), Fraction(args.eps), args.seed)
        if res is None:
            _emit(args, {"repaired": False, "diagnostics": diag})
            return 1
        _emit(args, res)
        return 0
    A = read_matrix(args.file)
    if args.r is None:
        raise InputError("--r is required")
    try:
        if args.kind == "sym-low-rank":
            res = symmetric_low_rank_repair(A, args.r, cap=args.cap, seed=args.seed)
        elif args.kind == "low-rank":
            res = low_rank_approx(A, args.r, cap=args.cap, seed=args.seed)
        else:
            res = fix_symmetry(A, args.r, cap=args.cap)
    except RepairError as e:
        _emit(args, {"repaired": False, "error": str(e)})
        return 1
    _emit(args, res)
    return 0


def cmd_anticonc(args) -> int:
    f = read_polynomial(args.poly)
    shifts = _scalars(args.shifts) if args.shifts else None
    model = RandomModel.named(args.model, f.n_vars, shifts)
    if model.n != f.n_vars:
        raise InputError("shift count must equal the number of variables")
    if args.mc:
        z = parse_scalar(args.z) if args.z is not None else 0
        rep = monte_carlo_point_probability(f, z, model, args.samples, args.seed)
        _emit(args, {"mode": "mc", "z": format_scalar(rep.z), "hits": rep.hits, "samples": rep.samples,
                     "estimate": rep.estimate, "seed": rep.seed, "confidence": rep.confidence,
                     "interval": list(rep.interval)})
        return 0
    if f.is_linear() and args.z is None:
        coeffs, c = f.linear_coefficients()
        rep = linear_max_point_probability(coeffs, model, cap=args.cap)
        out = {"mode": "exact", "z": format_scalar(rep.z + c if c else rep.z), "probability": rep.probability,
               "support_size": rep.support_size}
    else:
        rep = max_point_probability(f, model, cap=args.cap)
        out = {"mode": "exact", "z": format_scalar(rep.z), "probability": rep.probability, "support_size": rep.support_size}
        if args.z is not None:
            z = parse_scalar(args.z)
            dist = exact_distribution(f, model, cap=args.cap)
            out["query"] = {"z": format_scalar(z), "probability": dist.get(z, Fraction(0))}
    _emit(args, out)
    return 0


def cmd_gap(args) -> int:
    if args.action == "cover":
        if not args.values:
            raise InputError("--values is required")
        q = CoverQuery(tuple(read_values(args.values)), args.rank, args.outliers, args.bound, args.volume_cap)
        res = minimal_cover(q, cap=args.cap)
        _emit(args, {"found": False} if res is None else dict(found=True, **res.to_json()))
        return 0
    if args.action == "count":
        _emit(args, {"r": args.r, "m": args.m, "V": args.V, "count": count_Z_V(args.r, args.m, args.V, cap=args.cap)})
        return 0
    if not args.gap:
        raise InputError("--gap is required")
    g = read_gap(args.gap)
    if args.action == "volume":
        _emit(args, {"volume": gap_volume(g)})
        return 0
    if args.u is None:
        raise InputError("--u is required")
    _emit(args, {"contains": gap_contains(g, _scalars(args.u), cap=args.cap)})
    return 0


def cmd_gen(args) -> int:
    k = args.kind
    if k == "counterexample":
        obj = make_counterexample(args.n, args.d, args.part_size)
    elif k == "corner":
        obj = make_corner_matrix(args.n, args.ell)
    elif k == "rank1-tensor":
        if not args.dims:
            raise InputError("--dims is required")
        obj = make_random_rank1_tensor(_ints(args.dims), args.seed, args.corrupt)
    elif k == "low-rank":
        obj = make_random_low_rank(args.n, args.r, args.seed, args.corrupt, args.symmetric)
    else:
        obj = make_power_sum(args.n, args.d)
    _emit(args, obj)
    return 0


def cmd_experiment(args) -> int:
    if args.kind == "scaling":
        params = {"kind": args.family, "n_list": args.n_list, "d": args.d, "model": args.model,
                  "mode": args.mode, "seed": args.seed, "samples": args.samples, "r": args.r, "z": args.z}
        if args.part_size is not None:
            params["part_size"] = args.part_size
        rows = run_experiment_scaling(args.family, _ints(args.n_list), args.d, args.model, args.mode, args.seed,
                                      r=args.r, z=parse_scalar(args.z), samples=args.samples, cap=args.cap,
                                      part_size=args.part_size, wall_time=args.wall_time)
        text = format_csv("scaling", rows, params, args.wall_time)
    else:
        params = {"dims": args.dims, "eps": args.eps, "samples_list": args.samples_list, "trials": args.trials,
                  "seed": args.seed, "corrupt_fraction": args.corrupt_fraction}
        rows = run_tester_roc(_ints(args.dims), Fraction(args.eps), _ints(args.samples_list), args.trials,
                              args.seed, corrupt_fraction=Fraction(args.corrupt_fraction), wall_time=args.wall_time)
        text = format_csv("roc", rows, params, args.wall_time)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed")
    common.add_argument("--cap", type=int, default=None, help="override the enumeration cap")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="polylo", description="Exact tools for low-rank structure and "
                                "anticoncentration of polynomials in random signs.")
    p.add_argument("--version", action="version", version=f"polylo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rank", parents=[common], help="exact matrix rank")
    s.add_argument("file")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("det", parents=[common], help="exact determinant")
    s.add_argument("file")
    s.set_defaults(func=cmd_det)

    s = sub.add_parser("singular-fraction", parents=[common], help="fraction of singular r x r submatrices")
    s.add_argument("file")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_singular_fraction)

    s = sub.add_parser("tensor", parents=[common], help="reducibility, flattening, collapse")
    s.add_argument("action", choices=["reducible", "flatten", "collapse"])
    s.add_argument("file")
    s.add_argument("--partition", help='1-based axis split such as "1|2,3"')
    s.add_argument("--x", help='comma-separated vector for the last axis, e.g. "1,-1"')
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("test", parents=[common], help="sampling testers (exit 1 on reject)")
    s.add_argument("kind", choices=["tensor", "matrix"])
    s.add_argument("file")
    s.add_argument("--eps", default="1/4")
    s.add_argument("--samples", type=int, default=400)
    s.add_argument("--r", type=int)
    s.add_argument("--side", type=int)
    s.add_argument("--threshold")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("repair", parents=[common], help="repair to low rank or reducibility")
    s.add_argument("kind", choices=["sym-low-rank", "low-rank", "fix-symmetry", "tensor"])
    s.add_argument("file")
    s.add_argument("--r", type=int, help="rank bound (q for fix-symmetry)")
    s.add_argument("--eps", default="1/10")
    s.set_defaults(func=cmd_repair)

    s = sub.add_parser("anticonc", parents=[common], help="point probabilities of a polynomial")
    s.add_argument("--poly", required=True)
    s.add_argument("--model", choices=["rademacher", "lazy", "shifted"], default="rademacher")
    s.add_argument("--shifts", help="comma-separated shifts for the shifted model")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--mc", action="store_true")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--z")
    s.set_defaults(func=cmd_anticonc)

    s = sub.add_parser("gap", parents=[common], help="symmetric GAP tools")
    s.add_argument("action", choices=["cover", "contains", "volume", "count"])
    s.add_argument("--values")
    s.add_argument("--rank", type=int, default=1)
    s.add_argument("--outliers", type=int, default=0)
    s.add_argument("--bound", type=int, default=4, help="largest divisor used for candidate generators")
    s.add_argument("--volume-cap", type=int, default=10_000)
    s.add_argument("--gap")
    s.add_argument("--u", help="comma-separated ambient vector")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--V", type=int, default=1)
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("gen", parents=[common], help="generate constructions as JSON")
    s.add_argument("kind", choices=["counterexample", "corner", "rank1-tensor", "low-rank", "power-sum"])
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--part-size", type=int)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--dims")
    s.add_argument("--corrupt", type=int, default=0)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--symmetric", action="store_true")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("experiment", parents=[common], help="CSV scaling and ROC tables")
    s.add_argument("kind", choices=["scaling", "roc"])
    s.add_argument("--family", choices=["counterexample", "power_sum", "random_quadratic_rank"],
                   default="counterexample")
    s.add_argument("--n-list", default="8,16,24")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--model", choices=["rademacher", "lazy"], default="rademacher")
    s.add_argument("--mode", choices=["auto", "exact", "mc"], default="auto")
    s.add_argument("--z", default="0")
    s.add_argument("--part-size", type=int, help="counterexample block size (default 2*floor(n/4d))")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--dims", default="6,6,6")
    s.add_argument("--eps", default="1/4")
    s.add_argument("--samples-list", default="10,50,100,400")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--corrupt-fraction", default="1/4")
    s.add_argument("--wall-time", action="store_true", help="add a wall_time column (breaks bit-exactness)")
    s.set_defaults(func=cmd_experiment)
    return p


_INPUT_ERRORS = (InputError, ValueError, TypeError, KeyError, IndexError, ZeroDivisionError, OSError,
                 json.JSONDecodeError, DimensionError, EnumerationCapError, OutcomeCapError, RankBoundError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return args.func(args)
    except _INPUT_ERRORS as e:
        print(f"polylo: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
