"""JSON readers and writers for the on-disk formats.

matrix      {"rows": R, "cols": C, "entries": [scalar, ...]}        row-major
tensor      {"dims": [...], "entries": [scalar, ...]}               row-major
polynomial  {"n": n, "terms": [{"exps": {"1": 1, "3": 2}, "coef": scalar}]}
gap         {"generators": [[scalar, ...], ...], "bounds": [N, ...]}
values      [scalar or [scalar, ...], ...]

A scalar is "p/q" (or an integer) when real and {"re": "p/q", "im": "r/s"}
otherwise.  Variable keys and reported indices are 1-based.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Any, List, Optional

from .gap import SymmetricGAP
from .linalg import Matrix
from .polynomial import PolynomialSpec
from .scalar import GaussianRational, format_scalar, parse_scalar
from .tensor import Tensor

__all__ = ["load_json", "dump_json", "to_plain", "read_matrix", "read_tensor", "read_polynomial",
           "read_gap", "read_values"]


def load_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def to_plain(x: Any) -> Any:
    """Recursively turn exact scalars and result objects into JSON-ready values."""
    if hasattr(x, "to_json"):
        return to_plain(x.to_json())
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (Fraction, GaussianRational)):
        return format_scalar(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    return str(x)


def dump_json(obj: Any, path: Optional[str] = None) -> None:
    text = json.dumps(to_plain(obj), indent=2, sort_keys=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def read_matrix(path: str) -> Matrix:
    return Matrix.from_json(load_json(path))


def read_tensor(path: str) -> Tensor:
    return Tensor.from_json(load_json(path))


def read_polynomial(path: str) -> PolynomialSpec:
    return PolynomialSpec.from_json(load_json(path))


def read_gap(path: str) -> SymmetricGAP:
    return SymmetricGAP.from_json(load_json(path))


def read_values(path: str) -> List[Any]:
    raw = load_json(path)
    if not isinstance(raw, list):
        raise ValueError("values file must hold a JSON list")
    return [[parse_scalar(y) for y in v] if isinstance(v, list) else parse_scalar(v) for v in raw]
