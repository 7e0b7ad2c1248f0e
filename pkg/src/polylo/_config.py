"""Enumeration caps.  Each default can be overridden by an environment variable."""

import os

__all__ = ["SUBMATRIX_CAP", "OUTCOME_CAP", "SUBTENSOR_CAP", "GAP_CAP", "get_cap"]


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


# number of r x r submatrices enumerated in exact mode
SUBMATRIX_CAP = _env_int("POLYLO_SUBMATRIX_CAP", 10**7)
# number of sign outcomes (2^n or 3^n) in exact distribution computations
OUTCOME_CAP = _env_int("POLYLO_OUTCOME_CAP", 2**24)
# number of subtensors enumerated in exact mode
SUBTENSOR_CAP = _env_int("POLYLO_SUBTENSOR_CAP", 2 * 10**6)
# size of coefficient boxes / candidate sets enumerated by the GAP module
GAP_CAP = _env_int("POLYLO_GAP_CAP", 10**6)

_CAPS = {
    "submatrix": "SUBMATRIX_CAP",
    "outcome": "OUTCOME_CAP",
    "subtensor": "SUBTENSOR_CAP",
    "gap": "GAP_CAP",
}


def get_cap(kind: str, override=None) -> int:
    if override is not None:
        return int(override)
    return globals()[_CAPS[kind]]
