"""Exact algebra for polynomial anticoncentration: low-rank repair, reducibility
testing, sign-polynomial distributions and symmetric GAPs."""

__version__ = "0.1.0"
