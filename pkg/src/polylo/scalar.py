"""Exact scalars: rationals and Gaussian rationals.

Real values are kept as plain ``int`` or :class:`fractions.Fraction` so the hot
paths stay on native Python numbers.  Values with a nonzero imaginary part are
:class:`GaussianRational` instances; any arithmetic that cancels the imaginary
part demotes the result back to a real value.  With that convention equality
and hashing are structural: ``2``, ``Fraction(4, 2)`` and ``GaussianRational(2)``
all end up as the same canonical object.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Any, Tuple, Union

__all__ = [
    "GaussianRational",
    "Scalar",
    "to_scalar",
    "real_part",
    "imag_part",
    "is_real",
    "scalar_key",
    "format_scalar",
    "parse_scalar",
    "conjugate",
]


def _frac(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _demote(re: Fraction, im: Fraction):
    if im == 0:
        return re.numerator if re.denominator == 1 else re
    return GaussianRational._raw(re, im)


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with a nonzero imaginary part.

    Use :func:`to_scalar` or :meth:`GaussianRational.make` to construct values;
    they return a plain rational when the imaginary part vanishes.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @staticmethod
    def make(re: Any = 0, im: Any = 0) -> "Scalar":
        return _demote(_frac(re), _frac(im))

    # numerator and denominator views
    @property
    def re_num(self) -> int:
        return self.re.numerator

    @property
    def re_den(self) -> int:
        return self.re.denominator

    @property
    def im_num(self) -> int:
        return self.im.numerator

    @property
    def im_den(self) -> int:
        return self.im.denominator

    def conjugate(self) -> "Scalar":
        return _demote(self.re, -self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        sign = "+" if self.im >= 0 else "-"
        return f"{_fmt_frac(self.re)}{sign}{_fmt_frac(abs(self.im))}i"

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __neg__(self) -> "Scalar":
        return _demote(-self.re, -self.im)

    def __pos__(self) -> "GaussianRational":
        return self

    @staticmethod
    def _parts(x: Any) -> Tuple[Fraction, Fraction]:
        if isinstance(x, GaussianRational):
            return x.re, x.im
        if isinstance(x, (int, Fraction)):
            return Fraction(x), Fraction(0)
        raise TypeError

    def __add__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return _demote(self.re + a, self.im + b)

    __radd__ = __add__

    def __sub__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return _demote(self.re - a, self.im - b)

    def __rsub__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return _demote(a - self.re, b - self.im)

    def __mul__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        return _demote(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        den = a * a + b * b
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return _demote((self.re * a + self.im * b) / den, (self.im * a - self.re * b) / den)

    def __rtruediv__(self, other: Any):
        try:
            a, b = self._parts(other)
        except TypeError:
            return NotImplemented
        den = self.re * self.re + self.im * self.im
        return _demote((a * self.re + b * self.im) / den, (b * self.re - a * self.im) / den)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return 1 / (self ** (-e))
        result: Any = 1
        base: Any = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


Scalar = Union[int, Fraction, GaussianRational]


def to_scalar(x: Any) -> Scalar:
    """Coerce ``x`` to a canonical exact scalar.

    Accepts ints, Fractions, GaussianRationals, strings like ``"3/4"``, pairs
    ``(re, im)``, dicts ``{"re": ..., "im": ...}`` and Python complex numbers
    with integral parts.  Floats are rejected.
    """
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, GaussianRational):
        return _demote(x.re, x.im)
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, dict):
        return GaussianRational.make(_frac(x.get("re", 0)), _frac(x.get("im", 0)))
    if isinstance(x, tuple) and len(x) == 2:
        return GaussianRational.make(x[0], x[1])
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise TypeError("non-integral complex literals are not exact; use (re, im)")
        return GaussianRational.make(int(x.real), int(x.imag))
    if isinstance(x, Rational):
        return to_scalar(Fraction(x))
    # numpy integer scalars
    if hasattr(x, "__index__"):
        return int(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def real_part(x: Scalar) -> Fraction:
    return x.re if isinstance(x, GaussianRational) else Fraction(x)


def imag_part(x: Scalar) -> Fraction:
    return x.im if isinstance(x, GaussianRational) else Fraction(0)


def is_real(x: Scalar) -> bool:
    return not isinstance(x, GaussianRational)


def conjugate(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, GaussianRational) else x


def scalar_key(x: Scalar) -> Tuple[Fraction, Fraction]:
    """Total order used for deterministic tie-breaks: lexicographic on (re, im)."""
    return real_part(x), imag_part(x)


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x: Scalar) -> Union[str, dict]:
    """Serialize as ``"p/q"`` (real) or ``{"re": "p/q", "im": "r/s"}``."""
    if isinstance(x, GaussianRational):
        return {"re": _fmt_frac(x.re), "im": _fmt_frac(x.im)}
    return _fmt_frac(Fraction(x))


def parse_scalar(s: Any) -> Scalar:
    if isinstance(s, str):
        return to_scalar(Fraction(s.strip()))
    return to_scalar(s)
