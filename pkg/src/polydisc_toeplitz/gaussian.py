"""Exact Gaussian rationals, a + b i with a, b in Q.

Literal grammar (JSON and command line)::

    [-]a[/b][(+|-)c[/d]i]      e.g.  3/4-1/2i,  2,  i,  -i,  1+i,  5/2i

Only integers and fractions are accepted; decimal literals belong to the
floating path and are rejected by :func:`parse_gaussian`.
"""

from __future__ import annotations

import re
from fractions import Fraction

__all__ = ["GaussianRational", "parse_gaussian", "ZERO", "ONE", "I"]

_RAT = r"\d+(?:/\d+)?"
_FULL = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?"
    rf"(?:(?P<isign>[+-])?(?P<im>{_RAT})?(?P<unit>i))?$"
)


def _frac(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


class GaussianRational:
    """Immutable complex number with exact rational parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        if isinstance(real, GaussianRational):
            if imag:
                raise TypeError("imag must be zero when copying a GaussianRational")
            real, imag = real.real, real.imag
        if isinstance(real, float) or isinstance(imag, float):
            raise TypeError("floats are not accepted on the exact path")
        object.__setattr__(self, "real", Fraction(real))
        object.__setattr__(self, "imag", Fraction(imag))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return parse_gaussian(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")

    # arithmetic
    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        den = o.abs2()
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.real / den, num.imag / den)

    def __rtruediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (ONE / self) ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.real, -self.imag)

    def abs2(self) -> Fraction:
        """|z|^2, exact."""
        return self.real * self.real + self.imag * self.imag

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self) -> complex:
        return complex(float(self.real), float(self.imag))

    def __bool__(self) -> bool:
        return bool(self.real) or bool(self.imag)

    def __eq__(self, other):
        o = _maybe(other)
        # never equal to floats: exact and floating constants must not alias in caches
        if o is None:
            return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re_, im = self.real, self.imag
        if im == 0:
            return _fmt(re_)
        if im == 1:
            im_s = "i"
        elif im == -1:
            im_s = "-i"
        else:
            im_s = f"{_fmt(im)}i"
        if re_ == 0:
            return im_s
        sign = "" if im_s.startswith("-") else "+"
        return f"{_fmt(re_)}{sign}{im_s}"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _maybe(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussianRational(value)
    return None


def parse_gaussian(text: str) -> GaussianRational:
    """Parse a Gaussian-rational literal exactly.

    >>> str(parse_gaussian("3/4-1/2i"))
    '3/4-1/2i'
    >>> parse_gaussian("i") == GaussianRational(0, 1)
    True
    """
    s = text.strip().replace(" ", "")
    m = _FULL.match(s)
    if not s or m is None:
        raise ValueError(f"not a Gaussian-rational literal: {text!r}")
    re_txt, isign, im_txt, unit = m.group("re", "isign", "im", "unit")
    if unit is None:
        if re_txt is None:
            raise ValueError(f"not a Gaussian-rational literal: {text!r}")
        return GaussianRational(_frac(re_txt.lstrip("+")))
    if re_txt is not None and isign is None:
        # "3i" is matched as re="3", unit="i"; "-3i" likewise
        if im_txt is not None:
            raise ValueError(f"not a Gaussian-rational literal: {text!r}")
        sign = -1 if re_txt.startswith("-") else 1
        return GaussianRational(0, sign * _frac(re_txt.lstrip("+-")))
    im = _frac(im_txt) if im_txt else Fraction(1)
    if isign == "-":
        im = -im
    real = _frac(re_txt.lstrip("+")) if re_txt else Fraction(0)
    return GaussianRational(real, im)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
