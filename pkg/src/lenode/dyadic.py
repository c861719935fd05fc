"""Exact dyadic rationals ``m / 2**n``.

Every value the interpreter produces is a :class:`Dyadic`.  Instances are
immutable and always canonical: either the exponent is 0 or the mantissa is
odd, so equal values have equal representations.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral, Rational

__all__ = [
    "Dyadic",
    "LT",
    "EQ",
    "GT",
    "dy_add",
    "dy_sub",
    "dy_mul",
    "dy_neg",
    "dy_div2",
    "dy_round",
    "dy_cmp",
    "as_dyadic",
    "parse_dyadic",
    "bit_length",
]

LT, EQ, GT = -1, 0, 1


class Dyadic:
    __slots__ = ("_m", "_e")

    def __new__(cls, mantissa: int = 0, exponent: int = 0) -> "Dyadic":
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        return _make(int(mantissa), int(exponent))

    @property
    def mantissa(self) -> int:
        return self._m

    @property
    def exponent(self) -> int:
        return self._e

    @classmethod
    def from_fraction(cls, q: Rational) -> "Dyadic":
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self._m, 1 << self._e)

    def is_integer(self) -> bool:
        return self._e == 0

    def floor(self) -> int:
        return self._m >> self._e

    def ceil(self) -> int:
        return -((-self._m) >> self._e)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        a, b = self._e, other._e
        if a == b:
            return _make(self._m + other._m, a)
        if a > b:
            return _make(self._m + (other._m << (a - b)), a)
        return _make((self._m << (b - a)) + other._m, b)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        a, b = self._e, other._e
        if a == b:
            return _make(self._m - other._m, a)
        if a > b:
            return _make(self._m - (other._m << (a - b)), a)
        return _make((self._m << (b - a)) - other._m, b)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return _make(self._m * other._m, self._e + other._e)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return _new(-self._m, self._e)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self._m), self._e)

    def half(self) -> "Dyadic":
        if self._m & 1 or not self._m:
            return _new(self._m, self._e + 1) if self._m else self
        return _new(self._m >> 1, self._e)

    def scale2(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` (``k`` may be negative)."""
        if k >= 0:
            return Dyadic(self._m << k, self._e)
        return Dyadic(self._m, self._e - k)

    # comparison -----------------------------------------------------------

    def _cmp(self, other: "Dyadic") -> int:
        ea, eb = self._e, other._e
        a, b = self._m, other._m
        if ea > eb:
            b <<= ea - eb
        elif eb > ea:
            a <<= eb - ea
        return (a > b) - (a < b)

    def __eq__(self, other):
        if type(other) is Dyadic:
            return self._m == other._m and self._e == other._e
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._m == other._m and self._e == other._e

    def __lt__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self._cmp(other) < 0

    def __le__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self._cmp(other) > 0

    def __ge__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self._cmp(other) >= 0

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __bool__(self) -> bool:
        return self._m != 0

    def __int__(self) -> int:
        if self._e:
            raise ValueError(f"{self} is not an integer")
        return self._m

    def __float__(self) -> float:
        return float(self.to_fraction())

    # rendering ------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Dyadic({self._m}, {self._e})"

    def __str__(self) -> str:
        if self._e == 0:
            return str(self._m)
        return f"{self._m}/2^{self._e}"

    def decimal(self) -> str:
        """Exact decimal rendering; terminates because ``2**-n`` has ``n`` digits."""
        if self._e == 0:
            return str(self._m)
        sign = "-" if self._m < 0 else ""
        digits = str(abs(self._m) * 5**self._e).rjust(self._e + 1, "0")
        return f"{sign}{digits[:-self._e]}.{digits[-self._e:]}"


_obj_new = object.__new__


def _new(m: int, e: int) -> Dyadic:
    # caller guarantees canonical form
    self = _obj_new(Dyadic)
    self._m = m
    self._e = e
    return self


def _make(m: int, e: int) -> Dyadic:
    if e == 0 or m & 1:
        return _new(m, e)
    if m == 0:
        return _new(0, 0)
    # strip common factors of two
    shift = min((m & -m).bit_length() - 1, e)
    return _new(m >> shift, e - shift)


def _coerce(x):
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, Integral):
        return Dyadic(int(x))
    if isinstance(x, Rational):
        try:
            return Dyadic.from_fraction(x)
        except ValueError:
            return NotImplemented
    return NotImplemented


def as_dyadic(x) -> Dyadic:
    """Convert ints, dyadic fractions and literal strings to :class:`Dyadic`."""
    if isinstance(x, str):
        return parse_dyadic(x)
    d = _coerce(x)
    if d is NotImplemented:
        raise TypeError(f"cannot convert {x!r} to Dyadic")
    return d


_FRAC_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")
_DEC_RE = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)\s*$")


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``m/2^n``, an integer, or an exactly dyadic decimal like ``5.5``."""
    m = _FRAC_RE.match(text)
    if m:
        return Dyadic(int(m.group(1)), int(m.group(2)))
    if _DEC_RE.match(text):
        q = Fraction(text.strip())
        try:
            return Dyadic.from_fraction(q)
        except ValueError:
            raise ValueError(f"{text!r} is not an exact dyadic literal") from None
    raise ValueError(f"malformed dyadic literal {text!r}")


def bit_length(n: int) -> int:
    """Length of the binary representation of ``n >= 0``; ``bit_length(0) == 0``."""
    if n < 0:
        raise ValueError("length is defined on naturals only")
    return int(n).bit_length()


# functional surface ---------------------------------------------------------


def dy_add(a: Dyadic, b: Dyadic) -> Dyadic:
    return as_dyadic(a) + as_dyadic(b)


def dy_sub(a: Dyadic, b: Dyadic) -> Dyadic:
    return as_dyadic(a) - as_dyadic(b)


def dy_mul(a: Dyadic, b: Dyadic) -> Dyadic:
    return as_dyadic(a) * as_dyadic(b)


def dy_neg(a: Dyadic) -> Dyadic:
    return -as_dyadic(a)


def dy_div2(a: Dyadic) -> Dyadic:
    return as_dyadic(a).half()


def dy_round(a: Dyadic, n: int) -> Dyadic:
    """Round to the nearest multiple of ``2**-n``, ties to even mantissa.

    The result has exponent at most ``n`` and lies within ``2**-(n+1)`` of
    ``a``, which is inside the ``2**-n`` contract callers rely on.
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    a = as_dyadic(a)
    if a.exponent <= n:
        return a
    shift = a.exponent - n
    q, r = divmod(a.mantissa, 1 << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return Dyadic(q, n)


def dy_cmp(a: Dyadic, b: Dyadic) -> int:
    """Return ``LT``, ``EQ`` or ``GT``."""
    return as_dyadic(a)._cmp(as_dyadic(b))
