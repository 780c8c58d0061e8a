"""Exact arithmetic in the quadratic field Q(sqrt 2)."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

SQRT2_SYMBOL = "√2"

_RATIONAL = r"\d+(?:/\d+)?"
# after normalization: optional rational term, then an optional sqrt(2) term;
# a rational term must end at a sign or the end of the string
_SCALAR_RE = re.compile(
    rf"(?P<a>[+-]?{_RATIONAL}(?=[+-]|$))?"
    rf"(?:(?P<b_sign>[+-])?(?P<b>{_RATIONAL})?\*?√2)?"
)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Scalar:
    """An element ``a + b*sqrt(2)`` with rational ``a`` and ``b``.

    Instances are immutable and hashable. Plain ints and Fractions are
    coerced on the fly, so ``Scalar(1, 1) * 2`` works as expected.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, str):
            return cls.parse(x)
        return cls(_frac(x), 0)

    @classmethod
    def parse(cls, text: str) -> Scalar:
        """Parse strings such as ``"3"``, ``"-1/2"``, ``"√2"``, ``"1-2/3√2"``.

        ``sqrt2`` and ``sqrt(2)`` are accepted as ASCII spellings of ``√2``.
        """
        s = re.sub(r"\s*([+*-])\s*", r"\1", text.strip())
        s = s.replace("sqrt(2)", SQRT2_SYMBOL).replace("sqrt2", SQRT2_SYMBOL)
        m = _SCALAR_RE.fullmatch(s)
        has_b = SQRT2_SYMBOL in s
        if not s or m is None or (m.group("a") and has_b and not m.group("b_sign")):
            raise ValueError(f"malformed scalar literal {text!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if has_b:
            b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
            if m.group("b_sign") == "-":
                b = -b
        return cls(a, b)

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- field operations ---------------------------------------------

    def __add__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(-self.a, -self.b)

    def __pos__(self) -> Scalar:
        return self

    def __sub__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> Scalar:
        """Galois conjugate ``a - b*sqrt(2)``."""
        return Scalar(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self) -> Scalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(√2)")
        return Scalar(self.a / n, -self.b / n)

    def __truediv__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> Scalar:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Scalar(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- ordering (real embedding with sqrt(2) > 0) ---------------------

    def sign(self) -> int:
        """Exact sign of the real number ``a + b*sqrt(2)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        d = self.a * self.a - 2 * self.b * self.b
        return sa if d > 0 else sb

    def __lt__(self, other):
        return (self - Scalar.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - Scalar.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - Scalar.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - Scalar.coerce(other)).sign() >= 0

    def __abs__(self) -> Scalar:
        return -self if self.sign() < 0 else self

    # -- comparisons, hashing, conversion -------------------------------

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __complex__(self) -> complex:
        return complex(float(self))

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        bmag = abs(self.b)
        broot = SQRT2_SYMBOL if bmag == 1 else f"{bmag}{SQRT2_SYMBOL}"
        if self.a == 0:
            return broot if self.b > 0 else f"-{broot}"
        return f"{self.a}{'+' if self.b > 0 else '-'}{broot}"

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    def denominator_lcm(self) -> int:
        return math.lcm(self.a.denominator, self.b.denominator)


ZERO = Scalar(0)
ONE = Scalar(1)
SQRT2 = Scalar(0, 1)


def as_scalar(x) -> Scalar:
    return Scalar.coerce(x)
