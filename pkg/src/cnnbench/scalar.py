"""Exact arithmetic over the field Q[sqrt(3)].

Every quantity inside the engine and the certificate monitor is a
``Scalar``: a value a + b*sqrt(3) with rational a, b.  The field is closed
under all arithmetic the algorithms perform (the only irrational constant
anywhere is sqrt(3)), so equality tests are exact and no tolerances exist
below the reporting layer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

__all__ = ["Scalar", "SQRT3", "ZERO", "ONE", "scalar_from_json", "scalar_to_json"]

_Rat = int | Fraction

# sqrt(3) to 192 fractional bits; enough that float(...) is within 1 ulp.
_SQRT3_APPROX = Fraction(math.isqrt(3 << 384), 1 << 192)


@total_ordering
class Scalar:
    """a + b*sqrt(3) with Fraction coefficients, immutable and hashable."""

    __slots__ = ("a", "b")

    def __init__(self, a: _Rat | "Scalar" = 0, b: _Rat = 0):
        if isinstance(a, Scalar):
            if b:
                raise TypeError("cannot combine Scalar with extra sqrt(3) part")
            object.__setattr__(self, "a", a.a)
            object.__setattr__(self, "b", a.b)
            return
        if type(a) is not Fraction:
            a = Fraction(a)
        if type(b) is not Fraction:
            b = Fraction(b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def sqrt3(cls) -> "Scalar":
        return cls(0, 1)

    @classmethod
    def coerce(cls, x: "Scalar | _Rat") -> "Scalar":
        return x if isinstance(x, Scalar) else cls(x)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = Scalar.coerce(other)
        return Scalar(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = Scalar.coerce(other)
        return Scalar(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __neg__(self):
        return Scalar(-self.a, -self.b)

    def __mul__(self, other):
        other = Scalar.coerce(other)
        return Scalar(
            self.a * other.a + 3 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        # rationalize: 1/(c + d*r3) = (c - d*r3)/(c^2 - 3 d^2)
        norm = other.a * other.a - 3 * other.b * other.b
        if norm == 0:
            raise ZeroDivisionError("division by zero Scalar")
        return self * Scalar(other.a / norm, -other.b / norm)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact ordering -------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(3), no floating point."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 3 b^2; the larger magnitude wins
        diff = self.a * self.a - 3 * self.b * self.b
        if diff == 0:
            return 0  # unreachable: sqrt(3) is irrational
        return sa if diff > 0 else sb

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = Scalar.coerce(other)
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __lt__(self, other):
        return (self - Scalar.coerce(other)).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- reporting ------------------------------------------------------------

    def __float__(self):
        return float(self.a + self.b * _SQRT3_APPROX)

    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"Scalar({self.a!r}, {self.b!r})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt3"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*sqrt3"


SQRT3 = Scalar(0, 1)
ZERO = Scalar(0)
ONE = Scalar(1)


def to_float(s: Scalar) -> float:
    return float(s)


# -- JSON codec ----------------------------------------------------------------
#
# Canonical encoding: {"a": [num, den], "b": [num, den]} with the integers as
# decimal strings (arbitrary precision survives any JSON parser).  Accepted on
# input in addition: plain integers, decimal strings ("0.5" -> 1/2), bare
# [num, den] pairs, and objects with a missing "b" (taken as 0).


class ScalarParseError(ValueError):
    pass


def _fraction_from_json(v, where: str) -> Fraction:
    if isinstance(v, bool):
        raise ScalarParseError(f"{where}: booleans are not numbers")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)  # accepts "3", "-2/7" and decimal "0.25"
        except (ValueError, ZeroDivisionError) as e:
            raise ScalarParseError(f"{where}: bad rational literal {v!r}") from e
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ScalarParseError(f"{where}: [num, den] pair expected")
        num = _fraction_from_json(v[0], where + "[0]")
        den = _fraction_from_json(v[1], where + "[1]")
        if den == 0:
            raise ScalarParseError(f"{where}: zero denominator")
        return num / den
    if isinstance(v, float):
        # floats in input files are rejected: they are almost never what the
        # exact layer wants.  Decimal strings are the sanctioned spelling.
        raise ScalarParseError(
            f"{where}: float literal {v!r}; use a decimal string instead"
        )
    raise ScalarParseError(f"{where}: cannot interpret {type(v).__name__} as rational")


def scalar_from_json(v, where: str = "scalar") -> Scalar:
    if isinstance(v, dict):
        extra = set(v) - {"a", "b"}
        if extra:
            raise ScalarParseError(f"{where}: unexpected keys {sorted(extra)}")
        a = _fraction_from_json(v["a"], where + ".a") if "a" in v else Fraction(0)
        b = _fraction_from_json(v["b"], where + ".b") if "b" in v else Fraction(0)
        return Scalar(a, b)
    return Scalar(_fraction_from_json(v, where))


def scalar_to_json(s: Scalar) -> dict:
    return {
        "a": [str(s.a.numerator), str(s.a.denominator)],
        "b": [str(s.b.numerator), str(s.b.denominator)],
    }
