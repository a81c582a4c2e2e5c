"""Exact arithmetic in an imaginary quadratic field F = Q(sqrt(d)).

The splitting of the definite quaternion algebra is defined over such an F,
and F sits inside Q_p once p splits in it. Everything downstream of the
quotient graph (cocycles, Hecke matrices, moments) is exact in F.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .padic import DEFAULT_PREC, PadicElem, sqrt as padic_sqrt


class FieldElem:
    """a + b*sqrt(d) with a, b rational."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = -1):
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)
        self.d = d

    def _coerce(self, o):
        if isinstance(o, FieldElem):
            if o.d != self.d and o.b != 0 and self.b != 0:
                raise ValueError("elements of different fields")
            return o
        if isinstance(o, (int, Fraction)):
            return FieldElem(o, 0, self.d)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return FieldElem(self.a + o.a, self.b + o.b, _d(self, o))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(-self.a, -self.b, self.d)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return FieldElem(self.a - o.a, self.b - o.b, _d(self, o))

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return FieldElem(self.a * o, self.b * o, self.d)
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        d = _d(self, o)
        return FieldElem(self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conj(self) -> "FieldElem":
        return FieldElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "FieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(self.a / n, -self.b / n, self.d)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return FieldElem(self.a / o, self.b / o, self.d)
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = FieldElem(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        if isinstance(o, FieldElem):
            return self.a == o.a and self.b == o.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"

    def to_json(self):
        return [str(self.a), str(self.b)]


def _d(x: FieldElem, y: FieldElem) -> int:
    return x.d if x.b != 0 else y.d


def is_zero(x) -> bool:
    return x == 0


@lru_cache(maxsize=None)
def _root(p: int, d: int, prec: int) -> PadicElem:
    return padic_sqrt(PadicElem.from_rational(p, d, prec))


def embed(x, p: int, prec: int = DEFAULT_PREC) -> PadicElem:
    """Image of x in Q_p via the canonical branch of sqrt(d)."""
    if isinstance(x, FieldElem):
        if x.b == 0:
            return PadicElem.from_rational(p, x.a, prec)
        return PadicElem.from_rational(p, x.a, prec) + PadicElem.from_rational(p, x.b, prec) * _root(p, x.d, prec)
    return PadicElem.from_rational(p, Fraction(x), prec)
