"""Capped-precision arithmetic in Q_p and in the unramified quadratic extension Q_{p^2}.

A :class:`PadicElem` stores ``p^val * unit + O(p^(val + relprec))``. Zero carries
its absolute precision in ``val`` (``math.inf`` for an exact zero). Precision is
propagated pessimistically: a sum knows ``min`` of the absolute precisions, a
product ``min`` of the relative ones.

:class:`QuadElem` is ``a + b*w`` with ``w^2 = r``, ``r`` the smallest positive
quadratic non-residue mod p.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Union

DEFAULT_PREC = 40

INF = math.inf


class PadicError(ArithmeticError):
    pass


class PrecisionLoss(PadicError):
    pass


class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class NoSquareRoot(PadicError, ValueError):
    pass


class ExpDivergence(PadicError):
    pass


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_rational(x, p: int):
    x = Fraction(x)
    if x == 0:
        return INF
    return vp(x.numerator, p) - vp(x.denominator, p)


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod an odd prime p."""
    if p == 2:
        raise ValueError("p = 2 is not supported")
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"{p} is not an odd prime")


Rational = Union[int, Fraction]


class PadicElem:
    __slots__ = ("p", "val", "unit", "relprec")

    def __init__(self, p: int, val, unit: int, relprec: int):
        self.p = p
        self.val = val
        self.unit = unit
        self.relprec = relprec

    # ---- construction
    @classmethod
    def zero(cls, p: int, absprec=INF) -> "PadicElem":
        return cls(p, absprec, 0, 0)

    @classmethod
    def from_rational(cls, p: int, x, prec: int = DEFAULT_PREC, absprec=None) -> "PadicElem":
        """Embed a rational. ``prec`` is the relative precision cap; ``absprec`` an optional absolute one."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, INF if absprec is None else absprec)
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        rp = prec
        if absprec is not None:
            rp = min(rp, absprec - v)
            if rp <= 0:
                return cls.zero(p, absprec)
        mod = p ** rp
        return cls(p, v, num * pow(den, -1, mod) % mod, rp)

    @classmethod
    def _make(cls, p: int, v: int, s: int, absprec) -> "PadicElem":
        """Normalise p^v * s known modulo p^absprec (s any integer)."""
        if absprec == INF:
            raise PrecisionLoss("cannot build an inexact element without a precision cap")
        n = absprec - v
        if n <= 0:
            return cls.zero(p, absprec)
        s %= p ** n
        if s == 0:
            return cls.zero(p, absprec)
        k = 0
        while s % p == 0:
            s //= p
            k += 1
        return cls(p, v + k, s, n - k)

    def _coerce(self, other) -> "PadicElem":
        if isinstance(other, PadicElem):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicElem.from_rational(self.p, other, max(self.relprec, DEFAULT_PREC))
        return NotImplemented

    # ---- basic queries
    @property
    def absprec(self):
        return self.val + self.relprec

    @property
    def prec(self):
        return self.absprec

    def is_zero(self) -> bool:
        return self.relprec == 0

    def is_exact_zero(self) -> bool:
        return self.relprec == 0 and self.val == INF

    def valuation(self):
        return self.val

    def unit_part(self) -> "PadicElem":
        if self.is_zero():
            raise DivisionByZero("zero has no unit part")
        return PadicElem(self.p, 0, self.unit, self.relprec)

    def lift(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def lift_centered(self) -> Fraction:
        """Rational lift with the unit part taken in the symmetric range."""
        if self.is_zero():
            return Fraction(0)
        mod = self.p ** self.relprec
        u = self.unit if self.unit <= mod // 2 else self.unit - mod
        return Fraction(u) * Fraction(self.p) ** self.val

    def add_bigoh(self, absprec) -> "PadicElem":
        if absprec >= self.absprec:
            return self
        if self.is_zero():
            return PadicElem.zero(self.p, absprec)
        return PadicElem._make(self.p, self.val, self.unit, absprec)

    def residue(self) -> int:
        """Image in F_p of an integral element."""
        if self.is_zero() or self.val > 0:
            if self.absprec < 1:
                raise PrecisionLoss("residue not determined")
            return 0
        if self.val < 0:
            raise ValueError("not integral")
        return self.unit % self.p

    # ---- arithmetic
    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.p ** self.relprec
        return PadicElem(self.p, self.val, (-self.unit) % mod, self.relprec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        N = min(a.absprec, b.absprec)
        if a.is_zero():
            return b.add_bigoh(N) if not b.is_zero() else PadicElem.zero(a.p, N)
        if b.is_zero():
            return a.add_bigoh(N)
        v = min(a.val, b.val)
        s = a.unit * a.p ** (a.val - v) + b.unit * b.p ** (b.val - v)
        return PadicElem._make(a.p, v, s, N)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        if a.is_zero() or b.is_zero():
            if a.is_zero() and b.is_zero():
                return PadicElem.zero(a.p, a.val + b.val)
            z, o = (a, b) if a.is_zero() else (b, a)
            return PadicElem.zero(a.p, z.val + o.val)
        rp = min(a.relprec, b.relprec)
        mod = a.p ** rp
        return PadicElem(a.p, a.val + b.val, a.unit * b.unit % mod, rp)

    __rmul__ = __mul__

    def inverse(self) -> "PadicElem":
        if self.is_zero():
            raise DivisionByZero("element indistinguishable from zero")
        mod = self.p ** self.relprec
        return PadicElem(self.p, -self.val, pow(self.unit, -1, mod), self.relprec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return pow_s(self, k)
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_zero():
            if k == 0:
                return PadicElem.from_rational(self.p, 1)
            return PadicElem.zero(self.p, self.val * k)
        mod = self.p ** self.relprec
        return PadicElem(self.p, self.val * k, pow(self.unit, k, mod), self.relprec)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ValueError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"PadicElem({self})"

    def __str__(self):
        return render_padic(self)

    # convenience, so code can treat Q_p and Q_{p^2} uniformly
    def frobenius(self) -> "PadicElem":
        return self

    def norm(self) -> "PadicElem":
        return self * self

    def log(self):
        return log_iw(self)


class QuadElem:
    """a + b*w in Q_{p^2}, w^2 = r."""

    __slots__ = ("a", "b")

    def __init__(self, a: PadicElem, b: PadicElem):
        self.a = a
        self.b = b

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def r(self) -> int:
        return nonresidue(self.a.p)

    @classmethod
    def from_rationals(cls, p: int, a, b=0, prec: int = DEFAULT_PREC) -> "QuadElem":
        return cls(PadicElem.from_rational(p, a, prec), PadicElem.from_rational(p, b, prec))

    @classmethod
    def omega(cls, p: int, prec: int = DEFAULT_PREC) -> "QuadElem":
        return cls.from_rationals(p, 0, 1, prec)

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            return other
        if isinstance(other, PadicElem):
            return QuadElem(other, PadicElem.zero(other.p))
        if isinstance(other, (int, Fraction)):
            return QuadElem(PadicElem.from_rational(self.p, other), PadicElem.zero(self.p))
        return NotImplemented

    @property
    def absprec(self):
        return min(self.a.absprec, self.b.absprec)

    @property
    def prec(self):
        return self.absprec

    def valuation(self):
        return min(self.a.val, self.b.val)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def in_qp(self) -> bool:
        return self.b.is_zero()

    def add_bigoh(self, absprec) -> "QuadElem":
        return QuadElem(self.a.add_bigoh(absprec), self.b.add_bigoh(absprec))

    def __neg__(self):
        return QuadElem(-self.a, -self.b)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElem(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElem(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (PadicElem, int, Fraction)):
            return QuadElem(self.a * other, self.b * other)
        if not isinstance(other, QuadElem):
            return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        return QuadElem(a * c + b * d * self.r, a * d + b * c)

    __rmul__ = __mul__

    def frobenius(self) -> "QuadElem":
        return QuadElem(self.a, -self.b)

    def norm(self) -> PadicElem:
        return self.a * self.a - self.b * self.b * self.r

    def trace(self) -> PadicElem:
        return self.a + self.a

    def inverse(self) -> "QuadElem":
        if self.is_zero():
            raise DivisionByZero("element indistinguishable from zero")
        nm = self.norm()
        if nm.is_zero():
            raise PrecisionLoss("norm lost all digits")
        inv = nm.inverse()
        return QuadElem(self.a * inv, -self.b * inv)

    def __truediv__(self, other):
        if isinstance(other, (PadicElem, int, Fraction)):
            o = self.a._coerce(other)
            return QuadElem(self.a / o, self.b / o)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return pow_s(self, k)
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadElem.from_rationals(self.p, 1, 0, max(DEFAULT_PREC, self.relprec_estimate()))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def relprec_estimate(self) -> int:
        if self.is_zero():
            return 0
        return int(self.absprec - self.valuation())

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"QuadElem({self})"

    def __str__(self):
        return render_quad(self)

    def log(self):
        return log_iw(self)


Scalar = Union[PadicElem, QuadElem]


def to_quad(x, p: int) -> QuadElem:
    if isinstance(x, QuadElem):
        return x
    if isinstance(x, PadicElem):
        return QuadElem(x, PadicElem.zero(p))
    return QuadElem.from_rationals(p, Fraction(x))


def frobenius(x):
    return x.frobenius()


def norm(x):
    return x.norm()


# ---------------------------------------------------------------- transcendental

def _one_like(x):
    if isinstance(x, QuadElem):
        return QuadElem.from_rationals(x.p, 1, 0, int(min(x.absprec, 10 ** 6)) + 5)
    return PadicElem.from_rational(x.p, 1, int(min(x.absprec, 10 ** 6)) + 5)


def _log1p(y, N):
    """log(1+y) for v(y) >= 1, result known modulo p^N."""
    p = y.p
    v = y.valuation()
    if y.is_zero():
        return y * 0 if isinstance(y, PadicElem) else QuadElem(PadicElem.zero(p, N), PadicElem.zero(p, N))
    if v < 1:
        raise PadicError("log series needs v(y) >= 1")
    # smallest K with k*v - log_p(k) >= N for all k > K
    K = 1
    while K * v - math.log(K + 1, p) < N:
        K += 1
    total = None
    power = y
    for k in range(1, K + 1):
        term = power / k if k % 2 else -(power / k)
        total = term if total is None else total + term
        power = power * y
    return total.add_bigoh(N)


def log_iw(x):
    """Iwasawa logarithm: log(p) = 0, kills roots of unity."""
    if x.is_zero():
        raise DivisionByZero("log of zero")
    p = x.p
    v = x.valuation()
    u = x / PadicElem.from_rational(p, Fraction(p) ** v)
    N = int(u.absprec)
    q = p * p if isinstance(x, QuadElem) else p
    w = u ** (q - 1)
    y = w - 1
    if y.valuation() < 1:
        raise PadicError("unit power is not a 1-unit")
    return _log1p(y, N) / (q - 1)


def _exp_series(y, N):
    p = y.p
    v = y.valuation()
    if y.is_zero():
        return _one_like(y).add_bigoh(N)
    if v <= Fraction(1, p - 1):
        raise ExpDivergence(f"exp diverges at valuation {v}")
    K = 1
    while K * (v - 1 / (p - 1)) + 1 / (p - 1) < N:
        K += 1
    total = _one_like(y)
    term = total
    for k in range(1, K + 1):
        term = term * y / k
        total = total + term
    return total.add_bigoh(N)


def exp(y):
    N = y.absprec
    if N == INF:
        N = DEFAULT_PREC
    return _exp_series(y, int(N))


def pow_s(x, s):
    """x^s := exp(s * log_iw(x))."""
    if isinstance(s, (int, Fraction)):
        s = PadicElem.from_rational(x.p, s)
    if s.is_zero():
        return _one_like(x)
    ls = log_iw(x) * s
    if not ls.is_zero() and ls.valuation() <= Fraction(1, x.p - 1):
        raise ExpDivergence("s*log(x) outside the convergence disc of exp")
    return exp(ls)


# ---------------------------------------------------------------- square roots

def _residue_pair(x: QuadElem):
    return x.a.residue(), x.b.residue()


def _newton_sqrt(u, y0):
    N = int(u.absprec)
    y = y0
    steps = max(1, math.ceil(math.log2(max(N, 2)))) + 2
    for _ in range(steps):
        y = (y + u / y) / 2
    return y.add_bigoh(N)


def sqrt(x):
    """Square root in the field of x, canonical branch."""
    if isinstance(x, PadicElem):
        return _sqrt_qp(x)
    p = x.p
    r = nonresidue(p)
    if x.is_zero():
        return x
    v = x.valuation()
    if v % 2:
        raise NoSquareRoot("odd valuation")
    scale = PadicElem.from_rational(p, Fraction(p) ** (v // 2))
    u = x / (scale * scale)
    ua, ub = _residue_pair(u)
    y0 = None
    for c in range(p):
        for d in range(p):
            if ((c * c + r * d * d - ua) % p == 0) and ((2 * c * d - ub) % p == 0) and (c or d):
                y0 = (c, d)
                break
        if y0:
            break
    if y0 is None:
        raise NoSquareRoot("residue is not a square in F_{p^2}")
    c, d = y0
    neg = ((-c) % p, (-d) % p)
    if neg < (c, d):
        c, d = neg
    start = QuadElem.from_rationals(p, c, d, int(u.absprec) + 5)
    y = _newton_sqrt(u, start)
    return y * scale


def _sqrt_qp(x: PadicElem) -> PadicElem:
    p = x.p
    if x.is_zero():
        return x
    if x.val % 2:
        raise NoSquareRoot("odd valuation")
    u = x.unit_part()
    res = u.residue()
    y0 = None
    for c in range(1, p):
        if (c * c - res) % p == 0:
            y0 = c
            break
    if y0 is None:
        raise NoSquareRoot("non-residue unit")
    y0 = min(y0, p - y0)
    y = _newton_sqrt(u, PadicElem.from_rational(p, y0, int(u.absprec) + 5))
    return y * PadicElem.from_rational(p, Fraction(p) ** (x.val // 2))


# ---------------------------------------------------------------- text format

def _pow_str(p: int, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return f"{p}"
    return f"{p}^{k}"


def render_padic(x: PadicElem) -> str:
    p = x.p
    if x.is_exact_zero():
        return "0"
    terms = []
    if not x.is_zero():
        u = x.unit
        k = x.val
        while u:
            d = u % p
            if d:
                ps = _pow_str(p, k)
                terms.append(f"{d}" if not ps else f"{d}*{ps}")
            u //= p
            k += 1
    if x.absprec != INF:
        terms.append(f"O({p}^{x.absprec})")
    return " + ".join(terms)


def render_quad(x: QuadElem) -> str:
    return f"({render_padic(x.a)}) + ({render_padic(x.b)})*w"


_TERM = re.compile(r"^(\d+)(?:\*(\d+)(?:\^(-?\d+))?)?$")
_BIGOH = re.compile(r"^O\((\d+)(?:\^(-?\d+))?\)$")


def parse_padic(text: str, p: int) -> PadicElem:
    text = text.strip()
    if text == "0":
        return PadicElem.zero(p)
    absprec = INF
    acc = Fraction(0)
    for raw in text.split("+"):
        term = raw.strip()
        m = _BIGOH.match(term)
        if m:
            if int(m.group(1)) != p:
                raise ValueError(f"prime mismatch in {term!r}")
            absprec = int(m.group(2)) if m.group(2) is not None else 1
            continue
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse term {term!r}")
        d = int(m.group(1))
        k = 0
        if m.group(2) is not None:
            if int(m.group(2)) != p:
                raise ValueError(f"prime mismatch in {term!r}")
            k = int(m.group(3)) if m.group(3) is not None else 1
        acc += d * Fraction(p) ** k
    if absprec == INF:
        return PadicElem.from_rational(p, acc)
    if acc == 0:
        return PadicElem.zero(p, absprec)
    return PadicElem.from_rational(p, acc, absprec=absprec, prec=10 ** 9)


_QUAD = re.compile(r"^\((.*)\) \+ \((.*)\)\*w$")


def parse_quad(text: str, p: int) -> QuadElem:
    m = _QUAD.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse {text!r}")
    return QuadElem(parse_padic(m.group(1), p), parse_padic(m.group(2), p))
