"""Truncated Laurent series in one local variable t with Q_{p^2} coefficients.

``LSeries(coeffs, val, prec)`` is ``sum coeffs[k] t^(val+k) + O(t^prec)``.
Integrands are written as ordinary Python functions of such a series, which
gives Taylor expansions on a ball by evaluating at ``center + t`` (or at
``center + 1/t`` on a ball around infinity).
"""
from __future__ import annotations

from fractions import Fraction
from typing import List

from .padic import PadicElem, PrecisionLoss, QuadElem, log_iw, pow_s, to_quad


def qzero(p: int) -> QuadElem:
    return QuadElem(PadicElem.zero(p), PadicElem.zero(p))


def qone(p: int) -> QuadElem:
    return QuadElem.from_rationals(p, 1)


EXACT = 10 ** 9


class LSeries:
    """Coefficients beyond the stored list (and below ``prec``) are exact zeros."""

    __slots__ = ("p", "coeffs", "val", "prec")

    def __init__(self, p: int, coeffs: List[QuadElem], val: int, prec: int):
        self.p = p
        self.val = val
        self.prec = prec
        n = prec - val
        if n < 0:
            raise PrecisionLoss("series has no known coefficients")
        self.coeffs = list(coeffs[:n])

    def _top(self) -> int:
        return min(self.prec, self.val + len(self.coeffs))

    # -- constructors
    @classmethod
    def const(cls, p: int, c, prec: int) -> "LSeries":
        return cls(p, [to_quad(c, p)], 0, prec)

    @classmethod
    def finite_chart(cls, p: int, center, prec: int) -> "LSeries":
        """x = center + t."""
        return cls(p, [to_quad(center, p), qone(p)], 0, prec)

    @classmethod
    def infinite_chart(cls, p: int, center, prec: int) -> "LSeries":
        """x = center + 1/t."""
        return cls(p, [qone(p), to_quad(center, p)], -1, prec)

    def coefficient(self, k: int) -> QuadElem:
        if k < self.val:
            return qzero(self.p)
        if k >= self.prec:
            raise PrecisionLoss(f"coefficient of t^{k} unknown (prec {self.prec})")
        if k - self.val >= len(self.coeffs):
            return qzero(self.p)
        return self.coeffs[k - self.val]

    def _lift(self, o) -> "LSeries":
        if isinstance(o, LSeries):
            return o
        return LSeries(self.p, [to_quad(o, self.p)], 0, EXACT)

    # -- arithmetic
    def __add__(self, o):
        o = self._lift(o)
        val = min(self.val, o.val)
        prec = min(self.prec, o.prec)
        top = min(prec, max(self._top(), o._top()))
        out = [self.coefficient(k) + o.coefficient(k) for k in range(val, top)]
        return LSeries(self.p, out, val, prec)

    __radd__ = __add__

    def __neg__(self):
        return LSeries(self.p, [-c for c in self.coeffs], self.val, self.prec)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) + (-self)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction, PadicElem, QuadElem)):
            return LSeries(self.p, [c * o for c in self.coeffs], self.val, self.prec)
        val = self.val + o.val
        prec = min(self.prec + o.val, o.prec + self.val)
        n = min(prec - val, len(self.coeffs) + len(o.coeffs) - 1)
        a, b = self.coeffs, o.coeffs
        out = []
        for k in range(n):
            acc = None
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                term = a[i] * b[k - i]
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else qzero(self.p))
        return LSeries(self.p, out, val, prec)

    __rmul__ = __mul__

    def _strip(self) -> "LSeries":
        k = 0
        while k < len(self.coeffs) and self.coeffs[k].is_zero():
            k += 1
        if k == len(self.coeffs):
            raise PrecisionLoss("series indistinguishable from zero")
        return LSeries(self.p, self.coeffs[k:], self.val + k, self.prec)

    def inverse(self) -> "LSeries":
        s = self._strip()
        c = s.coeffs
        n = s.prec - s.val
        if n > EXACT // 2:
            if len(c) > 1:
                raise PrecisionLoss("inverse of an exact polynomial needs a precision cap")
            return LSeries(self.p, [c[0].inverse()], -s.val, EXACT)
        c = c + [qzero(self.p)] * (n - len(c))
        inv0 = c[0].inverse()
        out = [inv0]
        for k in range(1, n):
            acc = None
            for i in range(1, k + 1):
                term = c[i] * out[k - i]
                acc = term if acc is None else acc + term
            out.append(-(acc * inv0))
        return LSeries(self.p, out, -s.val, -s.val + n)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction, PadicElem, QuadElem)):
            return LSeries(self.p, [c / o for c in self.coeffs], self.val, self.prec)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, k):
        if isinstance(k, int):
            if k < 0:
                return self.inverse() ** (-k)
            out = LSeries(self.p, [qone(self.p)], 0, EXACT)
            base = self
            while k:
                if k & 1:
                    out = out * base
                k >>= 1
                if k:
                    base = base * base
            return out
        return series_pow(self, k)

    def shift(self, k: int) -> "LSeries":
        """Multiply by t^k."""
        return LSeries(self.p, self.coeffs, self.val + k, self.prec + k)


def _unit_split(f: LSeries):
    s = f._strip()
    if s.val != 0:
        raise PrecisionLoss("log/pow need a series of valuation 0 in t")
    c0 = s.coeffs[0]
    u = LSeries(s.p, [qzero(s.p)] + [c / c0 for c in s.coeffs[1:]], 0, s.prec)
    return c0, u


def _terms(u: LSeries) -> int:
    if all(c.is_zero() for c in u.coeffs):
        return 1
    if u.prec > EXACT // 2:
        raise PrecisionLoss("transcendental function of an exact polynomial needs a precision cap")
    return u.prec


def series_log(f: LSeries) -> LSeries:
    """log_iw(f) for f = c0 (1 + u), u in t*Q_{p^2}[[t]]."""
    c0, u = _unit_split(f)
    n = _terms(u)
    out = LSeries.const(f.p, log_iw(c0), u.prec)
    power = u
    for k in range(1, n):
        term = power / k
        out = out + term if k % 2 else out - term
        power = power * u
    return out


def series_pow(f: LSeries, s) -> LSeries:
    """f^s = c0^s (1+u)^s with the binomial series; c0^s via exp(s log c0)."""
    c0, u = _unit_split(f)
    n = _terms(u)
    lead = pow_s(c0, s)
    if isinstance(s, (int, Fraction)):
        s = PadicElem.from_rational(f.p, s)
    out = LSeries.const(f.p, 1, u.prec)
    binom = to_quad(1, f.p)
    power = u
    for k in range(1, n):
        binom = binom * (s - (k - 1)) / k
        out = out + power * binom
        power = power * u
    return out * lead


def log(f):
    if isinstance(f, LSeries):
        return series_log(f)
    return log_iw(f)
