"""Boundary distributions attached to harmonic cocycles, and integration against them.

For a cocycle c of weight n+2 the measure satisfies mu(P 1_{U(e)}) = c(e)(P)
for polynomials of degree <= n. A locally analytic integrand is integrated
by a Riemann sum over the balls of a fixed depth, replacing the integrand on
each ball by its degree-n Taylor polynomial (in the chart t = 1/(x-a) on the
ball around infinity).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from typing import Callable, Dict, List, Sequence

from .cocycle import HarmonicCocycle
from .numfield import FieldElem, embed
from .padic import INF, PadicElem, PrecisionLoss, QuadElem, to_quad
from .series import LSeries, qzero, series_log
from .tree import Ball, DirEdge, ball_of_edge

EXTRA_TERMS = 3


class BoundaryPoint(ValueError):
    pass


class UnreducedEdge(KeyError):
    pass


@dataclass
class LocAnalytic:
    """phi: P^1(Q_p) -> Q_{p^2} written as a function of a truncated Laurent series.

    ``pole_order`` bounds the pole at infinity (at most n).
    """

    func: Callable[[LSeries], LSeries]
    pole_order: int = 0
    name: str = ""

    def __call__(self, x: LSeries) -> LSeries:
        return self.func(x)


@dataclass
class Integral:
    value: QuadElem
    error: float  # heuristic valuation of the truncation error
    depth: int
    exact: bool = False

    @property
    def precision(self):
        return self.value.absprec


@dataclass
class _BallData:
    edge: DirEdge
    ball: Ball
    moments: List[FieldElem]  # mu(x^i 1_U), exact
    local: List[PadicElem]  # mu((x - a)^i 1_U) in Q_p


class TeitelbaumMeasure:
    def __init__(self, cocycle: HarmonicCocycle, prec: int = 40):
        self.cocycle = cocycle
        self.n = cocycle.n
        self.graph = cocycle.graph
        self.p = self.graph.p
        self.prec = prec
        self._levels: Dict[int, List[_BallData]] = {}

    def scale(self, s) -> "TeitelbaumMeasure":
        return TeitelbaumMeasure(self.cocycle.scale(s), self.prec)

    # -- moments
    def moments(self, e: DirEdge) -> List[FieldElem]:
        """Exact mu(x^i 1_{U(e)}), i = 0..n."""
        try:
            return list(self.cocycle.value(e).moments)
        except KeyError as exc:
            raise UnreducedEdge(str(e)) from exc

    def moment(self, e: DirEdge, i: int) -> FieldElem:
        return self.moments(e)[i]

    def level(self, m: int) -> List[_BallData]:
        if m not in self._levels:
            out = []
            n, p = self.n, self.p
            for e, idx, gamma in self.graph.walk_depth(m):
                mom = self.cocycle.moments_via(idx, gamma)
                ball = ball_of_edge(e)
                a = ball.center
                local = []
                for k in range(n + 1):
                    acc = mom[0] * 0
                    for l in range(k + 1):
                        acc = acc + mom[l] * (comb(k, l) * (-a) ** (k - l))
                    local.append(embed(acc, p, self.prec))
                out.append(_BallData(e, ball, mom, local))
            self._levels[m] = out
        return self._levels[m]

    def total_moments(self, m: int) -> List[FieldElem]:
        """Exact sums over the depth-m balls of mu(x^i 1_U); all zero for a harmonic cocycle."""
        lv = self.level(m)
        out = []
        for i in range(self.n + 1):
            acc = lv[0].moments[i] * 0
            for bd in lv:
                acc = acc + bd.moments[i]
            out.append(acc)
        return out

    # -- integration
    def taylor(self, phi: LocAnalytic, ball: Ball, terms: int) -> List[QuadElem]:
        """Coefficients 0..terms-1 in the chart variable (x - a, or 1/(x - a) times t^n)."""
        p, n = self.p, self.n
        work = terms + n + 1
        for _ in range(4):
            try:
                if ball.kind == "finite":
                    x = LSeries.finite_chart(p, ball.center, work)
                    f = phi(x)
                    return [f.coefficient(k) for k in range(terms)]
                x = LSeries.infinite_chart(p, ball.center, work)
                f = phi(x)
                if f.val < -n:
                    raise PrecisionLoss("pole at infinity exceeds n")
                return [f.coefficient(k - n) for k in range(terms)]
            except PrecisionLoss:
                work *= 2
        raise PrecisionLoss("could not expand integrand")

    def integrate(self, phi: LocAnalytic, depth: int) -> Integral:
        if depth < 1:
            raise ValueError("depth >= 1")
        n = self.n
        total = None
        err = INF
        for bd in self.level(depth):
            T = self.taylor(phi, bd.ball, n + 1 + EXTRA_TERMS)
            r = bd.ball.radius()
            acc = None
            if bd.ball.kind == "finite":
                loc = bd.local
            else:
                loc = list(reversed(bd.local))
            for k in range(n + 1):
                term = T[k] * loc[k]
                acc = term if acc is None else acc + term
            total = acc if total is None else total + acc
            # heuristic error: normalised moment growth times the first omitted coefficients
            g = INF
            for k in range(n + 1):
                if not loc[k].is_zero():
                    g = min(g, loc[k].valuation() - k * r)
            tail = INF
            for k in range(n + 1, n + 1 + EXTRA_TERMS):
                if not T[k].is_zero():
                    tail = min(tail, T[k].valuation() + k * r)
                elif T[k].absprec != INF:
                    tail = min(tail, T[k].absprec + k * r)
            err = min(err, g + tail)
        if err != INF:
            total = total.add_bigoh(int(err))
        return Integral(total, err, depth)

    def integrate_polynomial(self, coeffs: Sequence, depth: int) -> Integral:
        """Exact route for a polynomial integrand of degree <= n."""
        if len(coeffs) > self.n + 1:
            raise ValueError("degree exceeds n")
        M = self.total_moments(depth)
        if all(m == 0 for m in M):
            z = QuadElem(PadicElem.zero(self.p), PadicElem.zero(self.p))
            return Integral(z, INF, depth, exact=True)
        acc = qzero(self.p)
        for c, m in zip(coeffs, M):
            acc = acc + to_quad(c, self.p) * embed(m, self.p, self.prec)
        return Integral(acc, INF, depth)

    def convergence_table(self, phi: LocAnalytic, depths: Sequence[int]) -> List[dict]:
        rows = []
        prev = None
        for m in depths:
            I = self.integrate(phi, m)
            diff = None
            if prev is not None:
                d = I.value - prev.value
                diff = d.valuation() if not d.is_zero() else d.absprec
            rows.append({"depth": m, "value": str(I.value), "error": I.error, "diff_valuation": diff})
            prev = I
        return rows


def table_to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["depth", "value", "error", "diff_valuation"], lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


# ------------------------------------------------------------------ kernels

def _check_interior(z: QuadElem):
    if z.b.is_zero():
        raise BoundaryPoint("point lies in P^1(Q_p)")


def poisson_eval(mu: TeitelbaumMeasure, z: QuadElem, depth: int) -> Integral:
    """f(z) = int 1/(z - x) dmu(x)."""
    _check_interior(z)
    phi = LocAnalytic(lambda x: (x * -1 + z).inverse(), 0, "poisson")
    return mu.integrate(phi, depth)


def poly_eval(P: Sequence, x):
    acc = None
    for c in reversed(P):
        acc = c if acc is None else acc * x + c
    return acc


def _primitive_part(P: Sequence, z: QuadElem) -> list:
    """S(z, x) = int_0^z (P(w) - P(x))/(w - x) dw, as coefficients in x."""
    deg = len(P) - 1
    out = [qzero(z.p) for _ in range(max(deg, 1))]
    zp = [to_quad(1, z.p)]
    for _ in range(deg + 1):
        zp.append(zp[-1] * z)
    for k in range(1, deg + 1):
        Pk = to_quad(P[k], z.p)
        for l in range(k):
            out[k - 1 - l] = out[k - 1 - l] + Pk * zp[l + 1] / (l + 1)
    return out


def coleman_line_integral(mu: TeitelbaumMeasure, P: Sequence, z1: QuadElem, z2: QuadElem, depth: int) -> Integral:
    """int_{z1}^{z2} f(z) P(z) dz via int [S(z2,x) - S(z1,x) + P(x) log((z2-x)/(z1-x))] dmu(x)."""
    _check_interior(z1)
    _check_interior(z2)
    if len(P) > mu.n + 1:
        raise ValueError("deg P exceeds n")
    S2 = _primitive_part(P, z2)
    S1 = _primitive_part(P, z1)
    S = [a - b for a, b in zip(S2, S1)]
    Pq = [to_quad(c, mu.p) for c in P]

    def func(x: LSeries) -> LSeries:
        lg = series_log((x * -1 + z2) / (x * -1 + z1))
        return poly_eval(Pq, x) * lg + poly_eval(S, x)

    return mu.integrate(LocAnalytic(func, len(P) - 1, "coleman"), depth)
