"""Optimal embeddings, the torus parametrisation of P^1(Q_p), and the
anticyclotomic p-adic L-function with its derivative at critical integers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .cocycle import HarmonicCocycle, basis_change, poly_from_traceless, poly_mul, poly_pow
from .measure import Integral, LocAnalytic, TeitelbaumMeasure, coleman_line_integral
from .padic import INF, PadicElem, QuadElem, sqrt, to_quad
from .quat import EichlerOrder, Quaternion, QuotientGraph, kronecker
from .series import LSeries, qone, series_log, series_pow


class HypothesisViolation(ValueError):
    pass


class NotFound(RuntimeError):
    pass


class NormNotOne(ValueError):
    pass


# ------------------------------------------------------------------ fields

def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    n = abs(n)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_fundamental(disc: int) -> bool:
    if disc >= 0:
        return False
    if disc % 4 == 1:
        return all(disc % (q * q) for q in _prime_factors(disc))
    if disc % 4 == 0:
        m = disc // 4
        if m % 4 not in (2, 3):
            return False
        return all(m % (q * q) for q in _prime_factors(m))
    return False


def class_number(disc: int) -> int:
    """Number of reduced primitive positive definite forms of discriminant disc."""
    D = -disc
    h = 0
    a = 1
    while 3 * a * a <= D:
        for b in range(-a + 1, a + 1):
            if (b * b + D) % (4 * a):
                continue
            c = (b * b + D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) == 1:
                h += 1
        a += 1
    return h


def check_heegner(disc: int, p: int, n_minus: int, n_plus: int) -> None:
    """Raise HypothesisViolation unless p and N^- are inert, N^+ split and (disc, N) = 1."""
    if not is_fundamental(disc):
        raise HypothesisViolation(f"{disc} is not a negative fundamental discriminant")
    N = p * n_minus * n_plus
    if math.gcd(disc, N) != 1:
        raise HypothesisViolation(f"disc {disc} not coprime to N = {N}")
    for q in [p] + _prime_factors(n_minus):
        if kronecker(disc, q) != -1:
            raise HypothesisViolation(f"{q} is not inert in Q(sqrt({disc}))")
    for q in _prime_factors(n_plus):
        if kronecker(disc, q) != 1:
            raise HypothesisViolation(f"{q} is not split in Q(sqrt({disc}))")


# ------------------------------------------------------------------ embeddings

@dataclass
class EmbeddingData:
    disc: int
    x: Quaternion  # image of sqrt(disc), trd 0, nrd -disc
    u: list  # 2x2 over Q_p
    z0: QuadElem
    zbar0: QuadElem
    c_lead: PadicElem

    @property
    def D(self) -> int:
        return -self.disc

    @property
    def omega(self) -> QuadElem:
        return self.z0 - self.zbar0

    def poly(self) -> list:
        """P_Psi = -c (x - z0)(x - zbar0) as Q_p coefficients [b, a-d, -c]."""
        return poly_from_traceless(self.u)

    def negate(self) -> "EmbeddingData":
        """The embedding composed with complex conjugation: x -> -x."""
        u = [[-e for e in row] for row in self.u]
        return EmbeddingData(self.disc, -self.x, u, self.zbar0, self.z0, -self.c_lead)

    def relabel(self) -> "EmbeddingData":
        """Same torus with the two fixed points exchanged (u and P_Psi unchanged)."""
        return EmbeddingData(self.disc, self.x, self.u, self.zbar0, self.z0, self.c_lead)

    def to_json(self) -> dict:
        return {
            "disc": self.disc,
            "x": self.x.to_json(),
            "z0": str(self.z0),
            "zbar0": str(self.zbar0),
            "Omega": str(self.omega),
        }


def fixed_points(u, p: int):
    """Roots (a + s)/c, (a - s)/c of c z^2 + (d - a) z - b with s^2 = a^2 + bc."""
    (a, b), (c, d) = u
    if c.is_zero():
        raise HypothesisViolation("torus fixes infinity")
    disc = to_quad(((a - d) * (a - d) + b * c * 4) / 4, p)
    s = sqrt(disc)
    if s.b.is_zero():
        raise HypothesisViolation("fixed points are Q_p-rational; p is not inert")
    h = (a - d) / 2
    return (to_quad(h, p) + s) / to_quad(c, p), (to_quad(h, p) - s) / to_quad(c, p)


def find_embedding(graph: QuotientGraph, disc: int, check: bool = True) -> EmbeddingData:
    """First (in enumeration order) optimal embedding of the maximal order of Q(sqrt(disc))."""
    order: EichlerOrder = graph.order
    p = graph.p
    if check:
        check_heegner(disc, p, order.n_minus, order.n_plus)
    D = -disc
    for x in order.enumerate_norm(D):
        if x.trd() != 0:
            continue
        if not order.contains((x + disc) / 2):
            continue
        if any(order.contains(x / m) for m in range(2, D + 1) if D % (m * m) == 0):
            continue
        u = graph.split.padic_matrix(x)
        z0, zbar0 = fixed_points(u, p)
        return EmbeddingData(disc, x, u, z0, zbar0, u[1][0])
    raise NotFound(f"no optimal embedding of discriminant {disc}")


def eta(emb: EmbeddingData, alpha: QuadElem):
    """alpha in G (norm 1) -> (z0 alpha - zbar0)/(alpha - 1) in P^1(Q_p); 'inf' at alpha = 1."""
    nm = alpha.norm() - 1
    if not nm.is_zero():
        raise NormNotOne(f"norm {alpha.norm()}")
    den = alpha - 1
    if den.is_zero():
        return "inf"
    x = (emb.z0 * alpha - emb.zbar0) / den
    return x.a.add_bigoh(x.absprec)


def eta_inv(emb: EmbeddingData, x) -> QuadElem:
    """(x - zbar0)/(x - z0); infinity goes to 1."""
    if isinstance(x, str):
        return qone(emb.z0.p)
    xq = to_quad(x, emb.z0.p)
    return (xq - emb.zbar0) / (xq - emb.z0)


# ------------------------------------------------------------------ L-functions

@dataclass
class LfunConfig:
    form: HarmonicCocycle
    embeddings: List[EmbeddingData]
    depth: int = 5
    prec: int = 40
    measure: Optional[TeitelbaumMeasure] = field(default=None, repr=False)

    def __post_init__(self):
        if self.form.n < 2 or self.form.n % 2:
            raise HypothesisViolation("weight must be even and at least 4")
        if self.measure is None:
            self.measure = TeitelbaumMeasure(self.form, self.prec)

    @property
    def n(self) -> int:
        return self.form.n


def theorem_constant(emb: EmbeddingData, n: int) -> PadicElem:
    """(-c)^(n/2): P_Psi^(n/2) ((z-z0)/(z-zbar0))^(j-n/2) = (-c)^(n/2) (z-z0)^j (z-zbar0)^(n-j)."""
    return (-emb.c_lead) ** (n // 2)


def _linear_product(n: int, j: int, r1: QuadElem, r2: QuadElem) -> list:
    """Coefficients of (x - r1)^j (x - r2)^(n - j)."""
    one = qone(r1.p)
    return poly_mul(poly_pow([-r1, one], j, one), poly_pow([-r2, one], n - j, one))


def critical_polynomial(emb: EmbeddingData, n: int, s: int) -> list:
    """eta_inv(x)^(s-(n+2)/2) P_Psi(x)^(n/2) = (-c)^(n/2) (x - zbar0)^(s-1) (x - z0)^(n+1-s)."""
    const = to_quad(theorem_constant(emb, n), emb.z0.p)
    return [c * const for c in _linear_product(n, s - 1, emb.zbar0, emb.z0)]


def partial_lfun(cfg: LfunConfig, emb: EmbeddingData, s, depth: Optional[int] = None) -> Integral:
    depth = depth or cfg.depth
    n, mu = cfg.n, cfg.measure
    if isinstance(s, int) and 1 <= s <= n + 1:
        return mu.integrate_polynomial(critical_polynomial(emb, n, s), depth)
    P = [to_quad(c, mu.p) for c in emb.poly()]
    e = s - Fraction(n + 2, 2) if isinstance(s, (int, Fraction)) else s - PadicElem.from_rational(mu.p, Fraction(n + 2, 2))

    def func(x: LSeries) -> LSeries:
        ratio = (x - emb.zbar0) / (x - emb.z0)
        poly = x * x * P[2] + x * P[1] + P[0]
        return series_pow(ratio, e) * poly ** (n // 2)

    return mu.integrate(LocAnalytic(func, n, "lfun"), depth)


def lfun(cfg: LfunConfig, s, depth: Optional[int] = None) -> QuadElem:
    """Sum of partial L-functions over the embedding list (one per ideal class)."""
    total = None
    for emb in cfg.embeddings:
        v = partial_lfun(cfg, emb, s, depth).value
        total = v if total is None else total + v
    return total


def lderiv_integrand(emb: EmbeddingData, n: int, j: int) -> LocAnalytic:
    """log(R) R^(j-n/2) P_Psi^(n/2) with R = (x - z0)/(x - zbar0)."""
    P = [to_quad(c, emb.z0.p) for c in emb.poly()]
    z0, zb = emb.z0, emb.zbar0

    def func(x: LSeries) -> LSeries:
        R = (x - z0) / (x - zb)
        poly = x * x * P[2] + x * P[1] + P[0]
        return series_log(R) * R ** (j - n // 2) * poly ** (n // 2)

    return LocAnalytic(func, n, f"lderiv_j{j}")


def partial_lderiv(cfg: LfunConfig, emb: EmbeddingData, j: int, depth: Optional[int] = None) -> Integral:
    if not 0 <= j <= cfg.n:
        raise ValueError(f"j = {j} outside 0..{cfg.n}")
    return cfg.measure.integrate(lderiv_integrand(emb, cfg.n, j), depth or cfg.depth)


def lderiv(cfg: LfunConfig, j: int, depth: Optional[int] = None) -> QuadElem:
    total = None
    for emb in cfg.embeddings:
        v = partial_lderiv(cfg, emb, j, depth).value
        total = v if total is None else total + v
    return total


def _agreement(a: QuadElem, b: QuadElem):
    d = a - b
    return d.absprec if d.is_zero() else d.valuation()


@dataclass
class TheoremCheck:
    j: int
    depth: int
    lhs: QuadElem
    rhs: QuadElem
    constant: PadicElem
    agreement: float

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "depth": self.depth,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "constant": str(self.constant),
            "agreement_valuation": self.agreement if self.agreement != INF else "inf",
            "lhs_precision": _num(self.lhs.absprec),
            "rhs_precision": _num(self.rhs.absprec),
        }


def _num(x):
    return "inf" if x == INF else int(x)


def theorem_check(cfg: LfunConfig, emb: EmbeddingData, j: int, depth: Optional[int] = None) -> TheoremCheck:
    """Derivative value against the Coleman integral of f (z-z0)^j (z-zbar0)^(n-j) from zbar0 to z0."""
    depth = depth or cfg.depth
    n = cfg.n
    lhs = partial_lderiv(cfg, emb, j, depth).value
    Pj = _linear_product(n, j, emb.z0, emb.zbar0)
    rhs = coleman_line_integral(cfg.measure, Pj, emb.zbar0, emb.z0, depth).value
    const = theorem_constant(emb, n)
    return TheoremCheck(j, depth, lhs, rhs, const, _agreement(lhs, rhs * const))


# ------------------------------------------------------------------ Abel-Jacobi value

def horizontal_coordinates(emb: EmbeddingData, n: int, j: int, lam=1) -> list:
    """Coordinates in u^i v^(n-i) of omega_lam^j eta_lam^(n-j).

    omega_lam = lam (u - z0 v) and eta_lam = (u - zbar0 v) / (lam Omega), so that
    <omega_lam, eta_lam> = 1; a monomial u^i v^(n-i) is recorded as z^i.
    """
    p = emb.z0.p
    lamq = to_quad(lam, p)
    w = [-emb.z0 * lamq, lamq]
    e = [-emb.zbar0 / (lamq * emb.omega), qone(p) / (lamq * emb.omega)]
    one = qone(p)
    return poly_mul(poly_pow(w, j, one), poly_pow(e, n - j, one))


def aj_value(cfg: LfunConfig, j: int, depth: Optional[int] = None, lam=1, route: str = "coleman") -> QuadElem:
    """Omega^(j-n) L_p'(f, K, j+1) for the differential scaled by lam.

    route='coleman' pairs the horizontal coordinates of omega^j eta^(n-j) with the
    Coleman primitive of f; route='lderiv' multiplies the derivative by the ratio of
    those coordinates to the unscaled ones.
    """
    depth = depth or cfg.depth
    n = cfg.n
    total = None
    for emb in cfg.embeddings:
        coords = horizontal_coordinates(emb, n, j, lam)
        if route == "coleman":
            I = coleman_line_integral(cfg.measure, coords, emb.zbar0, emb.z0, depth).value
            val = I * to_quad(theorem_constant(emb, n), emb.z0.p)
        elif route == "lderiv":
            base = basis_change(j, n, emb.z0, emb.zbar0)
            k = next(i for i, c in enumerate(base) if not c.is_zero())
            kappa = coords[k] / base[k]
            val = kappa * emb.omega ** (j - n) * partial_lderiv(cfg, emb, j, depth).value
        else:
            raise ValueError(f"unknown route {route}")
        total = val if total is None else total + val
    return total
