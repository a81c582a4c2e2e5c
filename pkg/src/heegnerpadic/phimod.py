"""Filtered (phi, N)-modules over K0 = Q_p or Q_{p^2}, exactly.

Scalars are FieldElem in Q(sqrt(r)) with r the least quadratic non-residue
mod p, so that Q(sqrt(r)) is dense in Q_{p^2} and sigma is conjugation.
For K0 = Q_p all entries are rational. Frobenius is stored as a matrix F
with phi(v) = F sigma(v). A filtration is a dict i -> basis of Fil^i for
the jumps between ``lo`` (Fil^lo = D) and ``hi`` (Fil^(hi+1) = 0).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import sympy
from sympy.polys.matrices import DomainMatrix

from . import linalg
from .numfield import FieldElem
from .padic import nonresidue, vp_rational


class HypothesisViolation(ValueError):
    pass


Vec = List[FieldElem]
Mat = List[List[FieldElem]]


# ------------------------------------------------------------------ scalars and vectors

def scalar(x, r: int) -> FieldElem:
    if isinstance(x, FieldElem):
        return FieldElem(x.a, x.b, r)
    return FieldElem(x, 0, r)


def _zero(x: FieldElem) -> bool:
    return x.a == 0 and x.b == 0


def sigma_vec(v: Sequence[FieldElem]) -> Vec:
    return [x.conj() for x in v]


def sigma_mat(A: Mat) -> Mat:
    return [sigma_vec(row) for row in A]


def mat_scale(A: Mat, c) -> Mat:
    return [[x * c for x in row] for row in A]


def mat_sub(A: Mat, B: Mat) -> Mat:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(A, B)]


def is_zero_mat(A: Mat) -> bool:
    return all(_zero(x) for row in A for x in row)


def columns(A: Mat) -> List[Vec]:
    return [list(c) for c in zip(*A)] if A else []


def from_columns(cols: Sequence[Vec], dim: int, r: int) -> Mat:
    if not cols:
        return [[] for _ in range(dim)]
    return [[c[i] for c in cols] for i in range(dim)]


def span(vectors: Sequence[Vec], dim: int) -> List[Vec]:
    """Canonical basis (reduced echelon rows) of the span."""
    vecs = [list(v) for v in vectors if not all(_zero(x) for x in v)]
    if not vecs:
        return []
    R, _ = linalg.rref(vecs, _zero)
    return R


def in_span(basis: Sequence[Vec], v: Vec) -> bool:
    if all(_zero(x) for x in v):
        return True
    return linalg.rank(list(basis) + [list(v)], _zero) == linalg.rank(list(basis), _zero) if basis else False


def is_subspace(A: Sequence[Vec], B: Sequence[Vec]) -> bool:
    return all(in_span(B, v) for v in A)


def reduce_mod(v: Vec, basis: Sequence[Vec]) -> Vec:
    """Canonical representative of v modulo span(basis): clear the echelon pivots."""
    R = span(basis, len(v))
    out = list(v)
    for row in R:
        pc = next(i for i, x in enumerate(row) if not _zero(x))
        c = out[pc]
        if not _zero(c):
            out = [a - c * b for a, b in zip(out, row)]
    return out


@lru_cache(maxsize=None)
def _field(r: int):
    return sympy.QQ.algebraic_field(sympy.sqrt(r))


def to_domain(A: Mat, r: int) -> DomainMatrix:
    QQ = sympy.QQ
    if all(x.b == 0 for row in A for x in row):
        rows = [[QQ(x.a.numerator, x.a.denominator) for x in row] for row in A]
        return DomainMatrix(rows, (len(A), len(A[0]) if A else 0), QQ)
    K = _field(r)
    rows = [[K([sympy.QQ(x.b.numerator, x.b.denominator), sympy.QQ(x.a.numerator, x.a.denominator)]) for x in row] for row in A]
    return DomainMatrix(rows, (len(A), len(A[0]) if A else 0), K)


def _from_anp(x, r: int) -> FieldElem:
    if not hasattr(x, "to_list"):
        return FieldElem(Fraction(int(x.numerator), int(x.denominator)), 0, r)
    c = [Fraction(int(q.numerator), int(q.denominator)) for q in x.to_list()]
    if not c:
        return FieldElem(0, 0, r)
    if len(c) == 1:
        return FieldElem(c[0], 0, r)
    return FieldElem(c[1], c[0], r)


def from_domain(M: DomainMatrix, r: int) -> Mat:
    return [[_from_anp(x, r) for x in row] for row in M.to_list()]


def kernel(A: Mat, dim: int, r: int) -> List[Vec]:
    if not A or not A[0]:
        return linalg.nullspace([], dim, scalar(0, r), scalar(1, r), _zero)
    return span(from_domain(to_domain(A, r).nullspace(), r), dim)


def intersect(A: Sequence[Vec], B: Sequence[Vec], dim: int, r: int) -> List[Vec]:
    if not A or not B:
        return []
    # a.x = b.y  <=>  [A | -B] (x, y) = 0
    M = [[a[i] for a in A] + [-b[i] for b in B] for i in range(dim)]
    out = []
    for sol in kernel(M, len(A) + len(B), r):
        v = [scalar(0, r)] * dim
        for c, a in zip(sol[: len(A)], A):
            v = [x + c * y for x, y in zip(v, a)]
        out.append(v)
    return span(out, dim)


def poly_at_matrix(coeffs: Sequence[Fraction], A: Mat, r: int) -> Mat:
    M = to_domain(A, r)
    K = M.domain
    n = len(A)
    out = DomainMatrix.zeros((n, n), K)
    ident = DomainMatrix.eye(n, K)
    for c in reversed(coeffs):
        out = out * M + ident * K.convert(sympy.QQ(c.numerator, c.denominator))
    return from_domain(out, r)


def _rational(x) -> Fraction:
    if isinstance(x, FieldElem):
        if x.b != 0:
            raise ValueError("expected a rational coefficient")
        return x.a
    return Fraction(x)


def newton_slopes(coeffs: Sequence[Fraction], p: int) -> List[Fraction]:
    """Slopes (with multiplicity) of the Newton polygon of sum c_i t^i, c_n = 1."""
    pts = [(i, vp_rational(c, p)) for i, c in enumerate(coeffs) if c != 0]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    if pts[0][0] > 0:
        raise ValueError("zero eigenvalue")
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2) / (x2 - x1)
        out.extend([s] * (x2 - x1))
    return sorted(out)


# ------------------------------------------------------------------ modules

@dataclass
class Report:
    valid: bool
    violations: List[str]

    def __bool__(self):
        return self.valid


@dataclass
class FilteredPhiNModule:
    p: int
    degree: int  # [K0 : Q_p], 1 or 2
    frob: Mat
    mono: Mat
    fil: Dict[int, List[Vec]]
    r: int = 0

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ValueError("K0 must be Q_p or Q_{p^2}")
        if not self.r:
            self.r = nonresidue(self.p)
        r = self.r
        self.frob = [[scalar(x, r) for x in row] for row in self.frob]
        self.mono = [[scalar(x, r) for x in row] for row in self.mono]
        self.fil = {int(i): span([[scalar(x, r) for x in v] for v in vs], self.dim) for i, vs in self.fil.items()}

    @property
    def dim(self) -> int:
        return len(self.frob)

    @property
    def lo(self) -> int:
        return min(self.fil) if self.fil else 0

    @property
    def hi(self) -> int:
        return max(self.fil) if self.fil else -1

    def zero_vec(self) -> Vec:
        return [scalar(0, self.r)] * self.dim

    def basis(self) -> List[Vec]:
        return [[scalar(1 if i == j else 0, self.r) for i in range(self.dim)] for j in range(self.dim)]

    def filt(self, i: int) -> List[Vec]:
        """Fil^i as a canonical basis."""
        if not self.fil or i > self.hi:
            return []
        if i <= self.lo:
            return self.fil[self.lo]
        k = min(j for j in self.fil if j >= i)
        return self.fil[k]

    def phi(self, v: Vec) -> Vec:
        if self.degree == 1:
            return linalg.matvec(self.frob, v)
        return linalg.matvec(self.frob, sigma_vec(v))

    def N(self, v: Vec) -> Vec:
        return linalg.matvec(self.mono, v)

    def linear_frobenius(self) -> Mat:
        """phi^degree as a K0-linear matrix."""
        if self.degree == 1:
            return self.frob
        return from_domain(to_domain(self.frob, self.r) * to_domain(sigma_mat(self.frob), self.r), self.r)

    def charpoly(self) -> List[Fraction]:
        """Coefficients c_0..c_dim of the characteristic polynomial of phi^degree (rational)."""
        cp = to_domain(self.linear_frobenius(), self.r).charpoly()
        return [_rational(_from_anp(c, self.r)) for c in reversed(cp)]

    def to_json(self) -> str:
        enc = lambda x: [str(x.a), str(x.b)]
        return json.dumps({
            "p": self.p,
            "degree": self.degree,
            "r": self.r,
            "frob": [[enc(x) for x in row] for row in self.frob],
            "mono": [[enc(x) for x in row] for row in self.mono],
            "fil": {str(i): [[enc(x) for x in v] for v in vs] for i, vs in sorted(self.fil.items())},
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FilteredPhiNModule":
        d = json.loads(text)
        r = d["r"]
        dec = lambda e: FieldElem(Fraction(e[0]), Fraction(e[1]), r)
        return cls(
            d["p"], d["degree"],
            [[dec(x) for x in row] for row in d["frob"]],
            [[dec(x) for x in row] for row in d["mono"]],
            {int(i): [[dec(x) for x in v] for v in vs] for i, vs in d["fil"].items()},
            r,
        )


def validate(D: FilteredPhiNModule) -> Report:
    bad = []
    n = D.dim
    if any(len(row) != n for row in D.frob) or len(D.mono) != n or any(len(row) != n for row in D.mono):
        return Report(False, ["matrix shapes do not match the dimension"])
    if D.degree == 1 and any(x.b != 0 for row in D.frob + D.mono for x in row):
        bad.append("K0 = Q_p but entries are not rational")
    # N phi = p phi N, i.e. N F = p F sigma(N)
    sN = D.mono if D.degree == 1 else sigma_mat(D.mono)
    lhs = linalg.matmul(D.mono, D.frob)
    rhs = mat_scale(linalg.matmul(D.frob, sN), D.p)
    if not is_zero_mat(mat_sub(lhs, rhs)):
        bad.append("N phi != p phi N")
    if linalg.rank(D.frob, _zero) < n:
        bad.append("Frobenius is not invertible")
    if D.fil:
        if len(D.filt(D.lo)) != n:
            bad.append(f"filtration not exhaustive: Fil^{D.lo} has dimension {len(D.filt(D.lo))}")
        if D.filt(D.hi + 1):
            bad.append("filtration not separated")
        keys = sorted(D.fil)
        for a, b in zip(keys, keys[1:]):
            if not is_subspace(D.fil[b], D.fil[a]):
                bad.append(f"Fil^{b} not contained in Fil^{a}")
    elif n:
        bad.append("empty filtration on a nonzero module")
    return Report(not bad, bad)


def tate_twist(D: FilteredPhiNModule, j: int) -> FilteredPhiNModule:
    """D[j] = (D, Fil^(. - j), p^j phi, N)."""
    c = Fraction(D.p) ** j
    return FilteredPhiNModule(D.p, D.degree, mat_scale(D.frob, c), D.mono,
                              {i + j: vs for i, vs in D.fil.items()}, D.r)


def slopes(D: FilteredPhiNModule) -> List[Fraction]:
    return [s / D.degree for s in newton_slopes(D.charpoly(), D.p)]


def slope_decomposition(D: FilteredPhiNModule, only: Optional[Sequence] = None) -> Dict[Fraction, List[Vec]]:
    """lambda -> basis of D_lambda, from a factorisation of the characteristic polynomial over Q.

    ``only`` restricts the computed parts to the given slopes.
    """
    t = sympy.Symbol("t")
    cp = D.charpoly()
    poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * t ** i for i, c in enumerate(cp)), t)
    _, factors = sympy.factor_list(poly.as_expr(), t)
    groups: Dict[Fraction, List[Fraction]] = {}
    A = D.linear_frobenius()
    for fac, mult in factors:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(fac, t).all_coeffs())]
        lead = coeffs[-1]
        coeffs = [c / lead for c in coeffs]
        sl = set(newton_slopes(coeffs, D.p))
        if len(sl) != 1:
            raise HypothesisViolation("a rational factor of the characteristic polynomial is not pure")
        lam = sl.pop() / D.degree
        g = [Fraction(1)]
        for _ in range(mult):
            g = _poly_mul(g, coeffs)
        groups[lam] = _poly_mul(groups.get(lam, [Fraction(1)]), g)
    out = {}
    for lam, g in sorted(groups.items()):
        if only is not None and lam not in only:
            continue
        out[lam] = span(kernel(poly_at_matrix(g, A, D.r), D.dim, D.r), D.dim)
    return out


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _apply(A: Mat, vs: Sequence[Vec]) -> List[Vec]:
    return [linalg.matvec(A, v) for v in vs]


def check_hypothesis(D: FilteredPhiNModule, n: int) -> None:
    """N restricts to an isomorphism D_(n+1) -> D_n."""
    dec = slope_decomposition(D, (Fraction(n), Fraction(n + 1)))
    top = dec.get(Fraction(n + 1), [])
    bottom = dec.get(Fraction(n), [])
    if len(top) != len(bottom):
        raise HypothesisViolation(f"dim D_{n + 1} = {len(top)} but dim D_{n} = {len(bottom)}")
    img = span(_apply(D.mono, top), D.dim)
    if len(img) != len(top) or not is_subspace(img, bottom):
        raise HypothesisViolation(f"N: D_{n + 1} -> D_{n} is not an isomorphism")


# ------------------------------------------------------------------ extensions

@dataclass
class ExtClass:
    base: FilteredPhiNModule
    n: int
    rep: Vec

    def reduced(self) -> Vec:
        return reduce_mod(self.rep, self.base.filt(self.n + 1))

    def is_zero(self) -> bool:
        return all(_zero(x) for x in self.reduced())

    def __eq__(self, other):
        if not isinstance(other, ExtClass):
            return NotImplemented
        return self.n == other.n and self.reduced() == other.reduced()


@dataclass
class Extension:
    E: FilteredPhiNModule
    iota: Mat  # (dim D + 1) x dim D
    pi: Mat  # 1 x (dim D + 1)


def extension_from_class(D: FilteredPhiNModule, d: Vec, n: int, check: bool = True) -> Extension:
    """E^(d): D + K0[n+1] with the split (phi, N) and Fil^j = {(x,t): t in Fil^(j-n-1) K, x + t d in Fil^j D}."""
    if check:
        check_hypothesis(D, n)
    r, m = D.r, D.dim
    z, one = scalar(0, r), scalar(1, r)
    d = [scalar(x, r) for x in d]
    frob = [row + [z] for row in D.frob] + [[z] * m + [scalar(Fraction(D.p) ** (n + 1), r)]]
    mono = [row + [z] for row in D.mono] + [[z] * (m + 1)]
    fil = {}
    lo = min(D.lo, n + 1)
    hi = max(D.hi, n + 1)
    for j in range(lo, hi + 1):
        vs = [v + [z] for v in D.filt(j)]
        if j <= n + 1:
            vs.append([-x for x in d] + [one])
        fil[j] = vs
    E = FilteredPhiNModule(D.p, D.degree, frob, mono, fil, r)
    iota = [[one if i == j else z for j in range(m)] for i in range(m)] + [[z] * m]
    pi = [[z] * m + [one]]
    return Extension(E, iota, pi)


def _preimage(A: Mat, target: Sequence[Vec], dim_src: int, r: int) -> List[Vec]:
    """{x : A x in span(target)} for injective A."""
    rows = len(A)
    M = [list(A[i]) + [-t[i] for t in target] for i in range(rows)]
    sols = kernel(M, dim_src + len(target), r)
    return span([s[:dim_src] for s in sols], dim_src)


def _solve_vec(A: Mat, b: Vec) -> Vec:
    return linalg.solve(A, b, _zero)


def pullback_module(ext: Extension) -> FilteredPhiNModule:
    """D recovered from the extension: phi, N and Fil pulled back along iota."""
    E, iota = ext.E, ext.iota
    m = len(iota[0])
    cols = columns(iota)
    frob_cols = [_solve_vec(iota, E.phi(c)) for c in cols]
    mono_cols = [_solve_vec(iota, E.N(c)) for c in cols]
    fil = {j: _preimage(iota, E.filt(j), m, E.r) for j in range(E.lo, E.hi + 1)}
    fil = {j: vs for j, vs in fil.items() if vs or j == E.lo}
    return FilteredPhiNModule(E.p, E.degree, from_columns(frob_cols, m, E.r), from_columns(mono_cols, m, E.r), fil, E.r)


def class_from_extension(ext: Extension, n: int, s2_shift: Optional[Vec] = None,
                         base: Optional[FilteredPhiNModule] = None) -> ExtClass:
    """(s1(1) - s2(1)) + Fil^(n+1) D.

    s1(1) is the unique vector of ker(N) in E_(n+1) mapping to 1; s2(1) is a
    vector of Fil^(n+1) E mapping to 1, moved by iota(s2_shift) when given
    (s2_shift must lie in Fil^(n+1) D).
    """
    E, iota, pi = ext.E, ext.iota, ext.pi
    D = base if base is not None else pullback_module(ext)
    r = E.r
    dec = slope_decomposition(E, (Fraction(n + 1),))
    top = dec.get(Fraction(n + 1), [])
    ker_top = intersect(top, kernel(E.mono, E.dim, r), E.dim, r) if top else []
    if len(ker_top) != 1:
        raise HypothesisViolation(f"ker N on E_{n + 1} has dimension {len(ker_top)}, expected 1")
    w = ker_top[0]
    c = linalg.matvec(pi, w)[0]
    if _zero(c):
        raise HypothesisViolation("pi vanishes on ker N restricted to E_(n+1)")
    s1 = [x / c for x in w]
    F = E.filt(n + 1)
    coeffs = _solve_vec([[linalg.matvec(pi, f)[0] for f in F]], [scalar(1, r)])
    s2 = [scalar(0, r)] * E.dim
    for a, f in zip(coeffs, F):
        s2 = [x + a * y for x, y in zip(s2, f)]
    if s2_shift is not None:
        if not in_span(D.filt(n + 1), s2_shift):
            raise ValueError("shift is not in Fil^(n+1) D")
        s2 = [x + y for x, y in zip(s2, linalg.matvec(iota, s2_shift))]
    diff = [x - y for x, y in zip(s1, s2)]
    return ExtClass(D, n, _solve_vec(iota, diff))


# ------------------------------------------------------------------ the matrix-algebra stalk

def em2_stalk(p: int, psi_omega: Optional[Mat] = None) -> FilteredPhiNModule:
    """M_2(Q_{p^2}) with Phi(A) = sigma(A) [[0,-p],[-1,0]], N = 0 and Fil^1 = V_1.

    ``psi_omega`` is the image of sqrt(r) under the embedding Q_{p^2} -> M_2(Q_p);
    V_j = {A : Psi(x) A = x^j sigma(x)^(1-j) A}, which is nonzero only for j = 0, 1.
    Coordinates are (a, b, c, d) for [[a, b], [c, d]].
    """
    r = nonresidue(p)
    z = scalar(0, r)
    if psi_omega is None:
        psi_omega = [[0, r], [1, 0]]
    J = [[scalar(x, r) for x in row] for row in psi_omega]
    sq = linalg.matmul(J, J)
    if not (sq[0][0] == r and sq[1][1] == r and sq[0][1] == 0 and sq[1][0] == 0):
        raise ValueError("psi_omega must square to r")
    w = FieldElem(0, 1, r)
    # (a,b,c,d) -> (-b, -p a, -d, -p c), then sigma
    F = [[z] * 4 for _ in range(4)]
    F[0][1] = scalar(-1, r)
    F[1][0] = scalar(-p, r)
    F[2][3] = scalar(-1, r)
    F[3][2] = scalar(-p, r)
    mono = [[z] * 4 for _ in range(4)]
    # left multiplication by J on (a,b,c,d)
    L = [[J[0][0], z, J[0][1], z],
         [z, J[0][0], z, J[0][1]],
         [J[1][0], z, J[1][1], z],
         [z, J[1][0], z, J[1][1]]]
    ident = linalg.identity(4, scalar(1, r), z)
    V1 = kernel(mat_sub(L, mat_scale(ident, w)), 4, r)
    V0 = kernel(mat_sub(L, mat_scale(ident, -w)), 4, r)
    if len(V1) + len(V0) != 4:
        raise ValueError("eigenspaces do not span")
    return FilteredPhiNModule(p, 2, F, mono, {0: V0 + V1, 1: V1}, r)


# ------------------------------------------------------------------ random admissible-shaped instances

def _rand_unit(rng: random.Random, p: int) -> Fraction:
    while True:
        a = rng.randint(1, 4 * p)
        b = rng.randint(1, 3)
        if a % p and b % p:
            return Fraction(a * rng.choice((1, -1)), b)


def _rand_entry(rng: random.Random, r: int, degree: int) -> FieldElem:
    a = rng.randint(-3, 3)
    b = rng.randint(-2, 2) if degree == 2 else 0
    return FieldElem(a, b, r)


def random_instance(rng: random.Random, n: int, p: int = 3, max_dim: int = 6, degree: Optional[int] = None):
    """(D, d): a valid module satisfying the extension hypothesis, and a class representative.

    D = X + Y + Z with X of slope n+1, Y = N(X) of slope n, and Z of other
    slopes with N = 0; everything is then conjugated by a random rational basis change.
    """
    r = nonresidue(p)
    if degree is None:
        degree = rng.choice((1, 2))
    k = rng.randint(0, max(0, (max_dim - 1) // 2))
    m = rng.randint(1 if k == 0 else 0, max_dim - 2 * k)
    dim = 2 * k + m
    z = scalar(0, r)

    def upper(size, val):
        U = [[z] * size for _ in range(size)]
        for i in range(size):
            U[i][i] = scalar(_rand_unit(rng, p) * Fraction(p) ** val, r)
            for j in range(i + 1, size):
                U[i][j] = _rand_entry(rng, r, degree) * Fraction(p) ** val
        return U

    FX = upper(k, n + 1)
    # rational invertible B: X -> Y
    while True:
        B = [[scalar(rng.randint(-2, 2), r) for _ in range(k)] for _ in range(k)]
        if k == 0 or linalg.rank(B, _zero) == k:
            break
    FY = mat_scale(linalg.matmul(linalg.matmul(B, FX), linalg.inverse(B, _zero)), Fraction(1, p)) if k else []
    # Z: integer slopes avoiding n, n+1, plus possibly a slope-1/2 block
    FZ = [[z] * m for _ in range(m)]
    i = 0
    while i < m:
        if degree == 1 and i + 1 < m and rng.random() < 0.3:
            FZ[i][i + 1] = scalar(1, r)
            FZ[i + 1][i] = scalar(p * _rand_unit(rng, p).numerator, r)
            i += 2
            continue
        s = rng.choice([v for v in range(-1, n + 4) if v not in (n, n + 1)])
        FZ[i][i] = scalar(_rand_unit(rng, p) * Fraction(p) ** s, r)
        for j in range(i + 1, m):
            FZ[i][j] = _rand_entry(rng, r, degree)
        i += 1
    F = [[z] * dim for _ in range(dim)]
    Nm = [[z] * dim for _ in range(dim)]
    for a in range(k):
        for b in range(k):
            F[a][b] = FX[a][b]
            F[k + a][k + b] = FY[a][b]
            Nm[k + a][b] = B[a][b]
    for a in range(m):
        for b in range(m):
            F[2 * k + a][2 * k + b] = FZ[a][b]
    # random flag
    while True:
        P = [[scalar(rng.randint(-2, 2), r) for _ in range(dim)] for _ in range(dim)]
        if linalg.rank(P, _zero) == dim:
            break
    Pinv = linalg.inverse(P, _zero)
    F2 = linalg.matmul(linalg.matmul(Pinv, F), P)
    N2 = linalg.matmul(linalg.matmul(Pinv, Nm), P)
    while True:
        G = [[_rand_entry(rng, r, degree) for _ in range(dim)] for _ in range(dim)]
        if linalg.rank(G, _zero) == dim:
            break
    gcols = columns(G)
    lo = rng.randint(-1, 1)
    fil = {}
    size = dim
    j = lo
    while size > 0:
        fil[j] = gcols[:size]
        size -= rng.randint(0, 2) if j > lo else rng.randint(1, 2)
        j += 1
    D = FilteredPhiNModule(p, degree, F2, N2, fil, r)
    d = [_rand_entry(rng, r, degree) for _ in range(dim)]
    return D, d
