"""V_n coefficients, harmonic cocycles on Gamma \\ tree, and Hecke operators.

An element of V_n is stored by its moments (phi(x^0), ..., phi(x^n)). A
matrix g acts on polynomials on the right by
``(P.g)(x) = (cx+d)^n P((ax+b)/(cx+d))`` and on V_n on the left by duality,
which in moment coordinates is multiplication by :func:`vn_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Sequence

from . import linalg
from .numfield import FieldElem
from .quat import EichlerOrder, Quaternion, QuotientGraph, hecke_cosets, uniformizer
from .tree import neighbors


class WeightMismatch(ValueError):
    pass


class NonTraceless(ValueError):
    pass


class BadPrime(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


# ------------------------------------------------------------------ polynomials

def poly_mul(P: Sequence, Q: Sequence) -> list:
    out = [P[0] * 0] * (len(P) + len(Q) - 1)
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            out[i + j] = out[i + j] + a * b
    return out


def poly_pow(P: Sequence, k: int, one=1) -> list:
    out = [one]
    for _ in range(k):
        out = poly_mul(out, P)
    return out


def vn_matrix(g, n: int) -> list:
    """M[i][k] = coefficient of x^k in (ax+b)^i (cx+d)^(n-i)."""
    (a, b), (c, d) = g
    one = a ** 0 if not isinstance(a, (int, Fraction)) else 1
    rows = []
    for i in range(n + 1):
        row = poly_mul(poly_pow([b, a], i, one), poly_pow([d, c], n - i, one))
        rows.append(row)
    return rows


def poly_action(P: Sequence, g, n: int) -> list:
    """Right weight-n action on a polynomial given by its n+1 coefficients."""
    M = vn_matrix(g, n)
    out = [P[0] * 0] * (n + 1)
    for i in range(n + 1):
        for k in range(n + 1):
            out[k] = out[k] + P[i] * M[i][k]
    return out


@dataclass(frozen=True)
class VnElem:
    n: int
    moments: tuple

    def __post_init__(self):
        if len(self.moments) != self.n + 1:
            raise WeightMismatch("need n+1 moments")

    def act(self, g) -> "VnElem":
        return VnElem(self.n, tuple(linalg.matvec(vn_matrix(g, self.n), list(self.moments))))

    def evaluate(self, P: Sequence):
        acc = self.moments[0] * 0
        for c, m in zip(P, self.moments):
            acc = acc + c * m
        return acc

    def __add__(self, o):
        return VnElem(self.n, tuple(x + y for x, y in zip(self.moments, o.moments)))

    def __neg__(self):
        return VnElem(self.n, tuple(-x for x in self.moments))

    def scale(self, s):
        return VnElem(self.n, tuple(x * s for x in self.moments))


def weight_action(x, g, n: int | None = None):
    """Left action on VnElem, right action on a coefficient list."""
    if isinstance(x, VnElem):
        return x.act(g)
    return poly_action(x, g, n if n is not None else len(x) - 1)


def vn_pair(x: VnElem, y: VnElem):
    """Sym^n extension of <a w0+b w1+c w2, a'w0+b'w1+c'w2> = 2bb' - a'c - ac'."""
    if x.n != y.n:
        raise WeightMismatch(f"{x.n} != {y.n}")
    n = x.n
    if n % 2:
        raise WeightMismatch("pairing is symmetric only for even n")
    acc = x.moments[0] * 0
    for i in range(n + 1):
        acc = acc + (-1) ** (i + n // 2) * comb(n, i) * x.moments[i] * y.moments[n - i]
    return acc


def sym_pair_uv(n: int, x: Dict[int, object], y: Dict[int, object]):
    """Pairing on Sym^n of a plane with basis u, v and <u,v> = 1 = -<v,u>.

    Elements are dicts {i: coefficient of u^i v^(n-i)}. Computed as the
    normalised permanent-style sum over S_n.
    """
    acc = 0
    for i, a in x.items():
        for k, b in y.items():
            if k != n - i:
                continue
            # u's of x pair with v's of y and vice versa
            acc = acc + a * b * Fraction(factorial(i) * factorial(n - i), factorial(n)) * (-1) ** (n - i)
    return acc


def poly_from_traceless(u) -> list:
    """P_u(x) = (1, -x) u (x, 1)^T = -c x^2 + (a - d) x + b, as coefficients [b, a-d, -c]."""
    (a, b), (c, d) = u
    if a + d != 0:
        raise NonTraceless("trace must vanish")
    return [b, a - d, -c]


def traceless_action(u, beta) -> list:
    """u . beta = adj(beta) u beta, so that P_{u.beta} = P_u . beta in weight 2."""
    (a, b), (c, d) = beta
    adj = [[d, -b], [-c, a]]
    return linalg.matmul(linalg.matmul(adj, u), beta)


def pijn(i: int, j: int, n: int, X, Y):
    """P_{i,j,n}(X, Y) = sum_k C(j,k) C(n-j, k+i-j) (-1)^(n-i) X^k Y^(n-i-k)."""
    if not (0 <= i <= n and 0 <= j <= n):
        raise IndexOutOfRange(f"(i, j, n) = {(i, j, n)}")
    acc = X * 0
    for k in range(0, j + 1):
        m = k + i - j
        if m < 0 or m > n - j or n - i - k < 0:
            continue
        acc = acc + comb(j, k) * comb(n - j, m) * (-1) ** (n - i) * X ** k * Y ** (n - i - k)
    return acc


def basis_change(j: int, n: int, z0, zbar0) -> list:
    """Coordinates Omega^(j-n) P_{i,j,n}(z0, zbar0), i = 0..n, of omega^j eta^(n-j)."""
    omega = z0 - zbar0
    scale = omega ** (j - n)
    return [pijn(i, j, n, z0, zbar0) * scale for i in range(n + 1)]


# ------------------------------------------------------------------ harmonic cocycles

class HarmonicSpace:
    """Gamma-invariant harmonic cocycles of weight n+2 on a quotient graph, exact over F."""

    def __init__(self, graph: QuotientGraph, n: int):
        if n % 2:
            raise WeightMismatch("n must be even")
        self.graph = graph
        self.n = n
        self.d = graph.split.d
        self.zero = FieldElem(0, 0, self.d)
        self.one = FieldElem(1, 0, self.d)
        self._mcache: Dict[tuple, list] = {}
        self.basis = [HarmonicCocycle(self, vals) for vals in self._solve()]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def matrix_of(self, x: Quaternion) -> list:
        key = x.c
        M = self._mcache.get(key)
        if M is None:
            M = vn_matrix(self.graph.split.matrix(x), self.n)
            self._mcache[key] = M
        return M

    def _solve(self) -> List[List[list]]:
        g, n = self.graph, self.n
        E = len(g.edge_orbits)
        size = n + 1
        rows = []

        def blank():
            return [self.zero] * (E * size)

        def add_block(row, e, M, sign=1):
            for r in range(size):
                for k in range(size):
                    row[r][e * size + k] = row[r][e * size + k] + M[r][k] * sign

        for idx, eo in enumerate(g.edge_orbits):
            for s in eo.stabilizer:
                blk = [blank() for _ in range(size)]
                add_block(blk, idx, self.matrix_of(s))
                add_block(blk, idx, linalg.identity(size, self.one, self.zero), -1)
                rows.extend(blk)
            blk = [blank() for _ in range(size)]
            add_block(blk, eo.reverse_index, self.matrix_of(eo.reverse_transporter))
            add_block(blk, idx, linalg.identity(size, self.one, self.zero))
            rows.extend(blk)
        for vi, vo in enumerate(g.vertex_orbits):
            blk = [blank() for _ in range(size)]
            for w in neighbors(vo.rep):
                eidx, s = g.table[(vi, w)]
                add_block(blk, eidx, self.matrix_of(s.inverse()))
            rows.extend(blk)
        rows = [r for r in rows if any(x != 0 for x in r)]
        null = linalg.nullspace(rows, E * size, self.zero, self.one)
        out = []
        for v in null:
            out.append([v[e * size:(e + 1) * size] for e in range(E)])
        return out

    # -- linear algebra in the space
    def coordinates(self, c: "HarmonicCocycle") -> list:
        flat_basis = [b.flat() for b in self.basis]
        A = linalg.transpose(flat_basis)
        return linalg.solve(A, c.flat())

    def hecke_matrix(self, ell: int) -> list:
        cols = [self.coordinates(hecke_apply(b, ell)) for b in self.basis]
        return linalg.transpose(cols)

    def eigenform(self, ell: int = None) -> "HarmonicCocycle":
        """Normalised eigenvector; for a one-dimensional space the unique basis line."""
        if self.dimension == 0:
            raise ValueError("empty space")
        if self.dimension > 1:
            raise NotImplementedError("eigenform splitting is only implemented for one-dimensional spaces")
        return self.basis[0].normalized()


class HarmonicCocycle:
    def __init__(self, space: HarmonicSpace, values: List[list]):
        self.space = space
        self.values = values

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def graph(self) -> QuotientGraph:
        return self.space.graph

    def flat(self) -> list:
        return [x for v in self.values for x in v]

    def value_at_rep(self, idx: int) -> VnElem:
        return VnElem(self.n, tuple(self.values[idx]))

    def value(self, e) -> VnElem:
        idx, gamma = self.graph.reduce_edge(e)
        return VnElem(self.n, tuple(linalg.matvec(self.space.matrix_of(gamma), self.values[idx])))

    def moments_via(self, idx: int, gamma: Quaternion) -> list:
        return linalg.matvec(self.space.matrix_of(gamma), self.values[idx])

    def scale(self, s) -> "HarmonicCocycle":
        return HarmonicCocycle(self.space, [[x * s for x in v] for v in self.values])

    def __add__(self, o):
        return HarmonicCocycle(self.space, [[x + y for x, y in zip(u, v)] for u, v in zip(self.values, o.values)])

    def normalized(self) -> "HarmonicCocycle":
        for x in self.flat():
            if x != 0:
                return self.scale(1 / x if isinstance(x, (int, Fraction)) else x.inverse())
        raise ValueError("zero cocycle")

    def residuals(self) -> Dict[str, list]:
        """Exact constraint residuals (all entries are zero for a genuine cocycle)."""
        g, sp = self.graph, self.space
        out = {"stabilizer": [], "antisymmetry": [], "harmonicity": []}
        for idx, eo in enumerate(g.edge_orbits):
            for s in eo.stabilizer:
                v = linalg.matvec(sp.matrix_of(s), self.values[idx])
                out["stabilizer"].extend(a - b for a, b in zip(v, self.values[idx]))
            v = linalg.matvec(sp.matrix_of(eo.reverse_transporter), self.values[eo.reverse_index])
            out["antisymmetry"].extend(a + b for a, b in zip(v, self.values[idx]))
        for vi, vo in enumerate(g.vertex_orbits):
            acc = [sp.zero] * (self.n + 1)
            for w in neighbors(vo.rep):
                eidx, s = g.table[(vi, w)]
                v = linalg.matvec(sp.matrix_of(s.inverse()), self.values[eidx])
                acc = [a + b for a, b in zip(acc, v)]
            out["harmonicity"].extend(acc)
        return out

    def is_valid(self) -> bool:
        return all(x == 0 for vals in self.residuals().values() for x in vals)

    def to_json(self) -> list:
        return [[x.to_json() for x in v] for v in self.values]


def hecke_apply(c: HarmonicCocycle, ell: int) -> HarmonicCocycle:
    """T_ell for ell prime to p N, and U_p for ell = p.

    (T c)(e) = sum_a adj(a) . c(a e) over coset representatives a of norm ell.
    At p the double coset is the single coset of a norm-p element w, which
    normalises R, so U_p c(e) = adj(w) . c(w e).
    """
    g = c.graph
    sp = c.space
    order: EichlerOrder = g.order
    p = g.p
    n = c.n
    if ell == p:
        w = uniformizer(order, p)
        new = []
        for idx, eo in enumerate(g.edge_orbits):
            img = g.split.act(w, eo.rep)
            v = c.value(img).moments
            new.append(linalg.matvec(sp.matrix_of(w.conj()), list(v)))
        return HarmonicCocycle(sp, new)
    if (order.n_minus * order.n_plus) % ell == 0:
        raise BadPrime(f"{ell} divides the level")
    reps = hecke_cosets(order, ell, p)
    new = []
    for idx, eo in enumerate(g.edge_orbits):
        acc = [sp.zero] * (n + 1)
        for a in reps:
            img = g.split.act(a, eo.rep)
            v = c.value(img).moments
            acc = [x + y for x, y in zip(acc, linalg.matvec(sp.matrix_of(a.conj()), list(v)))]
        new.append(acc)
    return HarmonicCocycle(sp, new)


def harmonic_basis(graph: QuotientGraph, n: int) -> List[HarmonicCocycle]:
    return HarmonicSpace(graph, n).basis
