"""Definite quaternion algebras over Q, Eichler orders, the p-adic splitting and Gamma \\ tree.

Gamma is the group of reduced-norm-one units of R = O[1/p], O an Eichler
Z-order of level N+ in a maximal order of the algebra of discriminant N-.
Its elements are stored as quaternions with rational coordinates in the
standard basis 1, i, j, k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Matrix as SymMatrix, factorint
from sympy.matrices.normalforms import hermite_normal_form

from . import linalg
from .numfield import FieldElem, embed
from .padic import vp_rational
from .tree import DirEdge, Vertex, act, distance, lattice_vertex, neighbors, path_from_root


class UnsupportedDiscriminant(ValueError):
    pass


class RadiusExceeded(RuntimeError):
    pass


class CosetCountMismatch(RuntimeError):
    pass


class NotSplit(ValueError):
    pass


# ------------------------------------------------------------------ algebra

def hilbert_symbol(a: int, b: int, ell) -> int:
    """(a, b)_ell for nonzero integers; ell a prime or the string 'inf'."""
    if ell == "inf":
        return -1 if (a < 0 and b < 0) else 1
    p = ell
    va, vb = vp_rational(a, p), vp_rational(b, p)
    u = a // p ** va
    w = b // p ** vb
    if p != 2:
        sign = (-1) ** (va * vb * ((p - 1) // 2))
        leg = lambda x: 1 if pow(x % p, (p - 1) // 2, p) == 1 else -1
        return sign * leg(u) ** vb * leg(w) ** va
    eps = lambda x: ((x - 1) // 2) % 2
    omg = lambda x: ((x * x - 1) // 8) % 2
    e = eps(u) * eps(w) + va * omg(w) + vb * omg(u)
    return -1 if e % 2 else 1


def ramified_primes(a: int, b: int) -> List:
    primes = set(factorint(abs(a))) | set(factorint(abs(b))) | {2}
    out = [q for q in sorted(primes) if hilbert_symbol(a, b, q) == -1]
    if hilbert_symbol(a, b, "inf") == -1:
        out.append("inf")
    return out


class Quaternion:
    __slots__ = ("alg", "c")

    def __init__(self, alg: "QuaternionAlgebra", coords: Sequence):
        self.alg = alg
        self.c = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in coords)

    def __add__(self, o):
        if isinstance(o, (int, Fraction)):
            o = self.alg.scalar(o)
        return Quaternion(self.alg, [x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(self.alg, [-x for x in self.c])

    def __sub__(self, o):
        if isinstance(o, (int, Fraction)):
            o = self.alg.scalar(o)
        return Quaternion(self.alg, [x - y for x, y in zip(self.c, o.c)])

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return Quaternion(self.alg, [x * o for x in self.c])
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.c
        y0, y1, y2, y3 = o.c
        return Quaternion(self.alg, (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ))

    def __rmul__(self, o):
        return self * o

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return Quaternion(self.alg, [x / o for x in self.c])
        return self * o.inverse()

    def conj(self) -> "Quaternion":
        x0, x1, x2, x3 = self.c
        return Quaternion(self.alg, (x0, -x1, -x2, -x3))

    def nrd(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.c
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def trd(self) -> Fraction:
        return 2 * self.c[0]

    def inverse(self) -> "Quaternion":
        n = self.nrd()
        if n == 0:
            raise ZeroDivisionError("non-invertible quaternion")
        return self.conj() / n

    def is_scalar(self) -> bool:
        return self.c[1] == self.c[2] == self.c[3] == 0

    def __eq__(self, o):
        if isinstance(o, Quaternion):
            return self.c == o.c
        if isinstance(o, (int, Fraction)):
            return self.is_scalar() and self.c[0] == o
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Q(" + ", ".join(str(x) for x in self.c) + ")"

    def to_json(self) -> List[str]:
        return [str(x) for x in self.c]


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int

    def __post_init__(self):
        if self.a >= 0 or self.b >= 0:
            raise ValueError("only definite algebras (a, b < 0) are handled")

    def scalar(self, x) -> Quaternion:
        return Quaternion(self, (x, 0, 0, 0))

    def one(self) -> Quaternion:
        return self.scalar(1)

    def gens(self) -> Tuple[Quaternion, Quaternion, Quaternion]:
        return (Quaternion(self, (0, 1, 0, 0)), Quaternion(self, (0, 0, 1, 0)), Quaternion(self, (0, 0, 0, 1)))

    def element(self, coords) -> Quaternion:
        return Quaternion(self, coords)

    def discriminant(self) -> int:
        out = 1
        for q in ramified_primes(self.a, self.b):
            if q != "inf":
                out *= q
        return out


# ------------------------------------------------------------------ orders

# maximal orders: (a, b, basis in coordinates w.r.t. 1, i, j, k)
_H = Fraction(1, 2)
_Q = Fraction(1, 4)
_MAXIMAL = {
    2: (-1, -1, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (_H, _H, _H, _H)]),
    3: (-1, -3, [(1, 0, 0, 0), (0, 1, 0, 0), (_H, 0, _H, 0), (0, _H, 0, _H)]),
    7: (-1, -7, [(1, 0, 0, 0), (0, 1, 0, 0), (_H, 0, _H, 0), (0, _H, 0, _H)]),
    5: (-2, -5, [(_H, 0, _H, _H), (0, _Q, _H, _Q), (0, 0, 1, 0), (0, 0, 0, 1)]),
    13: (-2, -13, [(_H, 0, _H, _H), (0, _Q, _H, _Q), (0, 0, 1, 0), (0, 0, 0, 1)]),
}


@dataclass
class EichlerOrder:
    """A Z-order given by a basis; elements of O are integer coordinate vectors."""

    alg: QuaternionAlgebra
    basis: List[Quaternion]
    n_minus: int
    n_plus: int
    _binv: list = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        M = [list(b.c) for b in self.basis]  # rows
        self._binv = linalg.inverse(M)

    @property
    def gram(self) -> List[List[Fraction]]:
        return [[(x * y.conj()).trd() / 2 for y in self.basis] for x in self.basis]

    def from_coords(self, v: Sequence[int]) -> Quaternion:
        out = [Fraction(0)] * 4
        for ci, b in zip(v, self.basis):
            if ci:
                out = [o + ci * x for o, x in zip(out, b.c)]
        return Quaternion(self.alg, out)

    def coords(self, x: Quaternion) -> List[Fraction]:
        return [sum((x.c[k] * self._binv[k][i] for k in range(4)), Fraction(0)) for i in range(4)]

    def contains(self, x: Quaternion) -> bool:
        return all(c.denominator == 1 for c in self.coords(x))

    def discriminant(self) -> int:
        G = [[(x * y).trd() for y in self.basis] for x in self.basis]
        d = abs(linalg.det(G))
        r = math.isqrt(int(d))
        if r * r != d:
            raise ValueError("discriminant is not a square")
        return r

    def is_closed(self) -> bool:
        return all(self.contains(x * y) for x in self.basis for y in self.basis)

    def enumerate_norm(self, t: int) -> List[Quaternion]:
        if t <= 0:
            return []
        if t not in self._cache:
            self._cache[t] = [self.from_coords(v) for v in _fincke_pohst(self.gram, t)]
        return self._cache[t]

    def units(self) -> List[Quaternion]:
        return self.enumerate_norm(1)


def _fincke_pohst(G: List[List[Fraction]], t: int) -> List[Tuple[int, ...]]:
    """All integer vectors with v^T G v == t (G positive definite rational)."""
    n = len(G)
    # q_ii and q_ij of the completed-square form, in floats
    q = [[float(G[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    out = []
    eps = 1e-9
    x = [0] * n

    def rec(i: int, remaining: float):
        center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        span = math.sqrt(max(remaining, 0.0) / q[i][i]) + eps
        lo, hi = math.ceil(center - span), math.floor(center + span)
        for xi in range(lo, hi + 1):
            x[i] = xi
            used = q[i][i] * (xi - center) ** 2
            if used > remaining + eps:
                continue
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, remaining - used)
        x[i] = 0

    rec(n - 1, float(t))
    exact = []
    for v in out:
        val = sum(G[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
        if val == t:
            exact.append(v)
    return sorted(exact)


def _lattice_basis(alg: QuaternionAlgebra, gens: List[Quaternion], ref: EichlerOrder) -> List[Quaternion]:
    """Z-basis of the lattice spanned by gens, via Hermite normal form in ref-coordinates."""
    cols = [ref.coords(g) for g in gens]
    den = 1
    for c in cols:
        for x in c:
            den = den * x.denominator // math.gcd(den, x.denominator)
    M = SymMatrix([[int(c[i] * den) for c in cols] for i in range(4)])
    H = hermite_normal_form(M)
    basis = []
    for j in range(H.shape[1]):
        v = [Fraction(int(H[i, j]), den) for i in range(4)]
        if any(v):
            out = [Fraction(0)] * 4
            for ci, b in zip(v, ref.basis):
                out = [o + ci * x for o, x in zip(out, b.c)]
            basis.append(Quaternion(alg, out))
    if len(basis) != 4:
        raise ValueError("lattice is not full rank")
    return basis


def _eichler_refine(O: EichlerOrder, ell: int) -> EichlerOrder:
    """Sub-order of index ell: stabiliser of a line in O / ell O = M_2(F_ell)."""
    x = None
    for t in range(ell, 50 * ell, ell):
        for cand in O.enumerate_norm(t):
            v = O.coords(cand)
            if any(int(c) % ell for c in v):
                x = cand
                break
        if x is not None:
            break
    if x is None:
        raise UnsupportedDiscriminant(f"no zero divisor mod {ell} found")
    # span of b_i * x mod ell
    span = [[int(c) % ell for c in O.coords(b * x)] for b in O.basis]
    # kernel of y -> x*y mod (span), computed over F_ell with brute force on the small space
    span_rows = _rowspace_mod(span, ell)
    keep = []
    for v in product(range(ell), repeat=4):
        y = O.from_coords(v)
        w = [int(c) % ell for c in O.coords(x * y)]
        if _in_span(w, span_rows, ell):
            keep.append(y)
    gens = keep + [b * ell for b in O.basis]
    basis = _lattice_basis(O.alg, gens, O)
    return EichlerOrder(O.alg, basis, O.n_minus, O.n_plus * ell)


def _rowspace_mod(rows, ell):
    R = []
    for r in rows:
        r = list(r)
        for piv_row, pc in R:
            if r[pc]:
                f = r[pc]
                r = [(a - f * b) % ell for a, b in zip(r, piv_row)]
        pc = next((i for i, a in enumerate(r) if a), None)
        if pc is not None:
            inv = pow(r[pc], -1, ell)
            r = [(a * inv) % ell for a in r]
            R.append((r, pc))
    return R


def _in_span(w, R, ell) -> bool:
    w = list(w)
    for piv_row, pc in R:
        if w[pc]:
            f = w[pc]
            w = [(a - f * b) % ell for a, b in zip(w, piv_row)]
    return not any(w)


def algebra_init(n_minus: int, n_plus: int, p: int) -> Tuple[QuaternionAlgebra, EichlerOrder]:
    if n_minus not in _MAXIMAL:
        raise UnsupportedDiscriminant(f"N- = {n_minus} is not in the order table {sorted(_MAXIMAL)}")
    if math.gcd(p, n_minus * n_plus) != 1 or math.gcd(n_minus, n_plus) != 1:
        raise ValueError("need gcd(p, N-N+) = gcd(N-, N+) = 1")
    for ell, e in factorint(n_plus).items():
        if e > 1:
            raise UnsupportedDiscriminant("only squarefree N+ is supported")
    a, b, coords = _MAXIMAL[n_minus]
    alg = QuaternionAlgebra(a, b)
    if alg.discriminant() != n_minus:
        raise AssertionError("order table inconsistent with Hilbert symbols")
    O = EichlerOrder(alg, [alg.element(c) for c in coords], n_minus, 1)
    for ell in sorted(factorint(n_plus)):
        O = _eichler_refine(O, ell)
    return alg, O


# ------------------------------------------------------------------ splitting

class Splitting:
    """Exact embedding iota: B -> M_2(F), F = Q(sqrt(d)) inside Q_p, with iota(O) in M_2(Z_p)."""

    def __init__(self, order: EichlerOrder, p: int, prec: int = 60):
        self.order = order
        self.alg = order.alg
        self.p = p
        self.prec = prec
        self.d, self.images = self._build()
        self._padic_cache: Dict[Tuple, list] = {}

    def _build(self):
        alg, p = self.alg, self.p
        i, j, k = alg.gens()
        y = None
        for v in sorted(product(range(-2, 3), repeat=3), key=lambda t: (sum(abs(c) for c in t), t)):
            if v == (0, 0, 0):
                continue
            cand = i * v[0] + j * v[1] + k * v[2]
            m = -cand.nrd()
            if m.denominator == 1 and int(m) % p and pow(int(m) % p, (p - 1) // 2, p) == 1:
                y = cand
                break
        if y is None:
            raise NotSplit("no splitting element found")
        m = int(-y.nrd())
        sq, d = _square_split(m)
        # pure z orthogonal to y
        def pair(u, w):
            return (u * w.conj()).trd() / 2
        z = None
        for e in (i, j, k):
            cand = e - y * (pair(e, y) / pair(y, y))
            if any(cand.c[1:]):
                z = cand
                break
        c = -z.nrd()
        root = FieldElem(0, sq, d)
        zero, one = FieldElem(0, 0, d), FieldElem(1, 0, d)
        iy = [[root, zero], [zero, -root]]
        iz = [[zero, one * c], [one, zero]]
        iyz = linalg.matmul(iy, iz)
        ione = [[one, zero], [zero, one]]
        yz = y * z
        T = [list(alg.one().c), list(y.c), list(z.c), list(yz.c)]  # rows: coords of new basis
        Tinv = linalg.inverse(T)  # row t gives standard basis element e_t in new basis
        new_imgs = [ione, iy, iz, iyz]
        images = []
        for t in range(4):
            M = [[zero, zero], [zero, zero]]
            for s in range(4):
                coef = Tinv[t][s]
                if coef:
                    M = [[M[r][q] + new_imgs[s][r][q] * coef for q in range(2)] for r in range(2)]
            images.append(M)
        # conjugate so that iota(O) = M_2(Z_p)
        cols = []
        for b in self.order.basis:
            Mb = _apply(images, b, zero)
            for col in range(2):
                cols.append([embed(Mb[0][col], p, self.prec), embed(Mb[1][col], p, self.prec)])
        v = lattice_vertex(cols, p)
        g = [[one * x for x in row] for row in v.matrix()]
        ginv = linalg.inverse(g)
        images = [linalg.matmul(linalg.matmul(ginv, M), g) for M in images]
        return d, images

    def matrix(self, x: Quaternion) -> list:
        zero = FieldElem(0, 0, self.d)
        return _apply(self.images, x, zero)

    def padic_matrix(self, x: Quaternion) -> list:
        key = x.c
        out = self._padic_cache.get(key)
        if out is None:
            M = self.matrix(x)
            out = [[embed(e, self.p, self.prec) for e in row] for row in M]
            self._padic_cache[key] = out
        return out

    def act(self, x: Quaternion, obj):
        return act(self.padic_matrix(x), obj, self.prec)


def _apply(images, x: Quaternion, zero):
    M = [[zero, zero], [zero, zero]]
    for t in range(4):
        coef = x.c[t]
        if coef:
            M = [[M[r][q] + images[t][r][q] * coef for q in range(2)] for r in range(2)]
    return M


def _square_split(m: int) -> Tuple[int, int]:
    """m = s^2 * d with d squarefree; returns (s, d)."""
    s, d = 1, (1 if m > 0 else -1)
    for q, e in factorint(abs(m)).items():
        s *= q ** (e // 2)
        if e % 2:
            d *= q
    return s, d


def splitting(x: Quaternion, sp: Splitting) -> list:
    return sp.padic_matrix(x)


# ------------------------------------------------------------------ quotient graph

@dataclass
class EdgeOrbit:
    rep: DirEdge
    origin_index: int
    stabilizer: List[Quaternion]
    target_index: int
    target_transporter: Quaternion  # delta with delta * rep.target = vertex rep
    reverse_index: int = -1
    reverse_transporter: Optional[Quaternion] = None  # rho with reverse(rep) = rho * rep_{reverse_index}


@dataclass
class VertexOrbit:
    rep: Vertex
    stabilizer: List[Quaternion]


class QuotientGraph:
    def __init__(self, order: EichlerOrder, p: int, radius_hint: int = 8, prec: int = 60):
        self.order = order
        self.alg = order.alg
        self.p = p
        self.split = Splitting(order, p, prec)
        self.radius_hint = radius_hint
        self._gamma_levels: Dict[int, List[Quaternion]] = {}
        self.vertex_orbits: List[VertexOrbit] = []
        self.edge_orbits: List[EdgeOrbit] = []
        # (vertex index, neighbour) -> (edge index, s) with s * (rep -> neighbour) = edge rep
        self.table: Dict[Tuple[int, Vertex], Tuple[int, Quaternion]] = {}
        self._build()

    # -- Gamma elements x / p^k with x primitive of norm p^(2k)
    def gamma_level(self, k: int) -> List[Quaternion]:
        if k not in self._gamma_levels:
            p = self.p
            out = []
            for x in self.order.enumerate_norm(p ** (2 * k)):
                if k and all(c.denominator == 1 and int(c) % p == 0 for c in self.order.coords(x)):
                    continue
                out.append(x / p ** k)
            self._gamma_levels[k] = out
        return self._gamma_levels[k]

    def find_transporter(self, w: Vertex, r: Vertex) -> Optional[Quaternion]:
        """Some gamma in Gamma with gamma * w = r, or None."""
        v0 = Vertex.root(self.p)
        dw, dr = distance(v0, w), distance(v0, r)
        if (dw - dr) % 2:
            return None
        for k in range(0, (dw + dr) // 2 + 1):
            for g in self.gamma_level(k):
                if self.split.act(g, w) == r:
                    return g
        return None

    def stabilizer(self, v: Vertex) -> List[Quaternion]:
        d = distance(Vertex.root(self.p), v)
        out = []
        for k in range(0, d + 1):
            out.extend(g for g in self.gamma_level(k) if self.split.act(g, v) == v)
        return out

    def _build(self):
        p = self.p
        one = self.alg.one()
        v0 = Vertex.root(p)
        self.vertex_orbits.append(VertexOrbit(v0, self.stabilizer(v0)))
        queue = [0]
        while queue:
            ui = queue.pop(0)
            u = self.vertex_orbits[ui].rep
            stab = self.vertex_orbits[ui].stabilizer
            for w in neighbors(u):
                if (ui, w) in self.table:
                    continue
                eidx = len(self.edge_orbits)
                estab = []
                for s in stab:
                    w2 = self.split.act(s, w)
                    if w2 == w:
                        estab.append(s)
                    if (ui, w2) not in self.table:
                        self.table[(ui, w2)] = (eidx, s.inverse())
                # target reduction
                tj, delta = None, None
                for j, vo in enumerate(self.vertex_orbits):
                    g = self.find_transporter(w, vo.rep)
                    if g is not None:
                        tj, delta = j, g
                        break
                if tj is None:
                    if distance(v0, w) > self.radius_hint:
                        raise RadiusExceeded(f"new vertex orbit at distance {distance(v0, w)}")
                    tj, delta = len(self.vertex_orbits), one
                    self.vertex_orbits.append(VertexOrbit(w, self.stabilizer(w)))
                    queue.append(tj)
                self.edge_orbits.append(EdgeOrbit(DirEdge(u, w), ui, estab, tj, delta))
        for eo in self.edge_orbits:
            delta = eo.target_transporter
            back = self.split.act(delta, eo.rep.origin)
            ridx, s = self.table[(eo.target_index, back)]
            eo.reverse_index = ridx
            eo.reverse_transporter = (s * delta).inverse()

    # -- reductions
    def _step(self, gamma: Quaternion, idx: int, w: Vertex) -> Tuple[int, Quaternion]:
        """Given e = gamma * rep_idx, reduce the edge (target(e) -> w)."""
        eo = self.edge_orbits[idx]
        h = eo.target_transporter * gamma.inverse()
        w2 = self.split.act(h, w)
        nidx, s = self.table[(eo.target_index, w2)]
        return nidx, gamma * eo.target_transporter.inverse() * s.inverse()

    def reduce_edge(self, e: DirEdge) -> Tuple[int, Quaternion]:
        """(index, gamma) with e = gamma * edge_orbits[index].rep."""
        path = path_from_root(e.origin) + [e.target]
        idx, s = self.table[(0, path[1])]
        gamma = s.inverse()
        for w in path[2:]:
            idx, gamma = self._step(gamma, idx, w)
        return idx, gamma

    def reduce_vertex(self, v: Vertex) -> Tuple[int, Quaternion]:
        """(index, gamma) with v = gamma * vertex_orbits[index].rep."""
        if v == Vertex.root(self.p):
            return 0, self.alg.one()
        path = path_from_root(v)
        idx, gamma = self.reduce_edge(DirEdge(path[-2], path[-1]))
        eo = self.edge_orbits[idx]
        return eo.target_index, gamma * eo.target_transporter.inverse()

    def walk_depth(self, m: int) -> List[Tuple[DirEdge, int, Quaternion]]:
        """Depth-m edges (fixed order) with their reductions e = gamma * rep."""
        v0 = Vertex.root(self.p)
        level = []
        for w in neighbors(v0):
            idx, s = self.table[(0, w)]
            level.append((DirEdge(v0, w), idx, s.inverse()))
        for _ in range(m - 1):
            nxt = []
            for e, idx, gamma in level:
                for w in neighbors(e.target):
                    if w == e.origin:
                        continue
                    nidx, ng = self._step(gamma, idx, w)
                    nxt.append((DirEdge(e.target, w), nidx, ng))
            level = nxt
        return level

    # -- summaries
    def unordered_edge_orbits(self) -> List[int]:
        """One directed orbit per unordered orbit: those leaving even vertices."""
        v0 = Vertex.root(self.p)
        return [i for i, eo in enumerate(self.edge_orbits) if distance(v0, eo.rep.origin) % 2 == 0]

    def betti_number(self) -> int:
        return len(self.unordered_edge_orbits()) - len(self.vertex_orbits) + 1

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for eo in self.edge_orbits:
                if eo.origin_index == u and eo.target_index not in seen:
                    seen.add(eo.target_index)
                    stack.append(eo.target_index)
        return len(seen) == len(self.vertex_orbits)

    def vertex_mass(self) -> Fraction:
        return sum((Fraction(1, len(vo.stabilizer)) for vo in self.vertex_orbits), Fraction(0))

    def edge_mass(self) -> Fraction:
        return sum((Fraction(1, len(self.edge_orbits[i].stabilizer)) for i in self.unordered_edge_orbits()), Fraction(0))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n_minus": self.order.n_minus,
            "n_plus": self.order.n_plus,
            "vertex_orbits": [
                {"rep": [v.rep.a, str(v.rep.b)], "stabilizer_order": len(v.stabilizer)} for v in self.vertex_orbits
            ],
            "edge_orbits": [
                {
                    "origin": [e.rep.origin.a, str(e.rep.origin.b)],
                    "target": [e.rep.target.a, str(e.rep.target.b)],
                    "origin_index": e.origin_index,
                    "target_index": e.target_index,
                    "stabilizer_order": len(e.stabilizer),
                    "target_transporter": e.target_transporter.to_json(),
                    "reverse_index": e.reverse_index,
                    "reverse_transporter": e.reverse_transporter.to_json(),
                }
                for e in self.edge_orbits
            ],
            "betti_number": self.betti_number(),
            "connected": self.is_connected(),
            "vertex_mass": str(self.vertex_mass()),
        }


def quotient_graph(order: EichlerOrder, p: int, radius_hint: int = 8) -> QuotientGraph:
    return QuotientGraph(order, p, radius_hint)


# ------------------------------------------------------------------ oracles

def kronecker(D: int, ell: int) -> int:
    """Kronecker symbol (D / ell) for a prime ell."""
    if ell == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % ell
    if r == 0:
        return 0
    return 1 if pow(r, (ell - 1) // 2, ell) == 1 else -1


def eichler_mass(n_minus: int, n_plus: int) -> Fraction:
    m = Fraction(1, 24)
    for q in factorint(n_minus):
        m *= q - 1
    for q in factorint(n_plus):
        m *= q + 1
    return m


def shimura_genus(disc: int, level: int) -> int:
    """Genus of the Shimura curve of discriminant disc and squarefree level coprime to it."""
    phi = 1
    for q in factorint(disc):
        phi *= q - 1
    psi = 1
    for q in factorint(level):
        psi *= q + 1
    e2, e3 = 1, 1
    for q in factorint(disc):
        e2 *= 1 - kronecker(-4, q)
        e3 *= 1 - kronecker(-3, q)
    for q in factorint(level):
        e2 *= 1 + kronecker(-4, q)
        e3 *= 1 + kronecker(-3, q)
    g = 1 + Fraction(phi * psi, 12) - Fraction(e2, 4) - Fraction(e3, 3)
    assert g.denominator == 1
    return int(g)


# ------------------------------------------------------------------ Hecke cosets

def hecke_cosets(order: EichlerOrder, ell: int, p: int) -> List[Quaternion]:
    """Representatives of O^x \\ {x in O : nrd x = ell}."""
    if ell == p or (order.n_minus * order.n_plus) % ell == 0:
        raise ValueError(f"T_{ell} needs ell prime to p N- N+")
    units = order.units()
    seen = set()
    reps = []
    for x in order.enumerate_norm(ell):
        if x.c in seen:
            continue
        reps.append(x)
        for u in units:
            seen.add((u * x).c)
    if len(reps) != ell + 1:
        raise CosetCountMismatch(f"found {len(reps)} classes, expected {ell + 1}")
    return reps


def uniformizer(order: EichlerOrder, p: int) -> Quaternion:
    elems = order.enumerate_norm(p)
    if not elems:
        raise ValueError(f"no element of norm {p}")
    return elems[0]
