"""The Bruhat-Tits tree of PGL_2(Q_p).

A vertex is the class of the lattice spanned by the columns of
``[[p^a, b], [0, 1]]`` with ``b`` a rational with p-power denominator reduced
mod ``p^a``; equivalently the closed disc ``b + p^a Z_p``. Edges pointing away
from the end at infinity correspond to smaller discs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Union

from .padic import INF, PadicElem, PrecisionLoss, vp_rational


class SingularMatrix(ArithmeticError):
    pass


def reduce_mod(b: Fraction, p: int, a: int) -> Fraction:
    """Canonical representative of b mod p^a Z_p for b in Z[1/p]."""
    b = Fraction(b)
    if b == 0:
        return b
    den = b.denominator
    s = 0
    while den % p == 0:
        den //= p
        s += 1
    if den != 1:
        raise ValueError(f"{b} is not in Z[1/{p}]")
    if a + s <= 0:
        return Fraction(0)
    mod = p ** (a + s)
    return Fraction(b.numerator % mod, p ** s)


def _truncate(x: PadicElem, a: int) -> Fraction:
    """x mod p^a as a rational in Z[1/p]."""
    if x.absprec < a:
        raise PrecisionLoss(f"need {a} digits, have {x.absprec}")
    if x.is_zero() or x.val >= a:
        return Fraction(0)
    return reduce_mod(x.lift(), x.p, a)


@dataclass(frozen=True, order=True)
class Vertex:
    p: int
    a: int
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", reduce_mod(self.b, self.p, self.a))

    @classmethod
    def root(cls, p: int) -> "Vertex":
        return cls(p, 0, Fraction(0))

    def matrix(self) -> list:
        return [[Fraction(self.p) ** self.a, self.b], [Fraction(0), Fraction(1)]]

    def children(self) -> List["Vertex"]:
        step = Fraction(self.p) ** self.a
        return [Vertex(self.p, self.a + 1, self.b + t * step) for t in range(self.p)]

    def parent(self) -> "Vertex":
        return Vertex(self.p, self.a - 1, self.b)

    def __repr__(self):
        return f"V({self.a},{self.b})"


@dataclass(frozen=True, order=True)
class DirEdge:
    origin: Vertex
    target: Vertex

    def __post_init__(self):
        if distance(self.origin, self.target) != 1:
            raise ValueError(f"{self.origin} and {self.target} are not adjacent")

    def reverse(self) -> "DirEdge":
        return DirEdge(self.target, self.origin)

    def points_down(self) -> bool:
        return self.target.a == self.origin.a + 1

    def __repr__(self):
        return f"E({self.origin!r}->{self.target!r})"


@dataclass(frozen=True)
class Ball:
    """``center + p^depth Z_p`` (finite) or its complement in P^1(Q_p)."""

    p: int
    kind: str
    center: Fraction
    depth: int

    def __post_init__(self):
        if self.kind not in ("finite", "complement"):
            raise ValueError(self.kind)
        object.__setattr__(self, "center", reduce_mod(self.center, self.p, self.depth))

    def contains(self, x) -> bool:
        """x is a rational, a PadicElem, or the string 'inf'."""
        if isinstance(x, str):
            inside = False
        else:
            if isinstance(x, PadicElem):
                diff = x - PadicElem.from_rational(self.p, self.center, absprec=max(self.depth + 5, 10), prec=10 ** 6)
                if diff.absprec < self.depth:
                    raise PrecisionLoss("point known too coarsely")
                v = diff.valuation()
            else:
                v = vp_rational(Fraction(x) - self.center, self.p)
            inside = v >= self.depth
        return inside if self.kind == "finite" else not inside

    def complement(self) -> "Ball":
        return Ball(self.p, "complement" if self.kind == "finite" else "finite", self.center, self.depth)

    def radius(self) -> int:
        """Valuation of the local chart variable on the ball."""
        return self.depth if self.kind == "finite" else 1 - self.depth


def distance(v: Vertex, w: Vertex) -> int:
    c = min(v.a, w.a)
    diff = vp_rational(v.b - w.b, v.p)
    if diff != INF:
        c = min(c, int(diff))
    return (v.a - c) + (w.a - c)


def neighbors(v: Vertex) -> List[Vertex]:
    """Children (labelled 0..p-1) followed by the parent (the label infinity)."""
    return v.children() + [v.parent()]


def ball_of_edge(e: DirEdge) -> Ball:
    o, t = e.origin, e.target
    if e.points_down():
        return Ball(o.p, "finite", t.b, t.a)
    return Ball(o.p, "complement", o.b, o.a)


def subdivide(e: DirEdge) -> List[DirEdge]:
    return [DirEdge(e.target, w) for w in neighbors(e.target) if w != e.origin]


def root_edges(p: int) -> List[DirEdge]:
    v0 = Vertex.root(p)
    return [DirEdge(v0, w) for w in neighbors(v0)]


def depth_edges(p: int, m: int) -> List[DirEdge]:
    """The (p+1)p^(m-1) edges at distance m from v0 whose balls partition P^1(Q_p)."""
    edges = root_edges(p)
    for _ in range(m - 1):
        edges = [c for e in edges for c in subdivide(e)]
    return edges


# ------------------------------------------------------------------ action

Entry = Union[PadicElem, Fraction, int]


def _as_padic(x, p: int, prec: int) -> PadicElem:
    if isinstance(x, PadicElem):
        return x
    return PadicElem.from_rational(p, Fraction(x), prec)


def normalize(g: Sequence[Sequence[Entry]], p: int, prec: int = 60) -> Vertex:
    """Vertex of the lattice spanned by the columns of g."""
    (al, be), (ga, de) = [[_as_padic(x, p, prec) for x in row] for row in g]
    if ga.is_zero() and de.is_zero():
        raise SingularMatrix("second row vanishes")
    if ga.is_zero() or (not de.is_zero() and de.valuation() <= ga.valuation()):
        A = al - ga / de * be
        B, D = be, de
    else:
        A = be - de / ga * al
        B, D = al, ga
    if A.is_zero():
        raise SingularMatrix("determinant indistinguishable from zero")
    a = A.valuation() - D.valuation()
    return Vertex(p, a, _truncate(B / D, a))


def lattice_vertex(columns: Sequence[Sequence[PadicElem]], p: int) -> Vertex:
    """Vertex of the Z_p-lattice spanned by the given column vectors."""
    cols = [c for c in columns if not (c[0].is_zero() and c[1].is_zero())]
    with_y = [c for c in cols if not c[1].is_zero()]
    if not with_y:
        raise SingularMatrix("columns do not span a lattice")
    piv = min(with_y, key=lambda c: c[1].valuation())
    firsts = []
    for c in cols:
        if c is piv:
            continue
        x = c[0] - c[1] / piv[1] * piv[0] if not c[1].is_zero() else c[0]
        if not x.is_zero():
            firsts.append(x)
    if not firsts:
        raise SingularMatrix("columns do not span a lattice")
    A = min(firsts, key=lambda x: x.valuation())
    a = A.valuation() - piv[1].valuation()
    return Vertex(p, a, _truncate(piv[0] / piv[1], a))


def act(g, x, prec: int = 60):
    """Left action of a 2x2 matrix on a Vertex or DirEdge."""
    if isinstance(x, DirEdge):
        return DirEdge(act(g, x.origin, prec), act(g, x.target, prec))
    p = x.p
    M = x.matrix()
    gp = [[_as_padic(e, p, prec) for e in row] for row in g]
    prod = [
        [gp[0][0] * M[0][0] + gp[0][1] * M[1][0], gp[0][0] * M[0][1] + gp[0][1] * M[1][1]],
        [gp[1][0] * M[0][0] + gp[1][1] * M[1][0], gp[1][0] * M[0][1] + gp[1][1] * M[1][1]],
    ]
    return normalize(prod, p, prec)


def mobius(g, x, p: int, prec: int = 60):
    """Image of x in P^1(Q_p) ('inf' for infinity) under z -> (az+b)/(cz+d)."""
    (a, b), (c, d) = [[_as_padic(e, p, prec) for e in row] for row in g]
    if isinstance(x, str):
        num, den = a, c
    else:
        xx = _as_padic(x, p, prec)
        num, den = a * xx + b, c * xx + d
    if den.is_zero():
        return "inf"
    return num / den


def path_from_root(v: Vertex) -> List[Vertex]:
    """Vertices on the geodesic from v0 to v, both included."""
    p = v.p
    v0 = Vertex.root(p)
    c = min(0, v.a)
    dv = vp_rational(v.b, p)
    if dv != INF:
        c = min(c, int(dv))
    up = [Vertex(p, k, Fraction(0)) for k in range(0, c - 1, -1)]
    down = [Vertex(p, k, v.b) for k in range(c + 1, v.a + 1)]
    path = up + down
    assert path[0] == v0 and path[-1] == v
    return path


def render_subtree(v: Vertex, radius: int, indent: str = "") -> str:
    """Indented text view of the ball of the given radius around v (debugging aid)."""
    lines = []

    def walk(u: Vertex, prev, r: int, pad: str):
        lines.append(f"{pad}{u!r}")
        if r == 0:
            return
        for w in neighbors(u):
            if w != prev:
                walk(w, u, r - 1, pad + "  ")

    walk(v, None, radius, indent)
    return "\n".join(lines)


def iter_ball(v: Vertex, radius: int) -> Iterator[Vertex]:
    seen = {v}
    frontier = [v]
    yield v
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for w in neighbors(u):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    yield w
        frontier = nxt
