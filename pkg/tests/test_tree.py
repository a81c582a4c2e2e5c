from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from heegnerpadic.tree import (
    DirEdge, Vertex, act, ball_of_edge, depth_edges, distance, iter_ball, neighbors, normalize,
    root_edges, subdivide,
)

p = 3
v0 = Vertex.root(p)


def test_normalize_identity():
    assert normalize([[1, 0], [0, 1]], p) == v0


def test_normalize_reduction_oracle():
    # [[p, b], [0, 1]] spans the lattice of vertex (1, b mod p); right unimodular factors change nothing
    U = [[2, 1], [1, 1]]
    for b in range(-4, 5):
        for b2 in range(-4, 5):
            g1 = [[p, b], [0, 1]]
            g2 = [[p * U[0][0] + b2 * U[1][0], p * U[0][1] + b2 * U[1][1]], [U[1][0], U[1][1]]]
            same = normalize(g1, p) == normalize(g2, p)
            assert same == ((b - b2) % p == 0)


def test_normalize_scaling():
    assert normalize([[p * p, 0], [0, p]], p) == Vertex(p, 1, Fraction(0))


def test_neighbors():
    nb = neighbors(v0)
    assert len(nb) == p + 1
    assert len(set(nb)) == p + 1
    # labels 0..p-1 are the children b = t, infinity is the parent
    assert nb[:p] == [Vertex(p, 1, Fraction(t)) for t in range(p)]
    assert nb[p] == Vertex(p, -1, Fraction(0))
    for w in nb:
        assert v0 in neighbors(w)


def test_ball_of_root_edges():
    for t, e in enumerate(root_edges(p)[:p]):
        B = ball_of_edge(e)
        assert B.kind == "finite" and B.center == t and B.depth == 1
    Binf = ball_of_edge(root_edges(p)[p])
    for x in (Fraction(1, 3), Fraction(2, 9), "inf"):
        assert Binf.contains(x)
    for x in (0, 1, 2, Fraction(5, 2)):
        assert not Binf.contains(x)


SAMPLES = [Fraction(a, 3 ** k) for a in range(-13, 14) for k in range(0, 3)] + [Fraction(a * 27) for a in range(-5, 6)] + ["inf"]


def test_edge_and_reverse_partition():
    for e in depth_edges(p, 2):
        B, C = ball_of_edge(e), ball_of_edge(e.reverse())
        for x in SAMPLES:
            assert B.contains(x) != C.contains(x)


def test_subdivide_partition_and_depth():
    for e in depth_edges(p, 2):
        kids = subdivide(e)
        assert len(kids) == p
        B = ball_of_edge(e)
        for x in SAMPLES:
            hits = sum(ball_of_edge(c).contains(x) for c in kids)
            assert hits == (1 if B.contains(x) else 0)
        if B.kind == "finite":
            assert all(ball_of_edge(c).depth == B.depth + 1 for c in kids)


def test_depth_edges_count_and_cover():
    for m in range(1, 5):
        edges = depth_edges(p, m)
        assert len(edges) == (p + 1) * p ** (m - 1)
        for x in SAMPLES:
            assert sum(ball_of_edge(e).contains(x) for e in edges) == 1


def test_act():
    g = [[p, 0], [0, 1]]
    assert act([[1, 0], [0, 1]], v0) == v0
    assert act(g, v0) == Vertex(p, 1, Fraction(0))
    w = Vertex(p, 2, Fraction(5))
    h = [[2, 1], [3, 7]]
    assert act([[5 * x for x in row] for row in h], w) == act(h, w)


def test_distance():
    assert distance(v0, v0) == 0
    assert distance(v0, Vertex(p, 1, Fraction(0))) == 1
    a, b = Vertex(p, 2, Fraction(4)), Vertex(p, -1, Fraction(0))
    assert distance(a, b) == 3
    # the geodesic from a to b passes through v0, so distances add up
    assert distance(a, v0) + distance(v0, b) == distance(a, b)


def test_ball_sphere_counts():
    for m in range(1, 5):
        sphere = [w for w in iter_ball(v0, m) if distance(v0, w) == m]
        assert len(sphere) == (p + 1) * p ** (m - 1)


def test_ball_of_edge_injective():
    for m in range(1, 4):
        edges = depth_edges(p, m)
        assert len({ball_of_edge(e) for e in edges}) == len(edges)


entry = st.builds(lambda a, k: Fraction(a) * Fraction(3) ** k, st.integers(-40, 40), st.integers(-2, 2))


def _mobius_exact(g, x):
    (a, b), (c, d) = g
    if x == "inf":
        return "inf" if c == 0 else a / c
    den = c * x + d
    return "inf" if den == 0 else (a * x + b) / den


@settings(max_examples=100, deadline=None)
@given(entry, entry, entry, entry, st.integers(0, 11))
def test_equivariance(a, b, c, d, ei):
    if a * d - b * c == 0:
        return
    g = [[a, b], [c, d]]
    e = depth_edges(p, 2)[ei]
    ge = act(g, e)
    B, gB = ball_of_edge(e), ball_of_edge(ge)
    for x in SAMPLES:
        y = _mobius_exact(g, x)
        assert B.contains(x) == gB.contains(y)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 35))
def test_reverse_involution(i):
    e = depth_edges(p, 3)[i]
    assert e.reverse() != e
    assert e.reverse().reverse() == e
    assert isinstance(e.reverse(), DirEdge)
