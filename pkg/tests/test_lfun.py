from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import pytest

from heegnerpadic.lfun import (
    HypothesisViolation, LfunConfig, NormNotOne, _linear_product, aj_value, check_heegner,
    class_number, eta, eta_inv, find_embedding, is_fundamental, lfun, partial_lderiv, partial_lfun,
    theorem_check, theorem_constant,
)
from heegnerpadic.measure import coleman_line_integral
from heegnerpadic.padic import QuadElem, frobenius, to_quad

p, n = 3, 2


def Q(a, b=0):
    return QuadElem.from_rationals(p, a, b, 40)


def _agree(a, b, slack=0):
    d = a - b
    return d.is_zero() or d.valuation() >= min(a.absprec, b.absprec) - slack


def test_field_helpers():
    assert [class_number(d) for d in (-3, -4, -7, -19, -43, -163, -15, -20)] == [1, 1, 1, 1, 1, 1, 2, 2]
    assert is_fundamental(-19) and not is_fundamental(-12)
    check_heegner(-19, 3, 2, 1)
    for bad in (-20, -7, -3):
        with pytest.raises(HypothesisViolation):
            check_heegner(bad, 3, 2, 1)


def test_embedding_oracle(order, emb):
    # exhaustive search: trace-zero elements of norm 19 in the Hurwitz order
    candidates = [x for x in order.enumerate_norm(19) if x.trd() == 0]
    assert candidates
    assert any(x == emb.x for x in candidates)
    assert emb.x * emb.x == order.alg.scalar(-19)
    # optimality: (x + disc)/2 lies in the order, so the whole ring of integers embeds
    assert order.contains((emb.x + order.alg.scalar(-19)) * Fraction(1, 2))


def test_fixed_points(emb):
    (a, b), (c, d) = [[to_quad(x, p) for x in row] for row in emb.u]
    z = emb.z0
    assert _agree(a * z + b, z * (c * z + d))
    assert frobenius(emb.z0) == emb.zbar0
    assert not emb.omega.is_zero()
    P = [to_quad(x, p) for x in emb.poly()]
    for r in (emb.z0, emb.zbar0):
        assert (r * r * P[2] + r * P[1] + P[0]).is_zero()


def test_eta(emb):
    assert eta(emb, Q(1)) == "inf"
    rng = random.Random(9)
    for _ in range(50):
        y = Q(rng.randint(-99, 99), rng.choice([1, 2, 4, 5, -7]))
        alpha = y / frobenius(y)
        if (alpha - 1).is_zero():
            continue
        x = eta(emb, alpha)
        assert _agree(eta_inv(emb, x), alpha)
    for x in range(-10, 11):
        assert eta_inv(emb, x).norm() == 1
    with pytest.raises(NormNotOne):
        eta(emb, Q(2))


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_critical_values_vanish_exactly(lcfg, emb, depth):
    for s in range(1, n + 2):
        I = partial_lfun(lcfg, emb, s, depth)
        assert I.exact and I.value.is_zero()


def test_linearity_in_cocycle(lcfg, emb, form):
    double = LfunConfig(form.scale(2), [emb], depth=3)
    for s in (2, 5, -1):
        a = partial_lfun(lcfg, emb, s, 3).value
        b = partial_lfun(double, emb, s, 3).value
        assert b == a * 2
    assert not partial_lfun(lcfg, emb, 5, 3).value.is_zero()
    assert lfun(lcfg, 5, 3) == partial_lfun(lcfg, emb, 5, 3).value


@dataclass
class _Stub:
    n: int


@pytest.mark.parametrize("bad_n", [0, 1, 3])
def test_weight_guard(emb, bad_n):
    with pytest.raises(HypothesisViolation):
        LfunConfig(_Stub(bad_n), [emb])


def test_lderiv_cauchy_rate(lcfg, emb):
    vals = [partial_lderiv(lcfg, emb, 0, m).value for m in range(1, 5)]
    diffs = [(b - a).valuation() if not (b - a).is_zero() else (b - a).absprec for a, b in zip(vals, vals[1:])]
    assert all(y > x for x, y in zip(diffs, diffs[1:]))


def test_relabel_swap(lcfg, emb):
    # exchanging z0 and zbar0 (same u, same P) inverts R, so value(j) -> -value(n-j)
    rl = emb.relabel()
    for j in range(n + 1):
        a = partial_lderiv(lcfg, rl, j, 4).value
        b = partial_lderiv(lcfg, emb, n - j, 4).value
        assert _agree(a, -b)
        assert _agree(a, frobenius(partial_lderiv(lcfg, emb, j, 4).value))


def test_negation_swap_sign(lcfg, emb):
    # x -> -x additionally negates P_Psi, contributing (-1)^(n/2)
    ng = emb.negate()
    sign = -((-1) ** (n // 2))
    for j in range(n + 1):
        a = partial_lderiv(lcfg, ng, j, 4).value
        b = partial_lderiv(lcfg, emb, n - j, 4).value
        assert _agree(a, b * sign)


def test_central_point_cross_route(lcfg, emb):
    j = n // 2
    lhs = partial_lderiv(lcfg, emb, j, 4).value
    P = _linear_product(n, j, emb.z0, emb.zbar0)
    rhs = coleman_line_integral(lcfg.measure, P, emb.zbar0, emb.z0, 4).value
    assert _agree(lhs, rhs * to_quad(theorem_constant(emb, n), p))


def test_theorem_check_reference(lcfg, emb):
    tc = theorem_check(lcfg, emb, 1, 4)
    assert tc.agreement >= min(tc.lhs.absprec, tc.rhs.absprec) - 1
    t0, t2 = theorem_check(lcfg, emb, 0, 4), theorem_check(lcfg, emb, 2, 4)
    # both swap identities together: sigma(value(0)) = -value(n)
    assert _agree(frobenius(t0.lhs), -t2.lhs)
    assert _agree(frobenius(t0.rhs), -t2.rhs)
    data = tc.to_json()
    assert data["j"] == 1 and data["depth"] == 4


def test_theorem_agreement_grows(lcfg, emb):
    ag = [theorem_check(lcfg, emb, 0, m).agreement for m in (2, 3, 4)]
    assert ag[0] < ag[1] < ag[2]
    assert ag[2] - ag[1] >= n // 2 + 1


def test_aj_scaling(lcfg):
    for j in (0, 2):
        base = aj_value(lcfg, j, 3)
        for lam in (2, 1 + p):
            assert _agree(aj_value(lcfg, j, 3, lam), base * to_quad(lam, p) ** (2 * j - n))


def test_aj_routes_agree(lcfg):
    for j in range(n + 1):
        assert _agree(aj_value(lcfg, j, 3, route="coleman"), aj_value(lcfg, j, 3, route="lderiv"))


def test_other_heegner_fields(graph):
    for disc in (-43, -67):
        e = find_embedding(graph, disc)
        assert e.x * e.x == graph.alg.scalar(disc)
        assert frobenius(e.z0) == e.zbar0
