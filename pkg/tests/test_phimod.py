from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heegnerpadic import linalg
from heegnerpadic.phimod import (
    ExtClass, FilteredPhiNModule, HypothesisViolation, check_hypothesis, class_from_extension,
    em2_stalk, extension_from_class, in_span, is_subspace, random_instance, scalar, sigma_mat, slope_decomposition,
    slopes, span, tate_twist, validate,
)

p = 3


def trivial(degree):
    return FilteredPhiNModule(p, degree, [[1]], [[0]], {0: [[1]]})


def test_trivial_module_valid():
    for degree in (1, 2):
        assert validate(trivial(degree)).valid


def test_violation_reported():
    D = FilteredPhiNModule(p, 1, [[1, 0], [0, 1]], [[0, 1], [0, 0]], {0: [[1, 0], [0, 1]]})
    rep = validate(D)
    assert not rep.valid
    assert any("N phi" in v for v in rep.violations)


def test_filtration_violations():
    D = FilteredPhiNModule(p, 1, [[1, 0], [0, 1]], [[0, 0], [0, 0]], {0: [[1, 0]], 1: [[0, 1]]})
    msgs = " ".join(validate(D).violations)
    assert "exhaustive" in msgs and "contained" in msgs


def test_slopes_of_scalar_frobenius():
    D = FilteredPhiNModule(p, 1, [[p, 0], [0, p]], [[0, 0], [0, 0]], {0: [[1, 0], [0, 1]]})
    assert slopes(D) == [1, 1]


def test_tate_twist():
    D = em2_stalk(p)
    assert tate_twist(D, 0) == D
    for j in (-2, 1, 3):
        T = tate_twist(D, j)
        assert slopes(T) == [s + j for s in slopes(D)]
        for i in range(D.lo - 1, D.hi + 3):
            assert T.filt(i + j) == D.filt(i)
        assert validate(T).valid == validate(D).valid


def test_stalk():
    S = em2_stalk(p)
    assert validate(S).valid
    assert slopes(S) == [Fraction(1, 2)] * 4
    # Phi^2 = F sigma(F) = p times the identity
    F2 = linalg.matmul(S.frob, sigma_mat(S.frob))
    assert all(F2[i][k] == (p if i == k else 0) for i in range(4) for k in range(4))
    assert [len(S.filt(i)) for i in (-1, 0, 1, 2)] == [4, 4, 2, 0]


def test_stalk_rejects_bad_embedding():
    with pytest.raises(ValueError):
        em2_stalk(p, [[1, 0], [0, 1]])


def test_json_roundtrip():
    D, _ = random_instance(random.Random(4), 2)
    E = FilteredPhiNModule.from_json(D.to_json())
    assert E == D


def _N_lowers_slopes(D):
    dec = slope_decomposition(D)
    for lam, basis in dec.items():
        img = span([D.N(v) for v in basis], D.dim)
        if img:
            assert is_subspace(img, dec.get(lam - 1, []))


def test_monodromy_lowers_slope():
    rng = random.Random(21)
    for _ in range(15):
        D, _ = random_instance(rng, rng.choice((2, 4)))
        _N_lowers_slopes(D)


def test_hypothesis_check():
    # a slope-(n+1) line with N = 0 has no partner of slope n
    D = FilteredPhiNModule(p, 1, [[p ** 3]], [[0]], {0: [[1]]})
    with pytest.raises(HypothesisViolation):
        check_hypothesis(D, 2)


def test_extension_structure():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.choice((2, 4))
        D, d = random_instance(rng, n)
        ext = extension_from_class(D, d, n)
        assert ext.E.dim == D.dim + 1
        piota = linalg.matmul(ext.pi, ext.iota)
        assert all(x.a == 0 and x.b == 0 for x in piota[0])
        assert validate(ext.E).valid


def test_split_extension():
    rng = random.Random(13)
    tried = 0
    while tried < 5:
        n = 2
        D, _ = random_instance(rng, n)
        F = D.filt(n + 1)
        if not F:
            continue
        tried += 1
        d = F[0]
        ext = extension_from_class(D, d, n)
        e = [scalar(0, D.r)] * D.dim + [scalar(1, D.r)]
        # 1 -> (0, 1) respects phi, N and the filtration
        assert ext.E.phi(e) == [x * Fraction(p) ** (n + 1) for x in e]
        assert all(x.a == 0 and x.b == 0 for x in ext.E.N(e))
        assert in_span(ext.E.filt(n + 1), e)
        assert class_from_extension(ext, n, base=D).is_zero()
    zero = [scalar(0, D.r)] * D.dim
    assert class_from_extension(extension_from_class(D, zero, 2), 2).is_zero()


def test_roundtrip_and_choice_independence():
    rng = random.Random(17)
    for _ in range(25):
        n = rng.choice((2, 4))
        D, d = random_instance(rng, n)
        ext = extension_from_class(D, d, n)
        c = class_from_extension(ext, n, base=D)
        assert c == ExtClass(D, n, d)
        assert class_from_extension(ext, n) == c  # D recovered from the extension itself
        F = D.filt(n + 1)
        if F:
            coef = [rng.randint(-3, 3) for _ in F]
            shift = [sum((f[i] * a for a, f in zip(coef, F)), scalar(0, D.r)) for i in range(D.dim)]
            assert class_from_extension(ext, n, s2_shift=shift, base=D) == c


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([2, 4]))
def test_roundtrip_property(seed, n):
    D, d = random_instance(random.Random(seed), n)
    assert validate(D).valid
    assert class_from_extension(extension_from_class(D, d, n), n, base=D) == ExtClass(D, n, d)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(-3, 3))
def test_twist_commutes_with_slopes_and_validity(seed, j):
    D, _ = random_instance(random.Random(seed), 2)
    T = tate_twist(D, j)
    assert slopes(T) == [s + j for s in slopes(D)]
    assert validate(T).valid == validate(D).valid
