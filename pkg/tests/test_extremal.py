import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from higherspin.extremal import (
    EpsMinusEps,
    Minus2Eps,
    MinusEpsEps,
    factor_word,
    harmonic_projection,
    normal_order,
    pi_factor,
    pi_harmonic_u,
    pi_sp2k,
    pi_sp2k_word,
    pi_u_word,
    sp4_generator,
)
from higherspin.liealg import InnerDD, InnerUD, OperatorWord, PoleError, inner_dd, inner_ud, inner_uu
from higherspin.polyalg import Poly, parse, random_poly
from higherspin.spaces import basis_simplicial

import oracles

seeds = st.integers(min_value=0, max_value=10**6)


def dominant_degrees(k, top=3):
    if k == 1:
        return [(0, d) for d in range(top + 1)]
    return [(0, a, b) for a in range(top + 1) for b in range(a + 1)]


def test_normal_order_small_cases():
    assert [str(f) for f in normal_order(1)] == ["pi[-2e1]"]
    assert [str(f) for f in normal_order(2)] == ["pi[e1-e2]", "pi[-2e2]", "pi[-e1-e2]", "pi[-2e1]"]
    names = [str(f) for f in normal_order(3)]
    assert names[:3] == ["pi[e1-e2]", "pi[e1-e3]", "pi[e2-e3]"]
    assert names[3:] == ["pi[-2e3]", "pi[-e2-e3]", "pi[-e1-e3]", "pi[-2e2]", "pi[-e1-e2]", "pi[-2e1]"]


def test_factor_constructors_check_order():
    with pytest.raises(ValueError):
        MinusEpsEps(2, 1)
    with pytest.raises(ValueError):
        EpsMinusEps(2, 2)


def test_minus2eps_degree_two_example():
    p = parse("u1_1^2", 1, 3)
    assert pi_factor(Minus2Eps(1), p) == parse("u1_1^2 - 1/3*u1_1^2 - 1/3*u1_2^2 - 1/3*u1_3^2", 1, 3)


@given(seeds, st.integers(3, 6))
def test_minus2eps_matches_degree_two_oracle(seed, m):
    p = random_poly(random.Random(seed), 1, m, (1, 2), 6)
    got = oracles.to_dict(pi_factor(Minus2Eps(1), p))
    assert got == oracles.harmonic_projection_deg2(oracles.to_dict(p), 1, m)


def test_factors_fix_their_kernels():
    h = parse("u1_1*u1_2 + x1*u1_3^2 - x1*u1_1^2", 1, 4)
    assert pi_factor(Minus2Eps(1), h) == h
    p = parse("x1*u1_1^2 - x2*u1_3*u1_2", 2, 4)
    assert not inner_ud(p, 1, 2)
    assert pi_factor(EpsMinusEps(1, 2), p) == p


def test_factor_pole_is_reported():
    # non-dominant degree (0, 2): z = E1 - E2 + 1 = -1 vanishes against s = 1
    with pytest.raises(PoleError) as exc:
        pi_factor(EpsMinusEps(1, 2), parse("u2_1^2", 2, 3))
    assert "s=1" in str(exc.value)
    assert exc.value.degree == (0, 0, 2)


@pytest.mark.parametrize("k,m", [(1, 4), (1, 6), (2, 5), (2, 6)])
def test_projector_suite(k, m):
    rng = random.Random(100 * k + m)
    for deg in dominant_degrees(k):
        for _ in range(10):
            p = random_poly(rng, k, m, deg, 6)
            q = pi_sp2k(p)
            # idempotence and degree preservation
            assert pi_sp2k(q) == q
            if q:
                assert q.multidegree() == deg
            # left annihilation
            for i in range(1, k + 1):
                for j in range(i, k + 1):
                    assert not inner_dd(q, i, j)
                    if i < j:
                        assert not inner_ud(q, i, j)
            # right annihilation, wherever the product degree stays dominant
            for i in range(1, k + 1):
                for j in range(i, k + 1):
                    up = tuple(d + (b == i) + (b == j) for b, d in enumerate(deg))
                    if all(up[b] >= up[b + 1] for b in range(1, k)):
                        s = random_poly(rng, k, m, deg, 4)
                        assert not pi_sp2k(inner_uu(s, i, j))
                    if i < j and deg[j]:
                        src = tuple(d + (b == i) - (b == j) for b, d in enumerate(deg))
                        r = random_poly(rng, k, m, src, 5)
                        assert not pi_sp2k(inner_ud(r, j, i))


@pytest.mark.parametrize("k,m,mu", [(1, 5, (0, 2)), (2, 6, (0, 2, 1)), (2, 6, (1, 1, 1)), (2, 5, (0, 3, 2))])
def test_identity_on_simplicial_harmonics(k, m, mu):
    H = basis_simplicial(mu[1:], m, k=k, first_block=1)
    # embed x-degree by multiplying with a fixed x monomial
    xmono = Poly.var(k, m, 0, 1) ** mu[0]
    for h in H.basis:
        assert pi_sp2k(h * xmono) == h * xmono


@pytest.mark.parametrize("k,m,mu", [(1, 4, (3,)), (2, 6, (2, 1)), (2, 5, (2, 2)), (2, 6, (3, 1))])
def test_projector_image_equals_simplicial_space(k, m, mu):
    from higherspin.spaces import monomials_of_degree

    deg = (0,) + mu
    images = [pi_sp2k(Poly._raw(k, m, {mono: mpq(1)})) for mono in monomials_of_degree(k, m, deg)]
    H = basis_simplicial(mu, m, k=k, first_block=1)
    assert oracles.span_rank(images) == H.dim == oracles.span_rank(images + H.basis)


@pytest.mark.parametrize("k,m,deg", [(1, 5, (1, 2)), (2, 6, (1, 2, 1)), (2, 5, (0, 2, 2))])
def test_word_form_matches_direct_application(k, m, deg):
    rng = random.Random(7)
    w = pi_sp2k_word(k, deg)
    for _ in range(3):
        p = random_poly(rng, k, m, deg, 6)
        assert w(p) == pi_sp2k(p)


def test_single_factor_word():
    p = random_poly(random.Random(3), 2, 6, (0, 2, 2), 8)
    for f in normal_order(2):
        assert factor_word(f, 2, k=2)(p) == pi_factor(f, p)


def test_inhomogeneous_input_is_split():
    rng = random.Random(4)
    p = random_poly(rng, 2, 5, (0, 2, 1), 5)
    q = random_poly(rng, 2, 5, (1, 1, 1), 5)
    assert pi_sp2k(p + q) == pi_sp2k(p) + pi_sp2k(q)


def test_harmonic_u_examples():
    f = parse("x2*u1_2", 1, 5)
    g = pi_harmonic_u(None, f)
    assert not inner_dd(g, 1, 1)
    h = parse("x1^2*x3", 1, 5)
    assert pi_harmonic_u(None, h) == inner_ud(h, 1, 0)


@given(seeds, st.integers(0, 3))
def test_closed_form_matches_projection_of_product(seed, d):
    rng = random.Random(seed)
    spec_m = 5
    f = random_poly(rng, 1, spec_m, (2, d), 6)
    f = harmonic_projection(f, 1)
    assert pi_u_word(1, 0)(f) == harmonic_projection(inner_ud(f, 1, 0), 1)
    assert pi_harmonic_u(OperatorWord.of(InnerUD(1, 0)), f) == pi_harmonic_u(None, f)


def test_c_on_constants():
    one = Poly.constant(2, 4)
    assert sp4_generator("C", one) == parse("u1_1*u2_1 + u1_2*u2_2 + u1_3*u2_3 + u1_4*u2_4", 2, 4)


def _harmonic_field(rng, m, x_deg, du, dv):
    p = random_poly(rng, 2, m, (x_deg, du, dv), 8)
    return harmonic_projection(harmonic_projection(p, 1), 2)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("m", [4, 5, 6])
def test_ac_eigenvalue(k, m):
    rng = random.Random(10 * k + m)
    scale = mpq((k + m - 3) * (2 * k + m - 2), 2 * k + m - 4)
    for _ in range(3):
        f = _harmonic_field(rng, m, 2, k - 1, 0)
        if f:
            assert sp4_generator("A", sp4_generator("C", f)) == scale * f


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("m", [4, 5, 6])
def test_susv_eigenvalue(k, m):
    rng = random.Random(20 * k + m)
    for _ in range(3):
        f = _harmonic_field(rng, m, 2, k + 1, 0)
        if f:
            assert sp4_generator("S_u", sp4_generator("S_v", f)) == (k + 1) * f


def test_unknown_generator():
    with pytest.raises(ValueError):
        sp4_generator("B", Poly.constant(2, 4))
