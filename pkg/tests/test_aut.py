"""Automorphisms, the lift and beta.

Orientation convention in force: the Ad formula realizes mu^-1 o D o mu on
operator matrices; ad_oriented gives mu o D o mu^-1.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hamlie.aut import (
    AlgebraMap,
    ad_action,
    ad_orientation,
    ad_oriented,
    adh_formula_check,
    beta,
    bracket_characterization,
    diagram_check,
    gb_test,
    gh_test,
    glr_act,
    lift_composition,
    lift_mu,
    make_aut,
    orientation_probe,
    pullback_eval,
    random_aut,
    scaling,
    theta_r,
)
from hamlie.bn import TruncPoly, form_apply_algmap
from hamlie.cli import parse_poly
from hamlie.errors import NonNilpotentImage, NotInvertible
from hamlie.gf import Scalar, field_create, matmul
from hamlie.ham import HamCtx, d_H, poisson, random_element, torus_TH, torus_TW
from hamlie.pinv import xi
from hamlie.wn import Derivation, bracket, operator_matrix, p_power, psi

F5, F25 = field_create(5), field_create(5, 2)
H1, H2 = HamCtx(F5, 1), HamCtx(F5, 2)
seeds = st.integers(0, 2**32 - 1)


def P(text, n=2, ctx=F5):
    return parse_poly(text, ctx.p, n, ctx.m)


def W(*coeffs, ctx=F5):
    return Derivation.from_polys([P(c, len(coeffs), ctx) for c in coeffs])


def test_make_aut_examples():
    idt = AlgebraMap.identity(F5, 2)
    assert make_aut(idt.images).inverse == idt
    mu = make_aut([P("3*x1"), P("3*x2")])
    assert mu.inverse == AlgebraMap([P("2*x1"), P("2*x2")])
    mu = make_aut([P("x1 + x2^2"), P("x2")])
    assert mu.inverse == AlgebraMap([P("x1 - x2^2"), P("x2")])


def test_make_aut_errors():
    with pytest.raises(NotInvertible):
        make_aut([P("x1"), P("x1 + x1*x2")])
    with pytest.raises(NonNilpotentImage):
        make_aut([P("1 + x1"), P("x2")])


@given(seeds)
def test_inverse_roundtrip(seed):
    mu = random_aut(F25, 2, np.random.default_rng(seed))
    f = TruncPoly.random(F25, 2, np.random.default_rng(seed + 1))
    assert mu.inverse(mu(f)) == f and mu(mu.inverse(f)) == f


def test_ad_action_examples():
    one = AlgebraMap.identity(F5, 1)
    D = W("1+x1")
    assert ad_action(one, D) == D
    mu = make_aut([P("2*x1", n=1)])
    assert ad_action(mu, W("1")) == W("2")
    assert ad_action(mu, W("x1")) == W("x1")


def test_orientation_recorded():
    assert orientation_probe(F5, 2, seed=0) == "inverse"
    assert ad_orientation(5) == "inverse"


@given(seeds)
def test_ad_is_conjugation(seed):
    rng = np.random.default_rng(seed)
    mu = random_aut(F5, 2, rng)
    D = Derivation.random(F5, 2, rng)
    M, Mmu, Minv = operator_matrix(D), mu.matrix(), mu.inverse.matrix()
    # substitution matrices compose contravariantly: matrix(f -> mu(f)) acting on coefficient vectors
    want = matmul(matmul(Mmu, M, F5), Minv, F5)
    assert np.array_equal(operator_matrix(ad_oriented(mu, D)), want)
    assert psi(ad_action(mu, D)) == psi(D)


def test_gh_examples():
    a = Scalar(F5, 3)
    sc = scaling(H1, a)
    assert gh_test(sc) == a and bracket_characterization(sc) == a
    idt = AlgebraMap.identity(F5, 2)
    assert gh_test(idt) == 1 and gb_test(idt)
    swap = make_aut([P("x2"), P("x1")])
    assert gh_test(swap) == -1 and bracket_characterization(swap) == -1
    assert not gb_test(sc)


def test_generic_maps_rejected():
    rng = np.random.default_rng(4)
    for _ in range(100):
        mu = random_aut(F5, 2, rng)
        assert gh_test(mu) is None
        assert bracket_characterization(mu, samples=3) is None


def test_adh_examples():
    a = Scalar(F5, 2)
    sc = scaling(H1, a)
    f = P("x1*x2")
    assert adh_formula_check(sc, f, a)
    assert ad_oriented(sc, d_H(f)) == W("-x1", "x2")
    assert adh_formula_check(AlgebraMap.identity(F5, 2), f)


def test_lift_examples():
    mt, alpha = lift_mu(AlgebraMap.identity(F5, 1))
    assert mt == AlgebraMap.identity(F5, 2) and alpha == 1
    c = Scalar(F5, 2)
    mt, alpha = lift_mu(make_aut([P("2*x1", n=1)]))
    assert alpha == c
    assert mt == AlgebraMap([P("4*x1"), P("3*x2")])
    mt, alpha = lift_mu(make_aut([P("x1 + x1^2", n=1)]))
    assert alpha == 1
    assert form_apply_algmap(mt, H1.omega) == H1.omega


@pytest.mark.parametrize("r,ctx", [(1, F5), (1, F25), (2, F5)])
def test_lift_identities(r, ctx):
    rng = np.random.default_rng(r)
    hctx = HamCtx(ctx, r)
    for _ in range(8 if r == 1 else 2):
        mu = random_aut(ctx, r, rng)
        mt, alpha = lift_mu(mu)
        assert form_apply_algmap(mt, hctx.omega) == hctx.omega * alpha
        for i in range(1, r + 1):
            assert poisson(mt.images[r + i - 1], mt.images[i - 1]) == TruncPoly.const(ctx, 2 * r, -alpha)
        assert lift_mu(mu.inverse)[0] == mt.inverse
        f = TruncPoly.random(ctx, 2 * r, rng)
        assert adh_formula_check(mt, f, alpha)


def test_lift_reverses_composition():
    rng = np.random.default_rng(9)
    for _ in range(5):
        mu, nu = random_aut(F5, 1, rng), random_aut(F5, 1, rng)
        assert lift_composition(mu, nu)["reversed"]


def test_beta_examples():
    assert beta(W("1")) == W("0", "1")
    assert beta(W("1+x1")) == W("-x1", "1+x2") == torus_TH(H1)[0]
    assert beta(W("x1")) == W("-x1", "x2")
    assert theta_r(W("x1")) == P("x1*x2")


@given(seeds)
def test_beta_restricted_homomorphism(seed):
    rng = np.random.default_rng(seed)
    D, E = Derivation.random(F25, 1, rng), Derivation.random(F25, 1, rng)
    assert beta(bracket(D, E)) == bracket(beta(D), beta(E))
    assert beta(p_power(D)) == p_power(beta(D))


def test_beta_torus_r2():
    assert [beta(t) for t in torus_TW(2, F5)] == torus_TH(H2)


def test_diagram_examples():
    D = W("1+x1")
    assert diagram_check(AlgebraMap.identity(F5, 1), D)
    assert diagram_check(make_aut([P("3*x1", n=1)]), W("1"))
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert diagram_check(random_aut(F5, 1, rng), Derivation.random(F5, 1, rng))


def test_pullback_examples():
    assert pullback_eval(W("1+x1")) == (4,)
    assert pullback_eval(W("1")) == (0,)


def test_glr_act():
    c = np.array([3, 7])
    assert np.array_equal(glr_act(np.eye(2, dtype=np.int64), c, F25), c)
    assert np.array_equal(glr_act([[0, 1], [1, 0]], c, F25), [7, 3])
    assert np.array_equal(glr_act([[2]], np.array([3]), F5), [1])


@given(seeds)
def test_xi_invariant_under_G_H(seed):
    rng = np.random.default_rng(seed)
    mu, _ = lift_mu(random_aut(F25, 1, rng))
    mu = mu.compose(scaling(HamCtx(F25, 1), Scalar(F25, int(rng.integers(1, 25)))))
    e = random_element(HamCtx(F25, 1), rng)
    assert xi(ad_action(mu, e.D)) == xi(e.D)
