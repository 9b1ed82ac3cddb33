import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from hamlie.errors import DimensionMismatch, Inconsistent, NonPrime, PrimeTooSmall
from hamlie.gf import (
    EchelonBasis,
    Scalar,
    char_poly,
    det,
    field_create,
    interpolate,
    is_squarefree,
    mat_inv,
    matmul,
    min_poly,
    proot,
    rank,
    solve_linear,
)


def sympy_charpoly_mod(A, p):
    """Integer characteristic polynomial reduced mod p, lowest degree first."""
    t = sympy.Symbol("t")
    cp = sympy.Matrix(A.tolist()).charpoly(t).all_coeffs()[::-1]
    return tuple(int(c) % p for c in cp)


def test_field_create_prime():
    F = field_create(5)
    assert F.q == 5 and F.m == 1


def test_field_create_quadratic_modulus():
    # t^2 + 1 splits over F_5 (-1 = 2^2); t^2 + t + 1 is the first irreducible
    assert field_create(5, 2).modulus == (1, 1, 1)


@pytest.mark.parametrize("p,err", [(4, NonPrime), (9, NonPrime), (3, PrimeTooSmall), (2, PrimeTooSmall)])
def test_field_create_errors(p, err):
    with pytest.raises(err):
        field_create(p)


def test_field_create_is_cached():
    assert field_create(7, 2) is field_create(7, 2)


@pytest.mark.parametrize("p,m", [(5, 1), (5, 2), (5, 3), (7, 2)])
def test_frobenius_additive_exhaustive(p, m):
    F = field_create(p, m)
    a = np.arange(F.q)
    A, B = np.meshgrid(a, a)
    lhs = F.pow_array(F.add_t[A, B], p)
    rhs = F.add_t[F.pow_array(A, p), F.pow_array(B, p)]
    assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("p,m", [(5, 2), (5, 3), (7, 2)])
def test_field_axioms_exhaustive(p, m):
    F = field_create(p, m)
    a = np.arange(1, F.q)
    assert np.all(F.mul_t[a, F.inv_t[a]] == 1)
    assert np.all(F.add_t[np.arange(F.q), F.neg_t[np.arange(F.q)]] == 0)


@pytest.mark.parametrize("p,m,r", [(5, 1, 1), (5, 2, 1), (5, 2, 2), (5, 3, 1), (5, 3, 2), (5, 3, 4)])
def test_proot_exhaustive(p, m, r):
    F = field_create(p, m)
    for z in range(F.q):
        s = Scalar(F, z)
        assert proot(s ** (p**r), r) == s
        assert proot(s, r) ** (p**r) == s


def test_proot_examples():
    F = field_create(5)
    assert proot(Scalar(F, 4), 1) == 4
    F25 = field_create(5, 2)
    assert proot(Scalar(F25, 0), 3) == Scalar(F25, 0)
    for z in range(25):
        assert proot(Scalar(F25, z), 1) == Scalar(F25, z) ** 5


def test_charpoly_identity_and_zero():
    F = field_create(5)
    assert char_poly(np.eye(2, dtype=np.int64), F).coeffs == (1, 3, 1)
    assert char_poly(np.zeros((7, 7), dtype=np.int64), F).support() == [7]


def test_charpoly_companion():
    F = field_create(5)
    # companion of t^3 + 2t + 1
    C = np.array([[0, 0, 4], [1, 0, 3], [0, 1, 0]])
    assert char_poly(C, F).coeffs == (1, 2, 0, 1)


def test_charpoly_not_square():
    with pytest.raises(DimensionMismatch):
        char_poly(np.zeros((2, 3), dtype=np.int64), field_create(5))


@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.sampled_from([5, 7]))
def test_charpoly_matches_sympy(seed, n, p):
    F = field_create(p)
    A = np.random.default_rng(seed).integers(0, p, (n, n))
    assert char_poly(A, F).coeffs == sympy_charpoly_mod(A, p)


@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_charpoly_similarity_invariant(seed, n):
    F = field_create(5, 2)
    rng = np.random.default_rng(seed)
    A = F.random(rng, (n, n))
    while True:
        P = F.random(rng, (n, n))
        if rank(P, F) == n:
            break
    B = matmul(matmul(mat_inv(P, F), A, F), P, F)
    assert char_poly(B, F) == char_poly(A, F)


def test_det_matches_sympy():
    F = field_create(7)
    A = np.random.default_rng(0).integers(0, 7, (6, 6))
    assert det(A, F) == int(sympy.Matrix(A.tolist()).det()) % 7


def test_solve_identity():
    F = field_create(5)
    b = np.array([1, 2, 3])
    sol = solve_linear(np.eye(3, dtype=np.int64), b, F)
    assert sol.unique and np.array_equal(sol.x, b) and sol.determined.all()


def test_solve_zero_system():
    F = field_create(5)
    sol = solve_linear(np.zeros((2, 3), dtype=np.int64), np.zeros(2, dtype=np.int64), F)
    assert not sol.unique
    assert not sol.determined.any()
    assert not sol.x.any()


def test_solve_rank_one_mask_by_enumeration():
    F = field_create(5)
    A = np.array([[1, 2, 0], [2, 4, 0]])
    b = np.array([3, 1])
    sol = solve_linear(A, b, F)
    sols = [x for x in itertools.product(range(5), repeat=3)
            if all(sum(A[i, j] * x[j] for j in range(3)) % 5 == b[i] for i in range(2))]
    determined = [len({s[j] for s in sols}) == 1 for j in range(3)]
    assert list(sol.determined) == determined
    assert tuple(sol.x) in sols
    assert not sol.unique


def test_solve_mask_partial():
    # x0 pinned, x1 and x2 tied
    F = field_create(5)
    A = np.array([[1, 0, 0], [0, 1, 1]])
    sol = solve_linear(A, np.array([2, 3]), F)
    assert list(sol.determined) == [True, False, False]
    assert sol.x[0] == 2


def test_solve_inconsistent():
    F = field_create(5)
    with pytest.raises(Inconsistent):
        solve_linear(np.array([[1, 1], [1, 1]]), np.array([0, 1]), F)


@given(st.integers(0, 2**32 - 1))
def test_interpolate_roundtrip(seed):
    F = field_create(5, 2)
    rng = np.random.default_rng(seed)
    coeffs = F.random(rng, 6)
    xs = rng.permutation(25)[:6]
    ys = [0] * 6
    for k, x in enumerate(xs):
        acc = 0
        for c in coeffs[::-1]:
            acc = int(F.add_t[F.mul_t[acc, x], c])
        ys[k] = acc
    assert np.array_equal(interpolate(xs, ys, F), coeffs)


def test_echelon_basis():
    F = field_create(5)
    eb = EchelonBasis(F, 3)
    assert eb.add([1, 2, 3])
    assert not eb.add([2, 4, 1])
    assert eb.add([0, 1, 0])
    assert eb.contains([1, 0, 3]) and len(eb) == 2
    assert not eb.contains([0, 0, 1])


def test_min_poly_and_squarefree():
    F = field_create(5)
    assert min_poly(np.eye(3, dtype=np.int64), F).coeffs == (4, 1)
    J = np.array([[2, 1], [0, 2]])
    mp = min_poly(J, F)
    assert mp.coeffs == (4, 1, 1)  # (t - 2)^2
    assert not is_squarefree(list(mp.coeffs), F)
    assert is_squarefree([4, 1], F)
