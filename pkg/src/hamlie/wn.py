"""The Jacobson-Witt algebra W_n = Der(B_n).

A derivation D = sum_i f_i d/dx_i is stored as an (n, p^n) array of
coefficient codes, row i-1 holding f_i.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _kernels as K
from .bn import TruncPoly, poly_mul_codes
from .errors import ContextMismatch, DimensionMismatch, IndexOutOfRange, ShapeViolation
from .gf import EchelonBasis, FieldCtx, Scalar, UniPoly, char_poly, is_squarefree, min_poly


class Derivation:
    __slots__ = ("ctx", "n", "coeffs")

    def __init__(self, ctx: FieldCtx, n: int, coeffs):
        coeffs = np.array(coeffs, dtype=np.int64)
        if coeffs.shape != (n, ctx.p**n):
            raise DimensionMismatch(f"expected shape {(n, ctx.p ** n)}, got {coeffs.shape}")
        coeffs.setflags(write=False)
        self.ctx = ctx
        self.n = n
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ctx: FieldCtx, n: int) -> Derivation:
        return cls(ctx, n, np.zeros((n, ctx.p**n), dtype=np.int64))

    @classmethod
    def from_polys(cls, polys: Sequence[TruncPoly]) -> Derivation:
        polys = list(polys)
        if not polys:
            raise ValueError("need at least one coefficient")
        ctx, n = polys[0].ctx, polys[0].n
        if len(polys) != n:
            raise DimensionMismatch(f"W_{n} needs {n} coefficients, got {len(polys)}")
        for f in polys:
            if f.ctx != ctx or f.n != n:
                raise ContextMismatch("coefficients live in different rings")
        return cls(ctx, n, np.stack([f.coeffs for f in polys]))

    @classmethod
    def partial(cls, ctx: FieldCtx, n: int, i: int, coeff: TruncPoly | None = None) -> Derivation:
        """coeff * d/dx_i (coeff defaults to 1)."""
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"partial index {i} outside 1..{n}")
        c = np.zeros((n, ctx.p**n), dtype=np.int64)
        if coeff is None:
            c[i - 1, 0] = 1
        else:
            c[i - 1] = coeff.coeffs
        return cls(ctx, n, c)

    @classmethod
    def random(cls, ctx: FieldCtx, n: int, rng: np.random.Generator) -> Derivation:
        return cls(ctx, n, ctx.random(rng, (n, ctx.p**n)))

    @property
    def polys(self) -> list[TruncPoly]:
        return [TruncPoly(self.ctx, self.n, row) for row in self.coeffs]

    def component(self, i: int) -> TruncPoly:
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"component index {i} outside 1..{self.n}")
        return TruncPoly(self.ctx, self.n, self.coeffs[i - 1])

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs.ravel()

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def _check(self, other):
        if not isinstance(other, Derivation):
            raise TypeError(f"expected Derivation, got {type(other).__name__}")
        if other.ctx != self.ctx or other.n != self.n:
            raise ContextMismatch("derivations live in different algebras")

    def __add__(self, other: Derivation) -> Derivation:
        self._check(other)
        return Derivation(self.ctx, self.n, self.ctx.add_t[self.coeffs, other.coeffs])

    def __sub__(self, other: Derivation) -> Derivation:
        self._check(other)
        return Derivation(self.ctx, self.n, self.ctx.sub_t[self.coeffs, other.coeffs])

    def __neg__(self) -> Derivation:
        return Derivation(self.ctx, self.n, self.ctx.neg_t[self.coeffs])

    def __mul__(self, c) -> Derivation:
        if isinstance(c, TruncPoly):
            return Derivation.from_polys([c * f for f in self.polys])
        return Derivation(self.ctx, self.n, self.ctx.mul_t[self.ctx.elem(c)][self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.ctx == other.ctx and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.ctx, self.n, self.coeffs.tobytes()))

    def __repr__(self):
        from .cli import format_poly

        parts = []
        for i, f in enumerate(self.polys, 1):
            if not f.is_zero():
                parts.append(f"({format_poly(f)})*d{i}")
        return "Derivation(" + (" + ".join(parts) if parts else "0") + ")"

    def apply(self, f: TruncPoly) -> TruncPoly:
        if f.ctx != self.ctx or f.n != self.n:
            raise ContextMismatch("derivation and polynomial live in different rings")
        ctx = self.ctx
        acc = np.zeros(f.N, dtype=np.int64)
        for i in range(self.n):
            row = self.coeffs[i]
            if not row.any():
                continue
            d = f.partial(i + 1).coeffs
            if d.any():
                acc = ctx.add_t[acc, poly_mul_codes(ctx, self.n, row, d)]
        return TruncPoly(ctx, self.n, acc)

    __call__ = apply


def apply(D: Derivation, f: TruncPoly) -> TruncPoly:
    return D.apply(f)


def bracket(D: Derivation, E: Derivation) -> Derivation:
    """[D, E]_j = D(E_j) - E(D_j)."""
    D._check(E)
    return Derivation.from_polys([D.apply(e) - E.apply(d) for d, e in zip(D.polys, E.polys)])


def operator_matrix(D: Derivation) -> np.ndarray:
    """p^n x p^n matrix whose column a is the coefficient vector of D(x^a)."""
    ctx = D.ctx
    return K.operator_matrix_table(D.coeffs, ctx.p, D.n, ctx.add_t, ctx.mul_t)


def p_power(D: Derivation) -> Derivation:
    """D^[p]: coefficients D^p(x_i), i.e. the p-fold composite applied to each variable."""
    out = []
    for i, g in enumerate(D.polys):
        # D(x_i) = f_i, then p - 1 further applications
        for _ in range(D.ctx.p - 1):
            if g.is_zero():
                break
            g = D.apply(g)
        out.append(g)
    return Derivation.from_polys(out)


def p_power_iter(D: Derivation, k: int) -> Derivation:
    for _ in range(k):
        D = p_power(D)
    return D


def char_poly_of(D: Derivation) -> UniPoly:
    return char_poly(operator_matrix(D), D.ctx)


class PsiVector(tuple):
    """(psi_0, ..., psi_{n-1}) as a tuple of Scalars."""

    def __repr__(self):
        return "PsiVector(" + ", ".join(repr(s) for s in self) + ")"


def psi_from_charpoly(chi: UniPoly, n: int) -> PsiVector:
    ctx = chi.ctx
    p = ctx.p
    top = p**n
    powers = {p**i for i in range(n)}
    if chi.degree != top or chi.coeffs[top] != 1:
        raise ShapeViolation(f"characteristic polynomial has degree {chi.degree}, expected {top}")
    bad = [k for k in chi.support() if k != top and k not in powers]
    if bad:
        raise ShapeViolation(f"nonzero coefficients at non-p-power exponents {bad[:5]}")
    return PsiVector(chi[p**i] for i in range(n))


def psi(D: Derivation) -> PsiVector:
    return psi_from_charpoly(char_poly_of(D), D.n)


def is_nilpotent_operator(D: Derivation) -> bool:
    chi = char_poly_of(D)
    return chi.support() == [D.ctx.p**D.n]


def is_p_semisimple(D: Derivation, max_iter: int | None = None) -> bool:
    """D lies in the span of D^[p], D^[p^2], ...

    The iterates are generated until one falls into the span of the earlier
    ones; since the p-map is p-semilinear on a commutative restricted
    subalgebra the span is then stable.
    """
    ctx = D.ctx
    basis = EchelonBasis(ctx, D.n * ctx.p**D.n)
    E = D
    limit = max_iter if max_iter is not None else D.n * ctx.p**D.n + 1
    for _ in range(limit):
        E = p_power(E)
        if not basis.add(E.vector):
            break
    return basis.contains(D.vector)


def is_p_semisimple_minpoly(D: Derivation) -> bool:
    """Cross-check: the operator of D is semisimple (squarefree minimal polynomial).

    Only practical for p^n up to about 125.
    """
    mp = min_poly(operator_matrix(D), D.ctx)
    return is_squarefree(list(mp.coeffs), D.ctx)


def basis(ctx: FieldCtx, n: int) -> list[Derivation]:
    """Monomial basis x^a d_i of W_n, ordered by i then a."""
    N = ctx.p**n
    out = []
    for i in range(n):
        for a in range(N):
            c = np.zeros((n, N), dtype=np.int64)
            c[i, a] = 1
            out.append(Derivation(ctx, n, c))
    return out

