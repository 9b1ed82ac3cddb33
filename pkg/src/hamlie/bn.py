"""The truncated polynomial ring B_n = k[x_1..x_n] / (x_1^p, ..., x_n^p).

Coefficients are stored densely: the monomial x^a with exponents
a = (a_1, ..., a_n), 0 <= a_i < p, sits at position sum(a_i * p**(i-1)),
so x_1 is the least significant digit.  Variable indices in the public API
are 1-based, matching the names x1, x2, ... used by the text grammar.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .errors import ContextMismatch, IndexOutOfRange, NonNilpotentSubstituent
from .gf import FieldCtx, Scalar, matmul

MultiIndex = tuple[int, ...]


@lru_cache(maxsize=None)
def layout(p: int, n: int):
    """Exponent table (N, n) and total degrees (N,) for the dense layout."""
    N = p**n
    idx = np.arange(N, dtype=np.int64)
    exps = np.stack([(idx // p**i) % p for i in range(n)], axis=1) if n else np.zeros((1, 0), np.int64)
    exps.setflags(write=False)
    deg = exps.sum(axis=1)
    deg.setflags(write=False)
    return exps, deg


def index_of(exps: Sequence[int], p: int) -> int:
    if any(not 0 <= a < p for a in exps):
        raise IndexOutOfRange(f"exponents {tuple(exps)} outside [0, {p})")
    return sum(int(a) * p**i for i, a in enumerate(exps))


def exps_of(idx: int, p: int, n: int) -> MultiIndex:
    return tuple((idx // p**i) % p for i in range(n))


@lru_cache(maxsize=None)
def _partial_maps(p: int, n: int, i: int):
    exps, _ = layout(p, n)
    src = np.flatnonzero(exps[:, i] > 0)
    return src, src - p**i, exps[src, i].copy()


def poly_mul_codes(ctx: FieldCtx, n: int, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    if ctx.is_prime_field:
        return K.poly_mul_prime(f, g, ctx.p, n)
    return K.poly_mul_table(f, g, ctx.p, n, ctx.add_t, ctx.mul_t)


class TruncPoly:
    """Element of B_n over a finite field."""

    __slots__ = ("ctx", "n", "coeffs")

    def __init__(self, ctx: FieldCtx, n: int, coeffs):
        coeffs = np.array(coeffs, dtype=np.int64)
        if coeffs.shape != (ctx.p**n,):
            raise ValueError(f"expected {ctx.p ** n} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        self.ctx = ctx
        self.n = n
        self.coeffs = coeffs

    # construction

    @classmethod
    def zero(cls, ctx: FieldCtx, n: int) -> TruncPoly:
        return cls(ctx, n, np.zeros(ctx.p**n, dtype=np.int64))

    @classmethod
    def const(cls, ctx: FieldCtx, n: int, c=1) -> TruncPoly:
        v = np.zeros(ctx.p**n, dtype=np.int64)
        v[0] = ctx.elem(c)
        return cls(ctx, n, v)

    @classmethod
    def one(cls, ctx: FieldCtx, n: int) -> TruncPoly:
        return cls.const(ctx, n, 1)

    @classmethod
    def monomial(cls, ctx: FieldCtx, n: int, exps: Sequence[int], c=1) -> TruncPoly:
        v = np.zeros(ctx.p**n, dtype=np.int64)
        v[index_of(exps, ctx.p)] = ctx.elem(c)
        return cls(ctx, n, v)

    @classmethod
    def var(cls, ctx: FieldCtx, n: int, i: int) -> TruncPoly:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"variable x{i} outside 1..{n}")
        e = [0] * n
        e[i - 1] = 1
        return cls.monomial(ctx, n, e)

    @classmethod
    def from_dict(cls, ctx: FieldCtx, n: int, terms: Mapping[MultiIndex, object]) -> TruncPoly:
        v = np.zeros(ctx.p**n, dtype=np.int64)
        for e, c in terms.items():
            k = index_of(e, ctx.p)
            v[k] = ctx.add_t[v[k], ctx.elem(c)]
        return cls(ctx, n, v)

    @classmethod
    def random(cls, ctx: FieldCtx, n: int, rng: np.random.Generator, in_m: bool = False) -> TruncPoly:
        v = ctx.random(rng, ctx.p**n)
        if in_m:
            v[0] = 0
        return cls(ctx, n, v)

    # basic accessors

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def N(self) -> int:
        return self.coeffs.shape[0]

    def coeff(self, exps: Sequence[int]) -> Scalar:
        return Scalar(self.ctx, int(self.coeffs[index_of(exps, self.p)]))

    def terms(self) -> list[tuple[MultiIndex, Scalar]]:
        return [(exps_of(int(k), self.p, self.n), Scalar(self.ctx, int(self.coeffs[k])))
                for k in np.flatnonzero(self.coeffs)]

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def _check(self, other: TruncPoly):
        if not isinstance(other, TruncPoly):
            raise TypeError(f"expected TruncPoly, got {type(other).__name__}")
        if other.ctx != self.ctx or other.n != self.n:
            raise ContextMismatch("polynomials live in different rings")

    # ring structure

    def __add__(self, other):
        if isinstance(other, (int, np.integer, Scalar)):
            other = TruncPoly.const(self.ctx, self.n, other)
        self._check(other)
        return TruncPoly(self.ctx, self.n, self.ctx.add_t[self.coeffs, other.coeffs])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, np.integer, Scalar)):
            other = TruncPoly.const(self.ctx, self.n, other)
        self._check(other)
        return TruncPoly(self.ctx, self.n, self.ctx.sub_t[self.coeffs, other.coeffs])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TruncPoly(self.ctx, self.n, self.ctx.neg_t[self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, Scalar)):
            c = self.ctx.elem(other)
            return TruncPoly(self.ctx, self.n, self.ctx.mul_t[c][self.coeffs])
        self._check(other)
        return TruncPoly(self.ctx, self.n, poly_mul_codes(self.ctx, self.n, self.coeffs, other.coeffs))

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer, Scalar)):
            return self * other
        return NotImplemented

    def __pow__(self, e: int) -> TruncPoly:
        r = TruncPoly.one(self.ctx, self.n)
        for _ in range(e):
            if r.is_zero():
                break
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, (int, np.integer, Scalar)):
            other = TruncPoly.const(self.ctx, self.n, other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.ctx, self.n, self.coeffs.tobytes()))

    def __repr__(self):
        from .cli import format_poly

        return f"TruncPoly({format_poly(self)})"

    # calculus and filtration

    def partial(self, i: int) -> TruncPoly:
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"partial index {i} outside 1..{self.n}")
        src, dst, mult = _partial_maps(self.p, self.n, i - 1)
        out = np.zeros(self.N, dtype=np.int64)
        out[dst] = self.ctx.mul_t[mult, self.coeffs[src]]
        return TruncPoly(self.ctx, self.n, out)

    def kappa(self) -> Scalar:
        return Scalar(self.ctx, int(self.coeffs[0]))

    def m_order(self) -> float:
        nz = np.flatnonzero(self.coeffs)
        if not len(nz):
            return math.inf
        _, deg = layout(self.p, self.n)
        return int(deg[nz].min())

    def linear_part(self) -> np.ndarray:
        """Coefficients of x_1..x_n (the class in m / m^2)."""
        return np.array([self.coeffs[self.p**i] for i in range(self.n)], dtype=np.int64)

    def embed(self, n: int, offset: int = 0) -> TruncPoly:
        """Same polynomial in B_n with x_j renamed to x_{j+offset}."""
        if offset + self.n > n:
            raise IndexOutOfRange("embedding does not fit")
        v = np.zeros(self.p**n, dtype=np.int64)
        v[np.arange(self.N) * self.p**offset] = self.coeffs
        return TruncPoly(self.ctx, n, v)


def mul(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    return f * g


def partial(f: TruncPoly, i: int) -> TruncPoly:
    return f.partial(i)


def kappa(f: TruncPoly) -> Scalar:
    return f.kappa()


def m_order(f: TruncPoly) -> float:
    return f.m_order()


def linear_part(f: TruncPoly) -> np.ndarray:
    return f.linear_part()


def subst(f: TruncPoly, gs: Sequence[TruncPoly]) -> TruncPoly:
    """f(g_1, ..., g_{n1}) computed by nested Horner evaluation.

    Every g_i must lie in the maximal ideal; otherwise the class of f in B_n
    does not determine the value.
    """
    gs = list(gs)
    if len(gs) != f.n:
        raise IndexOutOfRange(f"need {f.n} substituents, got {len(gs)}")
    if not gs:
        raise ValueError("substitution into B_0 is not supported")
    ctx, p = f.ctx, f.p
    n2 = gs[0].n
    for g in gs:
        if g.ctx != ctx or g.n != n2:
            raise ContextMismatch("substituents live in different rings")
        if g.coeffs[0] != 0:
            raise NonNilpotentSubstituent("substituent has nonzero constant term")
    N2 = p**n2
    powers = [TruncPoly.one(ctx, n2)]
    for _ in range(p - 1):
        powers.append(powers[-1] * gs[0])
    P1 = np.stack([q.coeffs for q in powers])
    blocks = f.coeffs.reshape(-1, p)
    level = matmul(blocks, P1, ctx)
    for k in range(1, f.n):
        level = level.reshape(-1, p, N2)
        g = gs[k].coeffs
        nxt = np.zeros((level.shape[0], N2), dtype=np.int64)
        for b in range(level.shape[0]):
            acc = None
            for j in range(p - 1, -1, -1):
                if acc is not None:
                    acc = poly_mul_codes(ctx, n2, acc, g)
                blk = level[b, j]
                if acc is None:
                    if blk.any():
                        acc = blk.copy()
                else:
                    acc = ctx.add_t[acc, blk]
            if acc is not None:
                nxt[b] = acc
        level = nxt
    return TruncPoly(ctx, n2, level.reshape(N2))


# -- differential 2-forms ------------------------------------------------------


class TwoForm:
    """sum_{i<j} g_ij dx_i ^ dx_j with only the i<j coefficients stored."""

    __slots__ = ("ctx", "n", "g")

    def __init__(self, ctx: FieldCtx, n: int, g: Mapping[tuple[int, int], TruncPoly]):
        self.ctx = ctx
        self.n = n
        store = {}
        for (i, j), poly in g.items():
            if not (1 <= i <= n and 1 <= j <= n):
                raise IndexOutOfRange(f"form index ({i}, {j}) outside 1..{n}")
            if i == j:
                continue
            if i > j:
                i, j, poly = j, i, -poly
            store[(i, j)] = store[(i, j)] + poly if (i, j) in store else poly
        self.g = {k: v for k, v in sorted(store.items()) if not v.is_zero()}

    def entry(self, i: int, j: int) -> TruncPoly:
        if i == j:
            return TruncPoly.zero(self.ctx, self.n)
        if i < j:
            return self.g.get((i, j), TruncPoly.zero(self.ctx, self.n))
        return -self.entry(j, i)

    def __add__(self, other: TwoForm) -> TwoForm:
        terms = dict(self.g)
        for k, v in other.g.items():
            terms[k] = terms[k] + v if k in terms else v
        return TwoForm(self.ctx, self.n, terms)

    def __mul__(self, c) -> TwoForm:
        return TwoForm(self.ctx, self.n, {k: v * c for k, v in self.g.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.n == other.n and self.g == other.g

    def is_zero(self) -> bool:
        return not self.g

    def __repr__(self):
        from .cli import format_poly

        parts = [f"({format_poly(v)}) dx{i}^dx{j}" for (i, j), v in self.g.items()]
        return "TwoForm(" + (" + ".join(parts) if parts else "0") + ")"


def form_apply_derivation(D, w: TwoForm) -> TwoForm:
    """Lie derivative of w along D: coefficients D(G) + A^T G + G A with A[k][i] = d_i D(x_k)."""
    n = w.n
    comps = D.polys
    jac = [[comps[k].partial(i) for i in range(1, n + 1)] for k in range(n)]
    out = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            acc = D.apply(w.entry(i, j))
            for k in range(1, n + 1):
                gkj = w.entry(k, j)
                if not gkj.is_zero():
                    acc = acc + jac[k - 1][i - 1] * gkj
                gik = w.entry(i, k)
                if not gik.is_zero():
                    acc = acc + gik * jac[k - 1][j - 1]
            out[(i, j)] = acc
    return TwoForm(w.ctx, n, out)


def form_apply_algmap(mu, w: TwoForm) -> TwoForm:
    """Pushforward-by-substitution mu(g dx_i ^ dx_j) = mu(g) d mu(x_i) ^ d mu(x_j)."""
    n = w.n
    images = mu.images
    J = [[images[i].partial(k) for k in range(1, n + 1)] for i in range(n)]
    mapped = {(i, j): mu(v) for (i, j), v in w.g.items()}
    out = {}
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            acc = TruncPoly.zero(w.ctx, n)
            for (i, j), g in mapped.items():
                # g (dmu_i ^ dmu_j) contributes (J_ik J_jl - J_jk J_il) to dx_k ^ dx_l
                term = J[i - 1][k - 1] * J[j - 1][l - 1] - J[j - 1][k - 1] * J[i - 1][l - 1]
                if not term.is_zero():
                    acc = acc + g * term
            out[(k, l)] = acc
    return TwoForm(w.ctx, n, out)


def forms_zero(ctx: FieldCtx, n: int) -> TwoForm:
    return TwoForm(ctx, n, {})


def polys_as_matrix(polys: Iterable[TruncPoly]) -> np.ndarray:
    return np.stack([f.coeffs for f in polys])
