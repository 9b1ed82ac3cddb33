"""Hamiltonian derivations of B_n, n = 2r.

D_H(f) = sum_{i<=r} (d_i f) d_{i+r} - (d_{i+r} f) d_i.  Its image H_n' is
isomorphic to B_n / k, and H_n = [H_n', H_n'] is spanned by D_H(x^a) for
0 < a < tau, where tau = (p-1, ..., p-1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .bn import TruncPoly, TwoForm, form_apply_derivation, layout
from .errors import ContextMismatch, NotInH, NotInImage
from .gf import EchelonBasis, FieldCtx, rank
from .wn import Derivation, bracket


@dataclass(frozen=True)
class HamCtx:
    ctx: FieldCtx
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")

    @property
    def n(self) -> int:
        return 2 * self.r

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def N(self) -> int:
        return self.ctx.p**self.n

    @property
    def tau(self) -> int:
        """Position of x^tau in the dense layout (the last one)."""
        return self.N - 1

    @property
    def dim(self) -> int:
        return self.N - 2

    def x(self, i: int) -> TruncPoly:
        return TruncPoly.var(self.ctx, self.n, i)

    def poly(self, terms) -> TruncPoly:
        return TruncPoly.from_dict(self.ctx, self.n, terms)

    @cached_property
    def omega(self) -> TwoForm:
        return omega_H(self)


def omega_H(hctx: HamCtx) -> TwoForm:
    one = TruncPoly.one(hctx.ctx, hctx.n)
    return TwoForm(hctx.ctx, hctx.n, {(i, i + hctx.r): one for i in range(1, hctx.r + 1)})


def _r_of(n: int) -> int:
    if n % 2:
        raise ContextMismatch(f"Hamiltonian structure needs an even number of variables, got {n}")
    return n // 2


def d_H(f: TruncPoly) -> Derivation:
    r = _r_of(f.n)
    rows = [None] * f.n
    for i in range(1, r + 1):
        rows[i + r - 1] = f.partial(i).coeffs
        rows[i - 1] = f.ctx.neg_t[f.partial(i + r).coeffs]
    return Derivation(f.ctx, f.n, np.stack(rows))


def poisson(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    return d_H(f).apply(g)


@lru_cache(maxsize=None)
def _integration_plan(p: int, n: int):
    """For each a != 0: the first variable j with a_j > 0, a_j itself, and a - e_j."""
    exps, _ = layout(p, n)
    a = np.arange(1, p**n)
    nz = exps[1:] > 0
    j = np.argmax(nz, axis=1)
    aj = exps[a, j]
    src = a - p**j
    return a, j, aj, src


def delta(D: Derivation) -> TruncPoly:
    """The unique f with D_H(f) = D and kappa(f) = 0.

    The partial derivatives of f can be read off the coefficients of D, so f
    is recovered monomial by monomial by integrating in the first variable
    that occurs; the result is then checked against D.
    """
    r = _r_of(D.n)
    ctx = D.ctx
    c = D.coeffs
    # grads[j] = d_{j+1} f
    grads = np.concatenate([c[r:], ctx.neg_t[c[:r]]])
    a, j, aj, src = _integration_plan(ctx.p, D.n)
    f = np.zeros(ctx.p**D.n, dtype=np.int64)
    f[a] = ctx.mul_t[ctx.inv_t[aj], grads[j, src]]
    out = TruncPoly(ctx, D.n, f)
    if d_H(out) != D:
        raise NotInImage("derivation is not Hamiltonian (not in the image of D_H)")
    return out


def in_H_prime(D: Derivation) -> bool:
    try:
        delta(D)
    except NotInImage:
        return False
    return True


def in_H(D: Derivation) -> bool:
    try:
        f = delta(D)
    except NotInImage:
        return False
    return f.coeffs[-1] == 0


def certificate(D: Derivation) -> TruncPoly:
    """delta(D) after checking D lies in H_n."""
    try:
        f = delta(D)
    except NotInImage as e:
        raise NotInH(str(e)) from None
    if f.coeffs[-1]:
        raise NotInH("derivation lies in H_n' but has a nonzero x^tau component")
    return f


class HClass(enum.Enum):
    H = "H"
    H_PRIME = "H'"
    H_DPRIME = "H''"
    OUTSIDE = "outside"


def h_family(D: Derivation) -> HClass:
    r = _r_of(D.n)
    try:
        f = delta(D)
    except NotInImage:
        w = form_apply_derivation(D, omega_H(HamCtx(D.ctx, r)))
        return HClass.H_DPRIME if w.is_zero() else HClass.OUTSIDE
    return HClass.H if f.coeffs[-1] == 0 else HClass.H_PRIME


@dataclass(frozen=True, eq=False)
class HamElement:
    """D in H_n together with its normalized potential f = delta(D)."""

    D: Derivation
    f: TruncPoly

    def __post_init__(self):
        if self.f.coeffs[0] or self.f.coeffs[-1]:
            raise NotInH("potential must have zero constant and x^tau coefficients")
        if d_H(self.f) != self.D:
            raise NotInH("D_H(f) differs from D")

    @classmethod
    def from_potential(cls, f: TruncPoly) -> HamElement:
        g = TruncPoly(f.ctx, f.n, np.concatenate([[0], f.coeffs[1:-1], [0]]))
        return cls(d_H(g), g)

    @classmethod
    def from_derivation(cls, D: Derivation) -> HamElement:
        return cls(D, certificate(D))

    def __eq__(self, other):
        return isinstance(other, HamElement) and self.D == other.D


def monomial_potential(hctx: HamCtx, a: int) -> TruncPoly:
    v = np.zeros(hctx.N, dtype=np.int64)
    v[a] = 1
    return TruncPoly(hctx.ctx, hctx.n, v)


def ham_basis(hctx: HamCtx) -> list[HamElement]:
    """D_H(x^a) for 0 < a < tau, in layout order."""
    return [HamElement(d_H(f), f) for f in (monomial_potential(hctx, a) for a in range(1, hctx.N - 1))]


def dh_matrix(hctx: HamCtx) -> np.ndarray:
    """(n p^n) x p^n matrix of D_H in the monomial bases."""
    return np.stack([d_H(monomial_potential(hctx, a)).vector for a in range(hctx.N)], axis=1)


def random_element(hctx: HamCtx, rng: np.random.Generator) -> HamElement:
    """Uniform element of H_n(F_q) (uniform coordinates in the monomial basis)."""
    v = hctx.ctx.random(rng, hctx.N)
    v[0] = 0
    v[-1] = 0
    f = TruncPoly(hctx.ctx, hctx.n, v)
    return HamElement(d_H(f), f)


def special_u_v(hctx: HamCtx) -> tuple[TruncPoly, TruncPoly]:
    """u = sum (-1)^(i-1) x_i prod_{j<i} x_{r+j}^(p-1), and v with the roles of the halves swapped."""
    r, p = hctx.r, hctx.p
    u = TruncPoly.zero(hctx.ctx, hctx.n)
    v = TruncPoly.zero(hctx.ctx, hctx.n)
    for i in range(1, r + 1):
        sign = 1 if i % 2 else -1
        eu = [0] * hctx.n
        ev = [0] * hctx.n
        eu[i - 1] = 1
        ev[r + i - 1] = 1
        for j in range(1, i):
            eu[r + j - 1] = p - 1
            ev[j - 1] = p - 1
        u = u + TruncPoly.monomial(hctx.ctx, hctx.n, eu, sign)
        v = v + TruncPoly.monomial(hctx.ctx, hctx.n, ev, sign)
    return u, v


def pair_potentials(hctx: HamCtx) -> list[TruncPoly]:
    """s_i = x_i x_{r+i}, i = 1..r."""
    return [hctx.x(i) * hctx.x(hctx.r + i) for i in range(1, hctx.r + 1)]


def subspace_E(hctx: HamCtx) -> list[Derivation]:
    u, v = special_u_v(hctx)
    return [d_H(u), d_H(v)] + [d_H(s) for s in pair_potentials(hctx)]


def in_S0(f: TruncPoly) -> bool:
    """f = lambda + u + h * x_{r+1}^(p-1) ... x_{2r}^(p-1) with h in m, h a polynomial in x_1..x_r.

    The sign (-1)^(r-1) in front of h is absorbed since h is arbitrary.
    """
    r = _r_of(f.n)
    hctx = HamCtx(f.ctx, r)
    u, _ = special_u_v(hctx)
    g = TruncPoly(f.ctx, f.n, np.concatenate([[0], f.coeffs[1:]])) - u
    exps, _ = layout(f.p, f.n)
    nz = np.flatnonzero(g.coeffs)
    if not len(nz):
        return True
    e = exps[nz]
    top = np.all(e[:, r:] == f.p - 1, axis=1)
    low = np.any(e[:, :r] > 0, axis=1)
    return bool(np.all(top & low))


def torus_TH(hctx: HamCtx) -> list[Derivation]:
    """(1 + x_{r+i}) d_{r+i} - x_i d_i, i = 1..r."""
    out = []
    for i in range(1, hctx.r + 1):
        c = np.zeros((hctx.n, hctx.N), dtype=np.int64)
        xr = hctx.x(hctx.r + i).coeffs
        c[hctx.r + i - 1] = xr
        c[hctx.r + i - 1, 0] = 1
        c[i - 1] = hctx.ctx.neg_t[hctx.x(i).coeffs]
        out.append(Derivation(hctx.ctx, hctx.n, c))
    return out


def torus_TW(r: int, ctx: FieldCtx) -> list[Derivation]:
    """(1 + x_i) d_i on B_r."""
    out = []
    for i in range(1, r + 1):
        coeff = TruncPoly.one(ctx, r) + TruncPoly.var(ctx, r, i)
        out.append(Derivation.partial(ctx, r, i, coeff))
    return out


def torus_element(hctx: HamCtx, c) -> Derivation:
    """sum_i c_i t_i for the T_H generators t_i."""
    D = Derivation.zero(hctx.ctx, hctx.n)
    for ci, t in zip(c, torus_TH(hctx)):
        D = D + t * int(ci) if isinstance(ci, (int, np.integer)) else D + t * ci
    return D


def closure_dim(X: Derivation, gens: list[Derivation], max_rounds: int | None = None) -> int:
    """Dimension of the smallest subspace containing X that is stable under ad(g) for g in gens."""
    if X.is_zero():
        return 0
    ctx = X.ctx
    span = EchelonBasis(ctx, X.vector.size)
    span.add(X.vector)
    frontier = [X]
    rounds = 0
    while frontier and (max_rounds is None or rounds < max_rounds):
        rounds += 1
        nxt = []
        for Y in frontier:
            for g in gens:
                Z = bracket(g, Y)
                if span.add(Z.vector):
                    nxt.append(Z)
        frontier = nxt
    return len(span)


def simplicity_probe(hctx: HamCtx, samples: int, seed: int, extra: list[Derivation] | None = None) -> dict:
    """Ideal-closure dimensions of sampled nonzero elements; all should equal p^n - 2."""
    gens = [b.D for b in ham_basis(hctx)]
    xs = list(extra or [])
    for k in range(samples):
        xs.append(random_element(hctx, np.random.default_rng([seed, k])).D)
    dims = []
    for X in xs:
        if X.is_zero():
            continue
        dims.append(closure_dim(X, gens))
    failures = [d for d in dims if d != hctx.dim]
    return {"population": len(dims), "dims": dims, "failures": len(failures), "expected": hctx.dim}


def dims_report(hctx: HamCtx) -> dict:
    """Ranks of H_n', H_n, the bracket span of the H_n basis, and the kernel of D_H."""
    M = dh_matrix(hctx)
    ctx = hctx.ctx
    rk_prime = rank(M[:, 1:], ctx)
    rk_H = rank(M[:, 1:-1], ctx)
    kernel = hctx.N - rank(M, ctx)
    return {"dim_H_prime": rk_prime, "dim_H": rk_H, "kernel_dim": kernel}


def derived_span_dim(hctx: HamCtx, max_pairs: int | None = None) -> tuple[int, bool]:
    """Dimension of the span of D_H([f, g]) over pairs of basis potentials.

    Works on potentials with the constant dropped (D_H is injective there).
    Also reports whether every bracket avoided x^tau, i.e. stayed inside H_n.
    Stops once the span reaches p^n - 2 or after ``max_pairs`` pairs.
    """
    basis_f = [b.f for b in ham_basis(hctx)]
    span = EchelonBasis(hctx.ctx, hctx.N)
    inside = True
    count = 0
    for i, f in enumerate(basis_f):
        Df = d_H(f)
        for g in basis_f[i + 1:]:
            h = Df.apply(g).coeffs.copy()
            h[0] = 0
            inside &= h[-1] == 0
            span.add(h)
            count += 1
            if len(span) >= hctx.dim or (max_pairs and count >= max_pairs):
                return len(span), bool(inside)
    return len(span), bool(inside)
