"""The p-map on B_n and the invariants built from it.

The p-map is fixed as f^[p] = delta(D_H(f)^[p]): the preimage under D_H of
the p-th power of D_H(f), normalized to have zero constant term.  From it
come the divided powers f^<a>, f^[a], the coefficient functions phi~_a and
phi_a (solved pointwise), and xi_i = phi~_{p^r - p^i} o delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .bn import TruncPoly
from .errors import FieldTooSmall, Inconsistent, PreconditionError
from .gf import FieldCtx, Scalar, interpolate, proot, rank, solve_linear
from .ham import certificate, d_H, delta
from .wn import Derivation, char_poly_of, p_power, psi_from_charpoly

Variant = Literal["tilde", "plain"]


def pmap(f: TruncPoly) -> TruncPoly:
    return delta(p_power(d_H(f)))


def pmap_iter(f: TruncPoly, i: int) -> TruncPoly:
    for _ in range(i):
        f = pmap(f)
    return f


def pmap_chain(f: TruncPoly, k: int) -> list[TruncPoly]:
    """[f, f^[p], ..., f^[p^k]]."""
    out = [f]
    for _ in range(k):
        nxt = pmap(out[-1]) if not out[-1].is_zero() else out[-1]
        out.append(nxt)
    return out


def p_digits(a: int, p: int) -> list[int]:
    if a < 0:
        raise ValueError("a must be >= 0")
    out = []
    while a:
        out.append(a % p)
        a //= p
    return out


class _Powers:
    """Divided powers f^<a> / f^[a] sharing one p-map chain and power table."""

    def __init__(self, f: TruncPoly, top: int, variant: Variant, chain: list[TruncPoly] | None = None):
        p = f.p
        k = max(len(p_digits(top, p)) - 1, 0)
        chain = chain if chain is not None and len(chain) > k else pmap_chain(f, k)
        self.f = f
        self.variant = variant
        self.chain = chain
        bases = []
        for i, g in enumerate(chain[: k + 1]):
            if variant == "tilde" or i > 0:
                g = g - g.kappa()
            bases.append(g)
        self.pows = []
        for g in bases:
            row = [TruncPoly.one(f.ctx, f.n)]
            for _ in range(p - 1):
                row.append(row[-1] * g)
            self.pows.append(row)

    def __call__(self, a: int) -> TruncPoly:
        out = TruncPoly.one(self.f.ctx, self.f.n)
        for i, d in enumerate(p_digits(a, self.f.p)):
            if d:
                out = out * self.pows[i][d]
        return out


def divided(f: TruncPoly, a: int, variant: Variant = "tilde") -> TruncPoly:
    """f^<a> (tilde) or f^[a] (plain).

    For the plain variant digits above the first use f^[p^i] as is; with the
    fixed p-map these already have zero constant term.
    """
    if variant not in ("tilde", "plain"):
        raise ValueError(f"unknown variant {variant!r}")
    return _Powers(f, a, variant)(a)


@dataclass(frozen=True)
class PhiSolve:
    """Pointwise values of phi~_a (or phi_a) for a = 1..p^r - 1."""

    ctx: FieldCtx
    values: np.ndarray
    determined: np.ndarray
    variant: str

    def value(self, a: int) -> Scalar | None:
        if not self.determined[a - 1]:
            return None
        return Scalar(self.ctx, int(self.values[a - 1]))

    @property
    def complete(self) -> bool:
        return bool(self.determined.all())


def phi_solve(f: TruncPoly, r: int | None = None, variant: Variant = "tilde",
              chain: list[TruncPoly] | None = None) -> PhiSolve:
    r = f.n // 2 if r is None else r
    pr = f.p**r
    pw = _Powers(f, pr, variant, chain)
    A = np.stack([pw(pr - a).coeffs for a in range(1, pr)], axis=1)
    b = f.ctx.neg_t[pw(pr).coeffs]
    sol = solve_linear(A, b, f.ctx)
    return PhiSolve(f.ctx, sol.x, sol.determined, variant)


def binom_mod(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        num = den = 1
        for t in range(b):
            num = num * (a - t) % p
            den = den * (t + 1) % p
        out = out * num * pow(den, p - 2, p) % p
        n //= p
        k //= p
    return out


def kappa_plain_power(f: TruncPoly, c: int, chain: Sequence[TruncPoly]) -> int:
    """kappa(f^[c]) as a code, with f^[0] = 1."""
    ctx = f.ctx
    out = 1
    for i, d in enumerate(p_digits(c, f.p)):
        if d:
            out = ctx.mul_t[out, ctx.pow(int(chain[i].coeffs[0]), d)]
    return int(out)


def relation_check(f: TruncPoly, r: int | None = None) -> bool:
    """phi~_a = sum_b (-1)^(a-b) C(a-1, b-1) kappa(f^[a-b]) phi_b for 0 < a < p^r."""
    r = f.n // 2 if r is None else r
    p, ctx = f.p, f.ctx
    chain = pmap_chain(f, r)
    tilde = phi_solve(f, r, "tilde", chain)
    plain = phi_solve(f, r, "plain", chain)
    if not (tilde.complete and plain.complete):
        raise PreconditionError("phi values are not all determined at this point")
    kap = [kappa_plain_power(f, c, chain) for c in range(p**r)]
    for a in range(1, p**r):
        acc = 0
        for b in range(1, a + 1):
            c = binom_mod(a - 1, b - 1, p)
            if (a - b) % 2:
                c = (-c) % p
            term = ctx.mul_t[ctx.mul_t[c, kap[a - b]], plain.values[b - 1]]
            acc = int(ctx.add_t[acc, term])
        if acc != tilde.values[a - 1]:
            return False
    return True


class XiVector(tuple):
    """(xi_0, ..., xi_{r-1}) as a tuple of Scalars."""

    def __repr__(self):
        return "XiVector(" + ", ".join(repr(s) for s in self) + ")"


def xi_charpoly(D: Derivation) -> XiVector:
    r = D.n // 2
    ps = psi_from_charpoly(char_poly_of(D), D.n)
    return XiVector(proot(ps[r + i], r) for i in range(r))


def xi_phi(D: Derivation, f: TruncPoly | None = None) -> tuple[Scalar | None, ...]:
    """xi via phi~_{p^r - p^i}(delta(D)); None where the pointwise solve leaves it free."""
    r = D.n // 2
    f = delta(D) if f is None else f
    try:
        sol = phi_solve(f, r, "tilde")
    except Inconsistent:
        return (None,) * r
    pr = D.ctx.p**r
    return tuple(sol.value(pr - D.ctx.p**i) for i in range(r))


def xi(D: Derivation, method: str = "charpoly") -> XiVector:
    """The invariants xi_0..xi_{r-1} of D in H_n.

    ``charpoly`` takes p^r-th roots of the psi coefficients; ``phi`` solves
    for phi~ at delta(D) and fails when a coordinate is left free; ``auto``
    tries ``phi`` first and falls back to ``charpoly``.
    """
    f = certificate(D)
    if method == "charpoly":
        return xi_charpoly(D)
    if method not in ("phi", "auto"):
        raise ValueError(f"unknown method {method!r}")
    vals = xi_phi(D, f)
    if all(v is not None for v in vals):
        return XiVector(vals)
    if method == "phi":
        raise PreconditionError("phi~ solve leaves some xi coordinate undetermined")
    return xi_charpoly(D)


def in_U(f: TruncPoly, r: int | None = None) -> bool:
    """f, f^[p], ..., f^[p^(r-1)] independent modulo k + m^2."""
    r = f.n // 2 if r is None else r
    chain = pmap_chain(f, r - 1)
    M = np.stack([g.linear_part() for g in chain])
    return rank(M, f.ctx) == r


def in_V(D: Derivation) -> bool:
    return in_U(delta(D))


def is_nilpotent_xi(D: Derivation, method: str = "charpoly") -> bool:
    return all(v == 0 for v in xi(D, method))


def _eval_points(ctx: FieldCtx, count: int, offset: int = 0) -> np.ndarray:
    if count + offset > ctx.q:
        raise FieldTooSmall(f"need {count + offset} distinct points but q = {ctx.q}")
    return np.arange(offset, offset + count, dtype=np.int64)


def xi_line(x: Derivation, y: Derivation, ts: np.ndarray, method: str = "charpoly") -> np.ndarray:
    """Matrix (len(ts), r) of xi_i(x + t y) as codes."""
    r = x.n // 2
    out = np.zeros((len(ts), r), dtype=np.int64)
    for k, t in enumerate(ts):
        v = xi(x + y * Scalar(x.ctx, int(t)), method)
        out[k] = [s.code for s in v]
    return out


def directional_derivatives(x: Derivation, y: Derivation, method: str = "charpoly",
                            offset: int = 0) -> list[Scalar]:
    """(d xi_i)_x (y) for all i from one interpolation of t -> xi(x + t y).

    xi_i(x + t y) has degree at most p^r - p^i <= p^r - 1 in t, so p^r nodes
    suffice for every i at once.
    """
    ctx = x.ctx
    r = x.n // 2
    nodes = _eval_points(ctx, ctx.p**r, offset)
    vals = xi_line(x, y, nodes, method)
    return [Scalar(ctx, int(interpolate(nodes, vals[:, i], ctx)[1])) for i in range(r)]


def directional_derivative(i: int, x: Derivation, y: Derivation, method: str = "charpoly",
                           offset: int = 0) -> Scalar:
    """(d xi_i)_x (y): the t-linear coefficient of xi_i(x + t y)."""
    ctx = x.ctx
    r = x.n // 2
    if not 0 <= i < r:
        raise IndexError(f"invariant index {i} outside 0..{r - 1}")
    deg = ctx.p**r - ctx.p**i
    nodes = _eval_points(ctx, deg + 1, offset)
    vals = xi_line(x, y, nodes, method)[:, i]
    return Scalar(ctx, int(interpolate(nodes, vals, ctx)[1]))
