"""Exact arithmetic in F_p and F_{p^m} plus dense linear algebra over them.

Elements are stored as integer codes: the digit vector (c_0, ..., c_{m-1})
of c_0 + c_1 t + ... + c_{m-1} t^{m-1} (mod the field modulus) is encoded as
sum(c_k * p**k).  For a prime field the code is the residue itself.  All
array-level routines take numpy int64 arrays of codes together with the
``FieldCtx`` they live in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from .errors import (
    DimensionMismatch,
    FieldTooLarge,
    Inconsistent,
    NonPrime,
    PrimeTooSmall,
)

MAX_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by monic b over F_p; coefficients constant term first."""
    a = list(a)
    db = len(b) - 1
    for d in range(len(a) - 1, db - 1, -1):
        c = a[d] % p
        if c:
            for e in range(db + 1):
                a[d - db + e] = (a[d - db + e] - c * b[e]) % p
    return [x % p for x in a[:db]]


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not any(_poly_rem(list(poly), list(low) + [1], p)):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree m (constant term first)."""
    if m == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=m):
        poly = low + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


class FieldCtx:
    """The finite field F_{p^m} with a fixed modulus and its lookup tables."""

    def __init__(self, p: int, m: int, modulus: tuple[int, ...]):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.q = p**m
        q = self.q
        pw = p ** np.arange(m, dtype=np.int64)
        codes = np.arange(q, dtype=np.int64)
        self.digits = (codes[:, None] // pw[None, :]) % p
        self._pw = pw
        D = self.digits
        self.add_t = ((D[:, None, :] + D[None, :, :]) % p) @ pw
        self.sub_t = ((D[:, None, :] - D[None, :, :]) % p) @ pw
        self.neg_t = ((-D) % p) @ pw
        prod = np.zeros((q, q, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                prod[:, :, i + j] += D[:, None, i] * D[None, :, j]
        prod %= p
        mod = np.array(self.modulus, dtype=np.int64)
        for d in range(2 * m - 2, m - 1, -1):
            c = prod[:, :, d].copy()
            prod[:, :, d - m : d + 1] -= c[:, :, None] * mod[None, None, :]
            prod %= p
        self.mul_t = prod[:, :, :m] @ pw
        inv = np.zeros(q, dtype=np.int64)
        ii, jj = np.nonzero(self.mul_t == 1)
        inv[ii] = jj
        self.inv_t = inv
        for t in (self.add_t, self.sub_t, self.neg_t, self.mul_t, self.inv_t, self.digits):
            t.setflags(write=False)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, modulus={self.modulus})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __reduce__(self):
        return (field_create, (self.p, self.m))

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    # element-level helpers; all accept ints or int arrays of codes

    def elem(self, x) -> int:
        """Code of an int (reduced mod p), a digit sequence, or a Scalar."""
        if isinstance(x, Scalar):
            if x.ctx != self:
                raise DimensionMismatch("scalar from a different field")
            return x.code
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        digs = [int(c) % self.p for c in x]
        if len(digs) > self.m:
            raise ValueError(f"expected at most {self.m} digits, got {len(digs)}")
        return sum(c * self.p**k for k, c in enumerate(digs))

    def scalar(self, x) -> Scalar:
        return Scalar(self, self.elem(x))

    def add(self, a, b):
        return self.add_t[a, b]

    def sub(self, a, b):
        return self.sub_t[a, b]

    def mul(self, a, b):
        return self.mul_t[a, b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.inv_t[a]

    def pow(self, a: int, e: int) -> int:
        a = int(a)
        if e < 0:
            a, e = int(self.inv(a)), -e
        r = 1
        while e:
            if e & 1:
                r = int(self.mul_t[r, a])
            a = int(self.mul_t[a, a])
            e >>= 1
        return r

    def pow_array(self, a: np.ndarray, e: int) -> np.ndarray:
        r = np.ones_like(a)
        b = a.copy()
        while e:
            if e & 1:
                r = self.mul_t[r, b]
            b = self.mul_t[b, b]
            e >>= 1
        return r

    def frobenius(self, a, k: int = 1):
        """a ** (p ** k)."""
        k %= self.m
        if isinstance(a, np.ndarray):
            return self.pow_array(a, self.p**k)
        return self.pow(int(a), self.p**k)

    def scale(self, c: int, arr: np.ndarray) -> np.ndarray:
        return self.mul_t[c][arr]

    def random(self, rng: np.random.Generator, size=None):
        return rng.integers(0, self.q, size=size, dtype=np.int64)

    def format(self, code: int) -> str:
        if int(code) < self.p:
            return str(int(code))
        return "[" + ",".join(str(int(d)) for d in self.digits[int(code)]) + "]"


@lru_cache(maxsize=None)
def field_create(p: int, m: int = 1) -> FieldCtx:
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p <= 3:
        raise PrimeTooSmall(f"characteristic must exceed 3, got {p}")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if p**m > MAX_ORDER:
        raise FieldTooLarge(f"q = {p}^{m} exceeds the table limit {MAX_ORDER}")
    return FieldCtx(p, m, smallest_irreducible(p, m))


@dataclass(frozen=True, eq=False)
class Scalar:
    ctx: FieldCtx
    code: int

    @property
    def rep(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.ctx.digits[self.code])

    def _other(self, other) -> int:
        if isinstance(other, Scalar):
            if other.ctx != self.ctx:
                raise DimensionMismatch("scalars from different fields")
            return other.code
        if isinstance(other, (int, np.integer)):
            return int(other) % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Scalar(self.ctx, int(self.ctx.add_t[self.code, o]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Scalar(self.ctx, int(self.ctx.sub_t[self.code, o]))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Scalar(self.ctx, int(self.ctx.sub_t[o, self.code]))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Scalar(self.ctx, int(self.ctx.mul_t[self.code, o]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Scalar(self.ctx, int(self.ctx.mul_t[self.code, self.ctx.inv(o)]))

    def __neg__(self):
        return Scalar(self.ctx, int(self.ctx.neg_t[self.code]))

    def __pow__(self, e: int):
        return Scalar(self.ctx, self.ctx.pow(self.code, e))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == int(other) % self.ctx.p
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.code))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        if self.ctx.m != 1:
            raise TypeError("only prime-field scalars convert to int")
        return self.code

    def __repr__(self):
        return self.ctx.format(self.code)


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, coefficient codes lowest degree first."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c) or (0,))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Scalar:
        return Scalar(self.ctx, self.coeffs[k] if k < len(self.coeffs) else 0)

    def support(self) -> list[int]:
        return [k for k, c in enumerate(self.coeffs) if c]

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.ctx == other.ctx and self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self == UniPoly(self.ctx, tuple(self.ctx.elem(x) for x in other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = int(self.ctx.add_t[self.ctx.mul_t[acc, x], c])
        return acc

    def __repr__(self):
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if c == 1 and mono:
                terms.append(mono)
            else:
                terms.append(self.ctx.format(c) + ("*" + mono if mono else ""))
        return " + ".join(terms) if terms else "0"


# -- dense linear algebra ----------------------------------------------------


def _as_codes(A) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(A, dtype=np.int64))


def char_poly(A, ctx: FieldCtx) -> UniPoly:
    """det(tI - A) by similarity reduction to Hessenberg form."""
    A = _as_codes(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"char_poly needs a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        return UniPoly(ctx, (1,))
    if ctx.is_prime_field:
        H = K.hessenberg_prime(A, ctx.p)
        c = K.hess_charpoly_prime(H, ctx.p)
    else:
        H = K.hessenberg_table(A, ctx.add_t, ctx.sub_t, ctx.mul_t, ctx.inv_t)
        c = K.hess_charpoly_table(H, ctx.add_t, ctx.sub_t, ctx.mul_t)
    return UniPoly(ctx, tuple(int(x) for x in c))


def rref(A, ctx: FieldCtx, full: bool = True) -> tuple[np.ndarray, np.ndarray]:
    A = _as_codes(A)
    if A.ndim != 2:
        raise DimensionMismatch("rref needs a matrix")
    if A.size == 0:
        return A.copy(), np.zeros(0, dtype=np.int64)
    if ctx.is_prime_field:
        return K.rref_prime(A, ctx.p, full)
    return K.rref_table(A, ctx.sub_t, ctx.mul_t, ctx.inv_t, full)


def rank(A, ctx: FieldCtx) -> int:
    A = _as_codes(A)
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    if A.shape[0] > A.shape[1]:
        A = np.ascontiguousarray(A.T)
    return len(rref(A, ctx, full=False)[1])


class Solution(NamedTuple):
    x: np.ndarray
    unique: bool
    determined: np.ndarray


def solve_linear(A, b, ctx: FieldCtx) -> Solution:
    """Solve A x = b; free variables are set to 0.

    ``determined[j]`` is True when every solution has the same j-th
    coordinate.  Raises ``Inconsistent`` when there is no solution.
    """
    A = _as_codes(A)
    b = _as_codes(b)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"incompatible shapes {A.shape} and {b.shape}")
    nvar = A.shape[1]
    R, piv = rref(np.hstack([A, b[:, None]]), ctx, full=True)
    if len(piv) and piv[-1] == nvar:
        raise Inconsistent("linear system has no solution")
    x = np.zeros(nvar, dtype=np.int64)
    determined = np.zeros(nvar, dtype=bool)
    free = np.setdiff1d(np.arange(nvar), piv)
    for row, col in enumerate(piv):
        x[col] = R[row, nvar]
        determined[col] = not np.any(R[row, free])
    return Solution(x, len(free) == 0, determined)


def matmul(A, B, ctx: FieldCtx) -> np.ndarray:
    A = _as_codes(A)
    B = _as_codes(B)
    if A.shape[-1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    if ctx.is_prime_field:
        return (A @ B) % ctx.p
    vec = B.ndim == 1
    C = K.matmul_table(np.atleast_2d(A), B[:, None] if vec else B, ctx.add_t, ctx.mul_t)
    return C[:, 0] if vec else C


def mat_inv(A, ctx: FieldCtx) -> np.ndarray:
    A = _as_codes(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch("mat_inv needs a square matrix")
    R, piv = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), ctx, full=True)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:].copy()


def det(A, ctx: FieldCtx) -> int:
    """Determinant as (-1)^n times the constant term of the characteristic polynomial."""
    A = _as_codes(A)
    c = char_poly(A, ctx).coeffs[0]
    return int(ctx.neg_t[c]) if A.shape[0] % 2 else c


def proot(z: Scalar, r: int) -> Scalar:
    """The unique y with y ** (p ** r) == z."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ctx = z.ctx
    return Scalar(ctx, int(ctx.frobenius(z.code, (-r) % ctx.m)))


def interpolate(xs, ys, ctx: FieldCtx) -> np.ndarray:
    """Coefficients (lowest first) of the polynomial of degree < len(xs) through the points."""
    xs = _as_codes(xs)
    ys = _as_codes(ys)
    n = len(xs)
    if len(set(xs.tolist())) != n:
        raise ValueError("interpolation nodes must be distinct")
    V = np.ones((n, n), dtype=np.int64)
    for k in range(1, n):
        V[:, k] = ctx.mul_t[V[:, k - 1], xs]
    sol = solve_linear(V, ys, ctx)
    return sol.x


class EchelonBasis:
    """Incrementally maintained row-echelon basis of a subspace of F_q^d."""

    def __init__(self, ctx: FieldCtx, dim: int):
        self.ctx = ctx
        self.dim = dim
        self.rows: dict[int, np.ndarray] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v) -> np.ndarray:
        ctx = self.ctx
        v = _as_codes(v).copy()
        for col in sorted(self.rows):
            c = v[col]
            if c:
                v = ctx.sub_t[v, ctx.mul_t[c][self.rows[col]]]
        return v

    def add(self, v) -> bool:
        """Insert v; return True if it enlarged the span."""
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if not len(nz):
            return False
        col = int(nz[0])
        v = self.ctx.mul_t[self.ctx.inv_t[v[col]]][v]
        for k, row in self.rows.items():
            c = row[col]
            if c:
                self.rows[k] = self.ctx.sub_t[row, self.ctx.mul_t[c][v]]
        self.rows[col] = v
        return True

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))


# -- univariate polynomial helpers (coefficient codes, lowest first) --------


def _trim(a: list[int]) -> list[int]:
    a = [int(x) for x in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod(a, b, ctx: FieldCtx) -> tuple[list[int], list[int]]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [0] * max(len(a) - len(b) + 1, 1)
    lead_inv = int(ctx.inv_t[b[-1]])
    while len(a) >= len(b):
        c = int(ctx.mul_t[a[-1], lead_inv])
        shift = len(a) - len(b)
        quot[shift] = c
        for k, bk in enumerate(b):
            a[shift + k] = int(ctx.sub_t[a[shift + k], ctx.mul_t[c, bk]])
        a = _trim(a)
    return _trim(quot), a


def poly_gcd(a, b, ctx: FieldCtx) -> list[int]:
    """Monic gcd."""
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, poly_divmod(a, b, ctx)[1]
    if not a:
        return []
    li = int(ctx.inv_t[a[-1]])
    return [int(ctx.mul_t[li, c]) for c in a]


def poly_derivative(a, ctx: FieldCtx) -> list[int]:
    return _trim([int(ctx.mul_t[k % ctx.p, c]) for k, c in enumerate(a)][1:])


def is_squarefree(a, ctx: FieldCtx) -> bool:
    a = _trim(a)
    if len(a) <= 1:
        return True
    return len(poly_gcd(a, poly_derivative(a, ctx), ctx)) == 1


def min_poly(A, ctx: FieldCtx) -> UniPoly:
    """Minimal polynomial via the first linear dependency among I, A, A^2, ...

    Cost grows like N^2 per power; intended for N up to a few hundred.
    """
    A = _as_codes(A)
    N = A.shape[0]
    basis = EchelonBasis(ctx, N * N + N + 1)
    # track each power together with a tag vector recording its combination
    powers = [np.eye(N, dtype=np.int64)]
    for k in range(N + 1):
        if k:
            powers.append(matmul(powers[-1], A, ctx))
        tag = np.zeros(N + 1, dtype=np.int64)
        tag[k] = 1
        vec = np.concatenate([powers[-1].ravel(), tag])
        reduced = basis.reduce(vec)
        if not reduced[: N * N].any():
            rel = reduced[N * N :]
            # rel encodes sum c_j A^j == 0 up to sign; normalize to monic in degree k
            rel = _trim(rel.tolist())
            li = int(ctx.inv_t[rel[-1]])
            return UniPoly(ctx, tuple(int(ctx.mul_t[li, c]) for c in rel))
        basis.add(vec)
    raise AssertionError("no dependency found within N+1 powers")
