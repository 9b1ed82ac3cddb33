"""Compiled inner loops.

Field elements are integer codes in [0, q).  Prime-field kernels take the
prime ``P`` and use plain modular arithmetic with delayed reduction; table
kernels take the ``add``/``sub``/``mul``/``inv``/``neg`` lookup tables of a
``FieldCtx`` and work for any q.  Integers 0..p-1 have themselves as codes in
every extension, so small integer multipliers can be fed straight into the
tables.
"""

import numba as nb
import numpy as np


@nb.njit(cache=True)
def inv_prime(x, P):
    r = 1
    e = P - 2
    b = x % P
    while e:
        if e & 1:
            r = r * b % P
        b = b * b % P
        e >>= 1
    return r


# -- Hessenberg reduction ----------------------------------------------------


@nb.njit(cache=True)
def hessenberg_prime(A, P):
    N = A.shape[0]
    H = A.copy()
    cs = np.zeros(N, dtype=np.int64)
    for j in range(N - 2):
        piv = -1
        for i in range(j + 1, N):
            if H[i, j] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != j + 1:
            for c in range(N):
                t = H[piv, c]
                H[piv, c] = H[j + 1, c]
                H[j + 1, c] = t
            for rr in range(N):
                t = H[rr, piv]
                H[rr, piv] = H[rr, j + 1]
                H[rr, j + 1] = t
        pinv = inv_prime(H[j + 1, j], P)
        for k in range(j + 2, N):
            c = H[k, j] * pinv % P
            cs[k] = c
            if c == 0:
                continue
            nc = P - c
            for col in range(j, N):
                H[k, col] += nc * H[j + 1, col]
        for k in range(j + 2, N):
            if cs[k] != 0:
                for col in range(j, N):
                    H[k, col] %= P
        for rr in range(N):
            acc = H[rr, j + 1]
            for k in range(j + 2, N):
                acc += cs[k] * H[rr, k]
            H[rr, j + 1] = acc % P
    return H


@nb.njit(cache=True)
def hessenberg_table(A, add, sub, mul, inv):
    N = A.shape[0]
    H = A.copy()
    cs = np.zeros(N, dtype=np.int64)
    for j in range(N - 2):
        piv = -1
        for i in range(j + 1, N):
            if H[i, j] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != j + 1:
            for c in range(N):
                t = H[piv, c]
                H[piv, c] = H[j + 1, c]
                H[j + 1, c] = t
            for rr in range(N):
                t = H[rr, piv]
                H[rr, piv] = H[rr, j + 1]
                H[rr, j + 1] = t
        pinv = inv[H[j + 1, j]]
        for k in range(j + 2, N):
            c = mul[H[k, j], pinv]
            cs[k] = c
            if c == 0:
                continue
            mr = mul[c]
            for col in range(j, N):
                H[k, col] = sub[H[k, col], mr[H[j + 1, col]]]
        for rr in range(N):
            acc = H[rr, j + 1]
            for k in range(j + 2, N):
                c = cs[k]
                if c != 0:
                    acc = add[acc, mul[c, H[rr, k]]]
            H[rr, j + 1] = acc
    return H


# -- characteristic polynomial of an upper Hessenberg matrix ----------------


@nb.njit(cache=True)
def hess_charpoly_prime(H, P):
    N = H.shape[0]
    Pk = np.zeros((N + 1, N + 1), dtype=np.int64)
    Pk[0, 0] = 1
    acc = np.zeros(N + 1, dtype=np.int64)
    for k in range(1, N + 1):
        d = H[k - 1, k - 1]
        for e in range(k + 1):
            acc[e] = 0
        for e in range(k):
            acc[e + 1] += Pk[k - 1, e]
            acc[e] += (P - d) * Pk[k - 1, e]
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * H[i, i - 1] % P
            if prod == 0:
                break
            c = prod * H[i - 1, k - 1] % P
            if c == 0:
                continue
            nc = P - c
            for e in range(i):
                acc[e] += nc * Pk[i - 1, e]
        for e in range(k + 1):
            Pk[k, e] = acc[e] % P
    return Pk[N].copy()


@nb.njit(cache=True)
def hess_charpoly_table(H, add, sub, mul):
    N = H.shape[0]
    Pk = np.zeros((N + 1, N + 1), dtype=np.int64)
    Pk[0, 0] = 1
    for k in range(1, N + 1):
        d = H[k - 1, k - 1]
        for e in range(k):
            Pk[k, e + 1] = Pk[k - 1, e]
        for e in range(k):
            Pk[k, e] = sub[Pk[k, e], mul[d, Pk[k - 1, e]]]
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = mul[prod, H[i, i - 1]]
            if prod == 0:
                break
            c = mul[prod, H[i - 1, k - 1]]
            if c == 0:
                continue
            mr = mul[c]
            for e in range(i):
                Pk[k, e] = sub[Pk[k, e], mr[Pk[i - 1, e]]]
    return Pk[N].copy()


# -- row reduction -----------------------------------------------------------


@nb.njit(cache=True)
def rref_prime(A, P, full):
    """Row-reduce in place; pivots taken in least column order.

    With ``full`` the result is reduced (zeros above pivots too); otherwise
    it is only echelon, which suffices for rank.
    """
    R = A.copy()
    nr, nc = R.shape
    pivots = np.full(min(nr, nc), -1, dtype=np.int64)
    row = 0
    for col in range(nc):
        if row >= nr:
            break
        piv = -1
        for i in range(row, nr):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for c in range(nc):
                t = R[piv, c]
                R[piv, c] = R[row, c]
                R[row, c] = t
        s = inv_prime(R[row, col], P)
        for c in range(col, nc):
            R[row, c] = R[row, c] * s % P
        start = 0 if full else row + 1
        for i in range(start, nr):
            if i == row:
                continue
            f = R[i, col]
            if f == 0:
                continue
            nf = P - f
            for c in range(col, nc):
                R[i, c] = (R[i, c] + nf * R[row, c]) % P
        pivots[row] = col
        row += 1
    return R, pivots[:row].copy()


@nb.njit(cache=True)
def rref_table(A, sub, mul, inv, full):
    R = A.copy()
    nr, nc = R.shape
    pivots = np.full(min(nr, nc), -1, dtype=np.int64)
    row = 0
    for col in range(nc):
        if row >= nr:
            break
        piv = -1
        for i in range(row, nr):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for c in range(nc):
                t = R[piv, c]
                R[piv, c] = R[row, c]
                R[row, c] = t
        ms = mul[inv[R[row, col]]]
        for c in range(col, nc):
            R[row, c] = ms[R[row, c]]
        start = 0 if full else row + 1
        for i in range(start, nr):
            if i == row:
                continue
            f = R[i, col]
            if f == 0:
                continue
            mf = mul[f]
            for c in range(col, nc):
                R[i, c] = sub[R[i, c], mf[R[row, c]]]
        pivots[row] = col
        row += 1
    return R, pivots[:row].copy()


# -- matrix products ---------------------------------------------------------


@nb.njit(cache=True)
def matmul_table(A, B, add, mul):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a == 0:
                continue
            ma = mul[a]
            for j in range(m):
                b = B[t, j]
                if b != 0:
                    C[i, j] = add[C[i, j], ma[b]]
    return C


# -- truncated polynomial arithmetic -----------------------------------------
# Multi-index a of B_n sits at position sum(a_i * p**i) (x_1 least significant).


@nb.njit(cache=True)
def _digits(idx, p, n, out):
    for i in range(n):
        out[i] = idx % p
        idx //= p


@nb.njit(cache=True)
def poly_mul_prime(f, g, P, n):
    N = f.shape[0]
    acc = np.zeros(N, dtype=np.int64)
    da = np.zeros(n, dtype=np.int64)
    db = np.zeros(n, dtype=np.int64)
    stride = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        stride[i] = stride[i - 1] * P
    for a in range(N):
        fa = f[a]
        if fa == 0:
            continue
        _digits(a, P, n, da)
        for i in range(n):
            db[i] = 0
        b = 0
        while True:
            acc[a + b] += fa * g[b]
            i = 0
            while i < n:
                db[i] += 1
                b += stride[i]
                if db[i] + da[i] < P:
                    break
                b -= db[i] * stride[i]
                db[i] = 0
                i += 1
            if i == n:
                break
    for c in range(N):
        acc[c] %= P
    return acc


@nb.njit(cache=True)
def poly_mul_table(f, g, p, n, add, mul):
    N = f.shape[0]
    out = np.zeros(N, dtype=np.int64)
    da = np.zeros(n, dtype=np.int64)
    db = np.zeros(n, dtype=np.int64)
    stride = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        stride[i] = stride[i - 1] * p
    for a in range(N):
        fa = f[a]
        if fa == 0:
            continue
        mf = mul[fa]
        _digits(a, p, n, da)
        for i in range(n):
            db[i] = 0
        b = 0
        while True:
            gb = g[b]
            if gb != 0:
                out[a + b] = add[out[a + b], mf[gb]]
            i = 0
            while i < n:
                db[i] += 1
                b += stride[i]
                if db[i] + da[i] < p:
                    break
                b -= db[i] * stride[i]
                db[i] = 0
                i += 1
            if i == n:
                break
    return out


@nb.njit(cache=True)
def operator_matrix_table(F, p, n, add, mul):
    """Matrix of the derivation sum_i F[i] d/dx_i acting on B_n.

    Column a holds the coefficients of D(x^a) = sum_i a_i F[i] x^(a - e_i).
    """
    N = F.shape[1]
    M = np.zeros((N, N), dtype=np.int64)
    da = np.zeros(n, dtype=np.int64)
    dbase = np.zeros(n, dtype=np.int64)
    dm = np.zeros(n, dtype=np.int64)
    stride = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        stride[i] = stride[i - 1] * p
    for a in range(N):
        _digits(a, p, n, da)
        for i in range(n):
            ai = da[i]
            if ai == 0:
                continue
            base = a - stride[i]
            for t in range(n):
                dbase[t] = da[t]
            dbase[i] -= 1
            for t in range(n):
                dm[t] = 0
            mi = mul[ai]
            m = 0
            while True:
                fm = F[i, m]
                if fm != 0:
                    c = base + m
                    M[c, a] = add[M[c, a], mi[fm]]
                t = 0
                while t < n:
                    dm[t] += 1
                    m += stride[t]
                    if dm[t] + dbase[t] < p:
                        break
                    m -= dm[t] * stride[t]
                    dm[t] = 0
                    t += 1
                if t == n:
                    break
    return M
