"""Hot integer kernels: truncated convolution and truncated Berkowitz modulo M.

Each kernel has a loop version that numba compiles and a vectorised numpy
version.  Set ``DWORKMOD_NO_NUMBA=1`` to force the numpy versions.  Moduli too
large for int64 products fall back to Python integers.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and os.environ.get("DWORKMOD_NO_NUMBA", "") not in ("1", "true", "yes")

# products of two residues must fit in int64 with room for one addition
INT64_LIMIT = 2**31


def optional_njit(*args, **kwargs):
    def decorator(func):
        if HAVE_NUMBA:
            return njit(*args, **kwargs)(func)
        return func

    return decorator


# ---------------------------------------------------------------------------
# convolution


def _conv_loops(a, b, M, cap):
    n = min(a.shape[0] + b.shape[0] - 1, cap + 1)
    out = np.zeros(n, dtype=np.int64)
    for i in range(a.shape[0]):
        ai = a[i]
        if ai == 0 or i >= n:
            continue
        for j in range(min(b.shape[0], n - i)):
            out[i + j] = (out[i + j] + ai * b[j]) % M
    return out


_conv_jit = optional_njit(cache=True)(_conv_loops)


def conv_numpy(a, b, M, cap):
    n = min(a.shape[0] + b.shape[0] - 1, cap + 1)
    out = np.zeros(n, dtype=np.int64)
    for i in range(min(a.shape[0], n)):
        if a[i]:
            m = min(b.shape[0], n - i)
            out[i : i + m] = (out[i : i + m] + (a[i] * b[:m]) % M) % M
    return out


def conv_numba(a, b, M, cap):
    return _conv_jit(a, b, M, cap)


def conv_mod(a, b, M: int, cap: int) -> list[int]:
    """Coefficients of a*b modulo M, truncated above degree ``cap``."""
    if not len(a) or not len(b):
        return []
    if M < INT64_LIMIT:
        A = np.asarray(a, dtype=np.int64) % M
        B = np.asarray(b, dtype=np.int64) % M
        fn = conv_numba if NUMBA_ENABLED else conv_numpy
        return [int(v) for v in fn(A, B, M, cap)]
    n = min(len(a) + len(b) - 1, cap + 1)
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return [v % M for v in out]


# ---------------------------------------------------------------------------
# truncated Berkowitz: coefficients of det(I - T A) up to T^D
#
# With A_k = [[A_{k-1}, C], [R, a_kk]] we have
#   det(I - T A_k) = det(I - T A_{k-1}) * (1 - a_kk T - sum_j (R A_{k-1}^j C) T^{j+2})
# and only j <= D - 2 matters after truncation.


def _berkowitz_loops(A, M, D):
    n = A.shape[0]
    poly = np.zeros(D + 1, dtype=np.int64)
    poly[0] = 1
    tk = np.zeros(D + 1, dtype=np.int64)
    for k in range(n):
        for i in range(D + 1):
            tk[i] = 0
        tk[0] = 1
        if D >= 1:
            tk[1] = (M - A[k, k]) % M
        if k > 0 and D >= 2:
            v = np.empty(k, dtype=np.int64)
            for i in range(k):
                v[i] = A[i, k]
            for j in range(D - 1):
                # reduced products stay below 2^31, so k of them fit in int64
                s = 0
                for i in range(k):
                    s += (A[k, i] * v[i]) % M
                tk[j + 2] = (M - s % M) % M
                if j < D - 2:
                    w = np.empty(k, dtype=np.int64)
                    for r in range(k):
                        acc = 0
                        for c in range(k):
                            acc += (A[r, c] * v[c]) % M
                        w[r] = acc % M
                    v = w
        new = np.zeros(D + 1, dtype=np.int64)
        for i in range(D + 1):
            pi = poly[i]
            if pi == 0:
                continue
            for j in range(D + 1 - i):
                new[i + j] = (new[i + j] + pi * tk[j]) % M
        poly = new
    return poly


_berkowitz_jit = optional_njit(cache=True)(_berkowitz_loops)


def _matvec_mod(A, v, M):
    return ((A * v[None, :]) % M).sum(axis=1) % M


def berkowitz_numpy(A, M, D):
    n = A.shape[0]
    poly = np.zeros(D + 1, dtype=np.int64)
    poly[0] = 1
    for k in range(n):
        tk = np.zeros(D + 1, dtype=np.int64)
        tk[0] = 1
        if D >= 1:
            tk[1] = (-A[k, k]) % M
        if k > 0 and D >= 2:
            sub = A[:k, :k]
            row = A[k, :k]
            v = A[:k, k].copy()
            for j in range(D - 1):
                tk[j + 2] = (-(((row * v) % M).sum() % M)) % M
                if j < D - 2:
                    v = _matvec_mod(sub, v, M)
        poly = conv_numpy(poly, tk, M, D)
    return poly


def berkowitz_numba(A, M, D):
    return _berkowitz_jit(A, M, D)


def _berkowitz_python(A, M, D):
    n = len(A)
    poly = [1] + [0] * D
    for k in range(n):
        tk = [1] + [0] * D
        if D >= 1:
            tk[1] = (-A[k][k]) % M
        if k > 0 and D >= 2:
            v = [A[i][k] for i in range(k)]
            for j in range(D - 1):
                tk[j + 2] = (-sum(A[k][i] * v[i] for i in range(k))) % M
                if j < D - 2:
                    v = [sum(A[r][c] * v[c] for c in range(k)) % M for r in range(k)]
        new = [0] * (D + 1)
        for i, x in enumerate(poly):
            if x:
                for j in range(D + 1 - i):
                    new[i + j] += x * tk[j]
        poly = [c % M for c in new]
    return poly


def berkowitz_mod(A, M: int, D: int) -> list[int]:
    """Coefficients of det(I - T A) modulo M up to T^D (division free)."""
    n = len(A)
    if n == 0:
        return [1] + [0] * D
    if M < INT64_LIMIT:
        arr = np.array([[int(x) % M for x in row] for row in A], dtype=np.int64)
        fn = berkowitz_numba if NUMBA_ENABLED else berkowitz_numpy
        return [int(v) for v in fn(arr, M, D)]
    return _berkowitz_python([[int(x) % M for x in row] for row in A], M, D)


def berkowitz_ring(A, ring, D: int) -> list:
    """Same recursion over an ``UnramifiedRing`` acting on coordinate tuples."""
    n = len(A)
    zero, one = ring.zero(), ring.one()
    poly = [one] + [zero] * D
    for k in range(n):
        tk = [one] + [zero] * D
        if D >= 1:
            tk[1] = ring.neg(A[k][k])
        if k > 0 and D >= 2:
            v = [A[i][k] for i in range(k)]
            for j in range(D - 1):
                s = zero
                for i in range(k):
                    s = ring.add(s, ring.mul(A[k][i], v[i]))
                tk[j + 2] = ring.neg(s)
                if j < D - 2:
                    nv = []
                    for r in range(k):
                        s = zero
                        for c in range(k):
                            s = ring.add(s, ring.mul(A[r][c], v[c]))
                        nv.append(s)
                    v = nv
        new = [zero] * (D + 1)
        for i, x in enumerate(poly):
            if any(x):
                for j in range(D + 1 - i):
                    new[i + j] = ring.add(new[i + j], ring.mul(x, tk[j]))
        poly = new
    return poly
