# Counting kernels.  Field elements are discrete logs in [0, q-2] w.r.t. a
# generator g (a non-square), with the sentinel q-1 standing for zero.
# Multiplication adds logs, addition goes through the Zech table, and the
# quadratic character is the parity of the log.

import warnings

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

from numba import njit, prange  # noqa: E402

KIND_SMOOTH = 0
KIND_SPLIT = 1
KIND_NONSPLIT = 2
KIND_ADDITIVE = 3


@njit(cache=True)
def build_exp_table(p, r, mod, g, q):
    out = np.empty(q - 1, dtype=np.int64)
    cur = np.zeros(r, dtype=np.int64)
    cur[0] = 1
    tmp = np.zeros(2 * r, dtype=np.int64)
    for k in range(q - 1):
        v = 0
        for i in range(r - 1, -1, -1):
            v = v * p + cur[i]
        out[k] = v
        for i in range(2 * r):
            tmp[i] = 0
        for i in range(r):
            if cur[i] != 0:
                for j in range(r):
                    tmp[i + j] += cur[i] * g[j]
        for i in range(2 * r - 1, r - 1, -1):
            c = tmp[i] % p
            if c != 0:
                for j in range(r + 1):
                    tmp[i - r + j] -= c * mod[j]
        for i in range(r):
            cur[i] = tmp[i] % p
    return out


@njit(inline="always")
def _mul(a, b, qm1):
    if a == qm1 or b == qm1:
        return qm1
    s = a + b
    if s >= qm1:
        s -= qm1
    return s


@njit(inline="always")
def _add(a, b, zech, qm1):
    if a == qm1:
        return b
    if b == qm1:
        return a
    d = b - a
    if d < 0:
        d += qm1
    z = zech[d]
    if z == qm1:
        return qm1
    s = a + z
    if s >= qm1:
        s -= qm1
    return s


@njit(inline="always")
def _neg(a, qm1):
    if a == qm1:
        return qm1
    s = a + qm1 // 2
    if s >= qm1:
        s -= qm1
    return s


@njit(inline="always")
def _pow(a, e, qm1):
    # e may be negative; a must be nonzero when e < 0
    if a == qm1:
        return qm1 if e != 0 else 0
    return (a * e) % qm1


@njit(cache=True, parallel=True)
def eval_b_invariants(coef, expo, nterms, tlogs, zech, qm1, c2, c4):
    # coef/expo: (5, L) logs and integer exponents of a1, a2, a3, a4, a6
    n = tlogs.shape[0]
    out = np.empty((n, 3), dtype=np.int64)
    for idx in prange(n):
        t = tlogs[idx]
        a = np.empty(5, dtype=np.int64)
        for i in range(5):
            acc = qm1
            for j in range(nterms[i]):
                acc = _add(acc, _mul(coef[i, j], _pow(t, expo[i, j], qm1), qm1), zech, qm1)
            a[i] = acc
        a1, a2, a3, a4, a6 = a[0], a[1], a[2], a[3], a[4]
        b2 = _add(_mul(a1, a1, qm1), _mul(c4, a2, qm1), zech, qm1)
        b4 = _add(_mul(c2, a4, qm1), _mul(a1, a3, qm1), zech, qm1)
        b6 = _add(_mul(a3, a3, qm1), _mul(c4, a6, qm1), zech, qm1)
        out[idx, 0] = b2
        out[idx, 1] = b4
        out[idx, 2] = b6
    return out


@njit(inline="always")
def _cubic(lx, l4, b2, tb4, b6, zech, qm1):
    # 4x^3 + b2 x^2 + 2 b4 x + b6 by Horner
    v = _add(_mul(l4, lx, qm1), b2, zech, qm1)
    v = _add(_mul(v, lx, qm1), tb4, zech, qm1)
    return _add(_mul(v, lx, qm1), b6, zech, qm1)


@njit(cache=True, parallel=True)
def short_invariants(trip, zech, qm1, k):
    # (Delta, c4, c6) from rows of (b2, b4, b6); k as in classify_triples
    l8, l9, l27, l24, linv4, l36, l216 = k[2], k[3], k[4], k[5], k[7], k[8], k[9]
    n = trip.shape[0]
    out = np.empty((n, 3), dtype=np.int64)
    for idx in prange(n):
        b2 = trip[idx, 0]
        b4 = trip[idx, 1]
        b6 = trip[idx, 2]
        b8 = _mul(_add(_mul(b2, b6, qm1), _neg(_mul(b4, b4, qm1), qm1), zech, qm1), linv4, qm1)
        d = _neg(_mul(_mul(b2, b2, qm1), b8, qm1), qm1)
        d = _add(d, _neg(_mul(l8, _mul(_mul(b4, b4, qm1), b4, qm1), qm1), qm1), zech, qm1)
        d = _add(d, _neg(_mul(l27, _mul(b6, b6, qm1), qm1), qm1), zech, qm1)
        d = _add(d, _mul(l9, _mul(_mul(b2, b4, qm1), b6, qm1), qm1), zech, qm1)
        c4 = _add(_mul(b2, b2, qm1), _neg(_mul(l24, b4, qm1), qm1), zech, qm1)
        c6 = _neg(_mul(_mul(b2, b2, qm1), b2, qm1), qm1)
        c6 = _add(c6, _mul(l36, _mul(b2, b4, qm1), qm1), zech, qm1)
        c6 = _add(c6, _neg(_mul(l216, b6, qm1), qm1), zech, qm1)
        out[idx, 0] = d
        out[idx, 1] = c4
        out[idx, 2] = c6
    return out


@njit(cache=True, parallel=True)
def classify_triples(trip, zech, qm1, k):
    # k: logs of constants [2, 4, 8, 9, 27, 24, 12, 1/4, 36, 216]
    l2, l4, l8, l9, l27, l24, l12, linv4 = k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7]
    n = trip.shape[0]
    kind = np.empty(n, dtype=np.int64)
    at = np.zeros(n, dtype=np.int64)
    for idx in prange(n):
        b2 = trip[idx, 0]
        b4 = trip[idx, 1]
        b6 = trip[idx, 2]
        b8 = _mul(_add(_mul(b2, b6, qm1), _neg(_mul(b4, b4, qm1), qm1), zech, qm1), linv4, qm1)
        d = _neg(_mul(_mul(b2, b2, qm1), b8, qm1), qm1)
        d = _add(d, _neg(_mul(l8, _mul(_mul(b4, b4, qm1), b4, qm1), qm1), qm1), zech, qm1)
        d = _add(d, _neg(_mul(l27, _mul(b6, b6, qm1), qm1), qm1), zech, qm1)
        d = _add(d, _mul(l9, _mul(_mul(b2, b4, qm1), b6, qm1), qm1), zech, qm1)
        tb4 = _mul(l2, b4, qm1)
        if d != qm1:
            s = 0
            if b6 != qm1:
                s += 1 - 2 * (b6 & 1)
            for lx in range(qm1):
                v = _cubic(lx, l4, b2, tb4, b6, zech, qm1)
                if v != qm1:
                    s += 1 - 2 * (v & 1)
            kind[idx] = KIND_SMOOTH
            at[idx] = -s
            continue
        c4 = _add(_mul(b2, b2, qm1), _neg(_mul(l24, b4, qm1), qm1), zech, qm1)
        if c4 == qm1:
            kind[idx] = KIND_ADDITIVE
            continue
        # node: the double root x0 of the cubic; split iff 12 x0 + b2 is a square
        found = -1
        for lx in range(qm1 + 1):
            v = _cubic(lx, l4, b2, tb4, b6, zech, qm1)
            if v != qm1:
                continue
            # derivative 12x^2 + 2 b2 x + 2 b4
            w = _add(_mul(l12, _mul(lx, lx, qm1), qm1), _mul(l2, _mul(b2, lx, qm1), qm1), zech, qm1)
            w = _add(w, tb4, zech, qm1)
            if w == qm1:
                found = lx
                break
        if found < 0:
            kind[idx] = -1
            continue
        c = _add(_mul(l12, found, qm1), b2, zech, qm1)
        if c == qm1:
            kind[idx] = -1
        elif c & 1:
            kind[idx] = KIND_NONSPLIT
        else:
            kind[idx] = KIND_SPLIT
    return kind, at

