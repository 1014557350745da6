"""numba versions of the batched kernels; see ``_numpy`` for the contracts."""

import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True)
def batch_matmul(a, b, add, mul):
    n_batch, n, m = a.shape
    k = b.shape[2]
    out = np.zeros((n_batch, n, k), dtype=np.int8)
    for t in prange(n_batch):
        for i in range(n):
            for j in range(k):
                acc = 0
                for l in range(m):
                    acc = add[acc, mul[a[t, i, l], b[t, l, j]]]
                out[t, i, j] = acc
    return out


@njit(cache=True)
def _rref_one(m, add, mul, neg, inv):
    rows, cols = m.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        scale = inv[m[r, col]]
        for j in range(cols):
            m[r, j] = mul[scale, m[r, j]]
        for i in range(rows):
            f = m[i, col]
            if i != r and f != 0:
                for j in range(cols):
                    m[i, j] = add[m[i, j], neg[mul[f, m[r, j]]]]
        r += 1
    return r


@njit(parallel=True, cache=True)
def batch_rref(mats, add, mul, neg, inv):
    n_batch = mats.shape[0]
    out = mats.astype(np.int8).copy()
    rank = np.zeros(n_batch, dtype=np.int64)
    for t in prange(n_batch):
        rank[t] = _rref_one(out[t], add, mul, neg, inv)
    return out, rank


@njit(parallel=True, cache=True)
def batch_rank(mats, add, mul, neg, inv):
    n_batch, rows, cols = mats.shape
    rank = np.zeros(n_batch, dtype=np.int64)
    for t in prange(n_batch):
        work = np.empty((rows, cols), dtype=np.int8)
        for i in range(rows):
            for j in range(cols):
                work[i, j] = mats[t, i, j]
        rank[t] = _rref_one(work, add, mul, neg, inv)
    return rank


@njit(cache=True)
def _restrict_one(mat, basis, pivots, is_pivot, add, mul, q, y):
    # y = mat @ basis.T; the restriction is y[pivots]; invariant iff basis.T @ y[pivots] == y.
    # Pivot rows of y first, then the other rows with an early exit on mismatch.
    n = mat.shape[0]
    d = basis.shape[0]
    for a in range(d):
        i = pivots[a]
        for j in range(d):
            acc = 0
            for l in range(n):
                acc = add[acc, mul[mat[i, l], basis[j, l]]]
            y[i, j] = acc
    for i in range(n):
        if is_pivot[i]:
            continue
        for j in range(d):
            acc = 0
            for l in range(n):
                acc = add[acc, mul[mat[i, l], basis[j, l]]]
            want = 0
            for a in range(d):
                want = add[want, mul[basis[a, i], y[pivots[a], j]]]
            if acc != want:
                return -1
    code = 0
    for a in range(d):
        for j in range(d):
            code = code * q + y[pivots[a], j]
    return code


@njit(parallel=True, cache=True)
def restrict_codes(mats, basis, pivots, add, mul, q):
    n_batch, n, _ = mats.shape
    d = basis.shape[0]
    codes = np.zeros(n_batch, dtype=np.int64)
    is_pivot = np.zeros(n, dtype=np.bool_)
    for a in range(d):
        is_pivot[pivots[a]] = True
    for t in prange(n_batch):
        y = np.empty((n, d), dtype=np.int64)
        codes[t] = _restrict_one(mats[t], basis, pivots, is_pivot, add, mul, q, y)
    return codes


@njit(parallel=True, cache=True)
def class_counts(mats, bases, pivots, class_of_code, n_classes, add, mul, q):
    n_batch, n, _ = mats.shape
    n_sub, d, _ = bases.shape
    counts = np.zeros((n_batch, n_classes), dtype=np.int64)
    is_pivot = np.zeros((n_sub, n), dtype=np.bool_)
    for w in range(n_sub):
        for a in range(d):
            is_pivot[w, pivots[w, a]] = True
    for t in prange(n_batch):
        y = np.empty((n, d), dtype=np.int64)
        for w in range(n_sub):
            code = _restrict_one(mats[t], bases[w], pivots[w], is_pivot[w], add, mul, q, y)
            if code >= 0:
                counts[t, class_of_code[code]] += 1
    return counts
