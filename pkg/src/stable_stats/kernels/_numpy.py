"""Pure-numpy implementations of the batched kernels.

Every function here has a twin in ``_numba`` with the same signature and
bit-identical output.  Matrices are int8 arrays of field codes; ``add``,
``mul``, ``neg``, ``inv`` are the field's lookup tables.
"""

import numpy as np


def batch_matmul(a, b, add, mul):
    """(N, n, m) x (N, m, k) -> (N, n, k) over the field."""
    n_batch, n, m = a.shape
    k = b.shape[2]
    out = np.zeros((n_batch, n, k), dtype=np.int64)
    for l in range(m):
        out = add[out, mul[a[:, :, l, None], b[:, None, l, :]]]
    return out.astype(np.int8)


def batch_rref(mats, add, mul, neg, inv):
    m = mats.astype(np.int64, copy=True)
    n_batch, rows, cols = m.shape
    rank = np.zeros(n_batch, dtype=np.int64)
    row_idx = np.arange(rows)
    batch_idx = np.arange(n_batch)
    for col in range(cols):
        cand = (m[:, :, col] != 0) & (row_idx[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = batch_idx[has]
        r = rank[has]
        piv = np.argmax(cand[has], axis=1)
        top = m[b, r].copy()
        m[b, r] = m[b, piv]
        m[b, piv] = top
        scale = inv[m[b, r, col]]
        m[b, r] = mul[scale[:, None], m[b, r]]
        pivot_rows = m[b, r]
        factors = m[b, :, col].copy()
        factors[np.arange(len(b)), r] = 0
        sub = mul[factors[:, :, None], pivot_rows[:, None, :]]
        m[b] = add[m[b], neg[sub]]
        rank[has] += 1
    return m.astype(np.int8), rank


def batch_rank(mats, add, mul, neg, inv):
    return batch_rref(mats, add, mul, neg, inv)[1]


def _restrict(mats, basis, pivots, add, mul):
    n_batch, n, _ = mats.shape
    d = basis.shape[0]
    bt = np.ascontiguousarray(basis.T)
    y = batch_matmul(mats, np.broadcast_to(bt, (n_batch, n, d)), add, mul)
    s = y[:, pivots, :]
    back = batch_matmul(np.broadcast_to(bt, (n_batch, n, d)), s, add, mul)
    ok = np.all(back == y, axis=(1, 2))
    return s, ok


def _encode(s, q):
    n_batch = s.shape[0]
    flat = s.reshape(n_batch, -1).astype(np.int64)
    code = np.zeros(n_batch, dtype=np.int64)
    for j in range(flat.shape[1]):
        code = code * q + flat[:, j]
    return code


def restrict_codes(mats, basis, pivots, add, mul, q):
    """Code of T restricted to the row space of ``basis`` (RREF), or -1."""
    if basis.shape[0] == 0:
        return np.zeros(mats.shape[0], dtype=np.int64)
    s, ok = _restrict(mats, basis, pivots, add, mul)
    return np.where(ok, _encode(s, q), -1)


def class_counts(mats, bases, pivots, class_of_code, n_classes, add, mul, q):
    """Per element, the number of invariant subspaces landing in each class."""
    n_batch = mats.shape[0]
    counts = np.zeros((n_batch, n_classes), dtype=np.int64)
    rows = np.arange(n_batch)
    for w in range(bases.shape[0]):
        codes = restrict_codes(mats, bases[w], pivots[w], add, mul, q)
        hit = codes >= 0
        np.add.at(counts, (rows[hit], class_of_code[codes[hit]]), 1)
    return counts

