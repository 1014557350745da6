import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stable_stats import kernels
from stable_stats.field import field_make
from stable_stats.linalg import (
    EnumerationCapError,
    MatrixFq,
    Subspace,
    enumerate_gl,
    enumerate_grassmannian,
    gaussian_binomial,
    gl_order,
    random_gl,
    random_gl_batch,
    restrict,
    rref,
)

from conftest import all_matrices


def _brute_rank(arr, q):
    """Rank by counting the image: |{x A}| = q^rank (oracle)."""
    n = arr.shape[0]
    xs = np.array(np.meshgrid(*[range(q)] * n, indexing="ij")).reshape(n, -1).T
    image = {tuple(row) for row in (xs @ arr) % q}
    return round(math.log(len(image), q))


def test_rref_examples(F2):
    I = MatrixFq.identity(F2, 2)
    assert rref(I) == (I, 2)
    assert rref(MatrixFq.from_rows(F2, [[1, 1], [0, 1]])) == (I, 2)
    r, k = rref(MatrixFq.from_rows(F2, [[1, 1], [0, 1], [0, 0]]))
    assert k == 2 and r.tolist()[:2] == [[1, 0], [0, 1]]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([2, 3, 5]), st.data())
def test_rref_properties(r, c, p, data):
    F = field_make(p)
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    m = MatrixFq.from_rows(F, rows)
    red, rank = rref(m)
    assert rref(red) == (red, rank)
    assert rank == _brute_rank(np.array(rows), p)
    # row-equivalent input (rows reversed, then a row added to another) gives the same RREF
    arr = np.array(rows[::-1])
    if r > 1:
        arr[0] = (arr[0] + arr[1]) % p
    assert rref(MatrixFq(F, arr))[0] == red


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (3, 2), (2, 3), (1, 5)])
def test_gl_order_brute_force(n, q):
    mats = all_matrices(n, q)
    count = sum(_brute_rank(m, q) == n for m in mats)
    assert gl_order(n, q) == count


def test_gl_order_values():
    assert [gl_order(n, 2) for n in range(5)] == [1, 1, 6, 168, 20160]
    assert gl_order(2, 3) == 48


def test_gaussian_binomial():
    assert gaussian_binomial(2, 1, 2) == 3
    assert gaussian_binomial(4, 2, 2) == 35
    assert all(gaussian_binomial(n, 0, 3) == 1 for n in range(5))
    assert gaussian_binomial(2, 3, 2) == 0


@pytest.mark.parametrize("n,d,p", [(2, 1, 2), (3, 1, 2), (4, 2, 2), (3, 2, 3), (3, 3, 3)])
def test_grassmannian_count_and_order(n, d, p):
    F = field_make(p)
    subs = list(enumerate_grassmannian(n, d, F))
    assert len(subs) == gaussian_binomial(n, d, p) == len(set(subs))
    assert subs == sorted(subs)
    assert all(s.dim == d for s in subs)


def test_grassmannian_small(F2, F3):
    lines = list(enumerate_grassmannian(2, 1, F2))
    assert {tuple(s.basis[0]) for s in lines} == {(1, 0), (0, 1), (1, 1)}
    (full,) = enumerate_grassmannian(3, 3, F3)
    assert full.basis.tolist() == np.eye(3, dtype=int).tolist()


def test_enumerate_gl(F2):
    assert [m.tolist() for m in enumerate_gl(1, F2)] == [[[1]]]
    assert len(list(enumerate_gl(2, F2))) == 6
    mats = list(enumerate_gl(3, F2))
    assert len(mats) == 168 and all(m.is_invertible() for m in mats)
    with pytest.raises(EnumerationCapError, match="cap"):
        list(enumerate_gl(3, F2, cap=100))


def test_restrict_examples(F3):
    T = MatrixFq.diag(F3, [1, 2])
    assert restrict(T, Subspace.span(F3, [[1, 0]])).tolist() == [[1]]
    assert restrict(T, Subspace.span(F3, [[0, 1]])).tolist() == [[2]]
    assert restrict(T, Subspace.span(F3, [[1, 1]])) is None


def test_restrict_is_action_on_subspace(F3):
    rng = np.random.default_rng(3)
    for _ in range(30):
        T = random_gl(3, F3, rng)
        for W in enumerate_grassmannian(3, 2, F3):
            S = restrict(T, W)
            B = MatrixFq(F3, W.basis)
            images = (T @ B.T).T
            inv = all(W.contains(row) for row in images.tolist())
            assert (S is not None) == inv
            if S is not None:
                assert T @ B.T == B.T @ S


def test_random_gl_determinism(F2, F3):
    assert random_gl(1, F2, 5).tolist() == [[1]]
    assert random_gl(4, F3, 11) == random_gl(4, F3, 11)
    assert random_gl(4, F3, 11).is_invertible()


@pytest.mark.slow
def test_rejection_acceptance_rate(F2):
    # fraction of uniform 10x10 matrices over F_2 that are invertible
    want = math.prod(1 - 2.0**-i for i in range(1, 11))
    rng = np.random.default_rng(2024)
    trials = 100_000
    hits = 0
    for _ in range(0, trials, 20_000):
        mats = rng.integers(0, 2, size=(20_000, 10, 10), dtype=np.int8)
        hits += int((kernels.batch_rank(mats, F2) == 10).sum())
    rate = hits / trials
    sigma = math.sqrt(want * (1 - want) / trials)
    assert abs(want - 0.289) < 1e-3
    assert abs(rate - want) < 3 * sigma


def test_random_gl_batch_uniform_on_gl2(F2):
    # each of the 6 elements of GL_2(F_2) drawn about equally often
    rngs = [np.random.default_rng(i) for i in range(6000)]
    out = random_gl_batch(2, F2, rngs)
    codes = (out.reshape(len(out), -1) * np.array([8, 4, 2, 1])).sum(axis=1)
    counts = np.bincount(codes, minlength=16)
    nz = counts[counts > 0]
    assert len(nz) == 6
    assert all(abs(c - 1000) < 4 * math.sqrt(1000 * 5 / 6) for c in nz)
