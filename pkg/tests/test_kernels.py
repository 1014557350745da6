import os
import subprocess
import sys

import numpy as np
import pytest

from stable_stats import kernels
from stable_stats.conjugacy import code_to_class_table
from stable_stats.field import field_make
from stable_stats.linalg import MatrixFq, gl_elements, grassmannian_arrays, restrict, Subspace

needs_numba = pytest.mark.skipif("numba" not in kernels.available_backends(), reason="numba not installed")


def _field_matmul(a, b, F):
    """Entry-by-entry product through FieldElement arithmetic (oracle)."""
    n, m = a.shape[0], b.shape[1]
    out = np.zeros((n, m), dtype=np.int8)
    for i in range(n):
        for j in range(m):
            acc = F.zero
            for k in range(a.shape[1]):
                acc = acc + F.element(int(a[i, k])) * F.element(int(b[k, j]))
            out[i, j] = acc.code
    return out


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2), (3, 2)])
@pytest.mark.parametrize("backend", kernels.available_backends())
def test_matmul_matches_field_arithmetic(p, k, backend):
    F = field_make(p, k)
    rng = np.random.default_rng(p * 10 + k)
    a = rng.integers(0, F.q, size=(20, 3, 4), dtype=np.int8)
    b = rng.integers(0, F.q, size=(20, 4, 2), dtype=np.int8)
    got = kernels.batch_matmul(a, b, F, backend=backend)
    for i in range(20):
        assert np.array_equal(got[i], _field_matmul(a[i], b[i], F))


@needs_numba
@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (5, 1), (2, 2)])
def test_backends_agree(p, k):
    F = field_make(p, k)
    rng = np.random.default_rng(7)
    mats = rng.integers(0, F.q, size=(500, 4, 4), dtype=np.int8)
    r1, k1 = kernels.batch_rref(mats, F, backend="numpy")
    r2, k2 = kernels.batch_rref(mats, F, backend="numba")
    assert np.array_equal(r1, r2) and np.array_equal(k1, k2)
    assert np.array_equal(kernels.batch_rank(mats, F, backend="numpy"), kernels.batch_rank(mats, F, backend="numba"))
    bases, piv = grassmannian_arrays(4, 2, F)
    for j in range(0, len(bases), max(1, len(bases) // 5)):
        c1 = kernels.restrict_codes(mats, bases[j], piv[j], F, backend="numpy")
        c2 = kernels.restrict_codes(mats, bases[j], piv[j], F, backend="numba")
        assert np.array_equal(c1, c2)


@needs_numba
def test_class_counts_agree(F2):
    els = gl_elements(3, F2)
    bases, piv = grassmannian_arrays(3, 1, F2)
    table = code_to_class_table(1, F2)
    a = kernels.class_counts(els, bases, piv, table, 1, F2, backend="numpy")
    b = kernels.class_counts(els, bases, piv, table, 1, F2, backend="numba")
    assert np.array_equal(a, b)


def test_restrict_codes_match_restrict(F3):
    els = gl_elements(2, F3)
    bases, piv = grassmannian_arrays(2, 1, F3)
    for j, basis in enumerate(bases):
        codes = kernels.restrict_codes(els, basis, piv[j], F3)
        W = Subspace.span(F3, basis.tolist())
        for e, c in zip(els, codes):
            S = restrict(MatrixFq(F3, e), W)
            assert c == (-1 if S is None else S.code())


def test_numpy_flag_selects_fallback():
    env = dict(os.environ, STABLE_STATS_BACKEND="numpy")
    code = "from stable_stats import kernels, exact_expectation, Statistic, gl_family, field_make, parse_class_spec;" \
        "F=field_make(2);s=Statistic(gl_family(F),parse_class_spec('eig:1',F));" \
        "print(kernels.BACKEND, exact_expectation(s,3).value)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "1"]


def test_bad_backend_flag():
    env = dict(os.environ, STABLE_STATS_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", "import stable_stats"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "STABLE_STATS_BACKEND" in out.stderr
