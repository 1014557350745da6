import itertools
from fractions import Fraction

import numpy as np
import pytest

from stable_stats import kernels
from stable_stats.conjugacy import LabelError, enumerate_classes, invariant_factors, parse_class_spec
from stable_stats.families import gl_family, sp_family, sym_family
from stable_stats.field import field_make
from stable_stats.linalg import MatrixFq, enumerate_grassmannian, gl_elements, restrict
import stable_stats.stats as stats_mod
from stable_stats.stats import (
    Statistic,
    closed_form_expectation,
    evaluate_X,
    exact_expectation,
    exact_joint_moment,
    mc_estimate,
    sample_seed,
    stability_scan,
    stable_value,
)


def _eig(F, lam=1):
    return Statistic(gl_family(F), parse_class_spec(f"eig:{lam}", F))


def _brute_X(T, label, d, F):
    """Count d-subspaces W with T W = W and T|W in the class (oracle, no kernels)."""
    count = 0
    for W in enumerate_grassmannian(T.rows, d, F):
        S = restrict(T, W)
        if S is not None and invariant_factors(S) == label:
            count += 1
    return count


def test_evaluate_examples(F2):
    s = _eig(F2)
    assert evaluate_X(s, MatrixFq.identity(F2, 2), 2) == 3
    assert evaluate_X(s, MatrixFq.from_rows(F2, [[0, 1], [1, 0]]), 2) == 1
    assert evaluate_X(s, MatrixFq.from_rows(F2, [[1, 1], [0, 1]]), 2) == 1
    with pytest.raises(ValueError):
        evaluate_X(s, MatrixFq.from_rows(F2, [[1, 1], [1, 1]]), 2)


def test_batch_matches_brute_force(F3):
    fam = gl_family(F3)
    els = gl_elements(2, F3)
    for d in (1, 2):
        for info in enumerate_classes(d, F3):
            s = Statistic(fam, info.label)
            batch = exact_expectation(s, 2).value
            brute = Fraction(sum(_brute_X(MatrixFq(F3, g), info.label, d, F3) for g in els), len(els))
            assert batch == brute


def test_expectation_examples(F2):
    s = _eig(F2)
    assert [exact_expectation(s, n).value for n in (1, 2, 3)] == [1, 1, 1]
    unip = Statistic(gl_family(F2), invariant_factors(MatrixFq.from_rows(F2, [[1, 1], [0, 1]])))
    assert exact_expectation(unip, 2).value == Fraction(1, 2)


@pytest.mark.parametrize("fam_name", ["gl", "sym", "sp"])
def test_below_degree_is_zero(F2, fam_name):
    if fam_name == "gl":
        s = Statistic(gl_family(F2), parse_class_spec("invfac:[x+1, x+1]", F2))
    elif fam_name == "sym":
        s = Statistic(sym_family(), parse_class_spec("cycletype:[2,1]"))
    else:
        s = Statistic(sp_family(F2), parse_class_spec("sp4:0", F2))
    assert exact_expectation(s, 1).value == 0
    assert exact_expectation(s, 0).value == 0


def test_joint_moments_brute_force(F2, F3):
    s = _eig(F2)
    vals = [evaluate_X(s, MatrixFq(F2, g), 2) for g in gl_elements(2, F2)]
    assert sorted(vals) == [0, 0, 1, 1, 1, 3]
    assert exact_joint_moment([s, s], 2).value == Fraction(sum(v * v for v in vals), 6) == 2
    a, b = _eig(F3, 1), _eig(F3, 2)
    els = [MatrixFq(F3, g) for g in gl_elements(2, F3)]
    brute = Fraction(sum(_brute_X(g, a.label, 1, F3) * _brute_X(g, b.label, 1, F3) for g in els), 48)
    assert exact_joint_moment([a, b], 2).value == brute == Fraction(1, 4)
    assert exact_joint_moment([a], 3).value == exact_expectation(a, 3).value


@pytest.mark.parametrize("p,ns", [(2, range(1, 5)), (3, range(1, 4))])
def test_nonzero_eigenvectors_average_one(p, ns):
    """The expected number of v != 0 with T v = lam v is 1 for every lam; it is (q-1) X_eig:lam."""
    F = field_make(p)
    for n in ns:
        els = gl_elements(n, F)
        vecs = np.array(list(itertools.product(range(p), repeat=n))[1:], dtype=np.int8)
        tv = kernels.batch_matmul(els, vecs.T, F)  # (N, n, V)
        for lam in range(1, p):
            scaled = (lam * vecs.T.astype(np.int64)) % p
            hits = np.all(tv == scaled[None], axis=1).sum()
            assert Fraction(int(hits), len(els)) == 1
            assert (p - 1) * exact_expectation(_eig(F, lam), n).value == 1


def test_class_function_gl(F3):
    fam = gl_family(F3)
    els = gl_elements(2, F3)
    stats = [Statistic(fam, c.label) for d in (1, 2) for c in enumerate_classes(d, F3)]
    rng = np.random.default_rng(0)
    for i in rng.choice(len(els), 12, replace=False):
        h = MatrixFq(F3, els[i])
        base = [evaluate_X(s, h, 2) for s in stats]
        for g in els[::5]:
            g = MatrixFq(F3, g)
            assert [evaluate_X(s, g @ h @ g.inverse(), 2) for s in stats] == base


def test_class_function_sym():
    fam = sym_family()
    stats = [Statistic(fam, c.label) for d in (1, 2, 3) for c in fam.class_list(d)]
    perms = list(itertools.permutations(range(4)))
    for h in perms:
        base = [evaluate_X(s, h, 4) for s in stats]
        for g in perms[::3]:
            ginv = [0] * 4
            for i, x in enumerate(g):
                ginv[x] = i
            conj = tuple(g[h[ginv[i]]] for i in range(4))
            assert [evaluate_X(s, conj, 4) for s in stats] == base


def test_sum_over_labels_counts_invariant_subspaces(F2):
    fam = gl_family(F2)
    for d in (1, 2):
        stats = [Statistic(fam, c.label) for c in enumerate_classes(d, F2)]
        for g in gl_elements(3, F2):
            T = MatrixFq(F2, g)
            fixed = sum(restrict(T, W) is not None for W in enumerate_grassmannian(3, d, F2))
            assert sum(evaluate_X(s, T, 3) for s in stats) == fixed


def test_closed_form(F2, F3):
    for F, top in ((F2, 4), (F3, 3)):
        for d in (1, 2):
            for c in enumerate_classes(d, F):
                s = Statistic(gl_family(F), c.label)
                for n in range(0, top + 1):
                    assert closed_form_expectation(s, n) == exact_expectation(s, n).value


def test_stable_value_sym():
    fam = sym_family()
    for c in fam.class_list(3):
        s = Statistic(fam, c.label)
        assert stable_value(s) == Fraction(c.size, 6)
        assert all(exact_expectation(s, n).value == stable_value(s) for n in range(3, 7))


def test_mc_singleton_group(F2):
    r = mc_estimate(_eig(F2), 1, 50, seed=3)
    assert r.mean == 1 and r.stderr == 0


def test_mc_deterministic_and_chunk_independent(F3, monkeypatch):
    s = _eig(F3)
    a = mc_estimate([s, s], 4, 3000, seed=99)
    b = mc_estimate([s, s], 4, 3000, seed=99)
    assert (a.mean, a.stderr) == (b.mean, b.stderr)
    monkeypatch.setattr(stats_mod, "_MC_CHUNK", 7)
    c = mc_estimate([s, s], 4, 3000, seed=99)
    assert (c.mean, c.stderr) == (a.mean, a.stderr)
    assert mc_estimate(s, 4, 3000, seed=100).mean != a.mean


def test_sample_seed_independent_of_order():
    x = np.random.default_rng(sample_seed(5, 17)).integers(1 << 30)
    y = np.random.default_rng(sample_seed(5, 17)).integers(1 << 30)
    z = np.random.default_rng(sample_seed(5, 18)).integers(1 << 30)
    assert x == y != z


def test_mc_within_three_sigma_small(F2):
    s = _eig(F2)
    r = mc_estimate(s, 5, 20_000, seed=11)
    assert abs(r.mean - 1) <= 3 * r.stderr


def test_mc_unbiased_on_exhaustive(F3):
    # averaging over the whole group reproduces the exact value
    s = _eig(F3, 2)
    els = gl_elements(2, F3)
    vals = [evaluate_X(s, MatrixFq(F3, g), 2) for g in els]
    assert Fraction(sum(vals), len(vals)) == exact_expectation(s, 2).value


def test_scans(F2):
    s = _eig(F2)
    scan = stability_scan(s, range(1, 5))
    assert scan.values == [1, 1, 1, 1] and scan.verdict == "stable"
    scan = stability_scan([s, s], range(2, 5))
    assert scan.values == [2, 2, 2] and scan.verdict == "stable"
    sym = Statistic(sym_family(), parse_class_spec("cycletype:[2]"))
    scan = stability_scan(sym, range(2, 7))
    assert scan.values == [Fraction(1, 2)] * 5 and scan.verdict == "stable"
    # below the threshold values may differ without affecting the verdict
    assert stability_scan([s, s], range(0, 4)).verdict == "stable"


def test_sp_product_has_no_verdict(F2):
    s = Statistic(sp_family(F2), parse_class_spec("sp:0", F2))
    scan = stability_scan([s, s], range(1, 3))
    assert scan.verdict == "n/a"
    assert stability_scan(s, range(1, 3)).verdict == "stable"


def test_statistic_rejects_bad_label(F2):
    with pytest.raises(LabelError):
        Statistic(gl_family(F2), parse_class_spec("invfac:[x^2+1]", field_make(3)))
