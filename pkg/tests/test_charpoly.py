import itertools
from fractions import Fraction

import numpy as np
import pytest

from stable_stats.charpoly import CharPoly, ExpansionError, cp_eval, product_expand, verify_expansion
from stable_stats.conjugacy import enumerate_classes, parse_class_spec, unit_label
from stable_stats.families import gl_family, sp_family, sym_family
from stable_stats.field import field_make
from stable_stats.linalg import MatrixFq, gl_elements
from stable_stats.stats import Statistic, evaluate_X


def _lab(text, F=None):
    return parse_class_spec(text, F)


def test_unit_and_basis_eval(F2):
    fam = gl_family(F2)
    one = CharPoly.one(fam)
    for g in gl_elements(2, F2):
        assert cp_eval(one, MatrixFq(F2, g), 2) == 1
    e1 = _lab("eig:1", F2)
    b = CharPoly.basis(fam, e1)
    for g in gl_elements(3, F2)[::7]:
        g = MatrixFq(F2, g)
        assert cp_eval(b, g, 3) == evaluate_X(Statistic(fam, e1), g, 3)
    assert cp_eval(b + b, MatrixFq.identity(F2, 2), 2) == 6


def test_distinct_eigenvalues(F3):
    fam = gl_family(F3)
    got = product_expand(fam, _lab("eig:1", F3), _lab("eig:2", F3))
    diag = Statistic(fam, _lab("invfac:[x^2+2]", F3)).label
    assert got == CharPoly.basis(fam, diag)


@pytest.mark.parametrize("p", [2, 3])
def test_equal_eigenvalues(p):
    F = field_make(p)
    fam = gl_family(F)
    e1 = _lab("eig:1", F)
    scalar = _lab("invfac:[x+%d, x+%d]" % (p - 1, p - 1), F)
    got = product_expand(fam, e1, e1)
    want = CharPoly(fam, {e1: 1, scalar: (p + 1) * p})
    assert got == want
    assert verify_expansion((e1, e1), want, 3)


def test_unit_is_identity(F3):
    fam = gl_family(F3)
    for c in enumerate_classes(2, F3)[:3]:
        assert product_expand(fam, unit_label("gl"), c.label) == CharPoly.basis(fam, c.label)


def test_commutative_and_bounded(F3):
    fam = gl_family(F3)
    labs = [c.label for c in enumerate_classes(1, F3)] + [enumerate_classes(2, F3)[0].label]
    for a, b in itertools.combinations_with_replacement(labs, 2):
        if a.degree + b.degree > 2:
            continue
        ab = product_expand(fam, a, b)
        assert ab == product_expand(fam, b, a)
        assert ab.degree <= a.degree + b.degree


def test_perturbed_rhs_rejected(F2):
    fam = gl_family(F2)
    e1 = _lab("eig:1", F2)
    good = product_expand(fam, e1, e1)
    for lab, c in good.items():
        bad = CharPoly(fam, {**good.terms, lab: c + Fraction(1, 3)})
        assert not verify_expansion((e1, e1), bad, 2)


def test_triangularity(F2, F3):
    for F in (F2, F3):
        fam = gl_family(F)
        for e in (1, 2):
            els = gl_elements(e, F)
            for d in (1, 2, 3):
                if d == 3 and F.q == 3:
                    continue
                for c in enumerate_classes(d, F):
                    vals = fam.class_counts(els, e, d)[:, fam.class_index(c.label)]
                    if d > e:
                        assert not vals.any()
                    elif d == e:
                        labels = fam.class_counts(els, e, e).argmax(axis=1)
                        assert np.array_equal(vals, (labels == fam.class_index(c.label)).astype(vals.dtype))


def test_sym_fixed_points_squared():
    fam = sym_family()
    fix = _lab("cycletype:[1]")
    got = product_expand(fam, fix, fix)
    assert got == CharPoly(fam, {fix: 1, _lab("cycletype:[1,1]"): 2})
    # direct check on S_4: fix(g)^2 = fix(g) + 2 * (pairs of fixed points)
    for g in itertools.permutations(range(4)):
        f = sum(g[i] == i for i in range(4))
        assert cp_eval(got, g, 4) == f * f


def test_sp_not_expanded(F2):
    fam = sp_family(F2)
    with pytest.raises(ExpansionError):
        product_expand(fam, _lab("sp:0", F2), _lab("sp:0", F2))


def test_to_json(F2):
    fam = gl_family(F2)
    e1 = _lab("eig:1", F2)
    js = product_expand(fam, e1, e1).to_json()
    assert js == [
        {"label": "eig:1", "numerator": "1", "denominator": "1"},
        {"label": "invfac:[x+1, x+1]", "numerator": "6", "denominator": "1"},
    ]
