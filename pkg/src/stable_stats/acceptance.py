"""Acceptance checks, bundled so that ``stable-stats verify`` and pytest run the same code.

Each check returns a :class:`CheckResult`; exact checks compare rationals
for equality, the Monte Carlo check uses a 3-standard-error band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from .charpoly import CharPoly, product_expand, verify_expansion
from .conjugacy import ConjClassLabel, enumerate_classes, invariant_factors, parse_class_spec
from .families import SpFamily, gl_family, sp_family, sym_family, transitivity_check
from .field import field_make
from .linalg import (
    MatrixFq,
    encode_matrices,
    enumerate_grassmannian,
    gaussian_binomial,
    gl_elements,
    gl_order,
)
from .stats import (
    Statistic,
    closed_form_expectation,
    exact_expectation,
    exact_joint_moment,
    mc_estimate,
)

__all__ = ["CheckResult", "CHECKS", "run_checks", "conjugation_orbits"]


@dataclass
class CheckResult:
    id: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id}. {self.title}: {self.detail}"


def _fields():
    return field_make(2), field_make(3)


def _eig_rows(lams_by_q):
    rows = []
    for p, lams, ns in lams_by_q:
        F = field_make(p)
        for lam in lams:
            stat = Statistic(gl_family(F), parse_class_spec(f"eig:{lam}", F))
            rows += [(p, lam, n, exact_expectation(stat, n).value) for n in ns]
    return rows


def _eig_detail(rows) -> str:
    # (q - 1) * X counts non-zero eigenvectors rather than eigenlines
    return " ".join(f"q={p},l={lam},n={n}: E[X]={v}, E[vectors]={(p - 1) * v}" for p, lam, n, v in rows)


def check_fixed_vectors() -> CheckResult:
    rows = _eig_rows([(2, [1], range(1, 5)), (3, [1], range(1, 4))])
    ok = all(v == 1 for *_, v in rows)
    return CheckResult(1, "E[X_eig:1] = 1 over GL_n(F_2), GL_n(F_3)", ok, _eig_detail(rows))


def check_eigenvalues() -> CheckResult:
    rows = _eig_rows([(3, [1, 2], range(1, 4))])
    ok = all(v == 1 for *_, v in rows)
    return CheckResult(2, "E[X_eig:l] = 1 for each l in F_3^x", ok, _eig_detail(rows))


def check_all_classes() -> CheckResult:
    bad, count = [], 0
    for p, top in ((2, 4), (3, 3)):
        F = field_make(p)
        fam = gl_family(F)
        for d in (1, 2):
            for info in enumerate_classes(d, F):
                stat = Statistic(fam, info.label)
                want = Fraction(info.size, gl_order(d, p))
                for n in range(d, top + 1):
                    count += 1
                    got = exact_expectation(stat, n).value
                    if got != want:
                        bad.append(f"q={p} {info.label} n={n}: {got} != {want}")
    return CheckResult(3, "E[X_C] = |C|/|GL_d| for every class of GL_1, GL_2", not bad, "; ".join(bad) or f"{count} (class, n) pairs agree")


def check_joint_moments() -> CheckResult:
    F2, F3 = _fields()
    e1 = Statistic(gl_family(F2), parse_class_spec("eig:1", F2))
    sq = [exact_joint_moment([e1, e1], n).value for n in (2, 3, 4)]
    a = Statistic(gl_family(F3), parse_class_spec("eig:1", F3))
    b = Statistic(gl_family(F3), parse_class_spec("eig:2", F3))
    mixed = [exact_joint_moment([a, b], n).value for n in (2, 3)]
    ok = sq == [2, 2, 2] and mixed == [Fraction(1, 4)] * 2
    return CheckResult(4, "joint moments stable in n", ok, (
        f"E[X_1^2] over GL_2..4(F_2) = {', '.join(map(str, sq))}; "
        f"E[X_1 X_2] over GL_2..3(F_3) = {', '.join(map(str, mixed))}"
    ))


def check_expansions() -> CheckResult:
    notes, ok = [], True
    F3 = field_make(3)
    fam3 = gl_family(F3)
    one, two = parse_class_spec("eig:1", F3), parse_class_spec("eig:2", F3)
    diag12 = invariant_factors(MatrixFq.diag(F3, [1, 2]))
    got = product_expand(fam3, one, two)
    want = CharPoly.basis(fam3, diag12)
    ok &= got == want
    ok &= verify_expansion((one, two), got, 2) and verify_expansion((one, two), got, 3)
    notes.append(f"q=3: X[1]X[2] = {got}")
    for p in (2, 3):
        F = field_make(p)
        fam = gl_family(F)
        for lam in range(1, p):
            lab = parse_class_spec(f"eig:{lam}", F)
            scalar = invariant_factors(MatrixFq.diag(F, [lam, lam]))
            got = product_expand(fam, lab, lab)
            want = CharPoly(fam, {lab: 1, scalar: (p + 1) * p})
            ok &= got == want
            ok &= verify_expansion((lab, lab), got, 2) and verify_expansion((lab, lab), got, 3)
            notes.append(f"q={p}: X[{lam}]^2 = {got}")
    return CheckResult(5, "product expansions of degree-1 statistics", bool(ok), "; ".join(notes))


def check_symmetric() -> CheckResult:
    fam = sym_family()
    bad, count = [], 0
    for d in (1, 2, 3):
        for info in fam.class_list(d):
            stat = Statistic(fam, info.label)
            want = Fraction(info.size, math.factorial(d))
            for n in range(d, 8):
                count += 1
                got = exact_expectation(stat, n).value
                if got != want:
                    bad.append(f"{info.label} n={n}: {got} != {want}")
    return CheckResult(6, "E[X_C] = |C|/d! for classes of S_1..S_3, n up to 7", not bad, "; ".join(bad) or f"{count} (class, n) pairs agree")


def _filter_sp(F, half: int) -> np.ndarray:
    """Sp_{2 half}(F) by testing every element of GL_{2 half}(F) against the form."""
    fam = SpFamily(F)
    j = fam.gram(half)
    gl = gl_elements(2 * half, F)
    lhs = kernels.batch_matmul(kernels.batch_matmul(np.ascontiguousarray(np.transpose(gl, (0, 2, 1))), j, F), gl, F)
    return gl[np.all(lhs == j, axis=(1, 2))]


def check_symplectic() -> CheckResult:
    F = field_make(2)
    fam = sp_family(F)
    filtered = _filter_sp(F, 2)
    built = fam.group_elements(2)
    same_group = len(filtered) == 720 and np.array_equal(
        np.sort(encode_matrices(filtered, 2)), encode_matrices(built, 2)
    )
    planes = fam.subobjects(1, 2)
    notes, ok = [f"|Sp_4(F_2)| = {len(filtered)} by filtering GL_4", f"{len(planes)} symplectic planes"], same_group
    tally: dict[ConjClassLabel, int] = {}
    for g in filtered:
        m = fam.wrap(g)
        for s in planes:
            lab = fam.restrict(m, s)
            if lab is not None:
                tally[lab] = tally.get(lab, 0) + 1
    for info in fam.class_list(1):
        stat = Statistic(fam, info.label)
        want = Fraction(info.size, fam.group_order(1))
        direct = Fraction(tally.get(info.label, 0), len(filtered))
        batched = exact_expectation(stat, 2).value
        ok &= direct == batched == want
        notes.append(f"{info.label}: {direct} (|C|={info.size})")
    orbits = transitivity_check(fam, 1, 2)
    ok &= orbits == 1
    notes.append(f"orbits on symplectic embeddings: {orbits}")
    return CheckResult(7, "symplectic planes in F_2^4", bool(ok), "; ".join(notes))


def check_monte_carlo(samples: int = 100_000, seeds=(20240601, 7)) -> CheckResult:
    F = field_make(2)
    stat = Statistic(gl_family(F), parse_class_spec("eig:1", F))
    ok, notes = True, []
    for seed in seeds:
        r = mc_estimate(stat, 8, samples, seed)
        within = abs(r.mean - 1) <= 3 * r.stderr
        ok &= within
        notes.append(f"seed {seed}: {r.mean:.5f} +/- {r.stderr:.5f}")
    return CheckResult(8, "Monte Carlo fixed vectors, GL_8(F_2)", bool(ok), "; ".join(notes))


def conjugation_orbits(elements: np.ndarray, field) -> list[frozenset[int]]:
    """Partition of ``elements`` (indices) into conjugacy classes by brute force."""
    codes = encode_matrices(elements, field.q)
    where = {int(c): i for i, c in enumerate(codes)}
    inverses = np.stack([MatrixFq(field, g).inverse().data for g in elements])
    seen = np.zeros(len(elements), dtype=bool)
    blocks = []
    for i in range(len(elements)):
        if seen[i]:
            continue
        conj = kernels.batch_matmul(kernels.batch_matmul(elements, elements[i], field), inverses, field)
        block = frozenset(where[int(c)] for c in np.unique(encode_matrices(conj, field.q)))
        seen[list(block)] = True
        blocks.append(block)
    return blocks


def check_properties() -> CheckResult:
    F2, F3 = _fields()
    notes, ok = [], True

    # conjugation invariance of every X_C over GL_2(F_3)
    fam = gl_family(F3)
    els = gl_elements(2, F3)
    inverses = np.stack([MatrixFq(F3, g).inverse().data for g in els])
    base = np.concatenate([fam.class_counts(els, 2, d) for d in (1, 2)], axis=1)
    inv_ok = True
    for g, gi in zip(els, inverses):
        conj = kernels.batch_matmul(kernels.batch_matmul(g, els, F3), gi, F3)
        inv_ok &= np.array_equal(np.concatenate([fam.class_counts(conj, 2, d) for d in (1, 2)], axis=1), base)
    ok &= inv_ok
    notes.append(f"conjugation invariance on GL_2(F_3): {inv_ok}")

    # invariant-factor labels vs brute-force conjugation orbits
    for d, F in ((2, F3), (3, F2)):
        els = gl_elements(d, F)
        labels = [invariant_factors(MatrixFq(F, g)) for g in els]
        by_label: dict[ConjClassLabel, set] = {}
        for i, lab in enumerate(labels):
            by_label.setdefault(lab, set()).add(i)
        same = {frozenset(s) for s in by_label.values()} == set(conjugation_orbits(els, F))
        ok &= same
        notes.append(f"labels = orbits on GL_{d}(F_{F.q}): {same}")

    # Grassmannian sizes
    grass_ok = all(
        sum(1 for _ in enumerate_grassmannian(n, d, F)) == gaussian_binomial(n, d, F.q)
        for F in (F2, F3)
        for n in range(0, 5)
        for d in range(0, n + 1)
    )
    ok &= grass_ok
    notes.append(f"Grassmannian counts: {grass_ok}")

    # class sizes
    sizes_ok = True
    for F in (F2, F3):
        for d in range(1, 4 if F.q == 2 else 3):
            sizes = [c.size for c in enumerate_classes(d, F)]
            order = gl_order(d, F.q)
            sizes_ok &= sum(sizes) == order and all(order % s == 0 for s in sizes)
    ok &= sizes_ok
    notes.append(f"class sizes sum to and divide |GL_d|: {sizes_ok}")

    # orbit-counting closed form
    fam = gl_family(F2)
    cf_ok = True
    for d in (1, 2):
        for info in enumerate_classes(d, F2):
            stat = Statistic(fam, info.label)
            for n in range(0, 5):
                cf_ok &= closed_form_expectation(stat, n) == exact_expectation(stat, n).value
    ok &= cf_ok
    notes.append(f"closed form matches enumeration: {cf_ok}")
    return CheckResult(9, "property suites", bool(ok), "; ".join(notes))


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_fixed_vectors,
    2: check_eigenvalues,
    3: check_all_classes,
    4: check_joint_moments,
    5: check_expansions,
    6: check_symmetric,
    7: check_symplectic,
    8: check_monte_carlo,
    9: check_properties,
}


def run_checks(ids=None) -> list[CheckResult]:
    ids = sorted(CHECKS) if not ids else ids
    return [CHECKS[i]() for i in ids]
