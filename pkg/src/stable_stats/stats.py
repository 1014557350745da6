"""The counting statistics X_C, their exact moments, and Monte Carlo estimates.

For a class C of G_d, ``X_C(g)`` counts the d-subobjects fixed by g on which
g restricts into C.  Exact moments average over every element of G_n with
rational arithmetic; Monte Carlo draws each sample from its own seed,
derived from the master seed and the sample index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .conjugacy import ConjClassLabel, LabelError
from .families import AmbientFamily, GLFamily, SpFamily, SymFamily
from .linalg import MatrixFq, gaussian_binomial, gl_order

__all__ = [
    "Statistic",
    "MomentResult",
    "ScanResult",
    "evaluate_X",
    "evaluate_batch",
    "exact_expectation",
    "exact_joint_moment",
    "mc_estimate",
    "stability_scan",
    "stable_value",
    "closed_form_expectation",
    "sample_seed",
]

_MC_CHUNK = 8192


@dataclass(frozen=True)
class Statistic:
    family: AmbientFamily
    label: ConjClassLabel

    def __post_init__(self):
        # raises LabelError for labels with no elements
        self.family.class_index(self.label)

    @property
    def degree(self) -> int:
        return self.label.degree

    @property
    def index(self) -> int:
        return self.family.class_index(self.label)

    def __str__(self):
        return str(self.label)


@dataclass
class MomentResult:
    mode: str
    n: int
    factors: list[ConjClassLabel]
    value: Fraction | None = None
    mean: float | None = None
    stderr: float | None = None
    samples: int | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "mode": self.mode}
        if self.mode == "exact":
            out["value"] = {"num": str(self.value.numerator), "den": str(self.value.denominator)}
        else:
            out["value"] = {"mean": self.mean, "stderr": self.stderr, "samples": self.samples}
        out["factors"] = [str(f) for f in self.factors]
        return out


@dataclass
class ScanResult:
    results: list[MomentResult]
    verdict: str
    threshold: int
    values: list = dc_field(default_factory=list)


def _as_list(stats) -> list[Statistic]:
    if isinstance(stats, Statistic):
        return [stats]
    stats = list(stats)
    if not stats:
        raise ValueError("need at least one statistic")
    fam = stats[0].family
    if any(s.family != fam for s in stats):
        raise ValueError("all statistics in a product must share one family")
    return stats


def _check_element(family: AmbientFamily, g, n: int) -> np.ndarray:
    arr = np.asarray(family.unwrap(g))
    if isinstance(family, SymFamily):
        if arr.shape != (n,) or sorted(arr.tolist()) != list(range(n)):
            raise ValueError(f"{g!r} is not a permutation of {n} points")
        return arr
    size = 2 * n if isinstance(family, SpFamily) else n
    if arr.shape != (size, size):
        raise ValueError(f"element has shape {arr.shape}, expected {(size, size)}")
    m = MatrixFq(family.field, arr)
    if isinstance(family, SpFamily):
        if not family.is_symplectic(m):
            raise ValueError("matrix does not preserve the symplectic form")
    elif not m.is_invertible():
        raise ValueError("matrix is not invertible")
    return arr


def evaluate_X(stat: Statistic, g, n: int) -> int:
    """X_C(g) by walking every subobject of degree d (0 when n < d)."""
    family = stat.family
    _check_element(family, g, n)
    if n < stat.degree:
        return 0
    return sum(1 for s in family.subobjects(stat.degree, n) if family.restrict(g, s) == stat.label)


def evaluate_batch(stats: Sequence[Statistic], elements: np.ndarray, n: int) -> np.ndarray:
    """``(N, r)`` values of each statistic on each element, via the batched kernels."""
    stats = _as_list(stats)
    family = stats[0].family
    by_degree: dict[int, np.ndarray] = {}
    out = np.zeros((len(elements), len(stats)), dtype=np.int64)
    for j, s in enumerate(stats):
        if s.degree not in by_degree:
            by_degree[s.degree] = family.class_counts(elements, n, s.degree)
        out[:, j] = by_degree[s.degree][:, s.index]
    return out


def _product_sum(values: np.ndarray) -> int:
    """Exact sum over rows of the product across columns."""
    bound = 1
    for col in values.T:
        bound *= max(int(col.max(initial=0)), 1)
    if bound * max(len(values), 1) < 2**62:
        return int(np.prod(values, axis=1).sum())
    return sum(math.prod(int(x) for x in row) for row in values)


def exact_joint_moment(stats, n: int, cap: int | None = None) -> MomentResult:
    """E[X_{C_1} ... X_{C_r}] over G_n as an exact rational."""
    stats = _as_list(stats)
    family = stats[0].family
    labels = [s.label for s in stats]
    if any(n < s.degree for s in stats):
        family.group_order(n)
        return MomentResult("exact", n, labels, value=Fraction(0))
    elements = family.group_elements(n, cap)
    total = _product_sum(evaluate_batch(stats, elements, n))
    return MomentResult("exact", n, labels, value=Fraction(total, family.group_order(n)))


def exact_expectation(stat: Statistic, n: int, cap: int | None = None) -> MomentResult:
    return exact_joint_moment([stat], n, cap)


def sample_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Seed of sample ``index``; independent of how samples are split across workers."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


def _draw(family: AmbientFamily, n: int, start: int, stop: int, seed: int) -> np.ndarray:
    return family.sample_batch(n, [np.random.default_rng(sample_seed(seed, i)) for i in range(start, stop)])


def mc_estimate(stats, n: int, samples: int, seed: int) -> MomentResult:
    """Sample mean and standard error of the product of the statistics over uniform elements."""
    stats = _as_list(stats)
    if samples < 2:
        raise ValueError("Monte Carlo needs at least 2 samples")
    family = stats[0].family
    labels = [s.label for s in stats]
    s1 = s2 = 0
    for start in range(0, samples, _MC_CHUNK):
        stop = min(start + _MC_CHUNK, samples)
        batch = _draw(family, n, start, stop, seed)
        if any(n < s.degree for s in stats):
            prod = np.zeros(len(batch), dtype=np.int64)
        else:
            prod = np.prod(evaluate_batch(stats, batch, n), axis=1)
        s1 += int(prod.sum())
        s2 += int((prod * prod).sum())
    mean = Fraction(s1, samples)
    var = (Fraction(s2) - Fraction(s1 * s1, samples)) / (samples - 1)
    stderr = math.sqrt(var / samples)
    return MomentResult("mc", n, labels, mean=float(mean), stderr=stderr, samples=samples)


def stability_scan(stats, n_range: Iterable[int], cap: int | None = None) -> ScanResult:
    """Exact moments for each n and whether they agree for all n >= sum of degrees.

    The symplectic family gets no verdict for products of two or more
    statistics, where stability is not expected.
    """
    stats = _as_list(stats)
    threshold = sum(s.degree for s in stats)
    results = [exact_joint_moment(stats, n, cap) for n in n_range]
    tail = [r.value for r in results if r.n >= threshold]
    if isinstance(stats[0].family, SpFamily) and len(stats) > 1:
        verdict = "n/a"
    elif not tail:
        verdict = "n/a"
    else:
        verdict = "stable" if all(v == tail[0] for v in tail) else "unstable"
    return ScanResult(results, verdict, threshold, [r.value for r in results])


def stable_value(stat: Statistic) -> Fraction:
    """|C| / |G_d|, the value predicted for n >= d."""
    info = stat.family.class_list(stat.degree)[stat.index]
    return Fraction(info.size, stat.family.group_order(stat.degree))


def closed_form_expectation(stat: Statistic, n: int) -> Fraction:
    """E[X_C] on GL_n by orbit counting.

    GL_n is transitive on d-subspaces, and the stabiliser elements that act
    on W through C are block triangular [[S, *], [0, R]] with S in C: there
    are |C| q^{d(n-d)} |GL_{n-d}| of them.
    """
    if not isinstance(stat.family, GLFamily):
        raise TypeError("closed form is for the gl family")
    d, q = stat.degree, stat.family.field.q
    if n < d:
        return Fraction(0)
    size = stat.family.class_list(d)[stat.index].size
    fixing = size * q ** (d * (n - d)) * gl_order(n - d, q)
    return Fraction(gaussian_binomial(n, d, q) * fixing, gl_order(n, q))
