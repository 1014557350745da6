"""Character polynomials: rational combinations of the statistics X_C.

Products are expanded back into the basis by evaluation.  Because
``X_D(T) = [T in D]`` for T in G_e when deg D = e, and ``X_D`` vanishes on
G_e when deg D > e, solving degree by degree on class representatives of
G_0, G_1, ..., G_{d1+d2} determines every coefficient.  The result is then
checked pointwise on whole groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

import numpy as np

from .conjugacy import ConjClassLabel
from .families import AmbientFamily, SpFamily
from .linalg import EnumerationCapError
from .stats import Statistic, evaluate_batch

__all__ = [
    "CharPoly",
    "ExpansionError",
    "cp_eval",
    "cp_eval_batch",
    "product_expand",
    "verify_expansion",
]


class ExpansionError(RuntimeError):
    pass


@dataclass
class CharPoly:
    family: AmbientFamily
    terms: dict[ConjClassLabel, Fraction] = dc_field(default_factory=dict)

    def __post_init__(self):
        self.terms = {lab: Fraction(c) for lab, c in self.terms.items() if c != 0}

    @classmethod
    def basis(cls, family: AmbientFamily, label: ConjClassLabel) -> "CharPoly":
        return cls(family, {label: Fraction(1)})

    @classmethod
    def one(cls, family: AmbientFamily) -> "CharPoly":
        return cls.basis(family, family.unit())

    @property
    def degree(self) -> int:
        return max((lab.degree for lab in self.terms), default=0)

    def items(self) -> list[tuple[ConjClassLabel, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def _same_family(self, other: "CharPoly"):
        if other.family != self.family:
            raise ValueError("character polynomials from different families")

    def __add__(self, other: "CharPoly") -> "CharPoly":
        self._same_family(other)
        terms = dict(self.terms)
        for lab, c in other.terms.items():
            terms[lab] = terms.get(lab, 0) + c
        return CharPoly(self.family, terms)

    def __mul__(self, scalar) -> "CharPoly":
        return CharPoly(self.family, {lab: c * Fraction(scalar) for lab, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, CharPoly) and self.family == other.family and self.terms == other.terms

    def to_json(self) -> list[dict]:
        return [
            {"label": str(lab), "numerator": str(c.numerator), "denominator": str(c.denominator)}
            for lab, c in self.items()
        ]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for lab, c in self.items():
            coef = "" if c == 1 else f"{c}*"
            parts.append(f"{coef}X[{lab}]")
        return " + ".join(parts)


def cp_eval_batch(p: CharPoly, elements: np.ndarray, n: int) -> list[Fraction]:
    """Values of p on each element of a batch of G_n."""
    if not p.terms:
        return [Fraction(0)] * len(elements)
    labels = [lab for lab, _ in p.items()]
    den = lcm(*(c.denominator for _, c in p.items()))
    ints = [int(c * den) for _, c in p.items()]
    vals = evaluate_batch([Statistic(p.family, lab) for lab in labels], elements, n)
    totals = [sum(k * int(v) for k, v in zip(ints, row)) for row in vals]
    return [Fraction(t, den) for t in totals]


def cp_eval(p: CharPoly, g, n: int) -> Fraction:
    return cp_eval_batch(p, np.asarray(p.family.unwrap(g))[None], n)[0]


def _check_family(family: AmbientFamily):
    if isinstance(family, SpFamily):
        raise ExpansionError("products are not expanded for the sp family")


def verify_expansion(
    lhs: tuple[ConjClassLabel, ConjClassLabel],
    rhs: CharPoly,
    n: int,
    cap: int | None = None,
) -> bool:
    """True iff ``rhs(g) == X_a(g) X_b(g)`` for every g in G_n."""
    family = rhs.family
    a, b = lhs
    elements = family.group_elements(n, cap)
    pair = evaluate_batch([Statistic(family, a), Statistic(family, b)], elements, n)
    product = pair[:, 0] * pair[:, 1]
    values = cp_eval_batch(rhs, elements, n)
    return all(Fraction(int(x)) == v for x, v in zip(product, values))


def product_expand(
    family: AmbientFamily,
    a: ConjClassLabel,
    b: ConjClassLabel,
    cap: int | None = None,
    check: bool = True,
) -> CharPoly:
    """Coefficients of ``X_a X_b`` in the basis {X_D : deg D <= deg a + deg b}.

    With ``check`` the expansion is confirmed on all of G_N and G_{N+1},
    N = deg a + deg b (G_{N+1} only when it fits under the cap).
    """
    _check_family(family)
    sa, sb = Statistic(family, a), Statistic(family, b)
    top = a.degree + b.degree
    coeffs: dict[ConjClassLabel, Fraction] = {}
    for e in range(top + 1):
        infos = family.class_list(e, cap)
        reps = np.stack([np.asarray(family.unwrap(info.representative)) for info in infos])
        lower = [lab for lab in coeffs if lab.degree < e]
        stats = [sa, sb] + [Statistic(family, lab) for lab in lower]
        vals = evaluate_batch(stats, reps, e)
        for info, row in zip(infos, vals):
            lam = Fraction(int(row[0]) * int(row[1]))
            lam -= sum((coeffs[lab] * int(v) for lab, v in zip(lower, row[2:])), Fraction(0))
            if lam:
                coeffs[info.label] = lam
    result = CharPoly(family, coeffs)
    if check:
        for n in (top, top + 1):
            try:
                ok = verify_expansion((a, b), result, n, cap)
            except EnumerationCapError:
                if n == top:
                    raise
                continue
            if not ok:
                raise ExpansionError(f"expansion of X[{a}]*X[{b}] fails on G_{n}: {result}")
    return result
