"""Polynomials over F_q, invariant factors, and conjugacy classes of GL_d(F_q).

Two matrices in GL_d are conjugate iff ``xI - A`` and ``xI - B`` have the
same Smith normal form over F_q[x]; the non-unit diagonal entries, made
monic, are the invariant factors f_1 | f_2 | ... | f_m.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .field import FieldElement, FieldSpec, parse_element
from .linalg import MatrixFq, check_cap, encode_matrices, gl_elements, gl_order

__all__ = [
    "PolyFq",
    "ConjClassLabel",
    "ClassInfo",
    "ClassSpecError",
    "LabelError",
    "invariant_factors",
    "smith_diagonal",
    "enumerate_classes",
    "class_size",
    "class_index",
    "parse_class_spec",
    "parse_poly",
    "companion_matrix",
    "unit_label",
]


class LabelError(ValueError):
    pass


class ClassSpecError(ValueError):
    """Malformed class spec; ``column`` is 1-based within the spec text."""

    def __init__(self, message: str, text: str = "", column: int = 0):
        where = f" at line 1, column {column}" if column else ""
        super().__init__(f"{message}{where}: {text!r}" if text else message)
        self.column = column


@dataclass(frozen=True)
class PolyFq:
    """Polynomial over F_q; ``coeffs`` are field codes in ascending degree, no trailing zeros."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def constant(cls, field: FieldSpec, c) -> "PolyFq":
        return cls(field, (field(c).code,))

    @classmethod
    def x(cls, field: FieldSpec) -> "PolyFq":
        return cls(field, (0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    def _lift(self, other) -> "PolyFq":
        if isinstance(other, PolyFq):
            return other
        return PolyFq.constant(self.field, other)

    def __add__(self, other):
        other = self._lift(other)
        add = self.field.add
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyFq(self.field, tuple(int(add[x, y]) for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return PolyFq(self.field, tuple(int(neg[x]) for x in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return PolyFq(self.field, ())
        add, mul = self.field.add, self.field.mul
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = int(add[out[i + j], mul[a, b]])
        return PolyFq(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = PolyFq.constant(self.field, 1)
        for _ in range(e):
            result = result * self
        return result

    def scale(self, code: int) -> "PolyFq":
        mul = self.field.mul
        return PolyFq(self.field, tuple(int(mul[code, x]) for x in self.coeffs))

    def monic(self) -> "PolyFq":
        if self.is_zero():
            return self
        return self.scale(int(self.field.inv[self.lead]))

    def __divmod__(self, other: "PolyFq"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        add, mul, neg = self.field.add, self.field.mul, self.field.neg
        inv_lead = int(self.field.inv[other.lead])
        rem = list(self.coeffs)
        db = other.degree
        quot = [0] * max(len(rem) - db, 1)
        for shift in range(len(rem) - 1 - db, -1, -1):
            c = int(mul[rem[shift + db], inv_lead])
            if c:
                quot[shift] = c
                for i, b in enumerate(other.coeffs):
                    rem[shift + i] = int(add[rem[shift + i], neg[mul[c, b]]])
        return PolyFq(self.field, tuple(quot)), PolyFq(self.field, tuple(rem))

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def divides(self, other: "PolyFq") -> bool:
        return (other % self).is_zero()

    def __call__(self, a) -> FieldElement:
        a = self.field(a)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * a + self.field.element(c)
        return acc

    def sort_key(self) -> tuple:
        return (self.degree, self.coeffs)

    def __str__(self):
        if self.is_zero():
            return "0"
        fmt = self.field.format_code
        terms = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if not c:
                continue
            cs = fmt(c)
            if self.field.k > 1 and "+" in cs:
                cs = f"({cs})"
            if i == 0:
                terms.append(cs)
                continue
            mono = "x" if i == 1 else f"x^{i}"
            terms.append(mono if c == 1 else f"{cs}*{mono}")
        return "+".join(terms)

    def __repr__(self):
        return f"PolyFq({self}, {self.field})"


def gcd(a: PolyFq, b: PolyFq) -> PolyFq:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


@dataclass(frozen=True)
class ConjClassLabel:
    """Conjugacy class label.

    ``family`` is ``gl`` (``factors`` = invariant factors), ``sym``
    (``cycle_type``, a descending partition) or ``sp`` (``sp_index`` into the
    sorted class list of Sp_{2 degree}).  ``degree`` is the size of the
    subobject: dimension for gl, cardinality for sym, half-dimension for sp.
    """

    family: str
    degree: int
    factors: tuple[PolyFq, ...] = ()
    cycle_type: tuple[int, ...] = ()
    sp_index: int = 0

    def sort_key(self) -> tuple:
        if self.family == "gl":
            return (self.degree, tuple(f.sort_key() for f in self.factors))
        if self.family == "sym":
            return (self.degree, self.cycle_type)
        return (self.degree, self.sp_index)

    def __lt__(self, other: "ConjClassLabel") -> bool:
        return (self.family, self.sort_key()) < (other.family, other.sort_key())

    def __str__(self):
        if self.family == "gl":
            if self.degree == 1:
                f = self.factors[0]
                lam = -f.field.element(f.coeffs[0])
                return f"eig:{lam}"
            return "invfac:[" + ", ".join(str(f) for f in self.factors) + "]"
        if self.family == "sym":
            return "cycletype:[" + ",".join(str(a) for a in self.cycle_type) + "]"
        if self.degree == 1:
            return f"sp:{self.sp_index}"
        return f"sp{2 * self.degree}:{self.sp_index}"


def unit_label(family: str) -> ConjClassLabel:
    """The degree-0 label whose statistic is the constant function 1."""
    return ConjClassLabel(family, 0)


def smith_diagonal(m: list[list[PolyFq]]) -> list[PolyFq]:
    """Monic diagonal of the Smith normal form of a square polynomial matrix."""
    m = [list(r) for r in m]
    n = len(m)
    diag = []
    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    e = m[i][j]
                    if not e.is_zero() and (best is None or e.degree < m[best[0]][best[1]].degree):
                        best = (i, j)
            if best is None:
                diag.extend([PolyFq(m[0][0].field, ())] * (n - t))
                return diag
            i, j = best
            m[t], m[i] = m[i], m[t]
            for r in m:
                r[t], r[j] = r[j], r[t]
            piv = m[t][t]
            clean = True
            for i in range(t + 1, n):
                if not m[i][t].is_zero():
                    qt, rem = divmod(m[i][t], piv)
                    m[i] = [a - qt * b for a, b in zip(m[i], m[t])]
                    clean &= rem.is_zero()
            for j in range(t + 1, n):
                if not m[t][j].is_zero():
                    qt, rem = divmod(m[t][j], piv)
                    for r in m:
                        r[j] = r[j] - qt * r[t]
                    clean &= rem.is_zero()
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if not piv.divides(m[i][j])),
                None,
            )
            if bad is None:
                break
            m[t] = [a + b for a, b in zip(m[t], m[bad])]
        diag.append(m[t][t].monic())
    return diag


def _char_matrix(a: np.ndarray, field: FieldSpec) -> list[list[PolyFq]]:
    d = a.shape[0]
    neg = field.neg
    return [
        [PolyFq(field, (int(neg[a[i, j]]), 1 if i == j else 0)) for j in range(d)]
        for i in range(d)
    ]


def _invariant_factors_array(a: np.ndarray, field: FieldSpec) -> tuple[PolyFq, ...]:
    diag = smith_diagonal(_char_matrix(a, field))
    return tuple(f for f in diag if f.degree >= 1)


def invariant_factors(a: MatrixFq) -> ConjClassLabel:
    """Similarity label of an invertible matrix: the invariant factors of ``xI - a``."""
    if a.rows != a.cols:
        raise ValueError("invariant factors need a square matrix")
    if not a.is_invertible():
        raise LabelError("matrix is singular; labels exist only for GL_d")
    return ConjClassLabel("gl", a.rows, _invariant_factors_array(a.data, a.field))


class ClassInfo(NamedTuple):
    label: ConjClassLabel
    representative: MatrixFq
    size: int


@functools.lru_cache(maxsize=None)
def _gl_class_data(d: int, field: FieldSpec):
    elements = gl_elements(d, field, cap=np.inf)
    if d == 0:
        label = unit_label("gl")
        return [ClassInfo(label, MatrixFq(field, elements[0]), 1)], np.zeros(1, dtype=np.int64)
    buckets: dict[ConjClassLabel, list] = {}
    per_element = []
    for idx, a in enumerate(elements):
        label = ConjClassLabel("gl", d, _invariant_factors_array(a, field))
        entry = buckets.setdefault(label, [idx, 0])
        entry[1] += 1
        per_element.append(label)
    labels = sorted(buckets, key=ConjClassLabel.sort_key)
    order = {lab: k for k, lab in enumerate(labels)}
    infos = [ClassInfo(lab, MatrixFq(field, elements[buckets[lab][0]]), buckets[lab][1]) for lab in labels]
    element_class = np.array([order[lab] for lab in per_element], dtype=np.int64)
    element_class.setflags(write=False)
    return infos, element_class


def enumerate_classes(d: int, field: FieldSpec, cap: int | None = None) -> list[ClassInfo]:
    """Conjugacy classes of GL_d(F_q), sorted by label, by bucketing every element."""
    check_cap(f"GL_{d}(F_{field.q})", gl_order(d, field.q), cap)
    return list(_gl_class_data(d, field)[0])


def element_classes(d: int, field: FieldSpec, cap: int | None = None) -> np.ndarray:
    """Class index of each element of ``gl_elements(d, field)``."""
    check_cap(f"GL_{d}(F_{field.q})", gl_order(d, field.q), cap)
    return _gl_class_data(d, field)[1]


def class_index(label: ConjClassLabel, field: FieldSpec, cap: int | None = None) -> int:
    if label.family != "gl":
        raise LabelError(f"{label} is not a GL label")
    for k, info in enumerate(enumerate_classes(label.degree, field, cap)):
        if info.label == label:
            return k
    raise LabelError(f"no element of GL_{label.degree}(F_{field.q}) has label {label}")


def class_size(label: ConjClassLabel, field: FieldSpec, cap: int | None = None) -> int:
    return enumerate_classes(label.degree, field, cap)[class_index(label, field, cap)].size


@functools.lru_cache(maxsize=None)
def code_to_class_table(d: int, field: FieldSpec) -> np.ndarray:
    """Lookup from matrix code to class index (-1 for singular codes)."""
    elements = gl_elements(d, field, cap=np.inf)
    table = np.full(field.q ** (d * d), -1, dtype=np.int64)
    table[encode_matrices(elements, field.q)] = element_classes(d, field, cap=np.inf)
    table.setflags(write=False)
    return table


def companion_matrix(f: PolyFq) -> MatrixFq:
    """Companion matrix of a monic polynomial (ones on the subdiagonal)."""
    f = f.monic()
    d = f.degree
    field = f.field
    data = np.zeros((d, d), dtype=np.int8)
    for i in range(1, d):
        data[i, i - 1] = 1
    for i in range(d):
        data[i, d - 1] = field.neg[f.coeffs[i]]
    return MatrixFq(field, data)


# ---------------------------------------------------------------------------
# class-spec grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([xg])|([-+*^(),\[\]]))")


class _Parser:
    def __init__(self, text: str, field: FieldSpec, offset: int = 0):
        self.text = text
        self.field = field
        self.tokens = []
        pos = offset
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ClassSpecError("unexpected character", text, pos + 1)
            start = m.start(m.lastindex)
            self.tokens.append((m.group(m.lastindex), start + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def column(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text) + 1

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = f"{expected!r}" if expected else "a token"
            raise ClassSpecError(f"expected {want}", self.text, self.column())
        self.i += 1
        return tok

    def done(self):
        if self.peek() is not None:
            raise ClassSpecError("trailing input", self.text, self.column())

    def integer(self) -> int:
        col = self.column()
        tok = self.take()
        if not tok.isdigit():
            raise ClassSpecError("expected an integer", self.text, col)
        return int(tok)

    def expr(self) -> PolyFq:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        total = self.term()
        if sign < 0:
            total = -total
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            total = total + t if op == "+" else total - t
        return total

    def term(self) -> PolyFq:
        value = self.power()
        while self.peek() is not None and (self.peek() == "*" or self.peek() == "(" or self.peek() in "xg" or self.peek().isdigit()):
            if self.peek() == "*":
                self.take()
            value = value * self.power()
        return value

    def power(self) -> PolyFq:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            base = base ** self.integer()
        return base

    def atom(self) -> PolyFq:
        col = self.column()
        tok = self.peek()
        if tok is None:
            raise ClassSpecError("unexpected end of input", self.text, col)
        if tok.isdigit():
            self.take()
            return PolyFq.constant(self.field, int(tok))
        if tok == "x":
            self.take()
            return PolyFq.x(self.field)
        if tok == "g":
            if self.field.k == 1:
                raise ClassSpecError(f"'g' is not defined over the prime field F_{self.field.q}", self.text, col)
            self.take()
            return PolyFq(self.field, (self.field.generator.code,))
        if tok == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        raise ClassSpecError(f"unexpected {tok!r}", self.text, col)


def parse_poly(text: str, field: FieldSpec) -> PolyFq:
    """Parse a polynomial in ``x`` such as ``x^2+2*x+1`` (``g`` denotes the field generator)."""
    p = _Parser(text, field)
    value = p.expr()
    p.done()
    return value


_PREFIX = re.compile(r"\s*(eig|invfac|cycletype|sp(?:\d+)?)\s*:")


def parse_class_spec(text: str, field: FieldSpec | None = None) -> ConjClassLabel:
    """Parse ``eig:<elt>``, ``invfac:[<poly>, ...]``, ``cycletype:[a,b,...]`` or ``sp:<index>``.

    ``spN:<index>`` addresses a class of Sp_N (N even); plain ``sp:`` means Sp_2.
    """
    m = _PREFIX.match(text)
    if not m:
        raise ClassSpecError("expected one of eig:, invfac:, cycletype:, sp:", text, 1)
    kind = m.group(1)
    offset = m.end()
    if kind in ("eig", "invfac") and field is None:
        raise ClassSpecError(f"{kind}: needs a field (--q)", text, 1)

    if kind == "eig":
        body = text[offset:]
        try:
            lam = parse_element(body, field)
        except ValueError:
            p = _Parser(text, field, offset)
            value = p.expr()
            p.done()
            if value.degree > 0:
                raise ClassSpecError("eigenvalue must be a field element", text, offset + 1)
            lam = field.element(value.coeffs[0] if value.coeffs else 0)
        if not lam:
            raise ClassSpecError("eigenvalue must be non-zero", text, offset + 1)
        return ConjClassLabel("gl", 1, (PolyFq(field, (int(field.neg[lam.code]), 1)),))

    p = _Parser(text, field, offset) if field is not None else _Parser(text, _DUMMY, offset)
    if kind == "invfac":
        p.take("[")
        polys, cols = [], []
        while True:
            cols.append(p.column())
            polys.append(p.expr())
            if p.peek() == ",":
                p.take()
                continue
            p.take("]")
            break
        p.done()
        for f, col in zip(polys, cols):
            if f.is_zero() or f.degree < 1:
                raise ClassSpecError("invariant factors must have degree >= 1", text, col)
            if f.lead != 1:
                raise ClassSpecError("invariant factors must be monic", text, col)
        for (f, g), col in zip(zip(polys, polys[1:]), cols[1:]):
            if not f.divides(g):
                raise ClassSpecError(f"divisibility chain broken: {f} does not divide {g}", text, col)
        if polys[-1].coeffs[0] == 0:
            raise ClassSpecError("last invariant factor vanishes at 0 (singular class)", text, cols[-1])
        return ConjClassLabel("gl", sum(f.degree for f in polys), tuple(polys))

    if kind == "cycletype":
        p.take("[")
        parts = []
        if p.peek() != "]":
            while True:
                col = p.column()
                a = p.integer()
                if a < 1:
                    raise ClassSpecError("cycle lengths must be positive", text, col)
                parts.append(a)
                if p.peek() == ",":
                    p.take()
                    continue
                break
        p.take("]")
        p.done()
        return ConjClassLabel("sym", sum(parts), cycle_type=tuple(sorted(parts, reverse=True)))

    dim = 2 if kind == "sp" else int(kind[2:])
    if dim < 2 or dim % 2:
        raise ClassSpecError("symplectic dimension must be a positive even number", text, 1)
    index = p.integer()
    p.done()
    return ConjClassLabel("sp", dim // 2, sp_index=index)


_DUMMY = FieldSpec(2, 1, (0, 1))
