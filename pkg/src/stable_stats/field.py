"""Finite fields F_q, q = p^k, for small q.

Elements are stored as integer codes ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
where ``c_i`` is the coefficient of ``g^i`` in the polynomial representation
over the fixed generator ``g``.  All arithmetic goes through precomputed
``q x q`` tables, which is also what the numeric kernels consume.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FieldError",
    "FieldSpec",
    "FieldElement",
    "field_make",
    "field_inv",
    "field_enumerate",
    "parse_element",
    "DEFAULT_MODULI",
]

# ascending coefficients, monic
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (1, 0, 1),
}


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod_zp(a: list[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a by monic b over Z/p, ascending coefficients."""
    a = [x % p for x in a]
    db = len(b) - 1
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        c = a[-1]
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    k = len(modulus) - 1
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            divisor = list(low) + [1]
            if not _poly_mod_zp(list(modulus), divisor, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field F_p[g]/(modulus) with q = p**k elements."""

    p: int
    k: int
    modulus: tuple[int, ...]
    add: np.ndarray = dc_field(init=False, repr=False, compare=False, hash=False)
    mul: np.ndarray = dc_field(init=False, repr=False, compare=False, hash=False)
    neg: np.ndarray = dc_field(init=False, repr=False, compare=False, hash=False)
    inv: np.ndarray = dc_field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        q = self.q
        digits = np.array(
            [[(c // self.p**i) % self.p for i in range(self.k)] for c in range(q)],
            dtype=np.int64,
        )
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        add = ((digits[:, None, :] + digits[None, :, :]) % self.p) @ weights
        neg = ((-digits) % self.p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                prod = np.convolve(digits[a], digits[b]).tolist()
                rem = _poly_mod_zp(prod, self.modulus, self.p) if self.k > 1 else [prod[0] % self.p]
                rem = rem + [0] * (self.k - len(rem))
                mul[a, b] = mul[b, a] = int(np.dot(rem, weights))
        inv = np.full(q, -1, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        for name, table in (("add", add), ("mul", mul), ("neg", neg), ("inv", inv)):
            table = np.ascontiguousarray(table, dtype=np.int64)
            table.setflags(write=False)
            object.__setattr__(self, name, table)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def is_prime(self) -> bool:
        return self.k == 1

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, str):
            return parse_element(value, self)
        if isinstance(value, (int, np.integer)):
            # integers embed through the prime subfield
            return FieldElement(self, int(value) % self.p)
        raise TypeError(f"cannot coerce {value!r} into {self}")

    def element(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} out of range for F_{self.q}")
        return FieldElement(self, int(code))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def generator(self) -> "FieldElement":
        """The polynomial generator g; only defined for extension fields."""
        if self.k == 1:
            raise FieldError(f"{self} has no polynomial generator")
        return FieldElement(self, self.p)

    def format_code(self, code: int) -> str:
        if self.k == 1:
            return str(int(code))
        terms = []
        for i in reversed(range(self.k)):
            c = (int(code) // self.p**i) % self.p
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "g" if i == 1 else f"g^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    def __str__(self) -> str:
        return f"F_{self.q}"


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    code: int

    @property
    def coefficients(self) -> tuple[int, ...]:
        p = self.field.p
        return tuple((self.code // p**i) % p for i in range(self.field.k))

    def _coerce(self, other) -> "FieldElement":
        return self.field(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.add[self.code, o.code]))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.code]))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.mul[self.code, o.code]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * field_inv(self._coerce(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * field_inv(self)

    def __pow__(self, e: int):
        if e < 0:
            return field_inv(self) ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __index__(self):
        return self.code

    def __str__(self):
        return self.field.format_code(self.code)

    def __repr__(self):
        return f"FieldElement({self}, {self.field})"


def field_make(p: int, k: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Build F_{p^k}.

    ``modulus`` is the ascending coefficient list of a monic irreducible of
    degree k; built-in defaults exist for F_4, F_8 and F_9.
    """
    if not _is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if not 1 <= k <= 4:
        raise FieldError(f"extension degree {k} outside 1..4")
    if k == 1:
        return FieldSpec(p, 1, (0, 1))
    if modulus is None:
        if (p, k) not in DEFAULT_MODULI:
            raise FieldError(f"no built-in modulus for F_{p**k}; supply one")
        modulus = DEFAULT_MODULI[(p, k)]
    modulus = tuple(int(c) % p for c in modulus)
    if len(modulus) != k + 1 or modulus[-1] != 1:
        raise FieldError(f"modulus must be monic of degree {k}")
    if not _is_irreducible(modulus, p):
        raise FieldError(f"modulus {modulus} is reducible over F_{p}")
    return FieldSpec(p, k, modulus)


def field_inv(a: FieldElement) -> FieldElement:
    if a.code == 0:
        raise ZeroDivisionError("zero has no inverse in a field")
    return FieldElement(a.field, int(a.field.inv[a.code]))


def field_enumerate(spec: FieldSpec) -> list[FieldElement]:
    """All q elements in code order, zero first."""
    return [FieldElement(spec, c) for c in range(spec.q)]


def iter_nonzero(spec: FieldSpec) -> Iterator[FieldElement]:
    return (FieldElement(spec, c) for c in range(1, spec.q))


_ELEMENT_TERM = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?(g(?:\s*\^\s*(\d+))?)?\s*$")


def parse_element(text: str, spec: FieldSpec) -> FieldElement:
    """Parse ``3`` or (extension fields) a polynomial in ``g`` such as ``g+1``."""
    text = text.strip()
    if not text:
        raise FieldError("empty field element")
    if re.fullmatch(r"-?\d+", text):
        return spec(int(text))
    if spec.k == 1:
        raise FieldError(f"{text!r} is not an element of {spec}")
    total = spec.zero
    for part in text.replace("-", "+-").split("+"):
        part = part.strip()
        if not part:
            continue
        sign = 1
        if part.startswith("-"):
            sign, part = -1, part[1:]
        m = _ELEMENT_TERM.match(part)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise FieldError(f"cannot parse field element {text!r}")
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        power = 0
        if m.group(2):
            power = int(m.group(3)) if m.group(3) else 1
        total = total + spec(sign * coeff) * spec.generator**power
    return total
