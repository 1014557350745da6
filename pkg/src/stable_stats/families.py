"""Sequences of groups G_n acting on c-shaped subobjects.

Three instances share one interface:

* ``gl``  -- GL_n(F_q) acting on c-dimensional subspaces of F_q^n,
* ``sym`` -- S_n acting on c-element subsets of {0, ..., n-1},
* ``sp``  -- Sp_2n(F_q) acting on 2c-dimensional symplectic subspaces.

Sizes for ``sp`` are half-dimensions throughout: ``group_elements(2)`` is
Sp_4 and ``subobjects(1, 2)`` are the symplectic planes of F_q^4.

Each family offers a slow per-object route (``subobjects`` + ``restrict``)
and a batched route (``class_counts``) that the statistics use; the two are
cross-checked in the test-suite.
"""

from __future__ import annotations

import abc
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .conjugacy import (
    ClassInfo,
    ConjClassLabel,
    LabelError,
    code_to_class_table,
    element_classes,
    enumerate_classes,
    invariant_factors,
    unit_label,
)
from .field import FieldSpec
from .linalg import (
    MatrixFq,
    Subspace,
    check_cap,
    decode_matrices,
    encode_matrices,
    enumerate_grassmannian,
    gl_elements,
    gl_order,
    grassmannian_arrays,
    random_gl_batch,
    restrict as gl_restrict,
)

__all__ = [
    "AmbientFamily",
    "GLFamily",
    "SymFamily",
    "SpFamily",
    "SymplecticSubspace",
    "gl_family",
    "sym_family",
    "sp_family",
    "make_family",
    "transitivity_check",
    "symplectic_form",
    "sp_order",
]

# lookup tables above this many entries switch to the unique-code route
_TABLE_LIMIT = 1 << 22


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class AmbientFamily(abc.ABC):
    name: str
    field: FieldSpec | None = None

    @abc.abstractmethod
    def group_order(self, n: int) -> int: ...

    @abc.abstractmethod
    def group_elements(self, n: int, cap: int | None = None) -> np.ndarray:
        """Every element of G_n, stacked into one array."""

    @abc.abstractmethod
    def wrap(self, arr: np.ndarray):
        """Array row from ``group_elements`` -> user-facing element."""

    @abc.abstractmethod
    def unwrap(self, g) -> np.ndarray: ...

    @abc.abstractmethod
    def subobjects(self, c: int, n: int) -> list: ...

    @abc.abstractmethod
    def restrict(self, g, s) -> ConjClassLabel | None:
        """Label of g restricted to s, or None when g does not fix s."""

    @abc.abstractmethod
    def class_list(self, c: int, cap: int | None = None) -> list[ClassInfo]: ...

    @abc.abstractmethod
    def class_counts(self, elements: np.ndarray, n: int, c: int) -> np.ndarray:
        """``(N, K)`` counts of fixed c-subobjects per element and per class of G_c."""

    @abc.abstractmethod
    def sample_array(self, n: int, rng: np.random.Generator) -> np.ndarray: ...

    @abc.abstractmethod
    def monomorphisms(self, c: int, n: int) -> np.ndarray:
        """All structure-preserving embeddings c -> n as a stacked array."""

    @abc.abstractmethod
    def compose(self, elements: np.ndarray, mono: np.ndarray) -> np.ndarray:
        """``g o f`` for every g in ``elements`` and one embedding f."""

    def sample_batch(self, n: int, rngs: Sequence[np.random.Generator]) -> np.ndarray:
        """One ``sample_array`` draw per generator, stacked."""
        return np.stack([self.sample_array(n, rng) for rng in rngs])

    def iter_elements(self, n: int, cap: int | None = None) -> Iterator:
        for row in self.group_elements(n, cap):
            yield self.wrap(row)

    def sample_element(self, n: int, seed=None):
        return self.wrap(self.sample_array(n, _rng(seed)))

    def class_index(self, label: ConjClassLabel, cap: int | None = None) -> int:
        if label.family != self.name:
            raise LabelError(f"label {label} does not belong to the {self.name} family")
        for k, info in enumerate(self.class_list(label.degree, cap)):
            if info.label == label:
                return k
        raise LabelError(f"no class of degree {label.degree} has label {label}")

    def unit(self) -> ConjClassLabel:
        return unit_label(self.name)

    def __repr__(self):
        return f"{type(self).__name__}({self.field or ''})"


# ---------------------------------------------------------------------------
# GL


class GLFamily(AmbientFamily):
    name = "gl"

    def __init__(self, field: FieldSpec):
        self.field = field

    def __eq__(self, other):
        return isinstance(other, GLFamily) and other.field == self.field

    def __hash__(self):
        return hash(("gl", self.field))

    def group_order(self, n: int) -> int:
        return gl_order(n, self.field.q)

    def group_elements(self, n: int, cap: int | None = None) -> np.ndarray:
        return gl_elements(n, self.field, cap)

    def wrap(self, arr):
        return MatrixFq(self.field, arr)

    def unwrap(self, g) -> np.ndarray:
        return g.data

    def subobjects(self, c: int, n: int) -> list[Subspace]:
        return list(enumerate_grassmannian(n, c, self.field))

    def restrict(self, g: MatrixFq, s: Subspace) -> ConjClassLabel | None:
        s_mat = gl_restrict(g, s)
        if s_mat is None:
            return None
        if s.dim == 0:
            return self.unit()
        return invariant_factors(s_mat)

    def class_list(self, c: int, cap: int | None = None) -> list[ClassInfo]:
        return enumerate_classes(c, self.field, cap)

    def class_counts(self, elements: np.ndarray, n: int, c: int) -> np.ndarray:
        n_el = len(elements)
        if c > n:
            return np.zeros((n_el, len(self.class_list(c))), dtype=np.int64)
        if c == 0:
            return np.ones((n_el, 1), dtype=np.int64)
        bases, pivots = grassmannian_arrays(n, c, self.field)
        n_classes = len(self.class_list(c))
        if self.field.q ** (c * c) <= _TABLE_LIMIT:
            table = code_to_class_table(c, self.field)
            return kernels.class_counts(elements, bases, pivots, table, n_classes, self.field)
        group_codes = encode_matrices(gl_elements(c, self.field, cap=np.inf), self.field.q)
        element_class = element_classes(c, self.field, cap=np.inf)
        counts = np.zeros((n_el, n_classes), dtype=np.int64)
        rows = np.arange(n_el)
        for b, p in zip(bases, pivots):
            codes = kernels.restrict_codes(elements, b, p, self.field)
            hit = codes >= 0
            cls = element_class[np.searchsorted(group_codes, codes[hit])]
            np.add.at(counts, (rows[hit], cls), 1)
        return counts

    def sample_array(self, n: int, rng) -> np.ndarray:
        return random_gl_batch(n, self.field, [rng])[0]

    def sample_batch(self, n: int, rngs) -> np.ndarray:
        return random_gl_batch(n, self.field, rngs)

    def monomorphisms(self, c: int, n: int) -> np.ndarray:
        q = self.field.q
        cand = decode_matrices(np.arange(q ** (n * c), dtype=np.int64), n, c, q)
        if c == 0:
            return cand
        return cand[kernels.batch_rank(cand, self.field) == c]

    def compose(self, elements, mono):
        if mono.size == 0:
            return np.zeros((len(elements),) + mono.shape, dtype=np.int8)
        return kernels.batch_matmul(elements, mono, self.field)


# ---------------------------------------------------------------------------
# symmetric groups


def cycle_type(perm: Sequence[int]) -> tuple[int, ...]:
    """Cycle type of a one-line permutation word, as a descending partition."""
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = int(perm[i])
            length += 1
        parts.append(length)
    return tuple(sorted(parts, reverse=True))


@functools.lru_cache(maxsize=None)
def _perm_array(n: int) -> np.ndarray:
    arr = np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(math.factorial(n), n)
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=None)
def _sym_class_data(c: int):
    perms = _perm_array(c)
    types = [cycle_type(p) for p in perms]
    labels = sorted(set(types))
    index = {t: k for k, t in enumerate(labels)}
    infos = []
    for t in labels:
        first = types.index(t)
        infos.append(ClassInfo(ConjClassLabel("sym", c, cycle_type=t), tuple(int(x) for x in perms[first]), types.count(t)))
    codes = np.zeros(len(perms), dtype=np.int64)
    for j in range(c):
        codes = codes * max(c, 1) + perms[:, j]
    table = np.full(max(c, 1) ** c, -1, dtype=np.int64)
    table[codes] = [index[t] for t in types]
    return infos, table


class SymFamily(AmbientFamily):
    name = "sym"

    def __eq__(self, other):
        return isinstance(other, SymFamily)

    def __hash__(self):
        return hash("sym")

    def group_order(self, n: int) -> int:
        return math.factorial(n)

    def group_elements(self, n: int, cap: int | None = None) -> np.ndarray:
        check_cap(f"S_{n}", math.factorial(n), cap)
        return _perm_array(n)

    def wrap(self, arr):
        return tuple(int(x) for x in arr)

    def unwrap(self, g) -> np.ndarray:
        return np.asarray(g, dtype=np.int8)

    def subobjects(self, c: int, n: int) -> list[tuple[int, ...]]:
        return list(itertools.combinations(range(n), c))

    def restrict(self, g: Sequence[int], s: Sequence[int]) -> ConjClassLabel | None:
        images = [int(g[w]) for w in s]
        if set(images) != set(s):
            return None
        pos = {w: i for i, w in enumerate(s)}
        return ConjClassLabel("sym", len(s), cycle_type=cycle_type([pos[x] for x in images]))

    def class_list(self, c: int, cap: int | None = None) -> list[ClassInfo]:
        check_cap(f"S_{c}", math.factorial(c), cap)
        return list(_sym_class_data(c)[0])

    def class_counts(self, elements: np.ndarray, n: int, c: int) -> np.ndarray:
        infos, table = _sym_class_data(c)
        n_el = len(elements)
        counts = np.zeros((n_el, len(infos)), dtype=np.int64)
        if c > n:
            return counts
        if c == 0:
            counts[:, 0] = 1
            return counts
        rows = np.arange(n_el)
        elements = np.asarray(elements, dtype=np.int64)
        for subset in itertools.combinations(range(n), c):
            pos = np.full(n, -1, dtype=np.int64)
            pos[list(subset)] = np.arange(c)
            rel = pos[elements[:, list(subset)]]
            hit = np.all(rel >= 0, axis=1)
            code = np.zeros(int(hit.sum()), dtype=np.int64)
            for j in range(c):
                code = code * c + rel[hit, j]
            np.add.at(counts, (rows[hit], table[code]), 1)
        return counts

    def sample_array(self, n: int, rng) -> np.ndarray:
        return rng.permutation(n).astype(np.int8)

    def monomorphisms(self, c: int, n: int) -> np.ndarray:
        words = list(itertools.permutations(range(n), c))
        return np.array(words, dtype=np.int8).reshape(len(words), c)

    def compose(self, elements, mono):
        return np.asarray(elements)[:, np.asarray(mono, dtype=np.int64)]

    def __repr__(self):
        return "SymFamily()"


# ---------------------------------------------------------------------------
# symplectic groups


def symplectic_form(n: int) -> np.ndarray:
    """The Gram matrix [[0, I], [-I, 0]] on F^{2n} with integer entries 0, 1, -1.

    :meth:`SpFamily.gram` converts it to field codes.
    """
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    j[:n, n:] = np.eye(n, dtype=np.int64)
    j[n:, :n] = -np.eye(n, dtype=np.int64)
    return j


def sp_order(n: int, q: int) -> int:
    order = q ** (n * n)
    for i in range(1, n + 1):
        order *= q ** (2 * i) - 1
    return order


@dataclass(frozen=True, eq=False)
class SymplecticSubspace:
    """A nondegenerate subspace together with a symplectic basis of it.

    ``frame`` holds basis rows e_1..e_c, f_1..f_c with pairing matrix
    [[0, I], [-I, 0]]; ``change`` is the matrix M with ``frame = M @ basis``.
    """

    subspace: Subspace
    frame: np.ndarray
    change: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        return self.subspace.basis

    @property
    def pivots(self) -> tuple[int, ...]:
        return self.subspace.pivots

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def ambient_dim(self) -> int:
        return self.subspace.ambient_dim

    def __eq__(self, other):
        if isinstance(other, SymplecticSubspace):
            other = other.subspace
        return self.subspace == other

    def __hash__(self):
        return hash(self.subspace)

    def __str__(self):
        return str(self.subspace)


class SpFamily(AmbientFamily):
    name = "sp"

    def __init__(self, field: FieldSpec):
        self.field = field

    def __eq__(self, other):
        return isinstance(other, SpFamily) and other.field == self.field

    def __hash__(self):
        return hash(("sp", self.field))

    def gram(self, n: int) -> np.ndarray:
        return np.where(symplectic_form(n) < 0, self.field.neg[1], symplectic_form(n)).astype(np.int8)

    def pair(self, u: np.ndarray, v: np.ndarray, n: int) -> int:
        """J(u, v) = u^T J v for two vectors of F^{2n}."""
        uj = kernels.batch_matmul(np.asarray(u, dtype=np.int8)[None, None, :], self.gram(n), self.field)
        return int(kernels.batch_matmul(uj, np.asarray(v, dtype=np.int8)[:, None], self.field)[0, 0, 0])

    def group_order(self, n: int) -> int:
        return sp_order(n, self.field.q)

    def group_elements(self, n: int, cap: int | None = None) -> np.ndarray:
        check_cap(f"Sp_{2 * n}(F_{self.field.q})", self.group_order(n), cap)
        return _isometries(self, n, n)

    def wrap(self, arr):
        return MatrixFq(self.field, arr)

    def unwrap(self, g) -> np.ndarray:
        return g.data

    def is_symplectic(self, g: MatrixFq) -> bool:
        n = g.rows // 2
        j = MatrixFq(self.field, self.gram(n))
        return g.rows == g.cols == 2 * n and g.T @ j @ g == j

    def subobjects(self, c: int, n: int) -> list[SymplecticSubspace]:
        return list(_symplectic_subspaces(self, c, n))

    def restrict(self, g: MatrixFq, s: SymplecticSubspace) -> ConjClassLabel | None:
        s_b = gl_restrict(g, s.subspace)
        if s_b is None:
            return None
        if s.dim == 0:
            return self.unit()
        c = s.dim // 2
        s_e = self._to_frame(s_b.data, s.change)
        return ConjClassLabel("sp", c, sp_index=int(_sp_class_data(self, c)[1][_code(s_e, self.field.q)]))

    def _to_frame(self, s_b: np.ndarray, change: np.ndarray) -> np.ndarray:
        # frame = M B  =>  T frame^T = frame^T (M^T)^{-1} S_B M^T
        mt = MatrixFq(self.field, change.T)
        return ((mt.inverse() @ MatrixFq(self.field, s_b)) @ mt).data

    def class_list(self, c: int, cap: int | None = None) -> list[ClassInfo]:
        check_cap(f"Sp_{2 * c}(F_{self.field.q})", self.group_order(c), cap)
        return list(_sp_class_data(self, c)[0])

    def class_counts(self, elements: np.ndarray, n: int, c: int) -> np.ndarray:
        n_el = len(elements)
        infos, lookup = _sp_class_data(self, c)
        counts = np.zeros((n_el, len(infos)), dtype=np.int64)
        if c > n:
            return counts
        if c == 0:
            counts[:, 0] = 1
            return counts
        q = self.field.q
        rows = np.arange(n_el)
        for s in self.subobjects(c, n):
            codes = kernels.restrict_codes(elements, s.basis, s.pivots, self.field)
            hit = codes >= 0
            uniq, inverse = np.unique(codes[hit], return_inverse=True)
            mats = decode_matrices(uniq, 2 * c, 2 * c, q)
            cls = np.array([lookup[_code(self._to_frame(m, s.change), q)] for m in mats], dtype=np.int64)
            np.add.at(counts, (rows[hit], cls[inverse]), 1)
        return counts

    def sample_array(self, n: int, rng) -> np.ndarray:
        elements = self.group_elements(n)
        return elements[rng.integers(len(elements))]

    def monomorphisms(self, c: int, n: int) -> np.ndarray:
        return _isometries(self, c, n)

    def compose(self, elements, mono):
        if mono.size == 0:
            return np.zeros((len(elements),) + mono.shape, dtype=np.int8)
        return kernels.batch_matmul(elements, mono, self.field)


def _code(mat: np.ndarray, q: int) -> int:
    return int(encode_matrices(np.asarray(mat)[None], q)[0])


@functools.lru_cache(maxsize=None)
def _all_vectors(dim: int, q: int) -> np.ndarray:
    return decode_matrices(np.arange(q**dim, dtype=np.int64), 1, dim, q)[:, 0, :]


@functools.lru_cache(maxsize=None)
def _isometries(family: SpFamily, c: int, n: int) -> np.ndarray:
    """All 2n x 2c matrices M with M^T J_n M = J_c, sorted by code.

    Columns are chosen one at a time among all vectors of F^{2n}, keeping
    those whose pairings with the columns already chosen match J_c.
    """
    field = family.field
    q = field.q
    vecs = _all_vectors(2 * n, q)
    # pairing[a, b] = J(v_a, v_b)
    vj = kernels.batch_matmul(vecs[None], family.gram(n), field)[0]
    pairing = kernels.batch_matmul(vj[None], np.ascontiguousarray(vecs.T)[None], field)[0].astype(np.int64)
    target = family.gram(c).astype(np.int64)
    chosen = np.zeros((1, 0), dtype=np.int64)
    for k in range(2 * c):
        ok = np.ones((len(chosen), len(vecs)), dtype=bool)
        for i in range(k):
            ok &= pairing[chosen[:, i]] == target[i, k]
        prefix, new = np.nonzero(ok)
        chosen = np.concatenate([chosen[prefix], new[:, None]], axis=1)
    mats = np.ascontiguousarray(np.transpose(vecs[chosen], (0, 2, 1)))
    mats = mats[np.argsort(encode_matrices(mats, q), kind="stable")]
    mats.setflags(write=False)
    return mats


@functools.lru_cache(maxsize=None)
def _sp_class_data(family: SpFamily, c: int):
    """Conjugacy classes of Sp_2c by brute-force orbits.

    Classes are indexed in order of their minimal-code element, which is
    also the representative.
    """
    field = family.field
    q = field.q
    elements = family.group_elements(c, cap=np.inf)
    codes = encode_matrices(elements, q)
    lookup: dict[int, int] = {}
    if c == 0:
        lookup[0] = 0
        return [ClassInfo(unit_label("sp"), MatrixFq(field, elements[0]), 1)], lookup
    inverses = np.array([MatrixFq(field, g).inverse().data for g in elements], dtype=np.int8)
    infos = []
    for idx in range(len(elements)):
        if int(codes[idx]) in lookup:
            continue
        k = len(infos)
        conj = kernels.batch_matmul(kernels.batch_matmul(elements, elements[idx], field), inverses, field)
        orbit = np.unique(encode_matrices(conj, q))
        for code in orbit:
            lookup[int(code)] = k
        infos.append(ClassInfo(ConjClassLabel("sp", c, sp_index=k), MatrixFq(field, elements[idx]), len(orbit)))
    return infos, lookup


def _symplectic_frame(family: SpFamily, basis: np.ndarray, n: int) -> np.ndarray | None:
    """Symplectic basis (e_1..e_c, f_1..f_c) of the row space of ``basis``, or None if degenerate.

    Greedy: take the first remaining vector as e, the first partner with
    non-zero pairing (rescaled to 1) as f, and project the rest off span(e, f).
    """
    field = family.field
    rest = [MatrixFq(field, b[None]) for b in basis]
    es, fs = [], []
    while rest:
        e = rest.pop(0)
        partner = next((i for i, v in enumerate(rest) if family.pair(e.data[0], v.data[0], n)), None)
        if partner is None:
            return None
        f = rest.pop(partner)
        f = f.scale(field.inv[family.pair(e.data[0], f.data[0], n)])
        projected = []
        for v in rest:
            # v - J(v, f) e + J(v, e) f  pairs to zero with both e and f
            a = family.pair(v.data[0], f.data[0], n)
            b = family.pair(v.data[0], e.data[0], n)
            projected.append(v - e.scale(a) + f.scale(b))
        rest = projected
        es.append(e.data[0])
        fs.append(f.data[0])
    return np.array(es + fs, dtype=np.int8).reshape(len(basis), basis.shape[1])


@functools.lru_cache(maxsize=None)
def _symplectic_subspaces(family: SpFamily, c: int, n: int) -> tuple[SymplecticSubspace, ...]:
    field = family.field
    out = []
    for w in enumerate_grassmannian(2 * n, 2 * c, field):
        basis = w.basis
        frame = _symplectic_frame(family, basis, n) if c else basis
        if frame is None:
            continue
        # frame rows lie in the row space of the RREF basis: coordinates are the pivot entries
        change = frame[:, list(w.pivots)] if c else np.zeros((0, 0), dtype=np.int8)
        out.append(SymplecticSubspace(w, frame, change))
    return tuple(out)


# ---------------------------------------------------------------------------


def gl_family(field: FieldSpec) -> GLFamily:
    return GLFamily(field)


def sym_family() -> SymFamily:
    return SymFamily()


def sp_family(field: FieldSpec) -> SpFamily:
    return SpFamily(field)


def make_family(name: str, field: FieldSpec | None = None) -> AmbientFamily:
    if name == "sym":
        return SymFamily()
    if field is None:
        raise ValueError(f"family {name!r} needs a field")
    if name == "gl":
        return GLFamily(field)
    if name == "sp":
        return SpFamily(field)
    raise ValueError(f"unknown family {name!r}; expected gl, sym or sp")


def transitivity_check(family: AmbientFamily, c: int, n: int, cap: int | None = None) -> int:
    """Number of G_n-orbits on the embeddings c -> n (the theorem needs exactly 1)."""
    elements = family.group_elements(n, cap)
    monos = family.monomorphisms(c, n)
    if len(monos) == 0:
        return 0
    flat = monos.reshape(len(monos), -1)
    remaining = {row.tobytes() for row in flat}
    orbits = 0
    for row, mono in zip(flat, monos):
        key = row.tobytes()
        if key not in remaining:
            continue
        orbits += 1
        images = family.compose(elements, mono).reshape(len(elements), -1).astype(np.int8)
        for img in np.unique(images, axis=0):
            remaining.discard(img.tobytes())
    return orbits
