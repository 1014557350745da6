"""Dense linear algebra over F_q, canonical subspaces and group enumeration.

Conventions
-----------
Matrices act on column vectors.  A subspace W is stored by the RREF matrix B
whose rows span it, so ``B.T`` is an injection ``F^d -> F^n`` and a
transformation T fixes W exactly when ``T @ B.T == B.T @ S`` for some S; that
S is the restriction of T to W in the basis given by the rows of B.

Matrix codes read the entries row-major with the first entry most
significant, so sorting by code is lexicographic order on entries.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .field import FieldElement, FieldSpec

__all__ = [
    "ExactRational",
    "DEFAULT_CAP",
    "EnumerationCapError",
    "MatrixFq",
    "Subspace",
    "rref",
    "gl_order",
    "gaussian_binomial",
    "enumerate_grassmannian",
    "grassmannian_arrays",
    "enumerate_gl",
    "gl_elements",
    "iter_gl_batches",
    "restrict",
    "random_gl",
    "random_gl_batch",
    "encode_matrices",
    "decode_matrices",
]

ExactRational = Fraction

DEFAULT_CAP = 10**7

_BATCH = 1 << 16


class EnumerationCapError(RuntimeError):
    """Exact enumeration refused because the group is larger than the cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} has {size} elements, above the enumeration cap of {cap} (raise it with --cap)")
        self.size = size
        self.cap = cap


def check_cap(what: str, size: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if size > cap:
        raise EnumerationCapError(what, size, cap)


def _to_code(field: FieldSpec, x) -> int:
    return field(x).code


class MatrixFq:
    """Immutable dense matrix of field codes."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = np.array(data, dtype=np.int8, copy=True)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise ValueError("matrix data must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError(f"entries must be codes in [0, {field.q})")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixFq is immutable")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence]) -> "MatrixFq":
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(field, np.array([[_to_code(field, x) for x in r] for r in rows], dtype=np.int8).reshape(len(rows), width))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "MatrixFq":
        return cls(field, np.eye(n, dtype=np.int8))

    @classmethod
    def diag(cls, field: FieldSpec, entries: Sequence) -> "MatrixFq":
        n = len(entries)
        data = np.zeros((n, n), dtype=np.int8)
        for i, x in enumerate(entries):
            data[i, i] = _to_code(field, x)
        return cls(field, data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx) -> FieldElement:
        i, j = idx
        return self.field.element(int(self.data[i, j]))

    def _check(self, other: "MatrixFq"):
        if not isinstance(other, MatrixFq):
            return NotImplemented
        if other.field != self.field:
            raise ValueError("matrices over different fields")
        return None

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return MatrixFq(self.field, np.zeros((self.rows, other.cols), dtype=np.int8))
        return MatrixFq(self.field, kernels.batch_matmul(self.data, other.data, self.field)[0])

    def __add__(self, other: "MatrixFq") -> "MatrixFq":
        if self._check(other) is NotImplemented:
            return NotImplemented
        return MatrixFq(self.field, self.field.add[self.data, other.data])

    def __neg__(self) -> "MatrixFq":
        return MatrixFq(self.field, self.field.neg[self.data])

    def __sub__(self, other: "MatrixFq") -> "MatrixFq":
        return self + (-other)

    def scale(self, c) -> "MatrixFq":
        return MatrixFq(self.field, self.field.mul[_to_code(self.field, c), self.data])

    @property
    def T(self) -> "MatrixFq":
        return MatrixFq(self.field, self.data.T)

    def rank(self) -> int:
        return rref(self)[1]

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "MatrixFq":
        n = self.rows
        if self.rows != self.cols:
            raise ValueError("only square matrices are invertible")
        aug = np.concatenate([self.data, np.eye(n, dtype=np.int8)], axis=1)
        red, rank = kernels.batch_rref(aug[None], self.field)
        if int(rank[0]) < n or not np.array_equal(red[0][:, :n], np.eye(n, dtype=np.int8)):
            raise ZeroDivisionError("matrix is singular")
        return MatrixFq(self.field, red[0][:, n:])

    def __pow__(self, e: int) -> "MatrixFq":
        if e < 0:
            return self.inverse() ** (-e)
        result = MatrixFq.identity(self.field, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def code(self) -> int:
        return int(encode_matrices(self.data[None], self.field.q)[0]) if self.data.size else 0

    def tolist(self) -> list[list[int]]:
        return self.data.astype(int).tolist()

    def __eq__(self, other):
        if not isinstance(other, MatrixFq):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __str__(self):
        fmt = self.field.format_code
        return "[" + ", ".join("[" + ", ".join(fmt(x) for x in row) + "]" for row in self.data) + "]"

    def __repr__(self):
        return f"MatrixFq({self}, {self.field})"


def encode_matrices(mats: np.ndarray, q: int) -> np.ndarray:
    """Integer code of each matrix in a batch (first entry most significant)."""
    flat = np.asarray(mats).reshape(len(mats), -1).astype(np.int64)
    code = np.zeros(len(flat), dtype=np.int64)
    for j in range(flat.shape[1]):
        code = code * q + flat[:, j]
    return code


def decode_matrices(codes: np.ndarray, rows: int, cols: int, q: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    m = rows * cols
    powers = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] // powers[None, :]) % q).astype(np.int8).reshape(len(codes), rows, cols)


def rref(m: MatrixFq) -> tuple[MatrixFq, int]:
    """Reduced row-echelon form and rank."""
    if m.rows == 0 or m.cols == 0:
        return m, 0
    red, rank = kernels.batch_rref(m.data[None], m.field)
    return MatrixFq(m.field, red[0]), int(rank[0])


def gl_order(n: int, q: int) -> int:
    if n < 0:
        raise ValueError("negative dimension")
    order = 1
    for i in range(n):
        order *= q**n - q**i
    return order


def gaussian_binomial(n: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of F_q^n (0 when d is out of range)."""
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^n, stored as the rows of its RREF basis (field codes)."""

    field: FieldSpec
    ambient_dim: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, field: FieldSpec, vectors: Iterable[Sequence], ambient_dim: int | None = None) -> "Subspace":
        vecs = [[_to_code(field, x) for x in v] for v in vectors]
        if ambient_dim is None:
            if not vecs:
                raise ValueError("ambient dimension needed for the zero subspace")
            ambient_dim = len(vecs[0])
        if not vecs:
            return cls(field, ambient_dim, ())
        red, rank = rref(MatrixFq(field, np.array(vecs, dtype=np.int8).reshape(len(vecs), ambient_dim)))
        return cls(field, ambient_dim, tuple(tuple(int(x) for x in r) for r in red.data[:rank]))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int8).reshape(self.dim, self.ambient_dim)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    def sort_key(self) -> tuple:
        """Total order used by :func:`enumerate_grassmannian`: pivots, then entries."""
        return (self.pivots, tuple(x for r in self.rows for x in r))

    def __lt__(self, other: "Subspace") -> bool:
        return self.sort_key() < other.sort_key()

    def contains(self, v: Sequence) -> bool:
        v = [_to_code(self.field, x) for x in v]
        if self.dim == 0:
            return not any(v)
        stacked = MatrixFq(self.field, np.vstack([self.basis, np.array(v, dtype=np.int8)[None]]))
        return stacked.rank() == self.dim

    def __str__(self):
        fmt = self.field.format_code
        return "span(" + ", ".join("(" + ",".join(fmt(x) for x in r) + ")" for r in self.rows) + ")"


def _grassmannian_rows(n: int, d: int, q: int) -> Iterator[np.ndarray]:
    for pivots in itertools.combinations(range(n), d):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        base = np.zeros((d, n), dtype=np.int8)
        for i, p in enumerate(pivots):
            base[i, p] = 1
        for values in itertools.product(range(q), repeat=len(free)):
            b = base.copy()
            for (i, j), v in zip(free, values):
                b[i, j] = v
            yield pivots, b


def enumerate_grassmannian(n: int, d: int, field: FieldSpec) -> Iterator[Subspace]:
    """Every d-dimensional subspace of F_q^n once, sorted by ``Subspace.sort_key``.

    Pivot columns are chosen first, then the free entries to the right of
    each pivot outside the other pivot columns.
    """
    if not 0 <= d <= n:
        return
    for _, b in _grassmannian_rows(n, d, field.q):
        yield Subspace(field, n, tuple(tuple(int(x) for x in r) for r in b))


@functools.lru_cache(maxsize=None)
def grassmannian_arrays(n: int, d: int, field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """All d-subspaces of F_q^n as stacked RREF bases ``(M, d, n)`` and pivots ``(M, d)``."""
    items = list(_grassmannian_rows(n, d, field.q)) if 0 <= d <= n else []
    bases = np.array([b for _, b in items], dtype=np.int8).reshape(len(items), d, n)
    pivots = np.array([p for p, _ in items], dtype=np.int64).reshape(len(items), d)
    bases.setflags(write=False)
    pivots.setflags(write=False)
    return bases, pivots


def iter_gl_batches(n: int, field: FieldSpec, cap: int | None = None, batch: int = _BATCH) -> Iterator[np.ndarray]:
    """Invertible n x n matrices in code order, as int8 arrays of at most ``batch`` candidates each.

    Candidate code ranges are disjoint, so batches can be consumed independently.
    """
    q = field.q
    check_cap(f"GL_{n}(F_{q})", gl_order(n, q), cap)
    if n == 0:
        yield np.zeros((1, 0, 0), dtype=np.int8)
        return
    total = q ** (n * n)
    for start in range(0, total, batch):
        codes = np.arange(start, min(start + batch, total), dtype=np.int64)
        mats = decode_matrices(codes, n, n, q)
        keep = kernels.batch_rank(mats, field) == n
        if keep.any():
            yield mats[keep]


@functools.lru_cache(maxsize=16)
def _gl_elements(n: int, field: FieldSpec) -> np.ndarray:
    out = np.concatenate(list(iter_gl_batches(n, field, cap=np.inf)), axis=0)
    out.setflags(write=False)
    return out


def gl_elements(n: int, field: FieldSpec, cap: int | None = None) -> np.ndarray:
    """All of GL_n(F_q) as a read-only ``(|GL_n|, n, n)`` int8 array in code order."""
    check_cap(f"GL_{n}(F_{field.q})", gl_order(n, field.q), cap)
    return _gl_elements(n, field)


def enumerate_gl(n: int, field: FieldSpec, cap: int | None = None) -> Iterator[MatrixFq]:
    check_cap(f"GL_{n}(F_{field.q})", gl_order(n, field.q), cap)
    for chunk in iter_gl_batches(n, field, cap=cap):
        for m in chunk:
            yield MatrixFq(field, m)


def restrict(t: MatrixFq, w: Subspace) -> MatrixFq | None:
    """The restriction S of t to w (``t @ B.T == B.T @ S``), or None when w is not t-invariant."""
    if t.rows != t.cols or t.rows != w.ambient_dim:
        raise ValueError(f"dimension mismatch: {t.shape} acting on a subspace of F^{w.ambient_dim}")
    if t.field != w.field:
        raise ValueError("matrix and subspace over different fields")
    d = w.dim
    code = int(kernels.restrict_codes(t.data[None], w.basis, w.pivots, t.field)[0])
    if code < 0:
        return None
    if d == 0:
        return MatrixFq(t.field, np.zeros((0, 0), dtype=np.int8))
    return MatrixFq(t.field, decode_matrices(np.array([code]), d, d, t.field.q)[0])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


_DRAW_BLOCK = 8


def random_gl(n: int, field: FieldSpec, seed=None) -> MatrixFq:
    """Uniform element of GL_n(F_q) by rejection; deterministic for a fixed seed.

    Candidates are drawn in blocks of eight uniform matrices and the first
    invertible one in the stream is returned.
    """
    return MatrixFq(field, random_gl_batch(n, field, [_rng(seed)])[0])


def random_gl_batch(n: int, field: FieldSpec, rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """One :func:`random_gl` draw per generator, with the rank tests batched."""
    out = np.zeros((len(rngs), n, n), dtype=np.int8)
    if n == 0:
        return out
    pending = list(range(len(rngs)))
    while pending:
        cand = np.stack([rngs[i].integers(0, field.q, size=(_DRAW_BLOCK, n, n), dtype=np.int8) for i in pending])
        ok = (kernels.batch_rank(cand.reshape(-1, n, n), field) == n).reshape(len(pending), _DRAW_BLOCK)
        still = []
        for row, i in enumerate(pending):
            hits = np.flatnonzero(ok[row])
            if hits.size:
                out[i] = cand[row, hits[0]]
            else:
                still.append(i)
        pending = still
    return out

