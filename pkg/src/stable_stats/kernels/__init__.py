"""Batched finite-field kernels with a numba path and a pure-numpy path.

The backend is chosen once at import time from ``STABLE_STATS_BACKEND``
(``numba`` or ``numpy``; default ``numba`` when it imports).  Both paths
produce identical integers, so results never depend on the choice.
``STABLE_STATS_THREADS`` caps numba's thread pool.

The wrappers take a :class:`~stable_stats.field.FieldSpec` instead of raw
tables and normalise dtypes before dispatching.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from . import _numpy

log = logging.getLogger(__name__)

__all__ = [
    "BACKEND",
    "available_backends",
    "get_impl",
    "batch_matmul",
    "batch_rref",
    "batch_rank",
    "restrict_codes",
    "class_counts",
]


def _load_numba():
    try:
        import numba

        # skip the TBB probe, whose version warning is noise here
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
        from . import _numba
    except ImportError:  # pragma: no cover - numba missing
        return None
    threads = os.environ.get("STABLE_STATS_THREADS")
    if threads:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    return _numba


_NUMBA = _load_numba()
_requested = os.environ.get("STABLE_STATS_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"STABLE_STATS_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
if _requested == "numba" and _NUMBA is None:
    log.warning("numba unavailable, falling back to numpy kernels")
    _requested = "numpy"
BACKEND = _requested


def available_backends() -> list[str]:
    return ["numpy"] + (["numba"] if _NUMBA is not None else [])


def get_impl(backend: str | None = None):
    backend = backend or BACKEND
    if backend == "numba":
        if _NUMBA is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _NUMBA
    return _numpy


def _i8(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int8)


def batch_matmul(a, b, field, backend=None) -> np.ndarray:
    """Batched product over the field; a 2-D operand is broadcast across the batch."""
    a = _i8(a)[None] if np.ndim(a) == 2 else _i8(a)
    b = _i8(b)[None] if np.ndim(b) == 2 else _i8(b)
    n = max(a.shape[0], b.shape[0])
    a = _i8(np.broadcast_to(a, (n,) + a.shape[1:]))
    b = _i8(np.broadcast_to(b, (n,) + b.shape[1:]))
    return get_impl(backend).batch_matmul(a, b, field.add, field.mul)


def batch_rref(mats, field, backend=None):
    return get_impl(backend).batch_rref(_i8(mats), field.add, field.mul, field.neg, field.inv)


def batch_rank(mats, field, backend=None) -> np.ndarray:
    mats = _i8(mats)
    if mats.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return get_impl(backend).batch_rank(mats, field.add, field.mul, field.neg, field.inv)


def restrict_codes(mats, basis, pivots, field, backend=None) -> np.ndarray:
    """Code of each ``T|_W`` (first entry most significant) or -1 if W is not T-invariant.

    W is the column space of ``basis.T``; the restriction S satisfies
    ``T @ basis.T == basis.T @ S``.
    """
    return get_impl(backend).restrict_codes(
        _i8(mats), _i8(basis), np.asarray(pivots, dtype=np.int64), field.add, field.mul, field.q
    )


def class_counts(mats, bases, pivots, class_of_code, n_classes, field, backend=None) -> np.ndarray:
    return get_impl(backend).class_counts(
        _i8(mats),
        _i8(bases),
        np.asarray(pivots, dtype=np.int64),
        np.asarray(class_of_code, dtype=np.int64),
        int(n_classes),
        field.add,
        field.mul,
        field.q,
    )
