"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Every kernel runs once per backend before timing, so numba compilation is
excluded.  Outputs of the two backends are compared before any timing.
"""

import argparse
import time

import numpy as np

from stable_stats import kernels
from stable_stats.conjugacy import code_to_class_table
from stable_stats.field import field_make
from stable_stats.linalg import gl_elements, grassmannian_arrays


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    F2, F3 = field_make(2), field_make(3)
    rng = np.random.default_rng(0)
    g4 = gl_elements(4, F2)
    bases, piv = grassmannian_arrays(4, 2, F2)
    table2 = code_to_class_table(2, F2)
    n_cls = int(table2.max()) + 1
    raw = rng.integers(0, 3, size=(50_000, 5, 5), dtype=np.int8)
    g3 = gl_elements(3, F3)
    b3, p3 = grassmannian_arrays(3, 1, F3)
    t3 = code_to_class_table(1, F3)
    return {
        "matmul GL_4(F_2) x GL_4(F_2)": lambda b: kernels.batch_matmul(g4, g4[::-1], F2, backend=b),
        "rank 50k 5x5 over F_3": lambda b: kernels.batch_rank(raw, F3, backend=b),
        "class counts GL_4(F_2), planes": lambda b: kernels.class_counts(g4, bases, piv, table2, n_cls, F2, backend=b),
        "class counts GL_3(F_3), lines": lambda b: kernels.class_counts(g3, b3, p3, t3, int(t3.max()) + 1, F3, backend=b),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'kernel':<36}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases().items():
        outs = {b: fn(b) for b in backends}
        ref = outs["numpy"]
        for b, out in outs.items():
            a, r = (out[0], ref[0]) if isinstance(out, tuple) else (out, ref)
            assert np.array_equal(a, r), f"{name}: {b} disagrees with numpy"
        t = {b: _best(lambda: fn(b), args.repeat) for b in backends}
        speed = f"{t['numpy'] / t['numba']:>9.1f}x" if "numba" in t else ""
        print(f"{name:<36}" + "".join(f"{t[b] * 1e3:>10.1f}ms" for b in backends) + speed)


if __name__ == "__main__":
    main()
