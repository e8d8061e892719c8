"""Benchmark the numba-compiled kernels against their pure-Python/NumPy twins.

Run: python benchmarks/bench_kernels.py
The same comparison is what the LATRANK_PURE_NUMPY=1 environment flag toggles
for the whole library.
"""

import time

import numpy as np

from latrank import kernels


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_fp_enumerate():
    # points of Z^6 inside a radius-8 ball: the hot loop of the direct
    # rank-count path
    g = np.eye(6)
    chol = np.linalg.cholesky(g)
    dvec = np.diag(chol) ** 2
    lmat = chol / np.diag(chol)[None, :]
    bound = 64.0 + 1e-9
    cap = 2_000_000
    out = np.zeros((cap, 6), dtype=np.int64)

    t_py, n_py = timeit(kernels._fp_enumerate_impl, lmat, dvec, bound,
                        -10 ** 9, 10 ** 9, out, repeat=1)
    rows = [("fp_enumerate Z^6 r=8", "python", t_py, n_py)]
    if kernels.HAS_NUMBA:
        kernels._fp_enumerate_nb(lmat, dvec, 4.0, -10 ** 9, 10 ** 9, out)  # warm up
        t_nb, n_nb = timeit(kernels._fp_enumerate_nb, lmat, dvec, bound,
                            -10 ** 9, 10 ** 9, out)
        assert n_nb == n_py
        rows.append(("fp_enumerate Z^6 r=8", "numba", t_nb, n_nb))
    return rows


def bench_ranks():
    rng = np.random.default_rng(0)
    batch = rng.integers(-40, 41, size=(200_000, 3, 2)).astype(np.int64)
    out = np.zeros(batch.shape[0], dtype=np.int64)

    t_py, _ = timeit(kernels._ranks_int_impl, batch[:20_000], out[:20_000], repeat=1)
    t_py *= batch.shape[0] / 20_000   # scaled: the python loop is slow
    rows = [("ranks_over_z 200k 3x2", "python (scaled)", t_py, batch.shape[0])]
    if kernels.HAS_NUMBA:
        kernels._ranks_int_nb(batch[:10], out[:10])  # warm up
        t_nb, _ = timeit(kernels._ranks_int_nb, batch, out)
        rows.append(("ranks_over_z 200k 3x2", "numba", t_nb, batch.shape[0]))
    return rows


def bench_ranks_mod_p():
    rng = np.random.default_rng(1)
    batch = rng.integers(-50, 51, size=(100_000, 3, 3)).astype(np.int64)
    out = np.zeros(batch.shape[0], dtype=np.int64)
    t_py, _ = timeit(kernels._ranks_mod_p_impl, batch[:10_000], np.int64(31),
                     out[:10_000], repeat=1)
    t_py *= 10
    rows = [("ranks_mod_p 100k 3x3 p=31", "python (scaled)", t_py, batch.shape[0])]
    if kernels.HAS_NUMBA:
        kernels._ranks_mod_p_nb(batch[:10], np.int64(31), out[:10])
        t_nb, _ = timeit(kernels._ranks_mod_p_nb, batch, np.int64(31), out)
        rows.append(("ranks_mod_p 100k 3x3 p=31", "numba", t_nb, batch.shape[0]))
    return rows


def main():
    print(f"numba available: {kernels.HAS_NUMBA}, "
          f"enabled: {kernels.numba_enabled()}")
    all_rows = bench_fp_enumerate() + bench_ranks() + bench_ranks_mod_p()
    print(f"{'benchmark':<28} {'path':<16} {'seconds':>10} {'items':>10}")
    speedups = {}
    for name, path, secs, items in all_rows:
        print(f"{name:<28} {path:<16} {secs:>10.4f} {items:>10}")
        speedups.setdefault(name, {})[path.split()[0]] = secs
    for name, d in speedups.items():
        if "python" in d and "numba" in d:
            print(f"{name}: numba speedup x{d['python'] / d['numba']:.1f}")


if __name__ == "__main__":
    main()
