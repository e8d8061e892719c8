"""Hot numeric kernels: short-vector enumeration and batched rank filters.

Each kernel has a plain NumPy/Python implementation and, when numba is
importable and LATRANK_PURE_NUMPY is unset, an @njit-compiled twin.  The two
paths are interchangeable; `benchmarks/bench_kernels.py` compares them.

The enumeration kernel works in float64 on an LLL-reduced Gram and is always
followed by an exact integer-arithmetic filter in zlattice.py, so float error
here can only cost a few spurious candidates, never a missed vector (the
caller pads the bound).
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = "LATRANK_PURE_NUMPY"

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


def numba_enabled() -> bool:
    return HAS_NUMBA and not os.environ.get(_ENV_FLAG)


def _fp_enumerate_impl(lmat, dvec, bound, last_lo, last_hi, out):
    """Fincke-Pohst: fill `out` with all integer x, Q(x) <= bound.

    Q(x) = sum_i dvec[i] * (x[i] + c_i)^2 with c_i = sum_{j>i} x[j]*lmat[j,i]
    (lmat unit lower triangular from an LDL^T split of the Gram matrix).
    The outermost coordinate x[r-1] is restricted to [last_lo, last_hi] so
    callers can window the search across workers.  Children are visited by
    increasing coordinate.  Returns the count, or -1 if `out` is too small.
    """
    r = dvec.shape[0]
    cap = out.shape[0]
    x = np.zeros(r, dtype=np.int64)
    center = np.zeros(r, dtype=np.float64)
    partial = np.zeros(r + 1, dtype=np.float64)
    hi = np.zeros(r, dtype=np.int64)
    count = 0
    i = r - 1

    # bounds at the top level
    rem = bound
    if rem < 0.0:
        return 0
    halfw = math.sqrt(rem / dvec[i])
    lo_i = int(math.ceil(-halfw))
    hi_i = int(math.floor(halfw))
    if lo_i < last_lo:
        lo_i = last_lo
    if hi_i > last_hi:
        hi_i = last_hi
    center[i] = 0.0
    hi[i] = hi_i
    x[i] = lo_i - 1

    while True:
        x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i >= r:
                return count
            continue
        t = x[i] + center[i]
        partial[i] = partial[i + 1] + dvec[i] * t * t
        if partial[i] > bound:
            # larger x[i] values at this level only grow Q once past the
            # vertex, and the range already clips them; keep scanning
            continue
        if i == 0:
            if count >= cap:
                return -1
            for j in range(r):
                out[count, j] = x[j]
            count += 1
            continue
        i -= 1
        c = 0.0
        for j in range(i + 1, r):
            c += x[j] * lmat[j, i]
        center[i] = c
        rem = bound - partial[i + 1]
        if rem < 0.0:
            rem = 0.0
        halfw = math.sqrt(rem / dvec[i])
        x[i] = int(math.ceil(-c - halfw)) - 1
        hi[i] = int(math.floor(-c + halfw))


def _ranks_int_impl(batch, out):
    """Exact ranks of a batch of small integer matrices (fraction-free elimination).

    Caller guarantees the Bareiss intermediates fit in int64.
    """
    nmat = batch.shape[0]
    nrow = batch.shape[1]
    ncol = batch.shape[2]
    work = np.zeros((nrow, ncol), dtype=np.int64)
    for t in range(nmat):
        for i in range(nrow):
            for j in range(ncol):
                work[i, j] = batch[t, i, j]
        rank = 0
        prev = np.int64(1)
        for col in range(ncol):
            piv = -1
            for i in range(rank, nrow):
                if work[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(ncol):
                    tmp = work[rank, j]
                    work[rank, j] = work[piv, j]
                    work[piv, j] = tmp
            pval = work[rank, col]
            for i in range(rank + 1, nrow):
                ival = work[i, col]
                for j in range(ncol):
                    work[i, j] = (pval * work[i, j] - ival * work[rank, j]) // prev
            prev = pval
            rank += 1
            if rank == nrow:
                break
        out[t] = rank
    return out


def _ranks_mod_p_impl(batch, p, out):
    """Ranks of a batch of integer matrices reduced mod a prime p."""
    nmat = batch.shape[0]
    nrow = batch.shape[1]
    ncol = batch.shape[2]
    work = np.zeros((nrow, ncol), dtype=np.int64)
    for t in range(nmat):
        for i in range(nrow):
            for j in range(ncol):
                work[i, j] = batch[t, i, j] % p
        rank = 0
        for col in range(ncol):
            piv = -1
            for i in range(rank, nrow):
                if work[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(ncol):
                    tmp = work[rank, j]
                    work[rank, j] = work[piv, j]
                    work[piv, j] = tmp
            # pivot inverse by Fermat
            inv = np.int64(1)
            base = work[rank, col] % p
            e = p - 2
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            for i in range(rank + 1, nrow):
                f = (work[i, col] * inv) % p
                if f != 0:
                    for j in range(ncol):
                        work[i, j] = (work[i, j] - f * work[rank, j]) % p
            rank += 1
            if rank == nrow:
                break
        out[t] = rank
    return out


if HAS_NUMBA:
    _fp_enumerate_nb = numba.njit(cache=True, nogil=True)(_fp_enumerate_impl)
    _ranks_int_nb = numba.njit(cache=True, nogil=True)(_ranks_int_impl)
    _ranks_mod_p_nb = numba.njit(cache=True, nogil=True)(_ranks_mod_p_impl)


def fp_enumerate(lmat: np.ndarray, dvec: np.ndarray, bound: float,
                 last_lo: int, last_hi: int, capacity: int) -> np.ndarray:
    """All integer coordinate vectors with Q(x) <= bound; grows its buffer on demand."""
    impl = _fp_enumerate_nb if numba_enabled() else _fp_enumerate_impl
    cap = max(int(capacity), 64)
    while True:
        out = np.zeros((cap, dvec.shape[0]), dtype=np.int64)
        n = impl(lmat, dvec, float(bound), int(last_lo), int(last_hi), out)
        if n >= 0:
            return out[:n]
        cap *= 2


def ranks_int64(batch: np.ndarray) -> np.ndarray:
    """Exact ranks over Z for a (N, n, m) int64 batch. Caller checks overflow safety."""
    out = np.zeros(batch.shape[0], dtype=np.int64)
    if batch.shape[0] == 0:
        return out
    impl = _ranks_int_nb if numba_enabled() else _ranks_int_impl
    return impl(batch, out)


def ranks_int_safe_bound(max_abs: int, nrow: int, ncol: int) -> bool:
    """Whether Bareiss on int64 is overflow-safe for entries bounded by max_abs."""
    k = min(nrow, ncol)
    # Hadamard bound on any minor, squared growth during cross-multiplication
    b = 1.0
    for _ in range(k):
        b *= math.sqrt(ncol) * max(max_abs, 1)
    return b * b * max(max_abs, 1) < 2 ** 62


def ranks_over_z(batch: np.ndarray) -> np.ndarray:
    """Exact ranks with automatic fallback to Python big ints when int64 is unsafe."""
    if batch.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    max_abs = int(np.max(np.abs(batch))) if batch.size else 0
    if ranks_int_safe_bound(max_abs, batch.shape[1], batch.shape[2]):
        return ranks_int64(batch.astype(np.int64))
    from . import intmat

    return np.array([intmat.rank([[int(v) for v in row] for row in mat])
                     for mat in batch], dtype=np.int64)


def ranks_mod_p(batch: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(batch.shape[0], dtype=np.int64)
    if batch.shape[0] == 0:
        return out
    if p * p >= 2 ** 31:
        raise ValueError("p too large for the mod-p rank kernel")
    impl = _ranks_mod_p_nb if numba_enabled() else _ranks_mod_p_impl
    return impl(batch.astype(np.int64), np.int64(p), out)
