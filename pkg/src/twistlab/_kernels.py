"""Integer kernels behind the exact group-ring arithmetic.

Coefficient rows live in Z[x]/(x^N - 1): a row of length N holds the
coefficients of 1, x, ..., x^(N-1).  Callers reduce modulo the cyclotomic
polynomial afterwards.  Every kernel exists twice, once compiled with numba
and once in plain numpy; ``TWISTLAB_DISABLE_NUMBA=1`` selects the latter.
Object-dtype (Python int) arrays always take the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "TWISTLAB_DISABLE_NUMBA"

try:  # pragma: no cover - import guard
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def numba_requested() -> bool:
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


_USE_NUMBA = HAVE_NUMBA and numba_requested()

CHUNK = 1 << 15


def use_numba() -> bool:
    return _USE_NUMBA


def set_backend(name: str) -> None:
    """Switch between ``"numba"`` and ``"numpy"`` at runtime (tests, benchmarks)."""
    global _USE_NUMBA
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        _USE_NUMBA = True
    elif name == "numpy":
        _USE_NUMBA = False
    else:
        raise ValueError(f"unknown backend {name!r}")


def backend() -> str:
    return "numba" if _USE_NUMBA else "numpy"


# --- numpy implementations -------------------------------------------------


def _pair_convolve_np(a, b, ia, ib, inv, nout):
    N = a.shape[1]
    out = np.zeros((nout, N), dtype=a.dtype)
    if out.dtype == object:
        out[...] = 0
    for s in range(0, len(ia), CHUNK):
        sa = a[ia[s : s + CHUNK]]
        sb = b[ib[s : s + CHUNK]]
        acc = np.zeros_like(sa)
        if acc.dtype == object:
            acc[...] = 0
        for i in range(N):
            col = sa[:, i : i + 1]
            if not col.any():
                continue
            acc += col * np.roll(sb, i, axis=1)
        np.add.at(out, inv[s : s + CHUNK], acc)
    return out


def _scatter_add_np(vals, inv, nout):
    out = np.zeros((nout,) + vals.shape[1:], dtype=vals.dtype)
    if out.dtype == object:
        out[...] = 0
    np.add.at(out, inv, vals)
    return out


def _axis_transform_np(x, shift):
    # x: (S, R, N); shift: (C, S) -> out (C, R, N)
    S, R, N = x.shape
    C = shift.shape[0]
    out = np.zeros((C, R, N), dtype=x.dtype)
    if out.dtype == object:
        out[...] = 0
    ks = np.arange(N)
    for c in range(C):
        for s in range(S):
            k = shift[c, s]
            if k == 0:
                out[c] += x[s]
            else:
                out[c] += x[s][:, (ks - k) % N]
    return out


# --- numba implementations -------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _pair_convolve_nb(a, b, ia, ib, inv, nout):
        N = a.shape[1]
        out = np.zeros((nout, N), dtype=np.int64)
        for p in range(ia.shape[0]):
            ra = ia[p]
            rb = ib[p]
            o = inv[p]
            for i in range(N):
                ai = a[ra, i]
                if ai == 0:
                    continue
                for j in range(N):
                    bj = b[rb, j]
                    if bj != 0:
                        k = i + j
                        if k >= N:
                            k -= N
                        out[o, k] += ai * bj
        return out

    @numba.njit(cache=True)
    def _scatter_add_nb(vals, inv, nout):
        out = np.zeros((nout, vals.shape[1]), dtype=np.int64)
        for p in range(vals.shape[0]):
            o = inv[p]
            for k in range(vals.shape[1]):
                out[o, k] += vals[p, k]
        return out

    @numba.njit(cache=True)
    def _axis_transform_nb(x, shift):
        S, R, N = x.shape
        C = shift.shape[0]
        out = np.zeros((C, R, N), dtype=np.int64)
        for c in range(C):
            for s in range(S):
                k = shift[c, s]
                for r in range(R):
                    for i in range(N):
                        v = x[s, r, i]
                        if v != 0:
                            j = i + k
                            if j >= N:
                                j -= N
                            out[c, r, j] += v
        return out


def _fast(*arrays) -> bool:
    return _USE_NUMBA and all(a.dtype == np.int64 for a in arrays)


# --- public dispatchers ----------------------------------------------------


def pair_convolve(a, b, ia, ib, inv, nout):
    """out[inv[p]] += a[ia[p]] * b[ib[p]] (cyclic convolution of length N)."""
    ia = np.ascontiguousarray(ia, dtype=np.int64)
    ib = np.ascontiguousarray(ib, dtype=np.int64)
    inv = np.ascontiguousarray(inv, dtype=np.int64)
    if _fast(a, b):
        return _pair_convolve_nb(np.ascontiguousarray(a), np.ascontiguousarray(b), ia, ib, inv, nout)
    if a.dtype != b.dtype:
        a, b = a.astype(object), b.astype(object)
    return _pair_convolve_np(a, b, ia, ib, inv, nout)


def scatter_add(vals, inv, nout):
    """Sum rows of ``vals`` into ``nout`` buckets given by ``inv``."""
    inv = np.ascontiguousarray(inv, dtype=np.int64)
    if _fast(vals) and vals.ndim == 2:
        return _scatter_add_nb(np.ascontiguousarray(vals), inv, nout)
    return _scatter_add_np(vals, inv, nout)


def axis_transform(x, shift):
    """out[c, r, k] = sum_s x[s, r, (k - shift[c, s]) mod N]."""
    shift = np.ascontiguousarray(shift, dtype=np.int64)
    if _fast(x):
        return _axis_transform_nb(np.ascontiguousarray(x), shift)
    return _axis_transform_np(x, shift)
