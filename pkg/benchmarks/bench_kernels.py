"""Numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--p 7]

Each case runs once per backend to warm up (JIT compile), then ``--repeat``
times; the best wall time is reported.  Results of the two backends are
compared for equality before timing.  ``--env`` additionally runs one
end-to-end case in subprocesses with and without TWISTLAB_DISABLE_NUMBA=1.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from twistlab import _kernels as K
from twistlab import twists as T
from twistlab.constructions import heisenberg


def _kernel_cases(rng):
    N, rows, nout = 35, 40_000, 2_000
    a = rng.integers(-9, 10, size=(rows, N), dtype=np.int64)
    b = rng.integers(-9, 10, size=(rows, N), dtype=np.int64)
    ia = rng.integers(rows, size=4 * rows)
    ib = rng.integers(rows, size=4 * rows)
    inv = rng.integers(nout, size=4 * rows)
    x = rng.integers(-9, 10, size=(64, 64, N), dtype=np.int64)
    shift = rng.integers(N, size=(64, 64))
    return {
        "pair_convolve": lambda: K.pair_convolve(a, b, ia, ib, inv, nout),
        "scatter_add": lambda: K.scatter_add(a, inv[:rows], nout),
        "axis_transform": lambda: K.axis_transform(x, shift),
    }


def _algebra_cases(p):
    H = heisenberg(p)
    Fx, Fy = H.twist_x, H.twist_y
    Rx, Ry = Fx.realized, Fy.realized
    return {
        f"twist product H({p})": lambda: Rx * Ry,
        f"commutator twist H({p})": lambda: T.commutator_twist(Fx, Fy),
    }


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def _same(u, v) -> bool:
    if isinstance(u, np.ndarray):
        return np.array_equal(np.asarray(u, dtype=object), np.asarray(v, dtype=object))
    return u == v


def run(repeat: int, p: int) -> list[tuple[str, float, float]]:
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    cases = {**_kernel_cases(rng), **_algebra_cases(p)}
    rows = []
    for name, fn in cases.items():
        K.set_backend("numpy")
        ref = fn()
        t_np = _best(fn, repeat)
        K.set_backend("numba")
        got = fn()
        t_nb = _best(fn, repeat)
        if not _same(ref, got):
            raise SystemExit(f"{name}: backends disagree")
        rows.append((name, t_np, t_nb))
    K.set_backend("numba")
    return rows


def run_env(p: int) -> dict:
    code = (f"import time; from twistlab.constructions import heisenberg; from twistlab import twists as T;"
            f"H = heisenberg({p}); T.commutator_twist(H.twist_x, H.twist_y); t = time.perf_counter();"
            f"T.commutator_twist(H.twist_x, H.twist_y); print(time.perf_counter() - t)")
    out = {}
    for label, disable in (("numba", ""), ("numpy (TWISTLAB_DISABLE_NUMBA=1)", "1")):
        env = dict(os.environ, TWISTLAB_DISABLE_NUMBA=disable)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip())
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--p", type=int, default=7, help="Heisenberg prime for the algebra cases")
    ap.add_argument("--env", action="store_true", help="also compare through the environment switch")
    args = ap.parse_args(argv)
    rows = run(args.repeat, args.p)
    w = max(len(r[0]) for r in rows)
    print(f"{'case':<{w}}  {'numpy s':>10}  {'numba s':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{w}}  {t_np:10.4f}  {t_nb:10.4f}  {t_np / t_nb:8.1f}x")
    if args.env:
        for label, t in run_env(args.p).items():
            print(f"subprocess {label}: {t:.4f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
