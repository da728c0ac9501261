"""Compare the compiled and NumPy Wigner kernels.

Run with ``python3 benchmarks/bench_wigner.py``.  For each state and grid
size both kernels evaluate the same density matrix; the script reports the
best-of-``--repeat`` wall time, the speed-up and the largest difference
between the two results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cvmetro import _kernel
from cvmetro.fock import build_state
from cvmetro.states import parse_state

CASES = ("fock:n=3", "cat:a=2i,gamma=0", "compass:a=2", "gaussian:r=0.6,gamma=0.3,nt=0.4,a=0.5")


def best_time(fn, repeat: int) -> tuple[float, np.ndarray]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoff", type=int, default=80)
    ap.add_argument("--sizes", default="51,101,201")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if _kernel.BACKEND != "cython":
        print("compiled kernel not available; only the NumPy kernel can run")
        return 1
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'state':40s} {'grid':>9s} {'cython s':>10s} {'python s':>10s} {'speed-up':>9s} {'max |diff|':>11s}")
    for text in CASES:
        rho = build_state(parse_state(text), args.cutoff).density_matrix()
        for n in sizes:
            axis = np.linspace(-4, 4, n)
            tc, wc = best_time(lambda: _kernel.wigner_grid(rho, axis, axis, backend="cython"), args.repeat)
            tp, wp = best_time(lambda: _kernel.wigner_grid(rho, axis, axis, backend="python"), args.repeat)
            diff = float(np.max(np.abs(wc - wp)))
            print(f"{text:40s} {n:>4d}x{n:<4d} {tc:10.4f} {tp:10.4f} {tp / tc:9.1f} {diff:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
