"""Pure-Python (NumPy) twin of the compiled Wigner kernel.

Same recurrence, vectorised over the points instead of looping over them.
"""

from __future__ import annotations

import math

import numpy as np


def wigner_points(rho: np.ndarray, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    rho = np.ascontiguousarray(rho, dtype=complex)
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    N = rho.shape[0]
    A2 = math.sqrt(2.0) * (xs + 1j * ps)
    A2c = A2.conj()
    sq = np.sqrt(np.arange(max(N, 1), dtype=float))
    wl = [None] * N
    wl[0] = (np.exp(-(xs * xs + ps * ps)) / math.pi).astype(complex)
    w = rho[0, 0].real * wl[0].real
    for n in range(1, N):
        wl[n] = A2 * wl[n - 1] / sq[n]
        w = w + 2.0 * (rho[0, n] * wl[n]).real
    for m in range(1, N):
        temp = wl[m]
        wl[m] = (A2c * temp - sq[m] * wl[m - 1]) / sq[m]
        w = w + (rho[m, m] * wl[m]).real
        for n in range(m + 1, N):
            temp2 = (A2 * wl[n - 1] - sq[m] * temp) / sq[n]
            temp = wl[n]
            wl[n] = temp2
            w = w + 2.0 * (rho[m, n] * wl[n]).real
    return np.asarray(w, dtype=float)


def wigner_grid(rho: np.ndarray, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    X, P = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ps, dtype=float), indexing="ij")
    return wigner_points(rho, X.ravel(), P.ravel()).reshape(X.shape)
