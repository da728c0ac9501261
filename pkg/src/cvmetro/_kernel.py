"""Backend selection for the Wigner-grid kernel.

The compiled extension is used when it imports.  Setting the environment
variable ``CVMETRO_PURE_PYTHON=1`` forces the NumPy implementation, which
is also the automatic fallback when no compiled module was built.
"""

from __future__ import annotations

import os

import numpy as np

from . import _wigner_py

BACKEND = "python"
_impl = _wigner_py

if os.environ.get("CVMETRO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _wigner_kernel as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def _prep(rho, xs, ps):
    return (np.ascontiguousarray(rho, dtype=np.complex128),
            np.ascontiguousarray(xs, dtype=np.float64).ravel(),
            np.ascontiguousarray(ps, dtype=np.float64).ravel())


def wigner_grid(rho, xs, ps, *, backend: str | None = None) -> np.ndarray:
    """``W`` of the Hermitian matrix ``rho`` on the grid ``xs`` x ``ps`` (shape ``(nx, np)``)."""
    impl = _select(backend)
    return impl.wigner_grid(*_prep(rho, xs, ps))


def wigner_points(rho, xs, ps, *, backend: str | None = None) -> np.ndarray:
    """``W`` at paired coordinates."""
    rho, xs, ps = _prep(rho, xs, ps)
    if xs.shape != ps.shape:
        raise ValueError("xs and ps must have the same length")
    return _select(backend).wigner_points(rho, xs, ps)


def _select(backend: str | None):
    if backend is None:
        return _impl
    if backend == "python":
        return _wigner_py
    if backend == "cython":
        if BACKEND != "cython":
            raise RuntimeError("compiled Wigner kernel is not available")
        return _impl
    raise ValueError(f"unknown backend {backend!r}")
