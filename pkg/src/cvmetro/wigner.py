"""Wigner functions and displaced-parity sensitivity fields.

Coordinates are ``(x, p)`` with ``beta = (x + i p)/sqrt(2)`` and
``W(x, p) = Tr[rho D(beta) Pi D(beta)^dag] / pi``, normalised so that
``∫∫ W dx dp = 1``.

A parity measurement displaced to ``beta`` is a two-outcome observable with
mean ``pi W``.  Under a parameter shift its sensitivity is

    |pi dW/dtheta|^2 / (1 - (pi W)^2 + eps)

where ``eps`` models a noise floor.  A displacement generated by
``r(phi)`` moves phase space along ``(cos phi, -sin phi)``; a rotation
generated by ``n`` turns it about the origin.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import _kernel, fock
from .errors import DomainError, NoClosedForm, NonConverged
from .fock import QuantumState
from .gaussian import descriptor_of
from .moments import IndeterminateSensitivity, MomentSensitivity
from .states import StateSpec

FD_STEP = 1e-3
INDETERMINATE_TOL = 1e-12
TIE_RTOL = 1e-12

Source = Union[StateSpec, QuantumState]


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _gaussian_fields(spec: StateSpec, x, p):
    desc = descriptor_of(spec)
    inv = np.linalg.inv(desc.cov)
    dx, dp = x - desc.mean[0], p - desc.mean[1]
    q = inv[0, 0] * dx * dx + 2 * inv[0, 1] * dx * dp + inv[1, 1] * dp * dp
    W = np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(desc.det))
    Wx = -W * (inv[0, 0] * dx + inv[0, 1] * dp)
    Wp = -W * (inv[1, 0] * dx + inv[1, 1] * dp)
    return W, Wx, Wp


def _laguerre(m: int, k: int, s):
    return eval_genlaguerre(m, k, s)


def _laguerre_prime(m: int, k: int, s):
    if m == 0:
        return np.zeros_like(s)
    return -eval_genlaguerre(m - 1, k + 1, s)


def _fock_fields(n: int, x, p):
    rho2 = x * x + p * p
    s = 2 * rho2
    e = np.exp(-rho2) * (-1) ** n / math.pi
    L, dL = _laguerre(n, 0, s), _laguerre_prime(n, 0, s)
    radial = e * (-L + 2 * dL)  # dW/d(rho^2)
    return e * L, 2 * x * radial, 2 * p * radial


def _pair_fields(m: int, n: int, x, p):
    """``W`` of the operator ``|m><n|`` (complex) and its gradient, ``m < n``."""
    k = n - m
    c = (-1) ** m * math.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1))) / math.pi
    rho2 = x * x + p * p
    s = 2 * rho2
    z = math.sqrt(2) * (x + 1j * p)
    e = np.exp(-rho2)
    L, dL = _laguerre(m, k, s), _laguerre_prime(m, k, s)
    zk = z ** k
    zk1 = k * z ** (k - 1) if k > 0 else np.zeros_like(z)
    W = c * zk * e * L
    common = zk * e * (-L + 2 * dL) * 2  # derivative of e*L with respect to rho^2, times 2
    Wx = c * (zk1 * math.sqrt(2) * e * L + common * x)
    Wp = c * (zk1 * (1j * math.sqrt(2)) * e * L + common * p)
    return W, Wx, Wp


def _superposition_fields(spec: StateSpec, x, p):
    m, n = sorted((spec.m, spec.n))
    Wm, Wmx, Wmp = _fock_fields(m, x, p)
    Wn, Wnx, Wnp = _fock_fields(n, x, p)
    Wc, Wcx, Wcp = _pair_fields(m, n, x, p)
    phase = np.exp(-1j * spec.gamma) if spec.m <= spec.n else np.exp(1j * spec.gamma)
    return (0.5 * (Wm + Wn) + (phase * Wc).real,
            0.5 * (Wmx + Wnx) + (phase * Wcx).real,
            0.5 * (Wmp + Wnp) + (phase * Wcp).real)


def _dyad_fields(a: complex, b: complex, x, p):
    """``W`` of ``|a><b|`` for coherent ``a``, ``b`` and its gradient."""
    beta = (x + 1j * p) / math.sqrt(2)
    overlap = np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + np.conj(b) * a)
    u, v = beta - a, np.conj(beta) - np.conj(b)
    W = overlap * np.exp(-2 * u * v) / math.pi
    Wx = W * (-2 * (v + u) / math.sqrt(2))
    Wp = W * (-2j * (v - u) / math.sqrt(2))
    return W, Wx, Wp


def _cat_fields(spec: StateSpec, x, p):
    a = complex(spec.alpha)
    norm2 = spec.cat_norm ** 2
    phase = np.exp(-1j * spec.gamma)
    out = []
    for d1, d2, cross in zip(_dyad_fields(a, a, x, p), _dyad_fields(-a, -a, x, p), _dyad_fields(a, -a, x, p)):
        out.append(norm2 * ((d1 + d2).real + 2 * (phase * cross).real))
    return tuple(out)


def _analytic_fields(spec: StateSpec, x, p):
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    fam = spec.family
    if fam in ("vacuum", "coherent", "gaussian"):
        return _gaussian_fields(spec, x, p)
    if fam == "fock":
        return _fock_fields(spec.n, x, p)
    if fam == "fock_superposition":
        return _superposition_fields(spec, x, p)
    if fam == "cat":
        return _cat_fields(spec, x, p)
    raise NoClosedForm(f"no closed-form Wigner function for the {fam} family; use wigner_numeric")


def has_closed_form(spec: StateSpec) -> bool:
    return spec.family != "compass"


def wigner_analytic(spec: StateSpec, x, p):
    """Closed-form ``W(x, p)`` for Gaussian, Fock, Fock-superposition and cat states."""
    W = _analytic_fields(spec, x, p)[0]
    return float(W) if np.ndim(W) == 0 else W


def wigner_gradient_analytic(spec: StateSpec, x, p):
    """``(dW/dx, dW/dp)`` by the chain rule on the closed forms."""
    _, Wx, Wp = _analytic_fields(spec, x, p)
    return Wx, Wp


# ---------------------------------------------------------------------------
# Numerical Wigner function
# ---------------------------------------------------------------------------

def _require_converged(state: QuantumState) -> None:
    if not state.converged:
        worst = max(state.tail_mass, state.discarded_mass)
        raise NonConverged(f"state tail mass {worst:.3e} exceeds {state.tolerance:.1e}", worst)


def wigner_numeric(state: QuantumState, x, p, *, backend: str | None = None):
    """Displaced-parity Wigner function of a truncated state.

    Uses the compiled kernel when available.  ``x`` and ``p`` broadcast
    against each other.
    """
    _require_converged(state)
    xb, pb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    vals = _kernel.wigner_points(state.density_matrix(), xb.ravel(), pb.ravel(), backend=backend)
    return float(vals[0]) if xb.ndim == 0 else vals.reshape(xb.shape)


def displaced_parity(beta: complex, dim: int) -> np.ndarray:
    """``D(beta) Pi D(beta)^dag`` built from an exactly unitary truncated ``D``.

    The result has eigenvalues exactly ``±1``; it matches the infinite
    dimensional operator on states supported well below ``dim``.
    """
    U = fock.displacement(beta, dim)
    return U @ fock.parity(dim) @ U.conj().T


def wigner_displaced_parity(state: QuantumState, x: float, p: float, *, pad: int = 80) -> float:
    """Reference ``Tr[rho D Pi D^dag]/pi`` evaluated by explicit matrices (slow)."""
    dim = state.cutoff + pad
    rho = state.embed(dim).density_matrix()
    M = displaced_parity((x + 1j * p) / math.sqrt(2), dim)
    return float(np.einsum("ij,ji->", rho, M).real / math.pi)


def _gradient_operators(state: QuantumState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``rho`` and the operators whose Wigner functions are ``dW/dx`` and ``dW/dp``."""
    padded = state.embed(state.cutoff + 1)
    rho = padded.density_matrix()
    dim = padded.cutoff
    X, P = fock.position(dim), fock.momentum(dim)
    d_x = 1j * (P @ rho - rho @ P)
    d_p = -1j * (X @ rho - rho @ X)
    return rho, d_x, d_p


def _numeric_fields(state: QuantumState, xs, ps, *, derivative: str, grid: bool,
                    backend: str | None = None, workers: int = 1):
    """``(W, Wx, Wp)`` on a grid (``grid=True``) or at paired points."""
    _require_converged(state)
    fn = _kernel.wigner_grid if grid else _kernel.wigner_points
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)

    def run(mat, xv, pv):
        if not grid or workers <= 1 or xv.size < 2 * workers:
            return fn(mat, xv, pv, backend=backend)
        chunks = np.array_split(xv, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: fn(mat, c, pv, backend=backend), chunks))
        return np.vstack(parts)

    if derivative == "commutator":
        rho, d_x, d_p = _gradient_operators(state)
        return run(rho, xs, ps), run(d_x, xs, ps), run(d_p, xs, ps)
    if derivative != "fd":
        raise DomainError(f"unknown derivative method {derivative!r}")
    rho = state.density_matrix()
    h = FD_STEP
    W = run(rho, xs, ps)
    stencil = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
    Wx = sum(c * run(rho, xs + k * h, ps) for k, c in stencil) / (12 * h)
    Wp = sum(c * run(rho, xs, ps + k * h) for k, c in stencil) / (12 * h)
    return W, Wx, Wp


def wigner_fields(source: Source, x, p, *, derivative: str = "fd", cutoff: int | None = None):
    """``(W, dW/dx, dW/dp)`` at paired points.

    A :class:`StateSpec` with a closed form is evaluated analytically; a
    compass spec is built in Fock space first.  A :class:`QuantumState` is
    always evaluated numerically, with derivatives by fourth-order central
    differences (``derivative="fd"``, step 1e-3) or exactly through the
    Wigner functions of ``i[p, rho]`` and ``-i[x, rho]``
    (``derivative="commutator"``).
    """
    xb, pb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    if isinstance(source, StateSpec):
        if has_closed_form(source):
            return _analytic_fields(source, xb, pb)
        source = fock.build_state(source, cutoff or fock.DEFAULT_CUTOFF)
    shape = xb.shape
    out = _numeric_fields(source, xb.ravel(), pb.ravel(), derivative=derivative, grid=False)
    return tuple(o.reshape(shape) for o in out)


# ---------------------------------------------------------------------------
# Sensitivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParityTask:
    """What the parity measurement is asked to detect.

    ``task`` is ``"displacement"`` (along ``r(phi)``) or ``"rotation"``;
    ``eps`` is the noise floor added to the denominator.
    """

    task: str = "displacement"
    phi: float = 0.0
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.task in ("disp",):
            object.__setattr__(self, "task", "displacement")
        if self.task in ("rot",):
            object.__setattr__(self, "task", "rotation")
        if self.task not in ("displacement", "rotation"):
            raise DomainError(f"unknown parity task {self.task!r}")
        if not self.eps >= 0:
            raise DomainError("noise floor eps must be >= 0")

    def derivative(self, x, p, Wx, Wp):
        if self.task == "displacement":
            return -math.cos(self.phi) * Wx + math.sin(self.phi) * Wp
        return -p * Wx + x * Wp


def _ratio_field(num, den, eps):
    den = np.maximum(den, 0.0)
    indeterminate = (num < INDETERMINATE_TOL) & (den < INDETERMINATE_TOL) if eps == 0 else np.zeros_like(num, bool)
    safe = np.where(indeterminate, 1.0, den + eps)
    values = np.where(indeterminate, 0.0, num / safe)
    return values, indeterminate


def parity_sensitivity(source: Source, task: ParityTask, x: float, p: float, *,
                       derivative: str = "fd",
                       cutoff: int | None = None) -> MomentSensitivity | IndeterminateSensitivity:
    """Sensitivity of the parity measurement displaced to ``(x, p)``."""
    W, Wx, Wp = (float(v) for v in wigner_fields(source, x, p, derivative=derivative, cutoff=cutoff))
    dW = float(task.derivative(x, p, Wx, Wp))
    num = (math.pi * dW) ** 2
    den = max(1.0 - (math.pi * W) ** 2, 0.0)
    details = {"W": W, "dW": dW}
    if task.eps == 0 and num < INDETERMINATE_TOL and den < INDETERMINATE_TOL:
        return IndeterminateSensitivity(num, den, "parity expectation at ±1 with vanishing slope")
    if den + task.eps == 0:
        return IndeterminateSensitivity(num, den, "parity expectation at ±1")
    return MomentSensitivity(num / (den + task.eps), details=details)


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -4.0
    x_max: float = 4.0
    nx: int = 201
    p_min: float = -4.0
    p_max: float = 4.0
    np: int = 201

    def __post_init__(self) -> None:
        if self.nx < 2 or self.np < 2:
            raise DomainError("a grid needs at least 2 points per axis")
        vals = (self.x_min, self.x_max, self.p_min, self.p_max)
        if not all(math.isfinite(v) for v in vals) or self.x_max <= self.x_min or self.p_max <= self.p_min:
            raise DomainError("grid ranges must be finite and increasing")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """``XMIN:XMAX:NX,PMIN:PMAX:NP``."""
        try:
            xpart, ppart = text.split(",")
            x0, x1, nx = xpart.split(":")
            p0, p1, n_p = ppart.split(":")
            return cls(float(x0), float(x1), int(nx), float(p0), float(p1), int(n_p))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"bad grid {text!r}; expected XMIN:XMAX:NX,PMIN:PMAX:NP") from exc

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """A sensitivity field sampled on a uniform grid.

    ``values[i, j]`` belongs to ``(xs[i], ps[j])``.  Cells flagged in
    ``indeterminate`` carry 0 when ``eps == 0`` and the regularised value
    otherwise.  ``phi`` holds the per-cell optimal displacement direction
    when the map was optimised over it.
    """

    grid: GridSpec
    values: np.ndarray
    indeterminate: np.ndarray
    argmax: tuple[float, float, float]
    task: ParityTask
    optimize_phi: bool
    phi: np.ndarray | None = None
    cutoff: int | None = None
    backend: str = "analytic"
    meta: dict = field(default_factory=dict)

    @property
    def xs(self) -> np.ndarray:
        return self.grid.xs

    @property
    def ps(self) -> np.ndarray:
        return self.grid.ps


def grid_argmax(values: np.ndarray, xs: np.ndarray, ps: np.ndarray) -> tuple[float, float, float]:
    """Maximum cell, ties (to a relative 1e-12) broken by smallest ``x`` then ``p``."""
    top = float(np.max(values))
    close = np.argwhere(values >= top - TIE_RTOL * max(1.0, abs(top)))
    i, j = min(close.tolist(), key=lambda ij: (xs[ij[0]], ps[ij[1]]))
    return float(xs[i]), float(ps[j]), float(values[i, j])


def sensitivity_map(source: Source, task: ParityTask, grid: GridSpec | None = None, *,
                    optimize_phi: bool = False, derivative: str = "fd",
                    cutoff: int | None = None, workers: int | None = None,
                    backend: str | None = None) -> PhaseSpaceGrid:
    """Parity sensitivity on every cell of ``grid``.

    With ``optimize_phi`` the displacement direction is chosen per cell;
    the best numerator is then ``pi^2 |grad W|^2``.  Closed-form specs are
    evaluated analytically; anything else goes through the Wigner kernel,
    split over rows across ``workers`` threads.
    """
    grid = grid or GridSpec()
    xs, ps = grid.xs, grid.ps
    X, P = np.meshgrid(xs, ps, indexing="ij")
    used_cutoff = None
    kind = "analytic"
    if isinstance(source, StateSpec) and has_closed_form(source):
        W, Wx, Wp = _analytic_fields(source, X, P)
    else:
        state = source if isinstance(source, QuantumState) else fock.build_state(source, cutoff or fock.DEFAULT_CUTOFF)
        used_cutoff = state.cutoff
        n_workers = workers if workers is not None else min(4, os.cpu_count() or 1)
        W, Wx, Wp = _numeric_fields(state, xs, ps, derivative=derivative, grid=True,
                                    backend=backend, workers=n_workers)
        kind = backend or _kernel.BACKEND
    phi = None
    if optimize_phi and task.task == "displacement":
        num = math.pi ** 2 * (Wx * Wx + Wp * Wp)
        phi = np.mod(np.arctan2(-Wp, Wx), math.pi)
    else:
        num = (math.pi * task.derivative(X, P, Wx, Wp)) ** 2
    den = 1.0 - (math.pi * W) ** 2
    values, flags = _ratio_field(num, den, task.eps)
    return PhaseSpaceGrid(grid, values, flags, grid_argmax(values, xs, ps), task, optimize_phi,
                          phi, used_cutoff, kind,
                          {"min_denominator": float(np.min(den)), "max_abs_piW": float(np.max(np.abs(math.pi * W)))})
