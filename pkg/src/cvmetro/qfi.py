"""Quantum Fisher information.

Three independent routes are provided and cross-checked in the tests:

* the spectral formula on a truncated density matrix (the numerical oracle),
* ``4 Var G`` for pure states,
* closed forms on Gaussian descriptors, from plain displacements up to
  general Gaussian channels with thermal noise.

Generators act on the padded space ``cutoff + 2`` before the commutator is
taken, so that ``a^dag`` acting on the top retained level is not clipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import DomainError, NonConverged, NotPure
from .fock import OperatorMatrix, QuantumState, operator_matrix
from .gaussian import (OMEGA, ChannelPath, GaussianDescriptor, displacement_direction,
                       squeezing_symplectic, thermal_channel_path)
from .states import squeezing_for_nbar

PAD = 2
RECHECK_GROWTH = 1.25
RECHECK_TOL = 1e-6


@dataclass(frozen=True)
class Generator:
    """``r(phi) = x sin(phi) + p cos(phi)`` for displacements, ``n`` for rotations."""

    task: str
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.task not in ("displacement", "rotation"):
            raise DomainError(f"unknown task {self.task!r}")
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")

    @classmethod
    def displacement(cls, phi: float) -> "Generator":
        return cls("displacement", float(phi))

    @classmethod
    def rotation(cls) -> "Generator":
        return cls("rotation", 0.0)

    @property
    def u(self) -> np.ndarray:
        """Direction vector ``(sin phi, cos phi)``; undefined for rotations."""
        if self.task != "displacement":
            raise DomainError("rotation generator has no direction vector")
        return displacement_direction(self.phi)

    def operator(self, cutoff: int) -> OperatorMatrix:
        if self.task == "displacement":
            return operator_matrix("quadrature", cutoff, phi=self.phi)
        return operator_matrix("number", cutoff)

    def matrix(self, cutoff: int) -> np.ndarray:
        return self.operator(cutoff).matrix


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    optimizer: float | None = None
    cutoff: int | None = None
    details: dict = field(default_factory=dict, compare=False)

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# Spectral oracle
# ---------------------------------------------------------------------------

def _padded_rho(state: QuantumState) -> np.ndarray:
    n = state.cutoff + PAD
    rho = np.zeros((n, n), dtype=complex)
    rho[: state.cutoff, : state.cutoff] = state.density_matrix()
    return rho


def commutator_derivative(rho: np.ndarray, G: np.ndarray) -> np.ndarray:
    """``d rho / d theta = -i [G, rho]`` for ``rho(theta) = e^{-i theta G} rho e^{i theta G}``."""
    return -1j * (G @ rho - rho @ G)


@dataclass(frozen=True, eq=False)
class _Spectrum:
    evals: np.ndarray
    evecs: np.ndarray
    mask: np.ndarray  # pairs kept by the eigenvalue floor
    denom: np.ndarray

    @classmethod
    def of(cls, rho: np.ndarray, eig_floor: float | None) -> "_Spectrum":
        evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        evals = np.clip(evals, 0.0, None)
        floor = 1e-12 * float(evals[-1]) if eig_floor is None else float(eig_floor)
        if floor <= 0:
            raise DomainError("eig_floor must be positive")
        denom = evals[:, None] + evals[None, :]
        mask = denom > floor
        return cls(evals, evecs, mask, denom)

    def in_basis(self, mat: np.ndarray) -> np.ndarray:
        return self.evecs.conj().T @ mat @ self.evecs


def qfi_from_derivative(rho: np.ndarray, drho: np.ndarray, eig_floor: float | None = None) -> float:
    """``2 sum |<k|d rho|l>|^2 / (lambda_k + lambda_l)`` over the kept pairs.

    This is the general spectral form, valid for any (not necessarily
    unitary) path ``rho(theta)``.
    """
    sp = _Spectrum.of(rho, eig_floor)
    d = sp.in_basis(drho)
    vals = np.where(sp.mask, np.abs(d) ** 2 / np.where(sp.mask, sp.denom, 1.0), 0.0)
    return float(2.0 * vals.sum())


def _unitary_qfi_matrix(state: QuantumState, gens: list[np.ndarray],
                        eig_floor: float | None) -> np.ndarray:
    """``F_ij = 2 sum (l_k-l_m)^2/(l_k+l_m) Re(G_i,km G_j,mk)`` on the padded space."""
    sp = _Spectrum.of(_padded_rho(state), eig_floor)
    weight = np.where(sp.mask, (sp.evals[:, None] - sp.evals[None, :]) ** 2
                      / np.where(sp.mask, sp.denom, 1.0), 0.0)
    rot = [sp.in_basis(g) for g in gens]
    k = len(gens)
    out = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            out[i, j] = out[j, i] = 2.0 * float(np.sum(weight * (rot[i] * rot[j].conj()).real))
    return out


def _spectral_value(state: QuantumState, G: Generator, eig_floor: float | None) -> float:
    return float(_unitary_qfi_matrix(state, [G.matrix(state.cutoff + PAD)], eig_floor)[0, 0])


def qfi_spectral(state: QuantumState, G: Generator, eig_floor: float | None = None,
                 *, recheck: bool = True) -> QfiResult:
    """Spectral QFI of the unitary family generated by ``G``.

    ``eig_floor`` drops eigenvalue pairs with ``lambda_k + lambda_l`` below it
    (default ``1e-12 * lambda_max``).  When the state remembers its
    :class:`StateSpec`, the value is recomputed at a 25% larger cutoff and a
    shift above ``1e-6`` (relative to ``max(1, F)``) raises
    :class:`NonConverged`.
    """
    value = _spectral_value(state, G, eig_floor)
    details = {}
    if recheck and state.spec is not None:
        bigger = int(math.ceil(state.cutoff * RECHECK_GROWTH))
        other = fock.build_state(state.spec, bigger, tolerance=state.tolerance, strict=False)
        again = _spectral_value(other, G, eig_floor)
        shift = abs(again - value)
        details["recheck_cutoff"] = bigger
        details["recheck_shift"] = shift
        if shift > RECHECK_TOL * max(1.0, abs(value)):
            raise NonConverged(
                f"QFI moved by {shift:.3e} when the cutoff grew from {state.cutoff} to {bigger}", shift)
    return QfiResult(max(value, 0.0), "spectral", G.phi if G.task == "displacement" else None,
                     state.cutoff, details)


def qfi_pure(state: QuantumState, G: Generator) -> QfiResult:
    """``4 Var G`` for a pure state."""
    if not state.is_pure:
        raise NotPure("the variance formula needs a pure state; use qfi_spectral")
    n = state.cutoff + PAD
    psi = np.zeros(n, dtype=complex)
    psi[: state.cutoff] = state.amplitudes
    g_psi = G.matrix(n) @ psi
    mean = float(np.vdot(psi, g_psi).real)
    second = float(np.vdot(g_psi, g_psi).real)
    return QfiResult(max(4.0 * (second - mean * mean), 0.0), "pure_variance",
                     G.phi if G.task == "displacement" else None, state.cutoff)


# ---------------------------------------------------------------------------
# Gaussian closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisplacementEvolution:
    phi: float


@dataclass(frozen=True, eq=False)
class SymplecticEvolution:
    """Unitary generated by ``r^T H r / 2``; ``H = 1`` is a rotation."""

    H: np.ndarray = field(default_factory=lambda: np.eye(2))


@dataclass(frozen=True, eq=False)
class ChannelEvolution:
    path: ChannelPath


def _gaussian_channel_qfi(mean: np.ndarray, cov: np.ndarray, dmean: np.ndarray,
                          dcov: np.ndarray) -> float:
    det = float(np.linalg.det(cov))
    ddet = float(np.trace(np.linalg.inv(cov) @ dcov)) * det  # Jacobi's formula
    purity_gap = 16.0 * det * det - 1.0
    if purity_gap <= 1e-12:
        if abs(ddet) > 1e-9:
            raise DomainError("QFI diverges: purity changes at a pure state")
        first = 0.0
    else:
        first = 8.0 * ddet * ddet / purity_gap
    second = -4.0 * float(np.linalg.det(dcov)) / (4.0 * det + 1.0)
    third = float(dmean @ (OMEGA @ cov @ OMEGA.T) @ dmean) / det
    return first + second + third


def qfi_gaussian(desc: GaussianDescriptor,
                 evolution: DisplacementEvolution | SymplecticEvolution | ChannelEvolution) -> QfiResult:
    """Exact QFI of a Gaussian state under a Gaussian evolution."""
    desc.require_gaussian()
    G, m = desc.cov, desc.mean
    det = desc.det
    if isinstance(evolution, DisplacementEvolution):
        u = displacement_direction(evolution.phi)
        return QfiResult(float(u @ G @ u) / det, "gaussian_closed", evolution.phi)
    if isinstance(evolution, SymplecticEvolution):
        H = np.asarray(evolution.H, dtype=float)
        num = 4.0 * float(np.trace(G @ H)) ** 2 - 16.0 * det * float(np.linalg.det(H))
        value = num / (4.0 * det + 1.0) + float(m @ H @ G @ H @ m) / det
        return QfiResult(max(value, 0.0), "gaussian_closed")
    if isinstance(evolution, ChannelEvolution):
        p = evolution.path
        X, Y, d = p.channel.X, p.channel.Y, p.channel.d
        cov_t = X @ G @ X.T + Y
        dmean = p.dX @ m + p.dd
        dcov = p.dX @ G @ X.T + X @ G @ p.dX.T + p.dY
        value = _gaussian_channel_qfi(X @ m + d, cov_t, dmean, dcov)
        return QfiResult(max(value, 0.0), "gaussian_closed")
    raise DomainError(f"unsupported evolution {evolution!r}")


def gaussian_rotation_qfi(alpha: complex, r: float, gamma: float, n_t: float) -> float:
    """Rotation QFI of ``D(alpha) S(r e^{i gamma}) rho_th(n_t)`` in closed form."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    k = 2 * n_t + 1
    phase = math.atan2(alpha.imag, alpha.real) if alpha != 0 else 0.0
    return (4 * abs(alpha) ** 2 / k * (c - s * math.cos(2 * phase - gamma))
            + 2 * k * k * s * s / (2 * n_t * n_t + 2 * n_t + 1))


# ---------------------------------------------------------------------------
# Extremes over the displacement direction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisplacementExtremes:
    max: float
    min: float
    avg: float
    phi_max: float
    phi_min: float


def _angle_of(vec: np.ndarray) -> float:
    """``phi`` in ``[0, pi)`` with ``(sin phi, cos phi)`` parallel to ``vec``."""
    return math.atan2(vec[0], vec[1]) % math.pi


def _extremes_from_matrix(F: np.ndarray) -> DisplacementExtremes:
    evals, evecs = np.linalg.eigh(0.5 * (F + F.T))
    return DisplacementExtremes(float(evals[1]), float(evals[0]), float(0.5 * np.trace(F)),
                                _angle_of(evecs[:, 1]), _angle_of(evecs[:, 0]))


def displacement_qfi_matrix(state_or_desc: QuantumState | GaussianDescriptor,
                            eig_floor: float | None = None) -> np.ndarray:
    """2x2 matrix ``F`` with ``F_Q(phi) = u^T F u``.

    Gaussian descriptors give ``cov/det``; non-Gaussian descriptors describe
    pure states and give ``4 cov``; Fock-space states use the spectral form
    with ``x`` and ``p`` as generators, which also covers mixed states.
    """
    if isinstance(state_or_desc, GaussianDescriptor):
        d = state_or_desc
        return 4.0 * d.cov if d.non_gaussian else d.cov / d.det
    state = state_or_desc
    n = state.cutoff + PAD
    return _unitary_qfi_matrix(state, [fock.position(n), fock.momentum(n)], eig_floor)


def qfi_displacement_extremal(state_or_desc: QuantumState | GaussianDescriptor,
                              eig_floor: float | None = None) -> DisplacementExtremes:
    """Largest, smallest and direction-averaged displacement QFI."""
    return _extremes_from_matrix(displacement_qfi_matrix(state_or_desc, eig_floor))


def pure_displacement_bound(nbar: float) -> float:
    """``2(1 + 2 nbar + 2 sqrt(nbar(nbar+1)))``, reached by squeezed vacuum."""
    return 2.0 * (1.0 + 2.0 * nbar + 2.0 * math.sqrt(nbar * (nbar + 1.0)))


def rotation_bound(nbar: float) -> float:
    """``8 nbar (nbar + 1)``, the squeezed-vacuum rotation QFI."""
    return 8.0 * nbar * (nbar + 1.0)


# ---------------------------------------------------------------------------
# Thermal noise
# ---------------------------------------------------------------------------

def _check_noise_args(nbar: float, nb: float, kt: float) -> None:
    for name, v in (("nbar", nbar), ("n_b", nb), ("kappa t", kt)):
        if not (math.isfinite(v) and v >= 0):
            raise DomainError(f"{name} must be finite and >= 0, got {v}")


def qfi_noisy(task: str, nbar: float, nb: float, kt: float) -> QfiResult:
    """Closed-form QFI of squeezed vacuum (``nbar`` photons) under thermal loss.

    For displacements the squeezed axis is aligned with the signal and the
    result is ``1/(E lambda_min + y)`` with ``E = e^{-kt}``,
    ``lambda_min = e^{-2r}/2`` and ``y = (1-E)(nb+1/2)``, written in terms of
    ``nbar``.  Rotations use the corresponding expression for ``n``.
    """
    _check_noise_args(nbar, nb, kt)
    if task == "displacement":
        K = 1.0 + 2.0 * nbar + 2.0 * math.sqrt(nbar * (nbar + 1.0))
        E = math.exp(-kt)
        value = 2.0 * K / (E + (1.0 - E) * (1.0 + 2.0 * nb) * K)
        return QfiResult(value, "noisy_closed", 0.0, details={"nbar": nbar, "nb": nb, "kt": kt})
    if task == "rotation":
        e1 = math.exp(kt)
        den = (2 * nb * nb - 2 * e1 * nb * (1 + 2 * nb) + e1 * e1 * (1 + 2 * nb * (1 + nb))
               + 2 * (e1 - 1) * (1 + 2 * nb) * nbar)
        return QfiResult(8.0 * nbar * (1.0 + nbar) / den, "noisy_closed",
                         details={"nbar": nbar, "nb": nb, "kt": kt})
    raise DomainError(f"unknown task {task!r}")


def squeezed_vacuum_descriptor(nbar: float) -> GaussianDescriptor:
    """Squeezed vacuum with ``nbar`` photons, squeezed along ``x`` (gamma = 0)."""
    r = squeezing_for_nbar(nbar)
    S = squeezing_symplectic(r, 0.0).S
    return GaussianDescriptor(np.zeros(2), 0.5 * S @ S.T, label=f"squeezed vacuum nbar={nbar!r}")


def qfi_noisy_channel(task: str, nbar: float, nb: float, kt: float, theta: float = 0.0) -> QfiResult:
    """Same physical setting as :func:`qfi_noisy`, evaluated through the channel formula.

    The displacement is generated along ``phi = 0`` (``u = (0, 1)``, the
    anti-squeezed axis), which is the optimal orientation.
    """
    _check_noise_args(nbar, nb, kt)
    desc = squeezed_vacuum_descriptor(nbar)
    if task == "displacement":
        path = thermal_channel_path("displacement", kt, nb, theta=theta, phi=0.0)
    elif task == "rotation":
        path = thermal_channel_path("symplectic", kt, nb, theta=theta, hamiltonian=np.eye(2))
    else:
        raise DomainError(f"unknown task {task!r}")
    res = qfi_gaussian(desc, ChannelEvolution(path))
    return QfiResult(res.value, "gaussian_closed", 0.0 if task == "displacement" else None)


# ---------------------------------------------------------------------------
# Symmetric logarithmic derivative
# ---------------------------------------------------------------------------

def sld_operator(state: QuantumState, G: Generator, eig_floor: float | None = None) -> OperatorMatrix:
    """SLD ``L`` solving ``d rho = (L rho + rho L)/2``.

    The operator lives on ``cutoff + 2`` levels (the padded space used for
    the commutator); embed the state with ``state.embed(L.cutoff)`` before
    taking expectations.
    """
    rho = _padded_rho(state)
    drho = commutator_derivative(rho, G.matrix(rho.shape[0]))
    sp = _Spectrum.of(rho, eig_floor)
    d = sp.in_basis(drho)
    L_eig = np.where(sp.mask, 2.0 * d / np.where(sp.mask, sp.denom, 1.0), 0.0)
    L = sp.evecs @ L_eig @ sp.evecs.conj().T
    L = 0.5 * (L + L.conj().T)
    return operator_matrix("custom", rho.shape[0], matrix=L)

