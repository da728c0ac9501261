"""Truncated Fock-space numerics.

Every state family is built as a vector (pure) or density matrix (mixed) on
the levels ``0 .. cutoff-1``.  Displacement and squeezing unitaries are
obtained by exponentiating the truncated generator with
:func:`scipy.linalg.expm`; the construction happens in a padded working space
and is then cut back to ``cutoff`` so that the reflection of amplitude at the
artificial boundary does not leak into the retained levels.

The probability weight left in the two highest retained levels is recorded
as ``tail_mass``.  It is the single convergence diagnostic used throughout
the package: a state whose tail exceeds the tolerance is either rejected
(:class:`~cvmetro.errors.NonConverged`) or flagged, never silently used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import (CutoffMismatch, DomainError, HermiticityError, NonConverged,
                     UnitarityError)
from .states import StateSpec

DEFAULT_CUTOFF = 80
DEFAULT_TAIL_TOL = 1e-10
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
MAX_CUTOFF = 4096


# ---------------------------------------------------------------------------
# Elementary matrices
# ---------------------------------------------------------------------------

def annihilation(cutoff: int) -> np.ndarray:
    """Matrix of ``a`` with ``<n-1|a|n> = sqrt(n)``."""
    _check_cutoff(cutoff)
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def creation(cutoff: int) -> np.ndarray:
    return annihilation(cutoff).conj().T


def number(cutoff: int) -> np.ndarray:
    _check_cutoff(cutoff)
    return np.diag(np.arange(cutoff, dtype=float)).astype(complex)


def position(cutoff: int) -> np.ndarray:
    a = annihilation(cutoff)
    return (a + a.conj().T) / math.sqrt(2.0)


def momentum(cutoff: int) -> np.ndarray:
    a = annihilation(cutoff)
    return (a - a.conj().T) / (1j * math.sqrt(2.0))


def quadrature(phi: float, cutoff: int) -> np.ndarray:
    """``r(phi) = x sin(phi) + p cos(phi)``; ``phi = pi/2`` gives ``x``."""
    return math.sin(phi) * position(cutoff) + math.cos(phi) * momentum(cutoff)


def parity(cutoff: int) -> np.ndarray:
    _check_cutoff(cutoff)
    return np.diag((-1.0) ** np.arange(cutoff)).astype(complex)


def displacement(alpha: complex, cutoff: int) -> np.ndarray:
    """``D(alpha) = exp(alpha a^dag - alpha^* a)`` on the truncated space."""
    a = annihilation(cutoff)
    alpha = complex(alpha)
    return expm(alpha * a.conj().T - alpha.conjugate() * a)


def squeeze(r: float, gamma: float, cutoff: int) -> np.ndarray:
    """``S(xi) = exp((xi^* a^2 - xi a^dag^2)/2)`` with ``xi = r e^{i gamma}``."""
    a = annihilation(cutoff)
    xi = r * np.exp(1j * gamma)
    a2 = a @ a
    return expm(0.5 * (np.conj(xi) * a2 - xi * a2.conj().T))


def rotation(theta: float, cutoff: int) -> np.ndarray:
    """``R(theta) = exp(-i theta n)``."""
    _check_cutoff(cutoff)
    return np.diag(np.exp(-1j * theta * np.arange(cutoff)))


def _check_cutoff(cutoff: int) -> None:
    if int(cutoff) != cutoff or cutoff < 2:
        raise DomainError(f"cutoff must be an integer >= 2, got {cutoff}")


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

_HERMITIAN_KINDS = {"number", "quadrature", "x", "p", "parity"}
_UNITARY_KINDS = {"displacement", "squeeze", "rotation"}


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A truncated operator together with the recipe that produced it."""

    matrix: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_hermitian(self) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=HERMITIAN_TOL, rtol=0))


def operator_matrix(kind: str, cutoff: int, **params) -> OperatorMatrix:
    """Build a named operator on ``cutoff`` Fock levels.

    ``kind`` is one of ``annihilate``, ``create``, ``number``, ``x``, ``p``,
    ``quadrature`` (``phi``), ``parity``, ``displacement`` (``alpha``),
    ``squeeze`` (``r``, ``gamma``), ``rotation`` (``theta``) or ``custom``
    (``matrix``).  Hermitian kinds are checked to 1e-12 and unitary kinds on
    the block that excludes the top two levels to 1e-10; failures raise.
    """
    _check_cutoff(cutoff)
    if kind == "annihilate":
        mat = annihilation(cutoff)
    elif kind == "create":
        mat = creation(cutoff)
    elif kind == "number":
        mat = number(cutoff)
    elif kind == "x":
        mat = position(cutoff)
    elif kind == "p":
        mat = momentum(cutoff)
    elif kind == "quadrature":
        mat = quadrature(float(_need(params, "phi", kind)), cutoff)
    elif kind == "parity":
        mat = parity(cutoff)
    elif kind == "displacement":
        mat = displacement(complex(_need(params, "alpha", kind)), cutoff)
    elif kind == "squeeze":
        r = float(_need(params, "r", kind))
        if r < 0:
            raise DomainError(f"squeezing r must be >= 0, got {r}")
        mat = squeeze(r, float(params.get("gamma", 0.0)), cutoff)
    elif kind == "rotation":
        mat = rotation(float(_need(params, "theta", kind)), cutoff)
    elif kind == "custom":
        mat = np.asarray(_need(params, "matrix", kind), dtype=complex)
        if mat.shape != (cutoff, cutoff):
            raise CutoffMismatch(f"custom matrix has shape {mat.shape}, expected {(cutoff, cutoff)}")
        params = {k: v for k, v in params.items() if k != "matrix"}
    else:
        raise DomainError(f"unknown operator kind {kind!r}")

    if kind in _HERMITIAN_KINDS:
        residue = float(np.max(np.abs(mat - mat.conj().T)))
        if residue > HERMITIAN_TOL:
            raise HermiticityError(f"{kind} matrix not Hermitian (residue {residue:.3e})")
    if kind in _UNITARY_KINDS:
        check_lower_block_unitary(mat, kind)
    mat = np.array(mat, dtype=complex)
    mat.setflags(write=False)
    return OperatorMatrix(mat, kind, dict(params))


def _need(params: dict, key: str, kind: str):
    if key not in params:
        raise DomainError(f"operator kind {kind!r} needs parameter {key!r}")
    return params[key]


def check_lower_block_unitary(mat: np.ndarray, kind: str = "unitary") -> float:
    """Return ``max |U^dag U - 1|`` on levels ``< N-2``; raise above 1e-10."""
    n = mat.shape[0]
    keep = max(n - 2, 1)
    block = (mat.conj().T @ mat)[:keep, :keep]
    residue = float(np.max(np.abs(block - np.eye(keep))))
    if residue > UNITARY_TOL:
        raise UnitarityError(f"{kind} matrix fails unitarity on the lower block "
                             f"(residue {residue:.3e})")
    return residue


def commutator_residue(cutoff: int) -> float:
    """``max |[a, a^dag] - 1|`` on the lower ``cutoff-2`` block."""
    a = annihilation(cutoff)
    comm = a @ a.conj().T - a.conj().T @ a
    keep = cutoff - 2
    return float(np.max(np.abs(comm[:keep, :keep] - np.eye(keep))))


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumState:
    """A truncated single-mode state.

    Exactly one of ``amplitudes`` (pure) or ``rho`` (mixed) is set.  The
    arrays are made read-only at construction.

    ``tail_mass`` is the population of the two highest retained levels.
    States whose populations skip levels (cats, compass states) can have an
    empty top pair while most of the state lies above the cutoff, so
    :func:`build_state` also records ``discarded_mass``, the population the
    cut removed from its larger working representation.
    """

    cutoff: int
    amplitudes: np.ndarray | None = None
    rho: np.ndarray | None = None
    tail_mass: float = 0.0
    tolerance: float = DEFAULT_TAIL_TOL
    spec: StateSpec | None = None
    discarded_mass: float = 0.0

    def __post_init__(self) -> None:
        if (self.amplitudes is None) == (self.rho is None):
            raise DomainError("give exactly one of amplitudes or rho")
        if self.amplitudes is not None:
            vec = np.array(self.amplitudes, dtype=complex)
            if vec.shape != (self.cutoff,):
                raise CutoffMismatch(f"amplitude vector has shape {vec.shape}")
            norm = float(np.vdot(vec, vec).real)
            if abs(norm - 1.0) > 1e-12:
                raise DomainError(f"pure state not normalised (norm^2 = {norm!r})")
            vec.setflags(write=False)
            object.__setattr__(self, "amplitudes", vec)
        else:
            rho = np.array(self.rho, dtype=complex)
            if rho.shape != (self.cutoff, self.cutoff):
                raise CutoffMismatch(f"density matrix has shape {rho.shape}")
            herm = float(np.max(np.abs(rho - rho.conj().T)))
            if herm > HERMITIAN_TOL:
                raise HermiticityError(f"density matrix not Hermitian (residue {herm:.3e})")
            rho = 0.5 * (rho + rho.conj().T)
            trace = float(np.trace(rho).real)
            if abs(trace - 1.0) > 1e-12:
                raise DomainError(f"density matrix trace {trace!r} != 1")
            lowest = float(np.linalg.eigvalsh(rho)[0])
            if lowest < -1e-10:
                raise DomainError(f"density matrix has negative eigenvalue {lowest:.3e}")
            rho.setflags(write=False)
            object.__setattr__(self, "rho", rho)

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_amplitudes(cls, vec: np.ndarray, *, normalize: bool = True,
                        tolerance: float = DEFAULT_TAIL_TOL,
                        spec: StateSpec | None = None,
                        discarded_mass: float = 0.0) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(vec.shape[0], amplitudes=vec, tail_mass=_tail(np.abs(vec) ** 2),
                   tolerance=tolerance, spec=spec, discarded_mass=discarded_mass)

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray, *, normalize: bool = True,
                            tolerance: float = DEFAULT_TAIL_TOL,
                            spec: StateSpec | None = None,
                            discarded_mass: float = 0.0) -> "QuantumState":
        rho = np.asarray(rho, dtype=complex)
        rho = 0.5 * (rho + rho.conj().T)
        if normalize:
            rho = rho / np.trace(rho).real
        return cls(rho.shape[0], rho=rho, tail_mass=_tail(np.diag(rho).real),
                   tolerance=tolerance, spec=spec, discarded_mass=discarded_mass)

    # -- accessors ------------------------------------------------------
    @property
    def kind(self) -> str:
        return "pure" if self.amplitudes is not None else "mixed"

    @property
    def is_pure(self) -> bool:
        return self.amplitudes is not None

    @property
    def converged(self) -> bool:
        return self.tail_mass <= self.tolerance and self.discarded_mass <= self.tolerance

    def density_matrix(self) -> np.ndarray:
        if self.rho is not None:
            return self.rho
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def populations(self) -> np.ndarray:
        if self.amplitudes is not None:
            return np.abs(self.amplitudes) ** 2
        return np.diag(self.rho).real.copy()

    def purity(self) -> float:
        if self.is_pure:
            return 1.0
        rho = self.rho
        return float(np.real(np.vdot(rho, rho)))

    def expect(self, op: np.ndarray | OperatorMatrix) -> complex:
        mat = _as_matrix(op, self.cutoff)
        if self.amplitudes is not None:
            return complex(np.vdot(self.amplitudes, mat @ self.amplitudes))
        return complex(np.einsum("ij,ji->", self.rho, mat))

    def embed(self, cutoff: int) -> "QuantumState":
        """Zero-pad (or cut and renormalise) to a different cutoff.

        Population removed by a cut is added to ``discarded_mass``.
        """
        _check_cutoff(cutoff)
        if cutoff == self.cutoff:
            return self
        k = min(cutoff, self.cutoff)
        discarded = self.discarded_mass + float(np.sum(self.populations()[k:]))
        if self.amplitudes is not None:
            vec = np.zeros(cutoff, dtype=complex)
            vec[:k] = self.amplitudes[:k]
            return QuantumState.from_amplitudes(vec, tolerance=self.tolerance, spec=self.spec,
                                                discarded_mass=discarded)
        rho = np.zeros((cutoff, cutoff), dtype=complex)
        rho[:k, :k] = self.rho[:k, :k]
        return QuantumState.from_density_matrix(rho, tolerance=self.tolerance, spec=self.spec,
                                                discarded_mass=discarded)

    def support(self, threshold: float = 1e-30) -> int:
        """Smallest dimension holding every level with population above ``threshold``."""
        pops = self.populations()
        idx = np.nonzero(pops > threshold)[0]
        return int(idx[-1]) + 1 if idx.size else 1


def _as_matrix(op: np.ndarray | OperatorMatrix, cutoff: int) -> np.ndarray:
    mat = op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op)
    if mat.shape != (cutoff, cutoff):
        raise CutoffMismatch(f"operator shape {mat.shape} does not match cutoff {cutoff}")
    return mat


def _tail(pops: np.ndarray) -> float:
    return float(np.sum(pops[-2:]))


def _working_dim(cutoff: int) -> int:
    return cutoff + max(24, cutoff // 2)


def build_state(spec: StateSpec, cutoff: int = DEFAULT_CUTOFF, *,
                tolerance: float = DEFAULT_TAIL_TOL, strict: bool = True) -> QuantumState:
    """Represent ``spec`` on ``cutoff`` Fock levels.

    With ``strict=True`` a tail mass above ``tolerance`` raises
    :class:`NonConverged`; otherwise the returned state carries
    ``converged == False``.
    """
    _check_cutoff(cutoff)
    work = _working_dim(cutoff)
    fam = spec.family
    rho = None
    vec = None
    if fam == "vacuum":
        vec = _basis(0, work)
    elif fam == "coherent":
        vec = displacement(spec.alpha, work) @ _basis(0, work)
    elif fam == "gaussian":
        u = displacement(spec.alpha, work) @ squeeze(spec.r, spec.gamma, work)
        if spec.n_t == 0:
            vec = u[:, 0]
        else:
            q = spec.n_t / (1.0 + spec.n_t)
            thermal = (1.0 - q) * q ** np.arange(work)
            rho = (u * thermal) @ u.conj().T
    elif fam == "fock":
        if spec.n >= cutoff:
            raise NonConverged(f"Fock level {spec.n} does not fit below cutoff {cutoff}", 1.0)
        vec = _basis(spec.n, work)
    elif fam == "fock_superposition":
        if spec.n >= cutoff:
            raise NonConverged(f"Fock level {spec.n} does not fit below cutoff {cutoff}", 0.5)
        vec = (_basis(spec.m, work) + np.exp(1j * spec.gamma) * _basis(spec.n, work)) / math.sqrt(2)
    elif fam == "cat":
        vac = _basis(0, work)
        plus = displacement(spec.alpha, work) @ vac
        minus = displacement(-spec.alpha, work) @ vac
        vec = spec.cat_norm * (plus + np.exp(1j * spec.gamma) * minus)
    elif fam == "compass":
        vac = _basis(0, work)
        vec = sum(displacement(ph * spec.alpha, work) @ vac for ph in (1, -1, 1j, -1j))
        vec = spec.compass_norm * vec
    else:  # pragma: no cover - StateSpec validates the family
        raise DomainError(fam)

    if vec is not None:
        pops = np.abs(np.asarray(vec)) ** 2
        discarded = float(np.sum(pops[cutoff:]) / np.sum(pops))
        state = QuantumState.from_amplitudes(np.asarray(vec)[:cutoff], tolerance=tolerance, spec=spec,
                                             discarded_mass=discarded)
    else:
        pops = np.diag(rho).real
        discarded = float(np.sum(pops[cutoff:]) / np.sum(pops))
        state = QuantumState.from_density_matrix(rho[:cutoff, :cutoff], tolerance=tolerance, spec=spec,
                                                 discarded_mass=discarded)
    if strict and not state.converged:
        worst = max(state.tail_mass, state.discarded_mass)
        raise NonConverged(
            f"{spec.label}: tail mass {state.tail_mass:.3e} (discarded {state.discarded_mass:.3e}) exceeds "
            f"{tolerance:.1e} at cutoff {cutoff}; raise the cutoff", worst)
    return state


def _basis(k: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def minimal_cutoff(spec: StateSpec, tolerance: float = DEFAULT_TAIL_TOL, start: int = 16) -> int:
    """Smallest cutoff on a doubling ladder starting at ``start`` that converges."""
    cutoff = max(start, 2)
    while cutoff <= MAX_CUTOFF:
        state = build_state(spec, cutoff, tolerance=tolerance, strict=False)
        if state.converged:
            return cutoff
        cutoff *= 2
    raise NonConverged(f"{spec.label}: no cutoff up to {MAX_CUTOFF} converges")


@dataclass(frozen=True)
class TruncationReport:
    cutoff: int
    tail_mass: float
    tolerance: float
    converged: bool
    suggested_cutoff: int


def truncation_report(state: QuantumState, tolerance: float | None = None) -> TruncationReport:
    """Tail mass of ``state`` and a cutoff that would bring it under ``tolerance``.

    The suggestion doubles the cutoff until the rebuilt state converges.  It
    needs the originating :class:`StateSpec`; states built by hand get
    ``2 * cutoff`` as a first guess.
    """
    tol = state.tolerance if tolerance is None else tolerance
    converged = state.tail_mass <= tol and state.discarded_mass <= tol
    suggested = state.cutoff
    if not converged:
        if state.spec is not None:
            suggested = state.cutoff * 2
            while suggested <= MAX_CUTOFF:
                trial = build_state(state.spec, suggested, tolerance=tol, strict=False)
                if trial.converged:
                    break
                suggested *= 2
        else:
            suggested = state.cutoff * 2
    return TruncationReport(state.cutoff, state.tail_mass, tol, converged, suggested)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    """Expectations and symmetrised covariances of a list of Hermitian operators."""

    labels: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.cov).copy()


def moments(state: QuantumState, ops: Sequence[OperatorMatrix | np.ndarray],
            labels: Iterable[str] | None = None) -> MomentTable:
    """``Gamma_ij = <M_i M_j + M_j M_i>/2 - <M_i><M_j>`` for Hermitian ``M_i``.

    Imaginary residues above ``1e-10`` (relative to the operator scale) mean
    an operator is not Hermitian and raise :class:`HermiticityError`.
    """
    mats = [_as_matrix(op, state.cutoff) for op in ops]
    if labels is None:
        labels = [op.kind if isinstance(op, OperatorMatrix) else f"M{k}" for k, op in enumerate(ops)]
    labels = tuple(labels)
    k = len(mats)
    if state.amplitudes is not None:
        psi = state.amplitudes
        images = np.stack([m @ psi for m in mats], axis=1) if k else np.zeros((state.cutoff, 0))
        means = images.T @ psi.conj()
        second = images.conj().T @ images
    else:
        rho = state.rho
        means = np.array([np.einsum("ij,ji->", rho, m) for m in mats])
        second = np.empty((k, k), dtype=complex)
        for i in range(k):
            left = rho @ mats[i]
            for j in range(k):
                # Tr[rho M_i M_j]
                second[i, j] = np.einsum("ij,ji->", left, mats[j])
    scale = max(1.0, float(np.max(np.abs(means))) if k else 1.0)
    if k and np.max(np.abs(means.imag)) > 1e-10 * scale:
        raise HermiticityError("expectation value has an imaginary part; operator not Hermitian")
    mean = means.real
    sym = 0.5 * (second + second.T).real  # Re<M_i M_j> is symmetric for Hermitian M
    cov = sym - np.outer(mean, mean)
    cov = 0.5 * (cov + cov.T)
    return MomentTable(labels, mean, cov)


def quadrature_moments(state: QuantumState) -> tuple[np.ndarray, np.ndarray]:
    """First-moment vector and covariance matrix of ``(x, p)``.

    Evaluated with two spare levels so that ``x|psi>`` and ``p|psi>`` are
    exact for a state supported below its cutoff.
    """
    padded = state.embed(state.cutoff + 2)
    table = moments(padded, [position(padded.cutoff), momentum(padded.cutoff)], ("x", "p"))
    return table.mean, table.cov


def number_moments_numeric(state: QuantumState) -> tuple[float, float]:
    """``(<n>, <n^2>)`` evaluated on the Fock populations."""
    pops = state.populations()
    ns = np.arange(state.cutoff, dtype=float)
    return float(pops @ ns), float(pops @ ns ** 2)
