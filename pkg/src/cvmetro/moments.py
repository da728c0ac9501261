"""Method-of-moments sensitivities.

The central quantity is ``chi^-2 = |d<M>/dtheta|^2 / Var M``.  For a family of
observables the best linear combination gives ``C^T Gamma^-1 C`` where ``C``
holds the derivatives and ``Gamma`` the symmetrised covariance of the set.

Fock-space evaluations here never multiply truncated matrices near their
edge: every polynomial observable of degree ``k`` is applied on a padded
space of dimension ``cutoff + 2k + 2``, which keeps ``M |psi>`` exact for
states supported below ``cutoff``.  Mixed states are handled as the
ensemble of their eigenvectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import fock
from .errors import (CutoffMismatch, DomainError, MisalignedConfiguration, NotDichotomic,
                     NotPure, SingularCovariance, SingularObservableCovariance,
                     SingularSchurComplement)
from .fock import OperatorMatrix, QuantumState
from .gaussian import (OMEGA, GaussianDescriptor, displacement_direction, number_variance,
                       squeezing_symplectic)
from .qfi import Generator

PINV_RCOND = 1e-10
DEGENERATE_TOL = 1e-14
MAX_DEFAULT_ORDER = 4
FOCK_LIMIT_ALPHA = 1e-4


@dataclass(frozen=True)
class MomentSensitivity:
    """A finite method-of-moments sensitivity.

    ``optimal_coefficients`` are the (unnormalised) weights ``Gamma^-1 C`` of
    the best observable in the span, when an optimisation took place, and
    ``optimal_angle`` is the optimal quadrature angle where one applies.
    """

    value: float
    optimal_coefficients: np.ndarray | None = None
    optimal_angle: float | None = None
    labels: tuple[str, ...] | None = None
    details: dict = field(default_factory=dict, compare=False)

    indeterminate = False

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class IndeterminateSensitivity:
    """Both the signal and the variance vanish, so ``chi^-2`` is ``0/0``.

    The limit depends on how the point is approached.  :meth:`regularize`
    adds a noise floor ``eps`` to the variance and returns a finite value.
    """

    numerator: float
    variance: float
    reason: str = ""

    indeterminate = True

    def regularize(self, eps: float) -> MomentSensitivity:
        if eps <= 0:
            raise DomainError("a positive noise floor is needed to resolve an indeterminate point")
        return MomentSensitivity(self.numerator / (self.variance + eps), details={"eps": eps})


def _ratio(numerator: float, variance: float, noise: float = 0.0,
           reason: str = "") -> MomentSensitivity | IndeterminateSensitivity:
    if noise < 0:
        raise DomainError("noise must be >= 0")
    denom = variance + noise
    if denom < DEGENERATE_TOL:
        if numerator < DEGENERATE_TOL:
            return IndeterminateSensitivity(numerator, variance, reason)
        raise SingularCovariance("observable has zero variance but a nonzero signal")
    return MomentSensitivity(numerator / denom)


# ---------------------------------------------------------------------------
# Padded ensemble evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Ensemble:
    """Weighted pure components of a state, zero-padded to ``dim``."""

    weights: np.ndarray
    vectors: np.ndarray  # dim x K

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def of(cls, state: QuantumState, dim: int) -> "_Ensemble":
        if dim < state.cutoff:
            raise CutoffMismatch(f"cannot embed cutoff {state.cutoff} into dimension {dim}")
        if state.is_pure:
            vecs = state.amplitudes[:, None]
            weights = np.ones(1)
        else:
            evals, evecs = np.linalg.eigh(state.rho)
            keep = evals > 0
            weights, vecs = evals[keep], evecs[:, keep]
        out = np.zeros((dim, vecs.shape[1]), dtype=complex)
        out[: state.cutoff] = vecs
        return cls(weights, out)

    def apply(self, mat: np.ndarray) -> np.ndarray:
        return mat @ self.vectors

    def inner(self, left: np.ndarray, right: np.ndarray) -> complex:
        """``sum_k w_k <left_k|right_k>``."""
        return complex(np.einsum("k,ik,ik->", self.weights, left.conj(), right))


def _padded_dim(state: QuantumState, order: int) -> int:
    return state.cutoff + 2 * max(order, 1) + 2


@dataclass(frozen=True)
class _MomentData:
    mean: np.ndarray
    cov: np.ndarray
    C: np.ndarray


def _moment_data(ens: _Ensemble, mats: Sequence[np.ndarray], G: np.ndarray) -> _MomentData:
    images = [ens.apply(m) for m in mats]
    g_img = ens.apply(G)
    k = len(mats)
    mean = np.array([ens.inner(ens.vectors, im).real for im in images])
    second = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            second[i, j] = second[j, i] = ens.inner(images[i], images[j]).real
    cov = second - np.outer(mean, mean)
    C = np.array([2.0 * ens.inner(im, g_img).imag for im in images])
    return _MomentData(mean, 0.5 * (cov + cov.T), C)


# ---------------------------------------------------------------------------
# Observable sets
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _xp(dim: int) -> tuple[np.ndarray, np.ndarray]:
    return fock.position(dim), fock.momentum(dim)


@lru_cache(maxsize=512)
def _word_matrix(word: str, dim: int) -> np.ndarray:
    x, p = _xp(dim)
    out = np.eye(dim, dtype=complex)
    for ch in word:
        out = out @ (x if ch == "x" else p)
    out.setflags(write=False)
    return out


def _symmetrized_words(order: int) -> list[tuple[str, tuple[str, ...]]]:
    """All monomials of one order, each as the average of its distinct orderings."""
    out = []
    for n_p in range(order + 1):
        words = sorted({"".join(w) for w in itertools.permutations("x" * (order - n_p) + "p" * n_p)})
        label = "x" * (order - n_p) + "p" * n_p
        out.append((label if len(words) == 1 else f"sym({label})", tuple(words)))
    return out


@lru_cache(maxsize=32)
def _assemble(words: tuple[tuple[str, ...], ...], dim: int) -> tuple[np.ndarray, ...]:
    """Symmetrised monomials on ``dim`` levels, built once per (set, dimension)."""
    out = []
    for ws in words:
        mat = sum(_word_matrix(w, dim) for w in ws) / len(ws)
        mat.setflags(write=False)
        out.append(mat)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """An ordered list of Hermitian observables.

    Built-in sets are polynomials in ``x`` and ``p`` stored as averages of
    operator words, so they can be rebuilt exactly on any padded dimension.
    Custom sets wrap fixed matrices.
    """

    labels: tuple[str, ...]
    words: tuple[tuple[str, ...], ...] | None = None
    matrices: tuple[np.ndarray, ...] | None = None
    order: int = 1

    @classmethod
    def quadrature_moments(cls, m: int, *, max_order: int = MAX_DEFAULT_ORDER) -> "ObservableSet":
        """``Q^(m)``: every symmetrised quadrature monomial of order 1..m.

        Orders above ``max_order`` are refused; raise the ceiling explicitly
        when the extra cost (and padding) is wanted.
        """
        if m < 1:
            raise DomainError("order must be >= 1")
        if m > max_order:
            raise DomainError(f"order {m} exceeds the ceiling {max_order}; pass max_order to allow it")
        labels, words = [], []
        for k in range(1, m + 1):
            for label, ws in _symmetrized_words(k):
                labels.append(label)
                words.append(ws)
        return cls(tuple(labels), tuple(words), None, m)

    @classmethod
    def linear(cls) -> "ObservableSet":
        return cls.quadrature_moments(1)

    @classmethod
    def custom(cls, ops: Sequence[OperatorMatrix | np.ndarray], labels: Sequence[str] | None = None) -> "ObservableSet":
        mats = tuple(np.asarray(op.matrix if isinstance(op, OperatorMatrix) else op, dtype=complex) for op in ops)
        if not mats:
            raise DomainError("observable set is empty")
        dim = mats[0].shape[0]
        for m in mats:
            if m.shape != (dim, dim):
                raise CutoffMismatch("custom observables must share one dimension")
            if np.max(np.abs(m - m.conj().T)) > fock.HERMITIAN_TOL:
                raise DomainError("custom observables must be Hermitian")
        if labels is None:
            labels = [f"M{i}" for i in range(len(mats))]
        return cls(tuple(labels), None, mats, 0)

    def __len__(self) -> int:
        return len(self.labels)

    def build(self, dim: int) -> list[np.ndarray]:
        if self.matrices is not None:
            if self.matrices[0].shape[0] != dim:
                raise CutoffMismatch(f"observable set has dimension {self.matrices[0].shape[0]}, not {dim}")
            return list(self.matrices)
        return list(_assemble(self.words, dim))

    def working_dim(self, state: QuantumState) -> int:
        if self.matrices is not None:
            return self.matrices[0].shape[0]
        return _padded_dim(state, self.order)


def _generator_matrix(G: Generator, dim: int) -> np.ndarray:
    return G.matrix(dim)


def set_moments(state: QuantumState, G: Generator, obs: ObservableSet) -> _MomentData:
    dim = obs.working_dim(state)
    ens = _Ensemble.of(state, dim)
    return _moment_data(ens, obs.build(dim), _generator_matrix(G, dim))


# ---------------------------------------------------------------------------
# Generic sensitivities
# ---------------------------------------------------------------------------

def chi2(state: QuantumState, G: Generator, M: OperatorMatrix | np.ndarray, *,
         noise: float = 0.0) -> MomentSensitivity | IndeterminateSensitivity:
    """``|<[M, G]>|^2 / (Var M + noise)`` for a single observable ``M``.

    ``M`` may be given on a larger dimension than the state's cutoff, in
    which case the state is zero-padded; giving it with two spare levels
    avoids truncation artefacts in the commutator.
    """
    mat = np.asarray(M.matrix if isinstance(M, OperatorMatrix) else M, dtype=complex)
    data = _moment_data(_Ensemble.of(state, mat.shape[0]), [mat], _generator_matrix(G, mat.shape[0]))
    return _ratio(float(data.C[0] ** 2), float(data.cov[0, 0]), noise)


def _optimal_from(data: _MomentData, labels: tuple[str, ...]) -> MomentSensitivity:
    cov, C = data.cov, data.C
    if not np.any(cov) and not np.any(C):
        return MomentSensitivity(0.0, np.zeros_like(C), labels=labels)
    pinv = np.linalg.pinv(cov, rcond=PINV_RCOND, hermitian=True)
    coeff = pinv @ C
    residual = float(np.linalg.norm(cov @ coeff - C))
    if residual > 1e-6 * max(1.0, float(np.linalg.norm(C))):
        raise SingularObservableCovariance(
            f"derivative vector leaves the range of the covariance (residual {residual:.3e})")
    return MomentSensitivity(float(C @ coeff), coeff, labels=labels,
                             details={"rank": int(np.linalg.matrix_rank(cov, tol=PINV_RCOND * np.max(np.abs(cov))))})


def chi2_optimal_linear(state: QuantumState, G: Generator, obs: ObservableSet) -> MomentSensitivity:
    """``C^T Gamma^+ C`` over the span of ``obs`` and the coefficients ``Gamma^+ C``.

    The pseudo-inverse (relative threshold 1e-10) absorbs the exact linear
    dependences that symmetric states impose on moment sets, such as
    ``x^2 + p^2 = 2n + 1`` on Fock states.
    """
    return _optimal_from(set_moments(state, G, obs), obs.labels)


def chi2_order(state: QuantumState, G: Generator, m: int) -> MomentSensitivity:
    """Nonlinear squeezing parameter of order ``m`` (optimum over ``Q^(m)``)."""
    return chi2_optimal_linear(state, G, ObservableSet.quadrature_moments(m))


def combined_observable(obs: ObservableSet, coefficients: np.ndarray, dim: int) -> np.ndarray:
    return sum(c * m for c, m in zip(coefficients, obs.build(dim)))


# ---------------------------------------------------------------------------
# Homodyne detection for displacements
# ---------------------------------------------------------------------------

def _second_moments(state_or_desc: QuantumState | GaussianDescriptor) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(state_or_desc, GaussianDescriptor):
        return state_or_desc.mean, state_or_desc.cov
    return fock.quadrature_moments(state_or_desc)


def measurement_direction(eps: float) -> np.ndarray:
    """``w = (sin eps, cos eps)`` for the quadrature ``r(eps)``."""
    return displacement_direction(eps)


def _angle_of(vec: np.ndarray) -> float:
    return math.atan2(vec[0], vec[1]) % math.pi


def chi2_homodyne(state_or_desc: QuantumState | GaussianDescriptor, phi: float,
                  eps: float) -> MomentSensitivity:
    """``sin^2(eps - phi) / (w^T Gamma w)``: quadrature ``r(eps)`` under displacement ``r(phi)``."""
    _, cov = _second_moments(state_or_desc)
    w = measurement_direction(eps)
    return MomentSensitivity(math.sin(eps - phi) ** 2 / float(w @ cov @ w), optimal_angle=eps)


@dataclass(frozen=True)
class Extremes:
    max: float
    min: float
    avg: float
    argmax: float | None = None
    argmin: float | None = None


def chi2_homodyne_fixed(state_or_desc: QuantumState | GaussianDescriptor, eps: float) -> Extremes:
    """Best, worst and average over the displacement angle at fixed ``eps``."""
    _, cov = _second_moments(state_or_desc)
    w = measurement_direction(eps)
    top = 1.0 / float(w @ cov @ w)
    return Extremes(top, 0.0, 0.5 * top, argmax=(eps + 0.5 * math.pi) % math.pi, argmin=eps % math.pi)


def chi2_homodyne_max_max(state_or_desc: QuantumState | GaussianDescriptor) -> MomentSensitivity:
    """``1/lambda_min(Gamma)``, measuring along the least-noisy quadrature."""
    _, cov = _second_moments(state_or_desc)
    evals, evecs = np.linalg.eigh(cov)
    return MomentSensitivity(1.0 / float(evals[0]), optimal_angle=_angle_of(evecs[:, 0]))


def chi2_homodyne_optimal(state_or_desc: QuantumState | GaussianDescriptor, phi: float) -> MomentSensitivity:
    """Homodyne sensitivity with the measurement angle optimised: ``u^T Gamma u / det Gamma``.

    The optimal measurement direction is ``w ∝ Gamma^-1 OMEGA u``.
    """
    _, cov = _second_moments(state_or_desc)
    det = float(np.linalg.det(cov))
    if det <= 0:
        raise SingularCovariance("covariance matrix is singular")
    u = displacement_direction(phi)
    w = np.linalg.solve(cov, OMEGA @ u)
    return MomentSensitivity(float(u @ cov @ u) / det, optimal_angle=_angle_of(w))


def chi2_homodyne_optimal_extremes(state_or_desc: QuantumState | GaussianDescriptor) -> Extremes:
    _, cov = _second_moments(state_or_desc)
    evals, evecs = np.linalg.eigh(cov)
    det = float(evals[0] * evals[1])
    return Extremes(1.0 / float(evals[0]), 1.0 / float(evals[1]), 0.5 * float(np.trace(cov)) / det,
                    argmax=_angle_of(evecs[:, 1]), argmin=_angle_of(evecs[:, 0]))


# ---------------------------------------------------------------------------
# Photon counting
# ---------------------------------------------------------------------------

def _number_data(state: QuantumState) -> tuple[np.ndarray, float]:
    mean, _ = fock.quadrature_moments(state)
    pops = state.populations()
    ns = np.arange(state.cutoff, dtype=float)
    # centred sum: <n^2> - <n>^2 cancels catastrophically near number eigenstates
    centred = ns - float(pops @ ns)
    return mean, float(pops @ centred ** 2)


def _displaced(state: QuantumState, alpha: float) -> QuantumState:
    dim = state.cutoff + 40
    D = fock.displacement(alpha, dim)
    ens = _Ensemble.of(state, dim)
    vecs = D @ ens.vectors
    rho = (vecs * ens.weights) @ vecs.conj().T
    rho = rho[: state.cutoff + 20, : state.cutoff + 20]
    if state.is_pure:
        return QuantumState.from_amplitudes(vecs[: state.cutoff + 20, 0], tolerance=state.tolerance)
    return QuantumState.from_density_matrix(rho, tolerance=state.tolerance)


def chi2_number(state_or_desc: QuantumState | GaussianDescriptor, phi: float | None = None,
                *, limit: bool = True) -> MomentSensitivity | Extremes | IndeterminateSensitivity:
    """Displacement sensitivity of a photon-number measurement.

    With ``phi`` the value ``(u^T OMEGA <r>)^2 / Var n`` is returned;
    without it the extremes over ``phi`` (``|<r>|^2/Var n``, 0 and half the
    maximum).  Number eigenstates make both numerator and variance vanish;
    with ``limit=True`` the value is taken as the ``alpha -> 0`` limit of the
    displaced state, evaluated at ``alpha = 1e-4`` and ``2e-4`` and
    Richardson-extrapolated (the error is quadratic in ``alpha``).
    """
    if isinstance(state_or_desc, GaussianDescriptor):
        mean, var_n = state_or_desc.mean, number_variance(state_or_desc)
    else:
        mean, var_n = _number_data(state_or_desc)
    signal = float(mean @ mean)
    if var_n < DEGENERATE_TOL and signal < DEGENERATE_TOL:
        if not limit or isinstance(state_or_desc, GaussianDescriptor):
            return IndeterminateSensitivity(signal, var_n, "number eigenstate")
        vals = []
        for a in (FOCK_LIMIT_ALPHA, 2 * FOCK_LIMIT_ALPHA):
            m_a, v_a = _number_data(_displaced(state_or_desc, a))
            vals.append(float(m_a @ m_a) / v_a)
        top = (4 * vals[0] - vals[1]) / 3
        direction = None
        if phi is not None:
            # a rotationally symmetric eigenstate of n responds equally to every direction
            return MomentSensitivity(top, details={"limit": "alpha->0", "samples": vals})
        return Extremes(top, 0.0, 0.5 * top, direction, None)
    if phi is not None:
        u = displacement_direction(phi)
        return MomentSensitivity(float(u @ OMEGA @ mean) ** 2 / var_n)
    top = signal / var_n
    best = OMEGA @ mean
    return Extremes(top, 0.0, 0.5 * top, _angle_of(best) if signal > 0 else None, None)


# ---------------------------------------------------------------------------
# Homodyne detection for rotations
# ---------------------------------------------------------------------------

def rotation_homodyne(state_or_desc: QuantumState | GaussianDescriptor, eps: float) -> MomentSensitivity:
    """``(w^T OMEGA <r>)^2 / (w^T Gamma w)``."""
    mean, cov = _second_moments(state_or_desc)
    w = measurement_direction(eps)
    return MomentSensitivity(float(w @ OMEGA @ mean) ** 2 / float(w @ cov @ w), optimal_angle=eps)


def rotation_homodyne_optimal(state_or_desc: QuantumState | GaussianDescriptor) -> MomentSensitivity:
    """``<r>^T Gamma <r> / det Gamma`` with ``w ∝ Gamma^-1 OMEGA <r>``."""
    mean, cov = _second_moments(state_or_desc)
    det = float(np.linalg.det(cov))
    if det <= 0:
        raise SingularCovariance("covariance matrix is singular")
    value = float(mean @ cov @ mean) / det
    if float(mean @ mean) == 0.0:
        return MomentSensitivity(value)
    w = np.linalg.solve(cov, OMEGA @ mean)
    return MomentSensitivity(value, optimal_angle=_angle_of(w))


def rotation_homodyne_aligned(state_or_desc: QuantumState | GaussianDescriptor) -> MomentSensitivity:
    """``|<r>|^2 / lambda_min``: the optimum if the mean were turned onto the widest axis."""
    mean, cov = _second_moments(state_or_desc)
    return MomentSensitivity(float(mean @ mean) / float(np.linalg.eigvalsh(cov)[0]))


@dataclass(frozen=True)
class SecondOrderRotation:
    first: float
    second: float
    coefficients: np.ndarray | None = None

    @property
    def value(self) -> float:
        return self.first + self.second


def _block_second_order(data: _MomentData) -> SecondOrderRotation:
    Gr, B, G2 = data.cov[:2, :2], data.cov[:2, 2:], data.cov[2:, 2:]
    Cr, C2 = data.C[:2], data.C[2:]
    Gr_inv = np.linalg.inv(Gr)
    first = float(Cr @ Gr_inv @ Cr)
    sigma = G2 - B.T @ Gr_inv @ B
    D = C2 - B.T @ Gr_inv @ Cr
    sigma_pinv = np.linalg.pinv(sigma, rcond=PINV_RCOND, hermitian=True)
    sol = sigma_pinv @ D
    if np.linalg.norm(sigma @ sol - D) > 1e-6 * max(1.0, float(np.linalg.norm(D))):
        raise SingularSchurComplement("second-order derivative vector leaves the range of the Schur complement")
    second = float(D @ sol)
    coeff = np.linalg.pinv(data.cov, rcond=PINV_RCOND, hermitian=True) @ data.C
    return SecondOrderRotation(first, max(second, 0.0), coeff)


def rotation_second_order(state_or_desc: QuantumState | GaussianDescriptor) -> SecondOrderRotation:
    """Rotation sensitivity from moments up to second order, split into its two blocks.

    The first term is the optimal linear homodyne value; the second is the
    gain from ``x^2``, ``(xp+px)/2`` and ``p^2``.  A pure Gaussian descriptor
    is evaluated in closed form from ``<x>``, ``<p>``, ``Var x`` and
    ``Cov(x,p)``; any Fock-space state goes through the block inversion.
    """
    if isinstance(state_or_desc, GaussianDescriptor):
        return _pure_gaussian_second_order(state_or_desc)
    data = set_moments(state_or_desc, Generator.rotation(), ObservableSet.quadrature_moments(2))
    return _block_second_order(data)


def _pure_gaussian_second_order(desc: GaussianDescriptor) -> SecondOrderRotation:
    desc.require_gaussian()
    if abs(desc.det - 0.25) > 1e-10:
        raise NotPure("the closed form holds for pure Gaussian states; use a Fock-space state")
    ar, ai = desc.mean / math.sqrt(2)
    sx2, c = float(desc.cov[0, 0]), float(desc.cov[0, 1])
    q = 4 * c * c + 1
    first = 8 * ar * ar * sx2 + 2 * ai * ai * q / sx2 + 16 * ai * ar * c
    second = q * q / (8 * sx2 * sx2) + 4 * c * c + 2 * sx2 * sx2 - 1
    return SecondOrderRotation(first, second)


# ---------------------------------------------------------------------------
# Measurement after interaction
# ---------------------------------------------------------------------------

def _is_eigenvector(cov: np.ndarray, v: np.ndarray) -> bool:
    lam = float(v @ cov @ v)
    return float(np.linalg.norm(cov @ v - lam * v)) <= 1e-8 * max(1.0, float(np.max(np.abs(cov))))


def mai_sensitivity(state_or_desc: QuantumState | GaussianDescriptor, phi: float, eps: float,
                    r: float, gamma: float, sigma: float) -> MomentSensitivity:
    """Homodyne sensitivity when squeezing ``S(r e^{i gamma})`` precedes the measurement.

    ``(u^T OMEGA S w)^2 / (w^T S^T Gamma S w + sigma^2)`` where ``sigma`` is
    the standard deviation of additive detection noise.  ``u`` and ``w`` must
    be orthogonal eigenvectors of the covariance matrix.
    """
    if sigma < 0 or r < 0:
        raise DomainError("r and sigma must be >= 0")
    _, cov = _second_moments(state_or_desc)
    u, w = displacement_direction(phi), measurement_direction(eps)
    if not (_is_eigenvector(cov, u) and _is_eigenvector(cov, w)) or abs(float(u @ w)) > 1e-8:
        raise MisalignedConfiguration("generator and measurement directions must be orthogonal "
                                      "eigenvectors of the covariance matrix")
    S = squeezing_symplectic(r, gamma).S
    Sw = S @ w
    value = float(u @ OMEGA @ Sw) ** 2 / (float(Sw @ cov @ Sw) + sigma * sigma)
    return MomentSensitivity(value, optimal_angle=eps, details={"r": r, "gamma": gamma, "sigma": sigma})


def mai_closed_form(lam_min: float, lam_max: float, r: float, chi: float, sigma: float) -> float:
    """``1/(lam_min + (s_u/s_w)^2 lam_max + sigma^2/s_w^2)``.

    ``chi`` is the angle between the squeezing axes and the measurement
    basis; ``s_w = cosh r + cos(2chi) sinh r`` and ``s_u = -sin(2chi) sinh r``.
    """
    s_w = math.cosh(r) + math.cos(2 * chi) * math.sinh(r)
    s_u = -math.sin(2 * chi) * math.sinh(r)
    return 1.0 / (lam_min + (s_u / s_w) ** 2 * lam_max + sigma * sigma / (s_w * s_w))


def mai_optimal(state_or_desc: QuantumState | GaussianDescriptor, r: float, sigma: float) -> MomentSensitivity:
    """Generator on the widest axis, measurement on the narrowest, ``gamma = -2 eps``.

    Returns ``1/(lambda_min + e^{-2r} sigma^2)``.
    """
    _, cov = _second_moments(state_or_desc)
    evals, evecs = np.linalg.eigh(cov)
    eps = _angle_of(evecs[:, 0])
    phi = _angle_of(evecs[:, 1])
    res = mai_sensitivity(state_or_desc, phi, eps, r, -2 * eps, sigma)
    return MomentSensitivity(res.value, optimal_angle=eps, details={"phi": phi, "gamma": -2 * eps})


def mai_fock(state: QuantumState, phi: float, eps: float, r: float, gamma: float, sigma: float,
             *, extra: int = 160) -> MomentSensitivity:
    """Fock-space evaluation of the squeezed-then-measured quadrature.

    ``M = S^dag r(eps) S`` is never formed as a matrix.  Instead ``S`` acts
    on ``|psi>`` and ``G|psi>`` in a space ``extra`` levels larger than the
    cutoff, where the squeezed vectors are converged.
    """
    if not state.is_pure:
        raise NotPure("the transformed-observable simulation expects a pure state")
    dim = state.cutoff + extra
    psi = np.zeros(dim, dtype=complex)
    psi[: state.cutoff] = state.amplitudes
    S = fock.squeeze(r, gamma, dim)
    R = fock.quadrature(eps, dim)
    G = fock.quadrature(phi, dim)
    s_psi = S @ psi
    s_g_psi = S @ (G @ psi)
    r_s_psi = R @ s_psi
    mean = float(np.vdot(s_psi, r_s_psi).real)
    var = float(np.vdot(r_s_psi, r_s_psi).real) - mean * mean
    # <[G, S^dag R S]> = <G S^dag R S> - c.c. = (S G psi)^dag R (S psi) - c.c.
    comm = 2j * np.vdot(s_g_psi, r_s_psi).imag
    return MomentSensitivity(abs(comm) ** 2 / (var + sigma * sigma), optimal_angle=eps,
                             details={"dim": dim, "tail": float(np.sum(np.abs(s_psi[-4:]) ** 2))})


# ---------------------------------------------------------------------------
# Classical Fisher information and dichotomic observables
# ---------------------------------------------------------------------------

def gaussian_derivatives(desc: GaussianDescriptor, G: Generator) -> tuple[np.ndarray, np.ndarray]:
    """``(d mean/d theta, d Gamma/d theta)`` at ``theta = 0``."""
    if G.task == "displacement":
        return OMEGA @ G.u, np.zeros((2, 2))
    A = OMEGA @ desc.cov
    return OMEGA @ desc.mean, A + A.T


def classical_fisher_gaussian_homodyne(desc: GaussianDescriptor, eps: float,
                                       dmean: np.ndarray, dcov: np.ndarray) -> float:
    """Fisher information of the Gaussian homodyne distribution along ``w(eps)``."""
    w = measurement_direction(eps)
    s2 = float(w @ desc.cov @ w)
    return float(w @ dmean) ** 2 / s2 + float(w @ dcov @ w) ** 2 / (2 * s2 * s2)


@dataclass(frozen=True)
class DichotomicCheck:
    chi2: float
    fisher: float
    probability: float

    @property
    def deviation(self) -> float:
        return abs(self.chi2 - self.fisher)


def dichotomic_equivalence(state: QuantumState, G: Generator, M: OperatorMatrix | np.ndarray,
                           *, spectral_tol: float = 1e-8) -> DichotomicCheck:
    """Evaluate ``chi^-2`` and the two-outcome Fisher information independently.

    ``chi^-2`` uses the mean and variance of ``M``; the Fisher information
    uses the outcome probabilities ``Tr[rho P_k]`` of the spectral
    projectors and their derivatives ``Tr[-i[G, rho] P_k]``.
    """
    mat = np.asarray(M.matrix if isinstance(M, OperatorMatrix) else M, dtype=complex)
    dim = mat.shape[0]
    evals, evecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    lo, hi = evals[0], evals[-1]
    is_low = np.abs(evals - lo) <= spectral_tol * max(1.0, abs(lo))
    is_high = np.abs(evals - hi) <= spectral_tol * max(1.0, abs(hi))
    if abs(hi - lo) <= spectral_tol or not np.all(is_low | is_high):
        raise NotDichotomic("observable does not have exactly two distinct eigenvalues")
    ens = _Ensemble.of(state, dim)
    Gm = _generator_matrix(G, dim)
    data = _moment_data(ens, [mat], Gm)
    chi = _ratio(float(data.C[0] ** 2), float(data.cov[0, 0]))
    chi_value = 0.0 if chi.indeterminate else chi.value

    P_high = evecs[:, is_high] @ evecs[:, is_high].conj().T
    rho = (ens.vectors * ens.weights) @ ens.vectors.conj().T
    drho = -1j * (Gm @ rho - rho @ Gm)
    p = float(np.einsum("ij,ji->", rho, P_high).real)
    dp = float(np.einsum("ij,ji->", drho, P_high).real)
    fisher = 0.0 if dp == 0 else dp * dp / p + dp * dp / (1 - p)
    return DichotomicCheck(chi_value, fisher, p)
