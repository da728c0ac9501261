"""First- and second-moment phase-space representation.

A :class:`GaussianDescriptor` holds the mean vector ``(<x>, <p>)`` and the
symmetrised covariance matrix of a single mode.  For Gaussian states it is
the whole state; for the other families it is only a moment summary and is
marked ``non_gaussian`` so that Gaussian-only formulas refuse to consume it.

Symplectic geometry uses ``OMEGA = [[0, 1], [-1, 0]]``.  With this sign the
Hamiltonian ``H`` generates ``exp(OMEGA H theta)`` on the phase-space vector,
so that the rotation ``exp(-i theta n)`` maps ``(1, 0)`` to
``(cos theta, -sin theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import CPViolation, DomainError, NotGaussian
from .states import StateSpec

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
IDENTITY = np.eye(2)
_UNCERTAINTY_SLACK = 1e-12


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GaussianDescriptor:
    """Mean vector and covariance matrix of ``(x, p)``.

    ``purity`` is ``1/(2 sqrt(det cov))`` for Gaussian descriptors and
    ``None`` for non-Gaussian ones, whose purity the moments cannot tell.
    """

    mean: np.ndarray
    cov: np.ndarray
    non_gaussian: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise DomainError("descriptor entries must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(1.0, float(np.max(np.abs(cov)))):
            raise DomainError("covariance matrix must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.det(cov) < 0.25 - _UNCERTAINTY_SLACK * max(1.0, float(np.trace(cov)) ** 2):
            raise DomainError(f"covariance violates the uncertainty relation (det = {np.linalg.det(cov)!r})")
        if cov[0, 0] <= 0 or cov[1, 1] <= 0:
            raise DomainError("covariance matrix must be positive definite")
        object.__setattr__(self, "mean", _freeze(mean))
        object.__setattr__(self, "cov", _freeze(cov))

    @property
    def det(self) -> float:
        c = self.cov
        return float(c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])

    @property
    def purity(self) -> float | None:
        if self.non_gaussian:
            return None
        return 1.0 / (2.0 * math.sqrt(self.det))

    @property
    def nbar(self) -> float:
        """``<n> = (Tr cov + |mean|^2 - 1)/2``; valid for every state."""
        return 0.5 * (float(np.trace(self.cov)) + float(self.mean @ self.mean) - 1.0)

    def eigen(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and matching eigenvectors (columns) of ``cov``."""
        return np.linalg.eigh(self.cov)

    def require_gaussian(self) -> None:
        if self.non_gaussian:
            raise NotGaussian(f"{self.label or 'descriptor'} is flagged non-Gaussian")


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """A real 2x2 matrix ``S`` with ``S OMEGA S^T = OMEGA``."""

    S: np.ndarray

    def __post_init__(self) -> None:
        S = np.asarray(self.S, dtype=float).reshape(2, 2)
        residue = float(np.max(np.abs(S @ OMEGA @ S.T - OMEGA)))
        if residue > 1e-12 * max(1.0, float(np.max(np.abs(S))) ** 2):
            raise DomainError(f"matrix is not symplectic (residue {residue:.3e})")
        object.__setattr__(self, "S", _freeze(S))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.S @ other.S)


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """``mean -> X mean + d`` and ``cov -> X cov X^T + Y``."""

    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float).reshape(2, 2)
        Y = np.asarray(self.Y, dtype=float).reshape(2, 2)
        d = np.asarray(self.d, dtype=float).reshape(2)
        if abs(Y[0, 1] - Y[1, 0]) > 1e-12:
            raise DomainError("channel noise matrix Y must be symmetric")
        Y = 0.5 * (Y + Y.T)
        lowest = cp_margin(X, Y)
        if lowest < -1e-10:
            raise CPViolation(f"channel is not completely positive (lowest eigenvalue {lowest:.3e})")
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "Y", _freeze(Y))
        object.__setattr__(self, "d", _freeze(d))

    def then(self, other: "GaussianChannel") -> "GaussianChannel":
        """Composite channel: ``self`` first, then ``other``."""
        return GaussianChannel(other.X @ self.X,
                               other.X @ self.Y @ other.X.T + other.Y,
                               other.X @ self.d + other.d)


def cp_margin(X: np.ndarray, Y: np.ndarray) -> float:
    """Smallest eigenvalue of ``Y + i OMEGA/2 - i X OMEGA X^T/2``."""
    M = Y + 0.5j * OMEGA - 0.5j * (X @ OMEGA @ X.T)
    return float(np.linalg.eigvalsh(M)[0])


# ---------------------------------------------------------------------------
# Symplectic building blocks
# ---------------------------------------------------------------------------

def symplectic_from_hamiltonian(H: np.ndarray, theta: float) -> SymplecticMap:
    """``exp(OMEGA H theta)`` for a real symmetric 2x2 quadratic Hamiltonian ``H``."""
    H = np.asarray(H, dtype=float)
    if H.shape != (2, 2) or abs(H[0, 1] - H[1, 0]) > 1e-14:
        raise DomainError("H must be a real symmetric 2x2 matrix")
    return SymplecticMap(expm(OMEGA @ H * theta))


def rotation_symplectic(theta: float) -> SymplecticMap:
    c, s = math.cos(theta), math.sin(theta)
    return SymplecticMap(np.array([[c, s], [-s, c]]))


def squeezing_directions(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """``(s_minus, s_plus)``: the squeezed and anti-squeezed unit directions."""
    h = 0.5 * gamma
    return np.array([math.cos(h), math.sin(h)]), np.array([-math.sin(h), math.cos(h)])


def squeezing_symplectic(r: float, gamma: float = 0.0) -> SymplecticMap:
    """Phase-space action of ``S(r e^{i gamma})``."""
    if r < 0:
        raise DomainError(f"squeezing r must be >= 0, got {r}")
    s_minus, s_plus = squeezing_directions(gamma)
    S = math.exp(-r) * np.outer(s_minus, s_minus) + math.exp(r) * np.outer(s_plus, s_plus)
    return SymplecticMap(S)


def apply_symplectic(desc: GaussianDescriptor, S: SymplecticMap) -> GaussianDescriptor:
    return GaussianDescriptor(S.S @ desc.mean, S.S @ desc.cov @ S.S.T, desc.non_gaussian, desc.label)


def apply_channel(desc: GaussianDescriptor, ch: GaussianChannel) -> GaussianDescriptor:
    return GaussianDescriptor(ch.X @ desc.mean + ch.d, ch.X @ desc.cov @ ch.X.T + ch.Y,
                              desc.non_gaussian, desc.label)


def displacement_direction(phi: float) -> np.ndarray:
    """``u = (sin phi, cos phi)``, the coefficients of ``r(phi)`` on ``(x, p)``."""
    return np.array([math.sin(phi), math.cos(phi)])


def displacement_channel(theta: float, phi: float) -> GaussianChannel:
    """Noiseless displacement generated by ``r(phi)``: a pure shift by ``theta OMEGA u``."""
    return GaussianChannel(IDENTITY, np.zeros((2, 2)), theta * OMEGA @ displacement_direction(phi))


@dataclass(frozen=True, eq=False)
class ChannelPath:
    """A channel at parameter ``theta`` together with its ``theta``-derivatives."""

    channel: GaussianChannel
    dX: np.ndarray
    dY: np.ndarray
    dd: np.ndarray


def thermal_channel(task: str, kt: float, nb: float, *, theta: float = 0.0,
                    phi: float | None = None, hamiltonian: np.ndarray | None = None) -> GaussianChannel:
    """Parameter encoding under weak coupling to a thermal bath.

    ``task="displacement"`` needs ``phi`` and gives ``X = e^{-kt/2} 1`` with
    ``d = theta OMEGA u``; ``task="symplectic"`` needs ``hamiltonian`` (the
    identity gives rotations) and gives ``X = e^{-kt/2} exp(OMEGA H theta)``.
    Both share ``Y = (1 - e^{-kt})(nb + 1/2) 1``.
    """
    return thermal_channel_path(task, kt, nb, theta=theta, phi=phi, hamiltonian=hamiltonian).channel


def thermal_channel_path(task: str, kt: float, nb: float, *, theta: float = 0.0,
                         phi: float | None = None,
                         hamiltonian: np.ndarray | None = None) -> ChannelPath:
    """:func:`thermal_channel` plus its derivatives with respect to ``theta``."""
    if not (math.isfinite(kt) and kt >= 0):
        raise DomainError(f"kappa t must be finite and >= 0, got {kt}")
    if not (math.isfinite(nb) and nb >= 0):
        raise DomainError(f"bath occupation must be finite and >= 0, got {nb}")
    damp = math.exp(-0.5 * kt)
    Y = (1.0 - math.exp(-kt)) * (nb + 0.5) * IDENTITY
    zero = np.zeros((2, 2))
    if task == "displacement":
        if phi is None:
            raise DomainError("displacement task needs the direction phi")
        slope = OMEGA @ displacement_direction(phi)
        ch = GaussianChannel(damp * IDENTITY, Y, theta * slope)
        return ChannelPath(ch, zero, zero, slope)
    if task in ("symplectic", "rotation"):
        H = IDENTITY if hamiltonian is None else np.asarray(hamiltonian, dtype=float)
        S = symplectic_from_hamiltonian(H, theta).S
        ch = GaussianChannel(damp * S, Y, np.zeros(2))
        return ChannelPath(ch, damp * OMEGA @ H @ S, zero, np.zeros(2))
    raise DomainError(f"unknown channel task {task!r}")


# ---------------------------------------------------------------------------
# Descriptors of the state families
# ---------------------------------------------------------------------------

def gaussian_covariance(r: float, gamma: float, n_t: float) -> np.ndarray:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    return (2 * n_t + 1) / 2 * np.array([[c - s * math.cos(gamma), -s * math.sin(gamma)],
                                         [-s * math.sin(gamma), c + s * math.cos(gamma)]])


def descriptor_of(spec: StateSpec, *, large_alpha: bool = False) -> GaussianDescriptor:
    """Closed-form first and second quadrature moments of ``spec``.

    Cat states use the exact covariance unless ``large_alpha`` asks for the
    ``|alpha|^2 >> 1`` shortcut, in which the interference terms are dropped
    and the state looks like a zero-mean ellipse of widths ``1/2`` and
    ``1/2 + 2 nbar`` aligned with ``alpha``.
    """
    fam = spec.family
    a = spec.alpha
    label = spec.label
    if fam in ("vacuum", "coherent"):
        return GaussianDescriptor(math.sqrt(2) * np.array([a.real, a.imag]), 0.5 * IDENTITY, label=label)
    if fam == "gaussian":
        return GaussianDescriptor(math.sqrt(2) * np.array([a.real, a.imag]),
                                  gaussian_covariance(spec.r, spec.gamma, spec.n_t), label=label)
    if fam == "fock":
        return GaussianDescriptor(np.zeros(2), (0.5 + spec.n) * IDENTITY, True, label)
    if fam == "fock_superposition":
        return _superposition_descriptor(spec)
    if fam == "cat":
        return _cat_descriptor(spec, large_alpha)
    if fam == "compass":
        nbar = number_moments(spec)[0]
        return GaussianDescriptor(np.zeros(2), (0.5 + nbar) * IDENTITY, True, label)
    raise DomainError(f"unknown family {fam!r}")  # pragma: no cover


def _superposition_descriptor(spec: StateSpec) -> GaussianDescriptor:
    m, n, g = spec.m, spec.n, spec.gamma
    k = n - m
    if k == 1:
        mean = math.sqrt(n / 2) * np.array([math.cos(g), math.sin(g)])
        cov = (m + 1) / 4 * np.array([[3 - math.cos(2 * g), -math.sin(2 * g)],
                                      [-math.sin(2 * g), 3 + math.cos(2 * g)]])
    elif k == 2:
        q = math.sqrt((m + 2) * (m + 1))
        mean = np.zeros(2)
        cov = 0.5 * np.array([[2 * (m + 2) - 1 + q * math.cos(g), q * math.sin(g)],
                              [q * math.sin(g), 2 * (m + 2) - 1 - q * math.cos(g)]])
    else:
        mean = np.zeros(2)
        cov = 0.5 * (1 + 2 * m + k) * IDENTITY
    return GaussianDescriptor(mean, cov, True, spec.label)


def _cat_descriptor(spec: StateSpec, large_alpha: bool) -> GaussianDescriptor:
    a, g = spec.alpha, spec.gamma
    mod2 = abs(a) ** 2
    nbar = number_moments(spec)[0]
    if large_alpha:
        direction = np.array([a.real, a.imag]) / abs(a)
        cov = 0.5 * IDENTITY + 2 * nbar * np.outer(direction, direction)
        return GaussianDescriptor(np.zeros(2), cov, True, spec.label + " (large-alpha)")
    # e^{2|a|^2} can overflow for huge |a|; the ratio sin(g)/(e^{2|a|^2}+cos g)
    # is then zero to double precision anyway.
    denom = math.exp(2 * mod2) + math.cos(g) if mod2 < 300 else math.inf
    t = math.sin(g) / denom
    mean = math.sqrt(2) * t * np.array([a.imag, -a.real])
    re2, im2 = (a * a).real, (a * a).imag
    cov = np.array([[0.5 + nbar + re2 - 2 * a.imag ** 2 * t * t, im2 * (1 + t * t)],
                    [im2 * (1 + t * t), 0.5 + nbar - re2 - 2 * a.real ** 2 * t * t]])
    return GaussianDescriptor(mean, cov, True, spec.label)


# ---------------------------------------------------------------------------
# Photon-number moments
# ---------------------------------------------------------------------------

def nbar_of(spec: StateSpec) -> float:
    return number_moments(spec)[0]


def gaussian_nbar(r: float, n_t: float, alpha: complex = 0.0) -> float:
    """``n_T cosh 2r + |alpha|^2 + sinh^2 r``."""
    return n_t * math.cosh(2 * r) + abs(alpha) ** 2 + math.sinh(r) ** 2


def number_moments(spec: StateSpec) -> tuple[float, float]:
    """``(<n>, <n^2>)`` in closed form for every family."""
    fam = spec.family
    a = complex(spec.alpha)
    A = abs(a) ** 2
    if fam in ("vacuum", "coherent"):
        return A, A * (1 + A)
    if fam == "gaussian":
        return _gaussian_number_moments(spec)
    if fam == "fock":
        return float(spec.n), float(spec.n) ** 2
    if fam == "fock_superposition":
        return (spec.m + spec.n) / 2, (spec.m ** 2 + spec.n ** 2) / 2
    if fam == "cat":
        ce = math.cos(spec.gamma) * math.exp(-2 * A)
        return A * (1 - ce) / (1 + ce), A * (1 + A + ce * (A - 1)) / (1 + ce)
    if fam == "compass":
        e1, e2 = math.exp(-A), math.exp(-2 * A)
        den = 1 + e2 + 2 * e1 * math.cos(A)
        first = A * (1 - e2 - 2 * e1 * math.sin(A)) / den
        second = first + A * A * (1 + e2 - 2 * e1 * math.cos(A)) / den
        return first, second
    raise DomainError(f"unknown family {fam!r}")  # pragma: no cover


def _gaussian_number_moments(spec: StateSpec) -> tuple[float, float]:
    a, nt = complex(spec.alpha), spec.n_t
    mu = math.cosh(spec.r)
    nu = complex(math.cos(spec.gamma), math.sin(spec.gamma)) * math.sinh(spec.r)
    A, V = abs(a) ** 2, abs(nu) ** 2
    first = (mu * mu + V) * nt + A + V
    cross = (a * a * mu * nu.conjugate()).real  # alpha^2 mu nu^* + c.c. = 2 Re(...)
    second = ((2 * V * V + 8 * mu * mu * V + 2 * mu ** 4) * nt * nt
              + (4 * A * V + 3 * V * V - 4 * cross + 4 * A * mu * mu + 8 * mu * mu * V + mu ** 4) * nt
              + (A * A + 3 * A * V + V * V - 2 * cross + A * mu * mu + 2 * mu * mu * V))
    return first, second


def number_variance(desc: GaussianDescriptor) -> float:
    """``Var n = Tr(cov^2)/2 - 1/4 + mean^T cov mean`` for a Gaussian descriptor."""
    desc.require_gaussian()
    G, m = desc.cov, desc.mean
    return 0.5 * float(np.trace(G @ G)) - 0.25 + float(m @ G @ m)


def spec_of(desc: GaussianDescriptor) -> StateSpec:
    """Invert :func:`descriptor_of` for a Gaussian descriptor.

    ``n_T`` comes from the determinant, ``(r, gamma)`` from the normalised
    covariance and ``alpha`` from the mean.
    """
    desc.require_gaussian()
    root = math.sqrt(desc.det)
    n_t = max(root - 0.5, 0.0)
    M = desc.cov / root
    c = max(0.5 * float(np.trace(M)), 1.0)
    r = 0.5 * math.acosh(c)
    gamma = math.atan2(-M[0, 1], 0.5 * (M[1, 1] - M[0, 0])) if r > 0 else 0.0
    alpha = complex(desc.mean[0], desc.mean[1]) / math.sqrt(2)
    return StateSpec.gaussian(alpha, r, gamma % (2 * math.pi), n_t)
