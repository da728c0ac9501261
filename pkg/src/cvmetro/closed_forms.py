"""Closed-form sensitivities for the standard state families.

These are reference values written directly as formulas of the family
parameters.  They never touch the engines, so they can be compared with
the Fock-space evaluations.  Where a printed expression turned out to be
inconsistent, two functions exist: the consistent one (used for
comparisons) and ``*_printed`` (echoed in reports).

Gaussian rows take ``nbar`` as the photon number of the squeezed thermal
part, ``nbar = n_T cosh 2r + sinh^2 r``.  Cat rows are the large-amplitude
approximations, with the cat oriented along ``p`` (``alpha`` imaginary).
"""

from __future__ import annotations

import math


def _root(nbar: float, n_t: float) -> float:
    """``sqrt(nbar(1+nbar) - n_T(1+n_T))``, i.e. ``(n_T + 1/2) sinh 2r``."""
    return math.sqrt(max(nbar * (1 + nbar) - n_t * (1 + n_t), 0.0))


def squeezed_thermal_nbar(r: float, n_t: float) -> float:
    return n_t * math.cosh(2 * r) + math.sinh(r) ** 2


# -- displacement QFI ---------------------------------------------------------

def qfi_coherent() -> float:
    return 2.0


def qfi_gaussian(nbar: float, n_t: float, gamma: float, phi: float) -> float:
    return 2 * (1 + 2 * nbar + 2 * _root(nbar, n_t) * math.cos(gamma + 2 * phi)) / (1 + 2 * n_t) ** 2


def qfi_fock(n: int) -> float:
    return 2.0 * (1 + 2 * n)


def qfi_superposition(m: int, n: int, gamma: float, phi: float) -> float:
    value = n + m + 1
    if n == m + 2:
        value -= math.sqrt(n * (n - 1)) * math.cos(gamma + 2 * phi)
    if n == m + 1:
        value -= (m + 1) * math.sin(gamma + phi) ** 2
    return 2.0 * value


def qfi_cat(nbar: float, phi: float) -> float:
    return 2 * (1 + 4 * nbar * math.cos(phi) ** 2)


def qfi_compass(nbar: float) -> float:
    return 2 * (1 + 2 * nbar)


# -- extremes of the displacement QFI over phi --------------------------------

def qfi_extremes_gaussian(nbar: float, n_t: float) -> tuple[float, float, float]:
    k = (2 * n_t + 1) ** 2
    d = _root(nbar, n_t)
    return 2 * (1 + 2 * nbar + 2 * d) / k, 2 * (1 + 2 * nbar - 2 * d) / k, 2 * (1 + 2 * nbar) / k


def qfi_extremes_superposition(m: int, n: int) -> tuple[float, float, float]:
    if n == m + 1:
        return 4.0 * n, 2.0 * n, 3.0 * n
    if n == m + 2:
        q = math.sqrt(n * (n - 1))
        return 2 * ((2 * n - 1) + q), 2 * ((2 * n - 1) - q), 2 * (2 * n - 1)
    v = 2.0 * (1 + n + m)
    return v, v, v


def qfi_extremes_cat(nbar: float) -> tuple[float, float, float]:
    return 2 * (1 + 4 * nbar), 2.0, 2 * (1 + 2 * nbar)


# -- homodyne detection of displacements --------------------------------------

def hom_coherent(phi: float, eps: float) -> float:
    return 2 * math.sin(eps - phi) ** 2


def hom_gaussian(nbar: float, n_t: float, gamma: float, phi: float, eps: float) -> float:
    return 2 * math.sin(eps - phi) ** 2 / (1 + 2 * nbar + 2 * _root(nbar, n_t) * math.cos(gamma + 2 * eps))


def hom_fock(n: int, phi: float, eps: float) -> float:
    return 2 * math.sin(eps - phi) ** 2 / (1 + 2 * n)


def hom_superposition(m: int, n: int, gamma: float, phi: float, eps: float) -> float:
    den = n + m + 1
    if n == m + 2:
        den -= math.sqrt(n * (n - 1)) * math.cos(gamma + 2 * eps)
    if n == m + 1:
        den -= (m + 1) * math.sin(gamma + eps) ** 2
    return 2 * math.sin(eps - phi) ** 2 / den


def hom_cat(nbar: float, phi: float, eps: float) -> float:
    return 2 * math.sin(eps - phi) ** 2 / (1 + 4 * nbar * math.cos(eps) ** 2)


def hom_compass(nbar: float, phi: float, eps: float) -> float:
    return 2 * math.sin(eps - phi) ** 2 / (1 + 2 * nbar)


# fixed measurement angle: (max over phi, then max over eps)

def hom_fixed_gaussian(nbar: float, n_t: float, gamma: float, eps: float) -> tuple[float, float]:
    d = _root(nbar, n_t)
    return (2 / (1 + 2 * nbar + 2 * d * math.cos(gamma + 2 * eps)),
            2 * (1 + 2 * nbar + 2 * d) / (2 * n_t + 1) ** 2)


def hom_fixed_superposition0(n: int, gamma: float, eps: float) -> tuple[float, float]:
    """Fixed-angle homodyne extremes for ``(|0> + e^{i gamma}|n>)/sqrt 2``."""
    if n == 1:
        return 1 / (1 - 0.5 * math.sin(gamma + eps) ** 2), 2.0
    if n == 2:
        return 1 / (1.5 - math.cos(gamma + 2 * eps) / math.sqrt(2)), 2 * (3 + math.sqrt(2)) / 7
    return 2 / (1 + n), 2 / (1 + n)


def hom_fixed_cat(nbar: float, eps: float) -> tuple[float, float]:
    return 2 / (1 + 4 * nbar * math.cos(eps) ** 2), 2.0


def hom_fixed_cat_printed(nbar: float, eps: float) -> tuple[float, float]:
    return 2 / (1 + 4 * nbar ** 2 * math.cos(eps) ** 2), 2.0


# optimal measurement angle: (max, min, avg) over phi

def hom_opt_gaussian(nbar: float, n_t: float) -> tuple[float, float, float]:
    return qfi_extremes_gaussian(nbar, n_t)


def hom_opt_superposition0(n: int) -> tuple[float, float, float]:
    if n == 1:
        return 2.0, 1.0, 1.5
    if n == 2:
        return 2 * (3 + math.sqrt(2)) / 7, 2 / (3 + math.sqrt(2)), 6 / 7
    v = 2 / (1 + n)
    return v, v, v


def hom_opt_cat(nbar: float) -> tuple[float, float, float]:
    return 2.0, 2 / (1 + 4 * nbar), (2 + 4 * nbar) / (1 + 4 * nbar)


# -- photon counting ------------------------------------------------------------

def num_avg_coherent() -> float:
    return 1.0


def num_avg_fock(n: int) -> float:
    return 1 / (2 * n + 1)


def num_avg_superposition0(n: int) -> float:
    return 1.0 if n == 1 else 0.0


def num_avg_pure_gaussian(alpha: complex, r: float, gamma: float) -> float:
    """``|<r>|^2 / (2 Var n)`` for ``D(alpha) S(r e^{i gamma})|0>``."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    # covariance (1/2)[[c - s cos g, -s sin g], [-s sin g, c + s cos g]]
    mx, mp = math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag
    g11, g12, g22 = 0.5 * (c - s * math.cos(gamma)), -0.5 * s * math.sin(gamma), 0.5 * (c + s * math.cos(gamma))
    var_n = 0.5 * (g11 * g11 + 2 * g12 * g12 + g22 * g22) - 0.25 + (mx * mx * g11 + 2 * mx * mp * g12 + mp * mp * g22)
    return 0.5 * (mx * mx + mp * mp) / var_n


def num_avg_pure_gaussian_printed(nbar: float) -> float:
    return (1 + 2 * nbar) / (2 * nbar * (1 + nbar))


# -- rotation QFI -----------------------------------------------------------------

def rot_qfi_coherent(alpha: complex) -> float:
    return 4 * abs(alpha) ** 2


def rot_qfi_gaussian(alpha: complex, r: float, gamma: float, n_t: float) -> float:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    k = 2 * n_t + 1
    cross = (alpha.real ** 2 - alpha.imag ** 2) * math.cos(gamma) + 2 * alpha.real * alpha.imag * math.sin(gamma)
    return 4 * (abs(alpha) ** 2 * c - s * cross) / k + 2 * k * k * s * s / (2 * n_t * n_t + 2 * n_t + 1)


def rot_qfi_gaussian_printed(alpha: complex, r: float, gamma: float, n_t: float) -> float:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    re, im = alpha.real, alpha.imag
    brace = (((re * re - im * im) * math.cos(gamma) - re * im * math.sin(gamma)) * s + abs(alpha) ** 2 * c
             + (2 * n_t + 1) ** 2 * s ** 3 / (2 * (n_t + 1)))
    return 4 * brace / (2 * (1 + 2 * n_t * (n_t + 1)))


def rot_qfi_gaussian_vacuum(nbar: float, n_t: float) -> float:
    return 8 * (nbar * (1 + nbar) - n_t * (1 + n_t)) / (1 + 2 * n_t * (1 + n_t))


def rot_qfi_superposition0(n: int) -> float:
    return float(n * n)


def rot_qfi_cat(nbar: float) -> float:
    return 4 * nbar


# -- homodyne detection of rotations ------------------------------------------------

def rot_hom_coherent(alpha: complex, eps: float) -> tuple[float, float, float]:
    a2 = abs(alpha) ** 2
    return 4 * (math.cos(eps) * alpha.real - math.sin(eps) * alpha.imag) ** 2, 4 * a2, 4 * a2


def rot_hom_gaussian(alpha: complex, r: float, gamma: float, n_t: float, eps: float) -> tuple[float, float, float]:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    k = 1 + 2 * n_t
    fixed = 4 * (alpha.real * math.cos(eps) - alpha.imag * math.sin(eps)) ** 2 / (k * (c + math.cos(gamma + 2 * eps) * s))
    cross = (alpha.real ** 2 - alpha.imag ** 2) * math.cos(gamma) + 2 * alpha.real * alpha.imag * math.sin(gamma)
    optimal = 4 * (abs(alpha) ** 2 * c - s * cross) / k
    aligned = 4 * math.exp(2 * r) * abs(alpha) ** 2 / k
    return fixed, optimal, aligned


def rot_hom_gaussian_optimal_printed(alpha: complex, r: float, gamma: float, n_t: float) -> float:
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    re, im = alpha.real, alpha.imag
    return 4 * (((re * re - im * im) * math.cos(gamma) - re * im * math.sin(gamma)) * s + abs(alpha) ** 2 * c) / (1 + 2 * n_t)


def rot_hom_superposition0(n: int, gamma: float, eps: float) -> tuple[float, float, float]:
    if n == 1:
        return 1 - 2 / (3 + math.cos(2 * gamma + 2 * eps)), 0.5, 1.0
    return 0.0, 0.0, 0.0


def rot_hom_superposition0_fixed_printed(n: int, gamma: float, eps: float) -> float:
    return 1 - 2 / (3 + math.cos(gamma + 2 * eps)) if n == 1 else 0.0


# -- first moments --------------------------------------------------------------------

def mean_coherent(alpha: complex) -> tuple[float, float]:
    return math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag


def mean_superposition(m: int, n: int, gamma: float) -> tuple[float, float]:
    if n != m + 1:
        return 0.0, 0.0
    return math.sqrt(n / 2) * math.cos(gamma), math.sqrt(n / 2) * math.sin(gamma)


def mean_cat(alpha: complex, gamma: float) -> tuple[float, float]:
    den = math.exp(2 * abs(alpha) ** 2) + math.cos(gamma)
    return (math.sqrt(2) * alpha.imag * math.sin(gamma) / den,
            -math.sqrt(2) * alpha.real * math.sin(gamma) / den)
