"""Cross-backend validation suites behind ``cvmetro validate``.

A suite is a function returning :class:`ReportRecord` objects.  Every
record compares one number with an independently computed reference:
closed forms against Fock evaluations, analytic Wigner functions against
the kernel, channel-path QFIs against noisy closed forms, or moment
sensitivities against the QFI they are bounded by.  Random draws use a
fixed seed so a suite always checks the same points.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np

from . import fock, moments, tables, wigner
from .errors import CvMetroError, DomainError
from .fock import QuantumState
from .gaussian import descriptor_of, thermal_channel_path
from .qfi import ChannelEvolution, Generator, qfi_gaussian, qfi_spectral
from .reports import ReportRecord
from .states import StateSpec
from .sweeps import CROSS_CHECK_TOL, run_sweep

SEED = 20240611
WIGNER_TOL = 1e-8
NORMALIZATION_TOL = 1e-6
BOUND_TOL = 1e-8
DICHOTOMIC_TOL = 1e-10
GAUSSIAN_OPT_TOL = 1e-10
MAI_TOL = 1e-9
PARITY_PAD = 80


def random_spec(rng: np.random.Generator, family: str | None = None) -> StateSpec:
    """A state from the standard families with |alpha| <= 2, r <= 1, n_T <= 1."""
    fams = ("coherent", "gaussian", "fock", "fock_superposition", "cat", "compass")
    family = family or fams[int(rng.integers(len(fams)))]
    amp = 2.0 * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
    if family == "coherent":
        return StateSpec.coherent(amp)
    if family == "gaussian":
        return StateSpec.gaussian(amp, rng.uniform(0, 1), rng.uniform(0, 2 * math.pi), rng.uniform(0, 1))
    if family == "fock":
        return StateSpec.fock(int(rng.integers(0, 6)))
    if family == "fock_superposition":
        m = int(rng.integers(0, 4))
        return StateSpec.fock_superposition(m, m + int(rng.integers(1, 4)), rng.uniform(0, 2 * math.pi))
    if family == "cat":
        return StateSpec.cat(amp if abs(amp) > 0.3 else 0.3 + 0j, rng.uniform(0, 2 * math.pi))
    if family == "compass":
        return StateSpec.compass(amp if abs(amp) > 0.3 else 0.3 + 0j)
    raise DomainError(f"unknown family {family!r}")


def build(spec: StateSpec, cutoff: int = fock.DEFAULT_CUTOFF) -> QuantumState:
    """``spec`` at ``cutoff``, or at the first doubling that converges."""
    return fock.build_state(spec, fock.minimal_cutoff(spec, start=cutoff))


def random_generator(rng: np.random.Generator) -> Generator:
    if rng.uniform() < 0.5:
        return Generator.displacement(rng.uniform(0, math.pi))
    return Generator.rotation()


def _generator_inputs(G: Generator) -> dict:
    return {"task": G.task, "phi": G.phi} if G.task == "displacement" else {"task": G.task}


def _value(res) -> float:
    return 0.0 if res.indeterminate else float(res.value)


# -- suites -------------------------------------------------------------------

def suite_tables(ids=tables.TABLE_IDS) -> list[ReportRecord]:
    out = []
    for tid in ids:
        rep = tables.run_table(tid)
        for r in rep.records:
            out.append(ReportRecord(f"table {r.table}: {r.row}", r.column, {"state": r.state, **r.inputs},
                                    r.backend, r.value, r.reference, r.tolerance, r.cutoff, r.note, r.printed))
    return out


def suite_qfi_oracle() -> list[ReportRecord]:
    return suite_tables(("1", "2", "6"))


def suite_wigner(points: int = 200) -> list[ReportRecord]:
    rng = np.random.default_rng(SEED)
    out = []
    for family in ("coherent", "gaussian", "fock", "fock_superposition", "cat"):
        spec = random_spec(rng, family)
        state = build(spec)
        xs, ps = rng.uniform(-3, 3, points), rng.uniform(-3, 3, points)
        exact = wigner.wigner_analytic(spec, xs, ps)
        numeric = wigner.wigner_numeric(state, xs, ps)
        k = int(np.argmax(np.abs(exact - numeric)))
        out.append(ReportRecord(f"wigner {family}", "max |W_analytic - W_kernel|", {"state": spec.describe(),
                                "points": points}, f"kernel:{wigner._kernel.BACKEND}", float(numeric[k]),
                                float(exact[k]), WIGNER_TOL + state.tail_mass, state.cutoff))
        grid = wigner.GridSpec(-9, 9, 181, -9, 9, 181)
        W = wigner.wigner_numeric(state, *np.meshgrid(grid.xs, grid.ps, indexing="ij"))
        dx, dp = grid.xs[1] - grid.xs[0], grid.ps[1] - grid.ps[0]
        out.append(ReportRecord(f"wigner {family}", "grid normalisation", {"state": spec.describe(), "grid": "+-9 x 181"},
                                f"kernel:{wigner._kernel.BACKEND}", float(W.sum() * dx * dp), 1.0,
                                NORMALIZATION_TOL, state.cutoff))
    return out


def _bound_variants(state: QuantumState, G: Generator, rng: np.random.Generator) -> Iterator[tuple[str, float]]:
    dim = state.cutoff + 2
    eps = rng.uniform(0, math.pi)
    yield f"homodyne eps={eps:.6f}", _value(moments.chi2(state, G, fock.quadrature(eps, dim)))
    for m in (1, 2, 3):
        try:
            yield f"Q^({m}) optimum", _value(moments.chi2_order(state, G, m))
        except CvMetroError:
            continue
    try:
        yield "photon number", _value(moments.chi2(state, G, fock.number(dim)))
    except CvMetroError:
        pass
    x, p = rng.uniform(-2.5, 2.5, 2)
    beta = complex(x, p) / math.sqrt(2)
    try:
        yield f"parity at ({x:.4f},{p:.4f})", _value(
            moments.chi2(state, G, wigner.displaced_parity(beta, state.cutoff + PARITY_PAD)))
    except CvMetroError:
        pass


def suite_cramer_rao(pairs: int = 200) -> list[ReportRecord]:
    rng = np.random.default_rng(SEED + 1)
    out = []
    for _ in range(pairs):
        spec, G = random_spec(rng), random_generator(rng)
        state = build(spec)
        fq = qfi_spectral(state, G).value
        for name, value in _bound_variants(state, G, rng):
            out.append(ReportRecord(spec.describe(), name, _generator_inputs(G), "fock-moments",
                                    value, fq, BOUND_TOL, state.cutoff, relation="<="))
    return out


def suite_dichotomic(points: int = 200) -> list[ReportRecord]:
    rng = np.random.default_rng(SEED + 2)
    out = []
    while len(out) < points:
        spec, G = random_spec(rng), random_generator(rng)
        state = build(spec)
        x, p = rng.uniform(-2.5, 2.5, 2)
        M = wigner.displaced_parity(complex(x, p) / math.sqrt(2), state.cutoff + PARITY_PAD)
        check = moments.dichotomic_equivalence(state, G, M)
        if min(check.probability, 1 - check.probability) < 1e-6 or check.fisher < 1e-8:
            continue  # parity expectation pinned at +-1 or flat: not a regular point
        out.append(ReportRecord(spec.describe(), f"parity at ({x:.4f},{p:.4f})", _generator_inputs(G),
                                "fock-moments", check.chi2, check.fisher, DICHOTOMIC_TOL, state.cutoff))
    return out


def suite_gaussian_optimum(count: int = 100) -> list[ReportRecord]:
    rng = np.random.default_rng(SEED + 3)
    out = []
    for _ in range(count):
        spec = random_spec(rng, "gaussian")
        desc = descriptor_of(spec)
        phi = rng.uniform(0, math.pi)
        # QFI from the general channel formula (mean and covariance derivatives),
        # homodyne from its own expression evaluated at the reported optimal angle
        fq = qfi_gaussian(desc, ChannelEvolution(thermal_channel_path("displacement", 0.0, 0.0, phi=phi))).value
        eps = moments.chi2_homodyne_optimal(desc, phi).optimal_angle
        chi = moments.chi2_homodyne(desc, phi, eps).value
        out.append(ReportRecord(spec.describe(), "optimal homodyne vs QFI", {"phi": phi, "eps": eps},
                                "gaussian-closed", chi, fq, GAUSSIAN_OPT_TOL, None))
    return out


def suite_noise(points: int = 50) -> list[ReportRecord]:
    rng = np.random.default_rng(SEED + 4)
    out = []
    for task in ("displacement", "rotation"):
        for _ in range(points):
            nbar, nb, kt = rng.uniform(0, 3), rng.uniform(0, 1), rng.uniform(0, 1)
            res = run_sweep(task, np.array([nbar]), np.array([nb]), np.array([0.0, kt]))
            for pt in res.points:
                if pt.series != "grid":
                    continue
                out.append(ReportRecord(f"noisy {task}", "closed vs channel", {"nbar": nbar, "nb": nb, "kt": pt.kt},
                                        "gaussian-channel", pt.closed, pt.channel, CROSS_CHECK_TOL, None))
                if pt.kt == 0.0:
                    out.append(ReportRecord(f"noisy {task}", "kt=0 equals noiseless", {"nbar": nbar, "nb": nb},
                                            "gaussian-closed", pt.closed, pt.noiseless, 0.0, None))
            lo, hi = (p for p in res.points if p.series == "grid")
            out.append(ReportRecord(f"noisy {task}", "nonincreasing in kt", {"nbar": nbar, "nb": nb, "kt": kt},
                                    "gaussian-closed", hi.closed, lo.closed, 0.0, None, relation="<="))
    return out


def suite_mai() -> list[ReportRecord]:
    out = []
    for r in (0.0, 0.5, 1.0):
        for sigma2 in (0.0, 0.5, 2.0):
            spec = StateSpec.gaussian(0.0, 0.6, 0.0, 0.0)
            desc = descriptor_of(spec)
            lam = np.linalg.eigvalsh(desc.cov)
            res = moments.mai_optimal(desc, r, math.sqrt(sigma2))
            ref = 1.0 / (lam[0] + math.exp(-2 * r) * sigma2)
            out.append(ReportRecord(spec.describe(), "amplified homodyne", {"r": r, "sigma2": sigma2},
                                    "gaussian-closed", res.value, ref, MAI_TOL, None))
    return out


SUITES: dict[str, Callable[[], list[ReportRecord]]] = {
    "qfi-oracle": suite_qfi_oracle,
    "tables": suite_tables,
    "wigner": suite_wigner,
    "cramer-rao": suite_cramer_rao,
    "dichotomic": suite_dichotomic,
    "gaussian-optimum": suite_gaussian_optimum,
    "noise": suite_noise,
    "mai": suite_mai,
}


def run_suite(name: str) -> list[ReportRecord]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn()
