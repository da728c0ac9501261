"""Noisy-sensitivity sweeps over photon number, bath occupation and loss.

Each grid point carries two independent numbers: the closed-form noisy QFI
of squeezed vacuum and the QFI computed from the Gaussian state after the
thermal channel.  They must agree to ``CROSS_CHECK_TOL``.  The same
points also carry the noiseless value (``kt = 0``) and a fixed-loss cut at
``kt = 0.1`` used for the photon-number scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .qfi import qfi_noisy, qfi_noisy_channel

CROSS_CHECK_TOL = 1e-9
SCALING_CUT_KT = 0.1
MONOTONE_TOL = 1e-12

_TASKS = {"disp": "displacement", "displacement": "displacement", "rot": "rotation", "rotation": "rotation"}


def normalize_task(task: str) -> str:
    try:
        return _TASKS[task.strip().lower()]
    except KeyError:
        raise DomainError(f"unknown task {task!r}; use disp or rot") from None


def parse_range(text: str, name: str = "range") -> np.ndarray:
    """``A:B:N`` as ``N`` evenly spaced values from ``A`` to ``B`` inclusive; a bare number is one point."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            values = np.array([float(parts[0])])
        elif len(parts) == 3:
            n = int(parts[2])
            if n < 1:
                raise DomainError(f"{name}: point count must be >= 1")
            lo, hi = float(parts[0]), float(parts[1])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DomainError(f"{name}: values must be finite")
            values = np.linspace(lo, hi, n)
        else:
            raise ValueError
    except ValueError:
        raise DomainError(f"{name}: expected A:B:N, got {text!r}") from None
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name}: values must be finite")
    if np.any(values < 0):
        raise DomainError(f"{name}: values must be >= 0")
    return values


def parse_list(text: str, name: str = "list") -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise DomainError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if values.size == 0 or not np.all(np.isfinite(values)) or np.any(values < 0):
        raise DomainError(f"{name}: need at least one finite value >= 0")
    return values


@dataclass(frozen=True)
class SweepPoint:
    task: str
    series: str  # "grid" or "cut"
    nbar: float
    nb: float
    kt: float
    closed: float
    channel: float
    noiseless: float

    @property
    def abs_dev(self) -> float:
        return abs(self.closed - self.channel)

    @property
    def rel_dev(self) -> float:
        return self.abs_dev / abs(self.channel) if self.channel else self.abs_dev

    @property
    def passed(self) -> bool:
        return self.abs_dev <= CROSS_CHECK_TOL * max(1.0, abs(self.channel))


@dataclass(frozen=True)
class SweepResult:
    task: str
    points: list[SweepPoint]
    monotone: bool
    zero_loss_exact: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.zero_loss_exact and all(p.passed for p in self.points)


def _point(task: str, series: str, nbar: float, nb: float, kt: float) -> SweepPoint:
    closed = qfi_noisy(task, nbar, nb, kt).value
    channel = qfi_noisy_channel(task, nbar, nb, kt).value
    noiseless = qfi_noisy(task, nbar, nb, 0.0).value
    return SweepPoint(task, series, float(nbar), float(nb), float(kt), closed, channel, noiseless)


def run_sweep(task: str, nbar: np.ndarray, nb: np.ndarray, kt: np.ndarray) -> SweepResult:
    """Evaluate the full ``nbar x nb x kt`` grid plus the ``kt = 0.1`` cut."""
    task = normalize_task(task)
    nbar, nb, kt = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (nbar, nb, kt))
    for name, arr in (("nbar", nbar), ("nb", nb), ("kt", kt)):
        if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError(f"{name} grid must be nonempty, finite and >= 0")
    points: list[SweepPoint] = []
    monotone, zero_exact = True, True
    kt_sorted = np.sort(kt)
    for n in nbar:
        for b in nb:
            series = [_point(task, "grid", n, b, k) for k in kt_sorted]
            points.extend(series)
            vals = [p.closed for p in series]
            if any(later > earlier + MONOTONE_TOL * max(1.0, abs(earlier)) for earlier, later in zip(vals, vals[1:])):
                monotone = False
            for p in series:
                if p.kt == 0.0 and p.closed != p.noiseless:
                    zero_exact = False
    for b in nb:
        for n in nbar:
            points.append(_point(task, "cut", n, b, SCALING_CUT_KT))
    return SweepResult(task, points, monotone, zero_exact)


def scaling_exponent(points: list[SweepPoint], nb: float) -> float | None:
    """Log-log slope of the ``kt = 0.1`` cut between its two largest ``nbar`` values."""
    cut = sorted((p for p in points if p.series == "cut" and p.nb == nb and p.nbar > 0), key=lambda p: p.nbar)
    if len(cut) < 2:
        return None
    a, b = cut[-2], cut[-1]
    return (math.log(b.closed) - math.log(a.closed)) / (math.log(b.nbar) - math.log(a.nbar))
