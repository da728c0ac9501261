"""``cvmetro`` command line.

::

    cvmetro table <id> [--cutoff N] [--tol X] [--format csv|json] [--out PATH]
    cvmetro map --state SPEC --task disp|rot [--phi F] [--grid XMIN:XMAX:NX,PMIN:PMAX:NP] [--eps E]
    cvmetro sweep --task disp|rot --nbar A:B:N --nb LIST --kt A:B:N
    cvmetro validate --suite NAME

Every command writes one report (CSV by default) to stdout or ``--out``.
``table``, ``sweep`` and ``validate`` exit with status 1 when a comparison
misses its tolerance; bad input exits with status 2.
"""

from __future__ import annotations

import math
from pathlib import Path

import click

from . import fock, tables, validation, wigner
from .errors import CvMetroError
from .qfi import Generator, qfi_displacement_extremal, qfi_spectral
from .reports import Report, ReportRecord, gnuplot_stub
from .states import parse_state
from .sweeps import CROSS_CHECK_TOL, SCALING_CUT_KT, normalize_task, parse_list, parse_range, run_sweep, scaling_exponent

EPS_PRESET = 1e-2

_format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
_out_option = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                           help="Write to this file instead of stdout.")


def _emit(report: Report, fmt: str, out: Path | None, stub: str | None = None) -> None:
    text = report.render(fmt)
    if out is None:
        click.echo(text, nl=False)
        return
    out.write_text(text, encoding="utf-8", newline="")
    if stub is not None:
        out.with_suffix(".gp").write_text(stub, encoding="utf-8", newline="")


class InputError(click.ClickException):
    exit_code = 2


def _fail(exc: CvMetroError) -> None:
    raise InputError(f"{type(exc).__name__}: {exc}")


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Metrological sensitivities of single-mode continuous-variable states."""


@main.command("table")
@click.argument("table_id")
@click.option("--cutoff", type=click.IntRange(min=2), default=fock.DEFAULT_CUTOFF, show_default=True)
@click.option("--tol", type=click.FloatRange(min=0), default=None,
              help=f"Tolerance for exact rows [default: {tables.DEFAULT_TOL:g}].")
@click.option("--large-alpha-tol", type=click.FloatRange(min=0), default=None,
              help=f"Tolerance for large-amplitude cat/compass rows [default: {tables.LARGE_ALPHA_TOL:g}].")
@_format_option
@_out_option
def table_cmd(table_id: str, cutoff: int, tol: float | None, large_alpha_tol: float | None,
              fmt: str, out: Path | None) -> None:
    """Reproduce table TABLE_ID (1-8, 10 or num) against Fock-space evaluations."""
    try:
        rep = tables.run_table(table_id, cutoff=cutoff, tol=tol, large_alpha_tol=large_alpha_tol)
    except CvMetroError as exc:
        _fail(exc)
    records = [ReportRecord(r.row, r.column, {"state": r.state, **r.inputs}, r.backend, r.value, r.reference,
                            r.tolerance, r.cutoff, r.note, r.printed) for r in rep.records]
    meta = {"table": rep.table, "title": rep.title, "cutoff": cutoff, "tolerance": rep.tolerance,
            "large_alpha_tolerance": rep.large_alpha_tolerance}
    report = Report.from_records("table", meta, records)
    _emit(report, fmt, out)
    if not report.ok:
        raise SystemExit(1)


def _qfi_bound(state, task: wigner.ParityTask, optimize_phi: bool) -> tuple[float, str]:
    if task.task == "rotation":
        return qfi_spectral(state, Generator.rotation()).value, "rotation QFI"
    if optimize_phi:
        return qfi_displacement_extremal(state).max, "displacement QFI, best direction"
    return qfi_spectral(state, Generator.displacement(task.phi)).value, f"displacement QFI at phi={task.phi!r}"


@main.command("map")
@click.option("--state", "state_text", required=True, help="State, e.g. fock:n=1 or cat:a=2i,gamma=0.")
@click.option("--task", type=click.Choice(["disp", "rot"]), required=True)
@click.option("--phi", type=float, default=None,
              help="Displacement direction; omitted means the best direction per cell.")
@click.option("--grid", "grid_text", default=None, help="XMIN:XMAX:NX,PMIN:PMAX:NP [default: -4:4:201,-4:4:201].")
@click.option("--eps", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Noise floor added to the parity variance.")
@click.option("--noisy", is_flag=True, help=f"Shortcut for --eps {EPS_PRESET:g}.")
@click.option("--cutoff", type=click.IntRange(min=2), default=fock.DEFAULT_CUTOFF, show_default=True)
@click.option("--derivative", type=click.Choice(["fd", "commutator"]), default="fd", show_default=True,
              help="Gradient of W for states without a closed form.")
@click.option("--backend", type=click.Choice(["cython", "python"]), default=None,
              help="Wigner kernel for numeric states [default: best available].")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@_format_option
@_out_option
def map_cmd(state_text: str, task: str, phi: float | None, grid_text: str | None, eps: float, noisy: bool,
            cutoff: int, derivative: str, backend: str | None, workers: int | None, fmt: str,
            out: Path | None) -> None:
    """Parity-measurement sensitivity over phase space."""
    if noisy:
        eps = EPS_PRESET
    try:
        spec = parse_state(state_text)
        grid = wigner.GridSpec.parse(grid_text) if grid_text else wigner.GridSpec()
        optimize = task == "disp" and phi is None
        ptask = wigner.ParityTask(task, 0.0 if phi is None else phi, eps)
        result = wigner.sensitivity_map(spec, ptask, grid, optimize_phi=optimize, derivative=derivative,
                                        cutoff=cutoff, workers=workers, backend=backend)
        state = fock.build_state(spec, cutoff)
        bound, bound_kind = _qfi_bound(state, ptask, optimize)
    except CvMetroError as exc:
        _fail(exc)
    ax, ap, av = result.argmax
    meta = {
        "state": spec.describe(), "task": ptask.task, "phi": ("optimized per cell" if optimize else ptask.phi) if ptask.task == "displacement" else None,
        "eps": eps, "grid": f"{grid.x_min!r}:{grid.x_max!r}:{grid.nx},{grid.p_min!r}:{grid.p_max!r}:{grid.np}",
        "cutoff": cutoff, "backend": result.backend, "derivative": derivative if result.cutoff else "analytic",
        "argmax_x": ax, "argmax_p": ap, "argmax_value": av,
        "qfi_bound": bound, "qfi_bound_kind": bound_kind,
        "indeterminate_cells": int(result.indeterminate.sum()),
    }
    columns = ("x", "p", "value", "indeterminate", "phi_opt")
    xs, ps = result.xs, result.ps
    rows = []
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            rows.append({"x": float(x), "p": float(p), "value": float(result.values[i, j]),
                         "indeterminate": bool(result.indeterminate[i, j]),
                         "phi_opt": None if result.phi is None else float(result.phi[i, j])})
    report = Report("map", meta, columns, rows, {"cells": len(rows), "argmax_within_bound": av <= bound * (1 + 1e-2)})
    stub = None
    if out is not None and fmt == "csv":
        stub = gnuplot_stub(out.name, report, "x", "p",
                            extra=["set view map", f"set title 'max {av:.6g}, QFI bound {bound:.6g}'"],
                            command=f"splot '{out.name}' using 1:2:3 with pm3d notitle")
    _emit(report, fmt, out, stub)


@main.command("sweep")
@click.option("--task", type=click.Choice(["disp", "rot"]), required=True)
@click.option("--nbar", "nbar_text", required=True, help="A:B:N photon numbers of the squeezed probe.")
@click.option("--nb", "nb_text", required=True, help="Comma-separated bath occupations.")
@click.option("--kt", "kt_text", required=True, help="A:B:N loss values kappa*t.")
@_format_option
@_out_option
def sweep_cmd(task: str, nbar_text: str, nb_text: str, kt_text: str, fmt: str, out: Path | None) -> None:
    """Noisy QFI of squeezed vacuum, cross-checked against the channel path."""
    try:
        result = run_sweep(normalize_task(task), parse_range(nbar_text, "nbar"), parse_list(nb_text, "nb"),
                           parse_range(kt_text, "kt"))
    except CvMetroError as exc:
        _fail(exc)
    columns = ("series", "nbar", "nb", "kt", "value", "channel", "abs_dev", "rel_dev", "noiseless", "passed")
    rows = [{"series": p.series, "nbar": p.nbar, "nb": p.nb, "kt": p.kt, "value": p.closed, "channel": p.channel,
             "abs_dev": p.abs_dev, "rel_dev": p.rel_dev, "noiseless": p.noiseless, "passed": p.passed}
            for p in result.points]
    meta = {"task": result.task, "nbar": nbar_text, "nb": nb_text, "kt": kt_text,
            "cross_check_tolerance": CROSS_CHECK_TOL, "scaling_cut_kt": SCALING_CUT_KT,
            "monotone_in_kt": result.monotone, "kt0_equals_noiseless": result.zero_loss_exact}
    for nb in sorted({p.nb for p in result.points}):
        slope = scaling_exponent(result.points, nb)
        meta[f"scaling_exponent_nb={nb!r}"] = slope if slope is not None and math.isfinite(slope) else None
    summary = {"points": len(rows), "failed": sum(not p.passed for p in result.points)}
    report = Report("sweep", meta, columns, rows, summary, result.passed)
    stub = None
    if out is not None and fmt == "csv":
        stub = gnuplot_stub(out.name, report, "kt", "value", extra=["set logscale y"])
    _emit(report, fmt, out, stub)
    if not report.ok:
        raise SystemExit(1)


@main.command("validate")
@click.option("--suite", type=click.Choice(sorted(validation.SUITES)), required=True)
@_format_option
@_out_option
def validate_cmd(suite: str, fmt: str, out: Path | None) -> None:
    """Run one cross-backend validation suite."""
    try:
        records = validation.run_suite(suite)
    except CvMetroError as exc:
        _fail(exc)
    report = Report.from_records("validate", {"suite": suite, "seed": validation.SEED}, records)
    _emit(report, fmt, out)
    if not report.ok:
        raise SystemExit(1)


if __name__ == "__main__":  # pragma: no cover
    main()
