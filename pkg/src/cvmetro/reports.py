"""Deterministic serialisation of command results.

Every command produces a :class:`Report`: ordered metadata, a fixed column
list and one row per record.  CSV output starts with ``#``-prefixed
metadata lines, writes floats with 17 significant digits and never depends
on dictionary iteration order of the caller, so identical inputs give
identical bytes.  JSON output uses the shortest repr that round-trips,
which is just as exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from . import __version__

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, FLOAT_FORMAT)


def _plain(value: Any) -> Any:
    """Reduce numpy scalars, complex numbers and tuples to JSON-friendly values."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "item") and not isinstance(value, (list, tuple, dict)):
        return _plain(value.item())
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


@dataclass(frozen=True)
class ReportRecord:
    """One compared quantity: the computed value next to its reference.

    ``relation`` is ``"=="`` for agreement checks and ``"<="`` for bounds,
    where only an excess over the reference counts against the tolerance.
    ``printed`` keeps a published value when it differs from the reference.
    """

    name: str
    column: str
    inputs: Mapping[str, Any]
    backend: str
    value: float
    reference: float | None
    tolerance: float | None
    cutoff: int | None
    note: str = ""
    printed: float | None = None
    relation: str = "=="

    @property
    def abs_dev(self) -> float | None:
        return None if self.reference is None else abs(self.value - self.reference)

    @property
    def rel_dev(self) -> float | None:
        if self.reference is None:
            return None
        return self.abs_dev / abs(self.reference) if self.reference != 0 else self.abs_dev

    @property
    def passed(self) -> bool | None:
        if self.reference is None or self.tolerance is None:
            return None
        slack = self.tolerance * max(1.0, abs(self.reference))
        if self.relation == "<=":
            return self.value <= self.reference + slack
        return self.abs_dev <= slack

    COLUMNS = ("name", "column", "inputs", "backend", "cutoff", "value", "relation", "reference",
               "abs_dev", "rel_dev", "tolerance", "passed", "printed", "note")

    def row(self) -> dict[str, Any]:
        return {c: getattr(self, c) for c in self.COLUMNS}


@dataclass
class Report:
    kind: str
    meta: dict[str, Any]
    columns: Sequence[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    ok: bool = True

    @classmethod
    def from_records(cls, kind: str, meta: dict[str, Any], records: Iterable[ReportRecord]) -> "Report":
        records = list(records)
        ok = all(r.passed is not False for r in records)
        return cls(kind, meta, ReportRecord.COLUMNS, [r.row() for r in records],
                   {"records": len(records), "failed": sum(r.passed is False for r in records)}, ok)

    def _header(self) -> list[tuple[str, Any]]:
        return [("cvmetro", __version__), ("kind", self.kind), *self.meta.items(),
                *(("summary." + k, v) for k, v in self.summary.items()), ("status", "PASS" if self.ok else "FAIL")]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self._header():
            buf.write(f"# {key}: {_cell(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "cvmetro": __version__,
            "kind": self.kind,
            "meta": _plain(self.meta),
            "summary": _plain(self.summary),
            "status": "PASS" if self.ok else "FAIL",
            "columns": list(self.columns),
            "rows": [{c: _plain(row.get(c)) for c in self.columns} for row in self.rows],
        }
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def gnuplot_stub(data_path: str, report: Report, x: str, y: str, *, extra: Sequence[str] = (),
                 command: str | None = None) -> str:
    """A plain gnuplot script reading ``data_path`` (CSV) and plotting ``y`` against ``x``.

    ``command`` replaces the default ``plot`` line, e.g. with an ``splot``
    for maps.
    """
    cols = list(report.columns)
    xi, yi = cols.index(x) + 1, cols.index(y) + 1
    lines = [
        f"# gnuplot script for {report.kind}; data written by cvmetro {__version__}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        f"set ylabel '{y}'",
        *extra,
        command or f"plot '{data_path}' using {xi}:{yi} with linespoints",
    ]
    return "\n".join(lines) + "\n"
