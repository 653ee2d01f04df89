from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any

import anyio
import yaml

from gencomplex.algebra.grammar import normalize_table_notation
from gencomplex.algebra.liealg import LieModel, parse_algebra
from gencomplex.core.config import Settings, get_settings
from gencomplex.core.observability import correlation_context
from gencomplex.schemas.table import TableCell, TableReport, TableRow
from gencomplex.services import exceptions
from gencomplex.services.cohomology import CohomologyService
from gencomplex.services.gcs import GCSService

logger = logging.getLogger("gencomplex.table_worker")

COLUMNS: dict[str, int] = {"type3": 3, "type2": 2, "type1": 1, "symplectic": 0}
NONEXISTENT = "--"
NOT_CHECKED = "-- (not machine-checked)"
SKIPPED = "skipped"


@dataclass
class TableEntry:
    row: int
    algebra: str
    b1: int
    b2: int
    cells: dict[str, str | None]
    note: str | None = None
    path: Path | None = field(default=None, compare=False)


def load_entry(path: Path) -> TableEntry:
    try:
        data: Any = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise exceptions.ParseError(f"cannot read table row {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise exceptions.ParseError(f"{path}: expected a mapping")
    try:
        cells = data.get("cells") or {}
        unknown = set(cells) - set(COLUMNS)
        if unknown:
            raise exceptions.ParseError(f"{path}: unknown columns {sorted(unknown)}")
        return TableEntry(
            row=int(data["row"]),
            algebra=str(data["algebra"]),
            b1=int(data["b1"]),
            b2=int(data["b2"]),
            cells={column: _cell_text(cells.get(column)) for column in COLUMNS},
            note=data.get("note"),
            path=path,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise exceptions.ParseError(f"{path}: malformed table row: {exc}") from exc


def _cell_text(value: Any) -> str | None:
    if value is None:
        return None
    text = str(value).strip()
    if not text or text in (NONEXISTENT, "—", "-"):
        return None
    return text


def load_entries(directory: str | Path) -> list[TableEntry]:
    directory = Path(directory)
    if not directory.is_dir():
        raise exceptions.InputError(f"{directory} is not a directory")
    paths = sorted(directory.glob("*.yaml")) + sorted(directory.glob("*.yml"))
    if not paths:
        raise exceptions.InputError(f"no table rows in {directory}")
    entries = [load_entry(path) for path in paths]
    return sorted(entries, key=lambda entry: entry.row)


class TableWorker:
    """Verifies the six-dimensional nilpotent table row by row.

    Rows run concurrently in worker threads, bounded by ``WORKER_CONCURRENCY``.
    Each row recomputes (b1, b2) and checks every existence cell: the spinor
    must be pure, nondegenerate and closed with the column's type. Symplectic
    cells are checked as closed 2-forms with nonzero top power and then as the
    type-0 spinor exp(iω). Nonexistence cells are reported, not checked.
    """

    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._cohomology = CohomologyService(self.settings)
        self._gcs = GCSService(self.settings)
        self._metrics: dict[str, int] = {
            "rows": 0,
            "cells": 0,
            "verified": 0,
            "failed": 0,
            "not_checked": 0,
            "betti_mismatches": 0,
            "skipped": 0,
        }

    def run(self, directory: str | Path | None = None, *, verify_cells: bool = True) -> TableReport:
        return anyio.run(self.run_async, directory, verify_cells)

    async def run_async(self, directory: str | Path | None = None, verify_cells: bool = True) -> TableReport:
        directory = Path(directory) if directory is not None else self.settings.table1_path()
        entries = load_entries(directory)
        logger.info(
            "table_worker_started",
            extra={"directory": str(directory), "rows": len(entries), "concurrency": self.settings.WORKER_CONCURRENCY},
        )
        limiter = anyio.CapacityLimiter(self.settings.WORKER_CONCURRENCY)
        results: dict[int, TableRow] = {}

        async def run_row(position: int, entry: TableEntry) -> None:
            results[position] = await anyio.to_thread.run_sync(
                partial(self._verify_in_context, entry, verify_cells), limiter=limiter
            )

        async with anyio.create_task_group() as group:
            for position, entry in enumerate(entries):
                group.start_soon(run_row, position, entry)

        rows = [results[position] for position in range(len(entries))]
        for row in rows:
            self._collect(row)
        report = TableReport(
            directory=str(directory),
            rows=rows,
            cells=self._metrics["cells"],
            verified=self._metrics["verified"],
            failed=self._metrics["failed"],
            not_checked=self._metrics["not_checked"],
            skipped=self._metrics["skipped"],
            betti_mismatches=self._metrics["betti_mismatches"],
            passes=self._metrics["failed"] == 0 and self._metrics["betti_mismatches"] == 0,
        )
        logger.info("table_worker_finished", extra={"directory": str(directory), **self._metrics})
        return report

    # rows -----------------------------------------------------------------

    def _verify_in_context(self, entry: TableEntry, verify_cells: bool) -> TableRow:
        with correlation_context(prefix=f"table-row{entry.row:02d}"):
            return self.verify_row(entry, verify_cells=verify_cells)

    def verify_row(self, entry: TableEntry, *, verify_cells: bool = True) -> TableRow:
        try:
            model = parse_algebra(entry.algebra)
            betti = self._cohomology.cohomology(model).betti
        except exceptions.ComputationError as exc:
            logger.warning("table_row_unreadable", extra={"row": entry.row, "error": str(exc)})
            return TableRow(
                row=entry.row,
                algebra=entry.algebra,
                b1=-1,
                b2=-1,
                expected_b1=entry.b1,
                expected_b2=entry.b2,
                betti_ok=False,
                cells=[self._unchecked(column, text) for column, text in entry.cells.items()],
                note=entry.note,
                error=str(exc),
            )
        if verify_cells:
            cells = [self.verify_cell(model, column, text) for column, text in entry.cells.items()]
        else:
            cells = [self._skipped(column, text) for column, text in entry.cells.items()]
        row = TableRow(
            row=entry.row,
            algebra=model.tuple_string(),
            b1=betti[1],
            b2=betti[2],
            expected_b1=entry.b1,
            expected_b2=entry.b2,
            betti_ok=(betti[1], betti[2]) == (entry.b1, entry.b2),
            cells=cells,
            note=entry.note,
        )
        logger.info(
            "table_row_verified",
            extra={
                "row": entry.row,
                "algebra": row.algebra,
                "betti_ok": row.betti_ok,
                "statuses": [cell.status for cell in cells],
            },
        )
        return row

    def verify_cell(self, model: LieModel, column: str, text: str | None) -> TableCell:
        expected = COLUMNS[column]
        if text is None:
            return self._unchecked(column, None)
        entry = normalize_table_notation(text)
        try:
            if column == "symplectic":
                rho = self._symplectic_spinor(model, entry)
            else:
                rho = model.parse(entry)
            _, report = self._gcs.structure_from_spinor(model, rho)
        except exceptions.MathematicalFailure as exc:
            return self._failed(column, expected, entry, str(exc))
        except exceptions.InputError as exc:
            return self._failed(column, expected, entry, f"unreadable: {exc}")
        reason = None
        if not report.pure:
            reason = "not pure"
        elif not report.nondegenerate:
            reason = "degenerate"
        elif not report.closed:
            reason = "not closed"
        elif report.type != expected:
            reason = f"type {report.type}"
        if reason is not None:
            return self._failed(column, expected, entry, reason, found=report.type)
        return TableCell(
            column=column,
            expected_type=expected,
            entry=entry,
            status=f"ok(t={report.type})",
            verified=True,
            type=report.type,
        )

    def _symplectic_spinor(self, model: LieModel, text: str):
        omega = model.parse(text)
        if not omega.is_homogeneous(2) or not omega:
            raise exceptions.InputError(f"{text} is not a 2-form")
        d_omega = model.d(omega)
        if d_omega:
            raise exceptions.NonClosedFormError("not closed", witness=str(d_omega))
        if not omega.power(model.n // 2):
            raise exceptions.DegenerateFormError("degenerate")
        return omega.scale(model.field.imag_unit).exp()

    @staticmethod
    def _failed(column: str, expected: int, entry: str, reason: str, *, found: int | None = None) -> TableCell:
        return TableCell(
            column=column,
            expected_type=expected,
            entry=entry,
            status=f"FAIL({reason})",
            verified=False,
            type=found,
            reason=reason,
        )

    @staticmethod
    def _skipped(column: str, text: str | None) -> TableCell:
        if text is None:
            return TableWorker._unchecked(column, None)
        entry = normalize_table_notation(text)
        return TableCell(column=column, expected_type=COLUMNS[column], entry=entry, status=SKIPPED)

    @staticmethod
    def _unchecked(column: str, text: str | None) -> TableCell:
        return TableCell(column=column, expected_type=COLUMNS[column], entry=text, status=NOT_CHECKED)

    def _collect(self, row: TableRow) -> None:
        self._inc_metric("rows")
        if not row.betti_ok:
            self._inc_metric("betti_mismatches")
        for cell in row.cells:
            self._inc_metric("cells")
            if cell.status == SKIPPED:
                self._inc_metric("skipped")
            elif cell.verified is None:
                self._inc_metric("not_checked")
            elif cell.verified:
                self._inc_metric("verified")
            else:
                self._inc_metric("failed")

    def _inc_metric(self, key: str, amount: int = 1) -> None:
        self._metrics[key] = self._metrics.get(key, 0) + amount


# golden output ------------------------------------------------------------------

_ALGEBRA_WIDTH = 26
_CELL_WIDTH = 26


def format_table(report: TableReport) -> str:
    header = (
        f"{'#':>2}  {'algebra':<{_ALGEBRA_WIDTH}} {'b1':>2} {'b2':>3}  "
        + "  ".join(f"{column:<{_CELL_WIDTH}}" for column in COLUMNS)
    ).rstrip()
    lines = [header]
    for row in report.rows:
        betti = f"{row.b1:>2} {row.b2:>3}"
        if not row.betti_ok:
            betti += f"  FAIL(expected b1={row.expected_b1} b2={row.expected_b2})"
        cells = "  ".join(f"{cell.status:<{_CELL_WIDTH}}" for cell in row.cells)
        lines.append(f"{row.row:>2}  {row.algebra:<{_ALGEBRA_WIDTH}} {betti}  {cells}".rstrip())
    lines.append(
        f"rows={len(report.rows)} cells={report.cells} verified={report.verified} "
        f"failed={report.failed} not_checked={report.not_checked} skipped={report.skipped} "
        f"betti_mismatches={report.betti_mismatches}"
    )
    return "\n".join(lines) + "\n"


def main() -> None:
    from gencomplex.core.logging import configure_logging

    configure_logging()
    report = TableWorker().run()
    print(format_table(report), end="")
    raise SystemExit(0 if report.passes else 1)


if __name__ == "__main__":
    main()
