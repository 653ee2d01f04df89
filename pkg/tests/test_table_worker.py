import pytest

from gencomplex.algebra.liealg import parse_algebra
from gencomplex.services import exceptions
from gencomplex.workers.table_worker import (
    NOT_CHECKED,
    SKIPPED,
    TableWorker,
    format_table,
    load_entries,
    load_entry,
)

ROW_ONE = "(0,0,12,13,14,15)"


def _write_row(directory, name, body):
    path = directory / name
    path.write_text(body, encoding="utf-8")
    return path


def test_table_rows_load_in_order(data_dir):
    entries = load_entries(data_dir / "table1")
    assert [entry.row for entry in entries] == list(range(1, 35))
    first = entries[0]
    assert first.algebra == ROW_ONE
    assert (first.b1, first.b2) == (2, 3)
    assert first.cells["type3"] is None
    assert first.cells["symplectic"] == "16+34-25"


def test_betti_only_run_matches_every_row(data_dir):
    report = TableWorker().run(data_dir / "table1", verify_cells=False)
    assert len(report.rows) == 34
    assert report.betti_mismatches == 0
    assert report.failed == 0
    assert report.verified == 0
    assert report.skipped > 0
    assert report.skipped + report.not_checked == report.cells == 34 * 4
    assert report.passes
    assert all(cell.status in (SKIPPED, NOT_CHECKED) for row in report.rows for cell in row.cells)


def test_full_table_verifies_every_existence_cell(data_dir):
    report = TableWorker().run(data_dir / "table1")
    failures = [
        (row.row, cell.column, cell.status) for row in report.rows for cell in row.cells if cell.verified is False
    ]
    assert failures == []
    assert report.verified + report.not_checked == report.cells
    assert report.passes


def test_single_cells():
    worker = TableWorker()
    model = parse_algebra(ROW_ONE)
    cell = worker.verify_cell(model, "type1", "(1+i2)exp i(36-45)")
    assert cell.verified
    assert cell.status == "ok(t=1)"

    cell = worker.verify_cell(model, "symplectic", "16+34-25")
    assert cell.verified and cell.type == 0

    assert worker.verify_cell(model, "type3", None).status == NOT_CHECKED


def test_failing_cells_carry_a_reason():
    worker = TableWorker()
    model = parse_algebra(ROW_ONE)
    degenerate = worker.verify_cell(model, "symplectic", "16")
    assert degenerate.verified is False
    assert degenerate.status.startswith("FAIL(")

    not_two_form = worker.verify_cell(model, "symplectic", "1")
    assert not_two_form.verified is False
    assert "unreadable" in not_two_form.reason

    wrong_type = worker.verify_cell(model, "type2", "(1+i2)exp i(36-45)")
    assert wrong_type.verified is False
    assert wrong_type.reason == "type 1"
    assert wrong_type.type == 1


def test_betti_mismatch_fails_the_run(tmp_path):
    _write_row(
        tmp_path,
        "row01.yaml",
        'row: 1\nalgebra: "(0,0,12)"\nb1: 3\nb2: 2\ncells:\n  symplectic: "--"\n',
    )
    report = TableWorker().run(tmp_path, verify_cells=False)
    assert report.betti_mismatches == 1
    assert not report.passes
    assert "FAIL(expected b1=3 b2=2)" in format_table(report)


def test_table_input_errors(tmp_path):
    with pytest.raises(exceptions.InputError):
        load_entries(tmp_path)
    with pytest.raises(exceptions.InputError):
        load_entries(tmp_path / "missing")
    path = _write_row(tmp_path, "bad.yaml", 'row: 1\nalgebra: "(0,0)"\nb1: 2\nb2: 1\ncells:\n  type4: "1"\n')
    with pytest.raises(exceptions.ParseError):
        load_entry(path)
    path = _write_row(tmp_path, "short.yaml", 'row: 1\nalgebra: "(0,0)"\n')
    with pytest.raises(exceptions.ParseError):
        load_entry(path)


def test_format_table_summarises_the_run(data_dir):
    report = TableWorker().run(data_dir / "table1", verify_cells=False)
    lines = format_table(report).splitlines()
    assert lines[0].split()[:4] == ["#", "algebra", "b1", "b2"]
    assert len(lines) == 36
    assert lines[1].split()[:4] == ["1", ROW_ONE, "2", "3"]
    assert lines[-1].startswith("rows=34 cells=136 verified=0 failed=0")
