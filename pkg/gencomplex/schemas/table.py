from typing import Optional

from pydantic import BaseModel, Field


class TableCell(BaseModel):
    column: str
    expected_type: int
    entry: Optional[str] = None
    status: str
    verified: Optional[bool] = None
    type: Optional[int] = None
    reason: Optional[str] = None


class TableRow(BaseModel):
    row: int
    algebra: str
    b1: int
    b2: int
    expected_b1: int
    expected_b2: int
    betti_ok: bool
    cells: list[TableCell] = Field(default_factory=list)
    note: Optional[str] = None
    error: Optional[str] = None


class TableReport(BaseModel):
    directory: str
    rows: list[TableRow]
    cells: int
    verified: int
    failed: int
    not_checked: int
    skipped: int = 0
    betti_mismatches: int
    passes: bool
