from typing import Optional

from pydantic import BaseModel, Field


class FiltrationReport(BaseModel):
    algebra: str
    dims: list[int]
    nilpotency_index: int
    central_series_dims: list[int]
    quotient_dims: list[int]
    generator_degrees: list[int]
    excluded_types: list[int] = Field(default_factory=list)
    exclusion_start: Optional[int] = None


class ParseReport(BaseModel):
    algebra: str
    n: int
    twist: str
    model: dict
    forms: dict[str, str] = Field(default_factory=dict)
    filtration: Optional[FiltrationReport] = None
