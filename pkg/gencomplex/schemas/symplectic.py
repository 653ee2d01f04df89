from typing import Optional

from pydantic import BaseModel, Field

from .cohomology import LemmaReport


class SL2Report(BaseModel):
    algebra: str
    omega: str
    relations: dict[str, bool]
    constants: dict[str, str] = Field(default_factory=dict)
    passes: bool


class PhiReport(BaseModel):
    algebra: str
    omega: str
    forms_checked: int
    d_identity: bool
    delta_identity: bool
    e1_dims: dict[str, int]
    betti: list[int]
    e1_matches_betti: bool
    failures: list[str] = Field(default_factory=list)


class HarmonicReport(BaseModel):
    algebra: str
    omega: str
    harmonic_dims: list[int]
    betti: list[int]
    all_harmonic: bool
    lefschetz: bool
    ddelta_lemma: bool
    consistent: bool
    lemma: Optional[LemmaReport] = None
    decompositions: dict[str, list[str]] = Field(default_factory=dict)


class SymplecticCheckReport(BaseModel):
    sl2: SL2Report
    phi: Optional[PhiReport] = None
    harmonic: Optional[HarmonicReport] = None
