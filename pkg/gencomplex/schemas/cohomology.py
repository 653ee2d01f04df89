from typing import Optional

from pydantic import BaseModel, Field


class BettiReport(BaseModel):
    algebra: str
    betti: list[int]
    euler_characteristic: int
    representatives: dict[str, list[str]] = Field(default_factory=dict)


class TwistedCohomologyReport(BaseModel):
    algebra: str
    twist: str
    even: int
    odd: int
    h_cohomology: dict[str, int]
    h_even: int
    h_odd: int
    agree: bool


class LefschetzLevel(BaseModel):
    level: int
    power: int
    source_dim: int
    target_dim: int
    rank: int
    kernel_dim: int
    surjective: bool
    injective: bool
    kernel: list[str] = Field(default_factory=list)


class LefschetzReport(BaseModel):
    algebra: str
    omega: str
    passes: bool
    levels: list[LefschetzLevel]


class LemmaDegreeReport(BaseModel):
    degree: str
    holds: bool
    image_a_kernel_b: int
    image_b_kernel_a: int
    image_ab: int
    witnesses: list[str] = Field(default_factory=list)


class LemmaReport(BaseModel):
    label: str
    holds: bool
    image_a_kernel_b: int
    image_b_kernel_a: int
    image_ab: int
    failing_degrees: list[str] = Field(default_factory=list)
    degrees: list[LemmaDegreeReport] = Field(default_factory=list)
    witnesses: list[str] = Field(default_factory=list)


class MasseyReport(BaseModel):
    inputs: list[str]
    primitives: dict[str, str]
    degree: int
    representative: str
    indeterminacy_dim: int
    indeterminacy: list[str] = Field(default_factory=list)
    verdict: str


class SymplecticExistenceReport(BaseModel):
    algebra: str
    verdict: str
    closed_two_forms: int
    certificate_zero: bool
    witness: Optional[str] = None
    tried: int = 0
