from typing import Optional

from pydantic import BaseModel, Field

from .cohomology import MasseyReport


class CDGAReport(BaseModel):
    name: str
    dimensions: list[int]
    betti: list[int]
    orientation: Optional[str] = None
    representatives: dict[str, list[str]] = Field(default_factory=dict)


class GeneratorReport(BaseModel):
    label: str
    degree: int
    kind: str
    differential: str
    image: str


class MinimalModelReport(BaseModel):
    algebra: str
    bound: int
    generators: list[GeneratorReport]
    census: dict[str, int]
    quasi_isomorphic: dict[str, bool]
    injective_next: bool
    chain_map: bool
    minimal: bool
    verified_through: Optional[int] = None
    caveats: list[str] = Field(default_factory=list)


class FormalityReport(BaseModel):
    algebra: str
    bound: int
    verdict: str
    witness: Optional[MasseyReport] = None
    triples_tried: int = 0
    complements_tried: int = 0
    checked_through: int
    formal_by_theorem: bool = False


class MasseyPairingReport(BaseModel):
    massey: MasseyReport
    against: str
    integral: str
    choice_independent: bool


class MinimalModelRunReport(BaseModel):
    cdga: Optional[CDGAReport] = None
    model: MinimalModelReport
    formality: Optional[FormalityReport] = None
    massey: Optional[MasseyPairingReport] = None
