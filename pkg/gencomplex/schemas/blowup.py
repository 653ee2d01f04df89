from typing import Optional

from pydantic import BaseModel, Field

from .cohomology import MasseyReport


class BlowupRingReport(BaseModel):
    ambient: str
    submanifold: str
    codimension: int
    k: int
    ambient_betti: list[int]
    submanifold_betti: list[int]
    blowup_betti: list[int]
    expected_betti: list[int]
    thom_class: str
    relation: str
    relation_holds: bool
    euler_ambient: int
    euler_submanifold: int
    euler_blowup: int
    euler_additive: bool


class BlowupLevel(BaseModel):
    level: int
    power: int
    ambient_kernel: int
    generic_kernel: Optional[int] = None
    sampled_kernels: dict[str, int] = Field(default_factory=dict)
    stable: bool
    predicted: Optional[str] = None
    prediction_holds: Optional[bool] = None


class BlowupLefschetzReport(BaseModel):
    ambient: str
    submanifold: str
    samples: list[str]
    levels: list[BlowupLevel]
    ambient_passes: bool
    generic_passes: Optional[bool] = None


class BlowupConditionsReport(BaseModel):
    ambient: str
    submanifold: str
    surface: bool
    kernel_restricts_nonzero: bool
    kernel_witness: Optional[str] = None
    thom_outside_image: bool
    kernel_pair_restricts_nonzero: bool
    kernel_pair_witness: list[str] = Field(default_factory=list)
    thom_times_kernel_outside_image: bool
    equivalences_hold: bool
    predictions: dict[str, str] = Field(default_factory=dict)


class MasseySurvivalReport(BaseModel):
    massey: MasseyReport
    image: str
    survives: bool


class BlowupReport(BaseModel):
    name: str
    ring: BlowupRingReport
    conditions: BlowupConditionsReport
    lefschetz: BlowupLefschetzReport
    massey: Optional[MasseySurvivalReport] = None
