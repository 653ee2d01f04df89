from typing import Optional

from pydantic import BaseModel, Field

from .gcs import KahlerPairReport, VerificationReport


class DualModelReport(BaseModel):
    algebra: str
    twist: str
    fiber: int
    connection: str
    curvature: str
    fiber_twist: str
    basic_twist: str
    dual_algebra: str
    dual_twist: str
    self_dual: bool
    dual_model: dict = Field(default_factory=dict)
    images: dict[str, str] = Field(default_factory=dict)


class DualityReport(BaseModel):
    algebra: str
    dual_algebra: str
    invariant_forms: int
    invariant_vectors: int
    d_identity: bool
    clifford_identity: bool
    bracket_identity: bool
    orthogonal: bool
    mukai_identity: bool
    tau_squared: bool
    passes: bool
    witnesses: dict[str, str] = Field(default_factory=dict)


class TransportReport(BaseModel):
    spinor: str
    dual_spinor: str
    source: VerificationReport
    dual: VerificationReport
    type_change: Optional[int] = None
    predicted_type_change: Optional[int] = None
    u_correspondence: dict[str, bool] = Field(default_factory=dict)
    lemma_source: Optional[bool] = None
    lemma_dual: Optional[bool] = None
    passes: bool


class KahlerTransportReport(BaseModel):
    source: KahlerPairReport
    dual: KahlerPairReport
    preserved: bool


class TDualizeReport(BaseModel):
    dual: DualModelReport
    verification: Optional[DualityReport] = None
    transport: Optional[TransportReport] = None
