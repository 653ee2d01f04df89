from typing import Optional

from pydantic import BaseModel, Field

from .cohomology import LemmaReport


class VerificationReport(BaseModel):
    algebra: str
    spinor: str
    twist: str = "0"
    twist_exact: Optional[bool] = None
    pure: bool
    nondegenerate: bool
    integrable: bool
    integrable_courant: Optional[bool] = None
    closed: bool
    type: Optional[int] = None
    degeneracy_locus: Optional[str] = None
    is_structure: bool
    witnesses: dict[str, str] = Field(default_factory=dict)


class UDecompositionReport(BaseModel):
    dims: dict[str, int]
    eigenspaces_match: bool
    mukai_orthogonal: bool
    mukai_nondegenerate: bool
    components: dict[str, str] = Field(default_factory=dict)


class E1Report(BaseModel):
    dims: dict[str, int]
    total: int
    twisted_total: int
    degenerates: bool
    euler_sum: int
    euler_characteristic: int
    euler_ok: bool


class GeneralizedCohomologyReport(BaseModel):
    lemma_holds: bool
    dims: dict[str, int]
    total: int
    twisted_total: int
    mukai_orthogonal: bool
    mukai_nondegenerate: bool


class DeformationReport(BaseModel):
    maurer_cartan: bool
    witness: Optional[str] = None
    spinor: Optional[str] = None
    graph_matches_annihilator: Optional[bool] = None
    verification: Optional[VerificationReport] = None


class KahlerPairReport(BaseModel):
    commute: bool
    metric_squares_to_identity: bool
    positive_definite: bool
    failing_minor: Optional[int] = None
    metric: list[list[str]] = Field(default_factory=list)
    b_field: str = "0"
    intersection_dim: int = 0
    j_plus_complex: bool = False
    j_minus_complex: bool = False
    valid: bool


class SubmanifoldReport(BaseModel):
    dimension: int
    invariant: bool
    coisotropic: Optional[bool] = None
    lagrangian: Optional[bool] = None
    transverse_complex: Optional[bool] = None


class StructureReport(BaseModel):
    verification: VerificationReport
    decomposition: Optional[UDecompositionReport] = None
    e1: Optional[E1Report] = None
    deformation: Optional[DeformationReport] = None


class DDLemmaReport(BaseModel):
    verification: VerificationReport
    lemma: LemmaReport
    generalized: Optional[GeneralizedCohomologyReport] = None
