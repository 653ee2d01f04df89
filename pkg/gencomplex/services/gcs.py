"""Generalized complex structures on Lie algebra models.

A structure is given by a pure spinor ``ρ``. The annihilator ``L``, the
endomorphism ``J`` and the decomposition of the forms into the eigenspaces
``U^k`` are all derived from it and cached on the structure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from gencomplex.algebra.exterior import (
    Form,
    GenVector,
    Multivector,
    SpinBivector,
    all_masks,
    exp_act,
    mask_positions,
    masks_of_degree,
    operator_matrix,
    popcount,
    wedge_sign,
)
from gencomplex.algebra.grammar import format_form, format_genvector, format_scalar
from gencomplex.algebra.linalg import Matrix, Subspace, Vector, vec_add
from gencomplex.algebra.liealg import LieModel
from gencomplex.algebra.scalars import Scalar, ScalarField
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.gcs import (
    DeformationReport,
    E1Report,
    GeneralizedCohomologyReport,
    KahlerPairReport,
    SubmanifoldReport,
    UDecompositionReport,
    VerificationReport,
)

from . import exceptions
from .cohomology import CohomologyService, LemmaResult, parity_grading

logger = logging.getLogger(__name__)


# spinor linear algebra ----------------------------------------------------------


def form_positions(n: int) -> dict[int, int]:
    return mask_positions(all_masks(n))


def form_vector(form: Form) -> Vector:
    return form.to_vector(form_positions(form.n))


def vector_form(n: int, field: ScalarField, vector: Vector) -> Form:
    return Form.from_vector(n, field, vector, all_masks(n))


def clifford_matrix(rho: Form) -> Matrix:
    """Columns are the Clifford actions of the 2n basis vectors of V ⊕ V* on ρ."""
    positions = form_positions(rho.n)
    columns = [GenVector.basis(rho.n, rho.field, j).act(rho).to_vector(positions) for j in range(2 * rho.n)]
    return Matrix.from_columns(columns, len(positions), rho.field)


def annihilator(rho: Form) -> Subspace:
    return clifford_matrix(rho).kernel()


def conjugate_space(space: Subspace) -> Subspace:
    conj = space.field.conjugate
    return Subspace.span([{k: conj(v) for k, v in b.items()} for b in space.basis], space.ambient, space.field)


def genvectors(space: Subspace, n: int) -> list[GenVector]:
    return [GenVector.from_coordinates(n, space.field, b) for b in space.basis]


def pure_spinor_line(vectors: Sequence[GenVector]) -> Form | None:
    """The spinor annihilated by a maximal isotropic span, or None if the common kernel is not a line."""
    if not vectors:
        raise exceptions.InputError("need at least one generalized vector")
    n, field = vectors[0].n, vectors[0].field
    masks = all_masks(n)
    blocks = [operator_matrix(v.act, n, field, masks, masks) for v in vectors]
    kernel = blocks[0].vstack(*blocks[1:]).kernel() if len(blocks) > 1 else blocks[0].kernel()
    if kernel.dim != 1:
        return None
    return vector_form(n, field, kernel.basis[0])


def mukai_scalar(a: Form, b: Form) -> Scalar:
    """The top coefficient of α(a) ∧ b, read off monomial by monomial."""
    top = (1 << a.n) - 1
    total = a.field.zero
    for mask, value in a.items():
        other = b.coefficient(top ^ mask)
        if not other:
            continue
        k = popcount(mask)
        sign = wedge_sign(mask, top ^ mask) * (-1 if (k * (k - 1) // 2) % 2 else 1)
        total = total + (value * other if sign > 0 else -(value * other))
    return total


def courant_bracket(model: LieModel, u: GenVector, v: GenVector) -> GenVector:
    """[X+ξ, Y+η]_H = [X,Y] + ι_X dη − ι_Y dξ + ½d(ι_Xη − ι_Yξ) − ι_Y ι_X H.

    Coefficients may be functions of the formal variables, so the Lie bracket
    picks up the derivative terms X(Y_k) − Y(X_k).
    """
    n, f = model.n, model.field
    x, y = u.vector, v.vector
    xi, eta = u.covector_form().with_field(f), v.covector_form().with_field(f)
    bracket = model.lie_bracket(x, y)
    vector = [bracket.get(k + 1, f.zero) for k in range(n)]
    if model.coframe:
        for k in range(n):
            vector[k] = (
                vector[k]
                + model.coefficient_differential(y[k]).evaluate(x)
                - model.coefficient_differential(x[k]).evaluate(y)
            )
    covector = model.d(eta).interior_vector(x) - model.d(xi).interior_vector(y)
    pairing = eta.interior_vector(x) - xi.interior_vector(y)
    if pairing:
        covector = covector + model.d(pairing).scale(Fraction(1, 2))
    if model.twist:
        covector = covector - model.twist.interior_vector(x).interior_vector(y)
    covector_values = [covector.coefficient(1 << k) for k in range(n)]
    return GenVector(n, f, vector, covector_values)


def _i_power(field: ScalarField, k: int) -> Scalar:
    value = field.one
    for _ in range(k % 4):
        value = value * field.imag_unit
    return value


# structures ----------------------------------------------------------------------


class GCStructure:
    """A candidate generalized complex structure ``(model, ρ)``.

    Construction only computes the annihilator; the remaining data is derived
    lazily and requires ``ρ`` to be pure and nondegenerate.
    """

    def __init__(self, model: LieModel, rho: Form):
        if rho.n != model.n:
            raise exceptions.DimensionMismatchError(f"spinor on {rho.n} generators for a model on {model.n}")
        rho = rho.with_field(model.field) if rho.field != model.field else rho
        if not rho:
            raise exceptions.InputError("the zero form is not a spinor")
        if model.n % 2:
            raise exceptions.DomainError("generalized complex structures need an even-dimensional algebra")
        self.model = model
        self.rho = rho
        self.n = model.n
        self.m = model.n // 2
        self.field = model.field
        self.L = annihilator(rho)
        self.L_bar = conjugate_space(self.L)

    # basic invariants -------------------------------------------------

    @property
    def is_pure(self) -> bool:
        return self.L.dim == self.n

    @cached_property
    def mukai_top(self) -> Scalar:
        return mukai_scalar(self.rho, self.rho.conjugate())

    @property
    def is_nondegenerate(self) -> bool:
        return self.is_pure and bool(self.mukai_top)

    @property
    def type(self) -> int:
        return self.rho.lowest_degree() or 0

    @cached_property
    def d_h_rho(self) -> Form:
        return self.model.d_h(self.rho)

    @property
    def is_closed(self) -> bool:
        return not self.d_h_rho

    @cached_property
    def integrating_vector(self) -> GenVector | None:
        """Some X + ξ with d_H ρ = (X + ξ)·ρ."""
        solution = clifford_matrix(self.rho).solve(form_vector(self.d_h_rho))
        if solution is None:
            return None
        return GenVector.from_coordinates(self.n, self.field, solution)

    @property
    def is_integrable(self) -> bool:
        return self.is_pure and self.integrating_vector is not None

    @cached_property
    def courant_witness(self) -> tuple[int, int, GenVector] | None:
        """First pair of annihilator basis vectors whose bracket leaves L."""
        basis = genvectors(self.L, self.n)
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                bracket = courant_bracket(self.model, basis[a], basis[b])
                if not self.L.contains(bracket.coordinates()):
                    return a, b, bracket
        return None

    @property
    def is_courant_involutive(self) -> bool:
        return self.courant_witness is None

    @property
    def is_structure(self) -> bool:
        return self.is_nondegenerate and self.is_integrable

    def _require_structure(self) -> None:
        if not self.is_nondegenerate:
            raise exceptions.DomainError(f"{format_form(self.rho)} is not a nondegenerate pure spinor")

    # J and its spin action ---------------------------------------------

    @cached_property
    def jay(self) -> Matrix:
        """J on (V ⊕ V*) ⊗ C: +i on L, −i on L̄."""
        self._require_structure()
        size = 2 * self.n
        basis = self.L.basis + self.L_bar.basis
        change = Matrix.from_columns(basis, size, self.field)
        unit = self.field.imag_unit
        diagonal = Matrix.from_entries(
            {(j, j): unit if j < self.n else -unit for j in range(size)}, (size, size), self.field
        )
        jay = change @ diagonal @ change.inverse()
        if jay != jay.conjugate():
            raise exceptions.VerificationFailure("J is not real", witness=format_form(self.rho))
        return jay

    @cached_property
    def spin(self) -> SpinBivector:
        """J written as an element of Λ²(V ⊕ V*) through the pairing."""
        size = 2 * self.n
        pairs = [(a, b) for a in range(size) for b in range(a + 1, size)]
        columns = []
        for a, b in pairs:
            piece = SpinBivector(
                self.n,
                self.field,
                [(1, GenVector.basis(self.n, self.field, a), GenVector.basis(self.n, self.field, b))],
            )
            dod = piece.endomorphism().to_dod()
            columns.append({i * size + j: v for i, row in dod.items() for j, v in row.items()})
        target = {i * size + j: v for i, row in self.jay.to_dod().items() for j, v in row.items()}
        solution = Matrix.from_columns(columns, size * size, self.field).solve(target)
        if solution is None:
            raise exceptions.VerificationFailure("J is not orthogonal for the natural pairing")
        terms = [
            (value, GenVector.basis(self.n, self.field, pairs[k][0]), GenVector.basis(self.n, self.field, pairs[k][1]))
            for k, value in sorted(solution.items())
        ]
        return SpinBivector(self.n, self.field, terms)

    def jay_action(self, form: Form) -> Form:
        return self.spin.act(form.with_field(self.field))

    @cached_property
    def jay_matrix(self) -> Matrix:
        masks = all_masks(self.n)
        return operator_matrix(self.jay_action, self.n, self.field, masks, masks)

    def eigenspace(self, k: int) -> Subspace:
        size = len(all_masks(self.n))
        shift = Matrix.identity(size, self.field).scale(self.field.imag_unit * self.field.convert(k))
        return (self.jay_matrix - shift).kernel()

    # the U^k decomposition ----------------------------------------------

    @property
    def levels(self) -> range:
        return range(-self.m, self.m + 1)

    @cached_property
    def u_spaces(self) -> dict[int, Subspace]:
        """U^{m−j} = Λ^j L̄ · ρ."""
        self._require_structure()
        size = len(all_masks(self.n))
        lbar = genvectors(self.L_bar, self.n)
        spaces: dict[int, Subspace] = {}
        current: list[tuple[int, Form]] = [(-1, self.rho)]
        for j in range(self.n + 1):
            spaces[self.m - j] = Subspace.span([form_vector(f) for _, f in current], size, self.field)
            current = [(i, lbar[i].act(f)) for last, f in current for i in range(last + 1, len(lbar))]
            current = [(i, f) for i, f in current if f]
        return spaces

    @cached_property
    def _u_change(self) -> tuple[Matrix, Matrix, dict[int, tuple[int, int]]]:
        columns: list[Vector] = []
        blocks: dict[int, tuple[int, int]] = {}
        for k in self.levels:
            start = len(columns)
            columns += self.u_spaces[k].basis
            blocks[k] = (start, len(columns))
        size = len(all_masks(self.n))
        if len(columns) != size:
            raise exceptions.VerificationFailure(
                f"the spaces U^k span {len(columns)} of {size} dimensions", witness=format_form(self.rho)
            )
        change = Matrix.from_columns(columns, size, self.field)
        return change, change.inverse(), blocks

    def u_basis(self, k: int) -> list[Vector]:
        return self.u_spaces[k].basis if k in self.u_spaces else []

    def _block_coordinates(self, vector: Vector) -> dict[int, Vector]:
        _, inverse, blocks = self._u_change
        coords = inverse.apply(vector)
        out: dict[int, Vector] = {}
        for k, (start, stop) in blocks.items():
            part = {i - start: v for i, v in coords.items() if start <= i < stop}
            if part:
                out[k] = part
        return out

    def decompose(self, form: Form) -> dict[int, Form]:
        """Components of a form in each U^k."""
        change, _, blocks = self._u_change
        out: dict[int, Form] = {}
        for k, part in self._block_coordinates(form_vector(form.with_field(self.field))).items():
            start, _ = blocks[k]
            vector: Vector = {}
            for i, value in part.items():
                vector = vec_add(vector, {r: value * c for r, c in change.column(start + i).items()})
            out[k] = vector_form(self.n, self.field, vector)
        return out

    def project(self, form: Form, k: int) -> Form:
        return self.decompose(form).get(k, Form.zero(self.n, self.field))

    def level_of(self, form: Form) -> int | None:
        parts = self.decompose(form)
        if len(parts) == 1:
            return next(iter(parts))
        return None

    def del_split(self, form: Form, k: int) -> tuple[Form, Form]:
        """(∂a, ∂̄a) for a in U^k, with d_H a = ∂a + ∂̄a."""
        parts = self.decompose(form)
        if set(parts) - {k}:
            raise exceptions.DomainError(f"{format_form(form)} does not lie in U^{k}")
        image = self.decompose(self.model.d_h(form.with_field(self.field)))
        stray = {level: part for level, part in image.items() if level not in (k - 1, k + 1)}
        if stray:
            level = min(stray)
            raise exceptions.IntegrabilityError(
                f"d_H maps U^{k} into U^{level}", witness=format_form(stray[level])
            )
        zero = Form.zero(self.n, self.field)
        return image.get(k + 1, zero), image.get(k - 1, zero)

    def _block_map(self, source: int, target: int) -> Matrix:
        """The component U^source → U^target of d_H in block coordinates."""
        _, _, blocks = self._u_change
        d_h = self.model.d_h_matrix()
        if source not in blocks or target not in blocks:
            rows = blocks[target][1] - blocks[target][0] if target in blocks else 0
            cols = blocks[source][1] - blocks[source][0] if source in blocks else 0
            return Matrix.zeros(rows, cols, self.field)
        start, stop = blocks[target]
        columns = []
        for vector in self.u_basis(source):
            columns.append(self._block_coordinates(d_h.apply(vector)).get(target, {}))
        return Matrix.from_columns(columns, stop - start, self.field)

    def e1_dims(self) -> dict[int, int]:
        """dim H_∂^k = dim U^k − rank ∂_k − rank ∂_{k−1}."""
        ranks = {k: self._block_map(k, k + 1).rank() for k in self.levels}
        return {k: self.u_spaces[k].dim - ranks[k] - ranks.get(k - 1, 0) for k in self.levels}

    def graded_operator(self, inverse: bool = False) -> Matrix:
        """The operator acting by i^k (or i^{−k}) on U^k."""
        change, change_inverse, blocks = self._u_change
        entries = {}
        for k, (start, stop) in blocks.items():
            value = _i_power(self.field, -k if inverse else k)
            for j in range(start, stop):
                entries[(j, j)] = value
        size = change.rows
        return change @ Matrix.from_entries(entries, (size, size), self.field) @ change_inverse

    def d_j_matrix(self) -> Matrix:
        """d^J = J^{-1} d_H J with J acting by i^k on U^k."""
        return self.graded_operator(inverse=True) @ self.model.d_h_matrix() @ self.graded_operator()

    # transforms ---------------------------------------------------------

    def with_spinor(self, rho: Form, model: LieModel | None = None) -> "GCStructure":
        return GCStructure(model or self.model, rho)

    def __repr__(self) -> str:
        return f"GCStructure({self.model.tuple_string()}, {format_form(self.rho)})"


@dataclass
class DeformationResult:
    maurer_cartan: bool
    witness: str | None
    structure: GCStructure | None = None
    graph_matches_annihilator: bool | None = None
    report: VerificationReport | None = None

    def to_report(self) -> DeformationReport:
        return DeformationReport(
            maurer_cartan=self.maurer_cartan,
            witness=self.witness,
            spinor=format_form(self.structure.rho) if self.structure is not None else None,
            graph_matches_annihilator=self.graph_matches_annihilator,
            verification=self.report,
        )


@dataclass
class KahlerPair:
    commute: bool
    metric_squares_to_identity: bool
    positive_definite: bool
    failing_minor: int | None
    metric: list[list[Scalar]] = dataclass_field(default_factory=list)
    b_field: Form | None = None
    intersection_dim: int = 0
    j_plus_complex: bool = False
    j_minus_complex: bool = False

    @property
    def valid(self) -> bool:
        return self.commute and self.metric_squares_to_identity and self.positive_definite


# service -------------------------------------------------------------------------


class GCSService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)
        self._cohomology = CohomologyService(self.settings)

    # construction and verification --------------------------------------

    def structure_from_spinor(self, model: LieModel, rho: Form | str) -> tuple[GCStructure, VerificationReport]:
        if isinstance(rho, str):
            rho = model.parse(rho)
        structure = GCStructure(model, rho)
        return structure, self.verify(structure)

    def verify(self, structure: GCStructure) -> VerificationReport:
        model, field = structure.model, structure.field
        witnesses: dict[str, str] = {}
        pure = structure.is_pure
        if not pure:
            witnesses["annihilator_dim"] = str(structure.L.dim)
        nondegenerate = structure.is_nondegenerate
        locus = None
        if pure and not nondegenerate:
            witnesses["intersection_dim"] = str((structure.L & structure.L_bar).dim)
        elif nondegenerate and not field.is_constant(structure.mukai_top):
            locus = str(field.numerator_expr(structure.mukai_top))
        integrable = structure.is_integrable
        if pure and not integrable:
            witnesses["d_h_rho"] = format_form(structure.d_h_rho)
        courant = structure.is_courant_involutive if pure else None
        if courant is False:
            a, b, bracket = structure.courant_witness
            witnesses["courant"] = f"[L{a + 1}, L{b + 1}] = {format_genvector(bracket)}"
        twist_exact = None
        if model.has_twist and not model.is_extended:
            vector = model.twist.to_vector(mask_positions(masks_of_degree(model.n, 3)))
            twist_exact = model.d_matrix(2).image().contains(vector)
        report = VerificationReport(
            algebra=model.tuple_string(),
            spinor=format_form(structure.rho),
            twist=format_form(model.twist),
            twist_exact=twist_exact,
            pure=pure,
            nondegenerate=nondegenerate,
            integrable=integrable,
            integrable_courant=courant,
            closed=structure.is_closed,
            is_structure=pure and nondegenerate and integrable,
            type=structure.type if pure else None,
            degeneracy_locus=locus,
            witnesses=witnesses,
        )
        if courant is not None and courant != integrable:
            self._logger.warning(
                "integrability_routes_disagree",
                extra={"algebra": report.algebra, "spinor": report.spinor, "spinor_route": integrable},
            )
        self._logger.info(
            "structure_verified",
            extra={
                "algebra": report.algebra,
                "spinor": report.spinor,
                "pure": pure,
                "nondegenerate": nondegenerate,
                "integrable": integrable,
                "type": report.type,
            },
        )
        return report

    # U^k and the canonical spectral sequence ----------------------------

    def uk_decomposition(self, structure: GCStructure, form: Form | None = None) -> UDecompositionReport:
        match = all(structure.u_spaces[k] == structure.eigenspace(k) for k in structure.levels)
        orthogonal, nondegenerate = self._mukai_checks(structure)
        components = {}
        if form is not None:
            components = {str(k): format_form(part) for k, part in sorted(structure.decompose(form).items())}
        return UDecompositionReport(
            dims={str(k): structure.u_spaces[k].dim for k in structure.levels},
            eigenspaces_match=match,
            mukai_orthogonal=orthogonal,
            mukai_nondegenerate=nondegenerate,
            components=components,
        )

    def _mukai_checks(self, structure: GCStructure) -> tuple[bool, bool]:
        """(U^k, U^l) = 0 unless k + l = 0, and the pairing U^k × U^{−k} is perfect."""
        n, field = structure.n, structure.field
        forms = {k: [vector_form(n, field, v) for v in structure.u_basis(k)] for k in structure.levels}
        orthogonal = True
        nondegenerate = True
        for k in structure.levels:
            for l in structure.levels:
                if k + l == 0:
                    entries = {
                        (a, b): mukai_scalar(x, y)
                        for a, x in enumerate(forms[k])
                        for b, y in enumerate(forms[l])
                    }
                    pairing = Matrix.from_entries(entries, (len(forms[k]), len(forms[l])), field)
                    nondegenerate = nondegenerate and pairing.rank() == len(forms[k])
                elif orthogonal and any(mukai_scalar(x, y) for x in forms[k] for y in forms[l]):
                    orthogonal = False
        return orthogonal, nondegenerate

    def canonical_e1(self, structure: GCStructure) -> E1Report:
        dims = structure.e1_dims()
        even, odd = self._cohomology.twisted_dimensions(structure.model)
        total = sum(dims.values())
        euler_sum = sum(dim if k % 2 == 0 else -dim for k, dim in dims.items())
        sign = -1 if (structure.type + structure.m) % 2 else 1
        report = E1Report(
            dims={str(k): v for k, v in dims.items()},
            total=total,
            twisted_total=even + odd,
            degenerates=total == even + odd,
            euler_sum=euler_sum,
            euler_characteristic=even - odd,
            euler_ok=euler_sum == sign * (even - odd),
        )
        self._logger.info("canonical_e1_computed", extra={"spinor": format_form(structure.rho), "dims": dims})
        return report

    def euler_check(self, structure: GCStructure) -> bool:
        return self.canonical_e1(structure).euler_ok

    def ddj_lemma(self, structure: GCStructure) -> LemmaResult:
        return self._cohomology.lemma_check(
            structure.model.d_h_matrix(), structure.d_j_matrix(), grading=parity_grading(structure.n)
        )

    def generalized_cohomology(self, structure: GCStructure) -> GeneralizedCohomologyReport:
        """Classes with d_H-closed representatives in each U^k."""
        d_h = structure.model.d_h_matrix()
        closed, exact = d_h.kernel(), d_h.image()
        dims: dict[int, int] = {}
        representatives: dict[int, list[Form]] = {}
        for k in structure.levels:
            cocycles = closed & structure.u_spaces[k]
            chosen = cocycles.complement_basis(exact & cocycles)
            dims[k] = len(chosen)
            representatives[k] = [vector_form(structure.n, structure.field, v) for v in chosen]
        even, odd = self._cohomology.twisted_dimensions(structure.model)
        orthogonal = True
        nondegenerate = True
        for k in structure.levels:
            for l in structure.levels:
                values = [[mukai_scalar(x, y) for y in representatives[l]] for x in representatives[k]]
                if k + l == 0:
                    if values and Matrix.from_list(values, structure.field).rank() != dims[k]:
                        nondegenerate = False
                elif any(v for row in values for v in row):
                    orthogonal = False
        lemma = self.ddj_lemma(structure).holds
        return GeneralizedCohomologyReport(
            lemma_holds=lemma,
            dims={str(k): v for k, v in dims.items()},
            total=sum(dims.values()),
            twisted_total=even + odd,
            mukai_orthogonal=orthogonal,
            mukai_nondegenerate=nondegenerate,
        )

    # transforms and deformations ----------------------------------------

    def transform(self, structure: GCStructure, g: Form | Multivector, *, shift_twist: bool = False) -> GCStructure:
        """e^B ∧ ρ for a 2-form B, or e^β ⌟ ρ for a bivector β."""
        model = structure.model
        if isinstance(g, Form):
            g = g.with_field(model.field)
            if not g.is_homogeneous(2):
                raise exceptions.InputError("a B-transform needs a 2-form")
            db = model.d(g)
            if db and not shift_twist:
                raise exceptions.NonClosedFormError(f"dB = {format_form(db)} is not zero", witness=format_form(db))
            if db:
                model = model.with_twist(model.twist - db)
            rho = exp_act("b-wedge", g, structure.rho)
        elif isinstance(g, Multivector):
            rho = exp_act("beta-contract", g, structure.rho)
        else:
            raise exceptions.InputError(f"cannot transform by {type(g).__name__}")
        return GCStructure(model, rho)

    def deform(
        self, structure: GCStructure, epsilon: SpinBivector | Multivector | Form, *, strict: bool = False
    ) -> DeformationResult:
        """Deform by ε ∈ Λ²L̄ when the Maurer–Cartan equation holds.

        With `strict`, a failing equation raises MaurerCartanError instead of
        returning a rejected result.

        The Maurer–Cartan tensor is evaluated as the Courant tensor of the
        graph {x + ε(x) : x ∈ L}, which is maximal isotropic for ε ∈ Λ²L̄.
        The graph is closed under the Courant bracket exactly when
        d_L ε + ½[ε, ε] = 0, with d_L the Lie algebroid differential of L acting
        on Λ•L* ≅ Λ•L̄ and [·,·] its Schouten extension, so the two tests agree.
        """
        structure._require_structure()
        if isinstance(epsilon, Multivector):
            epsilon = SpinBivector.from_multivector(epsilon)
        elif isinstance(epsilon, Form):
            epsilon = SpinBivector.from_form(epsilon.with_field(structure.field))
        endomorphism = epsilon.endomorphism()
        for column in endomorphism.columns():
            if column and not structure.L_bar.contains(column):
                raise exceptions.InputError("ε does not lie in Λ²L̄")
        n, field = structure.n, structure.field
        graph = [
            GenVector.from_coordinates(n, field, vec_add(b, endomorphism.apply(b))) for b in structure.L.basis
        ]
        witness = None
        for a in range(len(graph)):
            for b in range(a + 1, len(graph)):
                bracket = courant_bracket(structure.model, graph[a], graph[b])
                for c, third in enumerate(graph):
                    value = bracket.pairing(third)
                    if value:
                        witness = f"<[u{a + 1}, u{b + 1}], u{c + 1}> = {format_scalar(field, value)}"
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            self._logger.info("deformation_rejected", extra={"spinor": format_form(structure.rho), "witness": witness})
            if strict:
                raise exceptions.MaurerCartanError("ε does not solve the Maurer–Cartan equation", witness=witness)
            return DeformationResult(False, witness)
        rho = epsilon.exp_act(structure.rho)
        deformed = GCStructure(structure.model, rho)
        graph_span = Subspace.span([g.coordinates() for g in graph], 2 * n, field)
        report = self.verify(deformed)
        self._logger.info("deformation_accepted", extra={"spinor": format_form(rho), "type": deformed.type})
        return DeformationResult(True, None, deformed, deformed.L == graph_span, report)

    def complex_beta_deformation(
        self, structure: GCStructure, holomorphic_frame: Sequence[Form] | None = None
    ) -> DeformationResult:
        """Deform a complex structure by β = x_{m−1} ∧ x_m built from the frame dual to (1,0)-forms."""
        structure._require_structure()
        m, n, field = structure.m, structure.n, structure.field
        if structure.type != m:
            raise exceptions.DomainError(f"expected a complex structure of type {m}, got type {structure.type}")
        if m < 2:
            raise exceptions.DomainError("the β-deformation needs complex dimension at least two")
        if holomorphic_frame is None:
            covectors = Subspace.span([{n + k: field.one} for k in range(n)], 2 * n, field)
            thetas = [
                Form(n, field, {1 << (j - n): v for j, v in b.items()}) for b in (structure.L & covectors).basis
            ]
        else:
            thetas = [theta.with_field(field) for theta in holomorphic_frame]
            for theta in thetas:
                if not theta.is_homogeneous(1) or theta.wedge(structure.rho):
                    raise exceptions.InputError(f"{format_form(theta)} is not a (1,0)-form of this structure")
        if len(thetas) != m:
            raise exceptions.VerificationFailure(f"found {len(thetas)} (1,0)-forms, expected {m}")
        rows = [{k: theta.coefficient(1 << k) for k in range(n)} for theta in thetas]
        rows += [{k: field.conjugate(v) for k, v in row.items()} for row in rows]
        system = Matrix.from_rows(rows, n, field)
        duals = []
        for j in (m - 2, m - 1):
            solution = system.solve({j: field.one})
            if solution is None:
                raise exceptions.VerificationFailure("the (1,0)-forms and their conjugates are dependent")
            duals.append(GenVector(n, field, [solution.get(k, field.zero) for k in range(n)], [field.zero] * n))
        beta = SpinBivector(n, field, [(1, duals[0], duals[1])])
        return self.deform(structure, beta)

    # generalized Kähler pairs ---------------------------------------------

    def kahler_pair_check(self, first: GCStructure, second: GCStructure, *, strict: bool = False) -> KahlerPair:
        """Commuting J1, J2 with G = J1 J2 positive definite for the pairing.

        With `strict`, an invalid pair raises KahlerPairError carrying the
        first non-positive leading minor.
        """
        if first.model != second.model:
            raise exceptions.InputError("both structures must live on the same model")
        n, field = first.n, first.field
        size = 2 * n
        j1, j2 = first.jay, second.jay
        commute = (j1 @ j2) == (j2 @ j1)
        if not commute:
            self._logger.info("kahler_pair_rejected", extra={"reason": "commutator"})
            if strict:
                raise exceptions.KahlerPairError("J1 and J2 do not commute")
            return KahlerPair(False, False, False, None)
        metric_map = j1 @ j2
        squares = metric_map @ metric_map == Matrix.identity(size, field)
        basis = [GenVector.basis(n, field, j) for j in range(size)]
        images = [GenVector.from_coordinates(n, field, metric_map.column(j)) for j in range(size)]
        gram = Matrix.from_list([[images[i].pairing(basis[j]) for j in range(size)] for i in range(size)], field)
        failing = None
        for index, minor in enumerate(gram.leading_minors(), start=1):
            real, imag = field.parts(field.convert(minor))
            if imag or real <= 0:
                failing = index
                break
        positive = failing is None
        pair = KahlerPair(commute, squares, positive, failing, intersection_dim=(first.L & second.L).dim)
        if positive and squares:
            plus = (metric_map - Matrix.identity(size, field)).kernel()
            minus = (metric_map + Matrix.identity(size, field)).kernel()
            entries = {(r, c - n): v for r, row in enumerate(plus.basis) for c, v in row.items() if c >= n}
            graph = Matrix.from_entries(entries, (n, n), field)
            half = Fraction(1, 2)
            metric = (graph + graph.transpose()).scale(half)
            skew = (graph - graph.transpose()).scale(half)
            pair.metric = metric.to_list()
            pair.b_field = Form(
                n,
                field,
                {(1 << i) | (1 << j): skew.entry(i, j) for i in range(n) for j in range(i + 1, n)},
            )
            pair.j_plus_complex = self._restricted_square_is_minus_one(j1, plus, n)
            pair.j_minus_complex = self._restricted_square_is_minus_one(j1, minus, n)
        self._logger.info(
            "kahler_pair_checked",
            extra={"commute": commute, "positive": positive, "failing_minor": failing},
        )
        if strict and not pair.valid:
            raise exceptions.KahlerPairError(
                "not a generalized Kähler pair", minor_index=failing, witness={"intersection_dim": pair.intersection_dim}
            )
        return pair

    @staticmethod
    def _restricted_square_is_minus_one(jay: Matrix, space: Subspace, n: int) -> bool:
        """J restricted to a graph over V, transported to V, squares to −1."""
        field = jay.field
        columns = []
        for row in space.basis:
            image = jay.apply(row)
            columns.append({k: v for k, v in image.items() if k < n})
        transported = Matrix.from_columns(columns, n, field)
        return transported @ transported == -Matrix.identity(n, field)

    def kahler_pair_report(self, first: GCStructure, second: GCStructure) -> KahlerPairReport:
        pair = self.kahler_pair_check(first, second)
        field = first.field
        return KahlerPairReport(
            commute=pair.commute,
            metric_squares_to_identity=pair.metric_squares_to_identity,
            positive_definite=pair.positive_definite,
            failing_minor=pair.failing_minor,
            metric=[[format_scalar(field, v) for v in row] for row in pair.metric],
            b_field=format_form(pair.b_field) if pair.b_field is not None else "0",
            intersection_dim=pair.intersection_dim,
            j_plus_complex=pair.j_plus_complex,
            j_minus_complex=pair.j_minus_complex,
            valid=pair.valid,
        )

    # submanifolds -----------------------------------------------------------

    def submanifold_check(
        self,
        structure: GCStructure,
        tangent: Sequence[Sequence[object]],
        flux: Form | None = None,
    ) -> SubmanifoldReport:
        """Whether τ_F = {X + ξ : X ∈ W, ξ|W = ι_X F|W} is J-invariant."""
        n, field = structure.n, structure.field
        flux = (flux or Form.zero(n, field)).with_field(field)
        if not flux.is_homogeneous(2):
            raise exceptions.InputError("F must be a 2-form")
        vectors = [{k: field.convert(v) for k, v in enumerate(x) if v} for x in tangent]
        space = Subspace.span(vectors, n, field)
        if space.dim != len(vectors):
            raise exceptions.DimensionMismatchError("tangent vectors are linearly dependent")
        generators = []
        for x in space.basis:
            contraction = flux.interior_vector({k + 1: v for k, v in x.items()})
            generators.append(vec_add(x, {n + (mask.bit_length() - 1): v for mask, v in contraction.items()}))
        restriction = Matrix.from_rows(space.basis, n, field)
        for ann in restriction.kernel().basis:
            generators.append({n + k: v for k, v in ann.items()})
        tau = Subspace.span(generators, 2 * n, field)
        jay = structure.jay
        invariant = all(tau.contains(jay.apply(v)) for v in tau.basis)
        report = SubmanifoldReport(dimension=space.dim, invariant=invariant)
        if structure.type == 0 and structure.rho.coefficient(0):
            omega = self._symplectic_form(structure)
            self._symplectic_brane_data(report, omega, space, flux)
        self._logger.info("submanifold_checked", extra={"dimension": space.dim, "invariant": invariant})
        return report

    @staticmethod
    def _symplectic_form(structure: GCStructure) -> Form:
        """ω from ρ = c·e^{B + iω}."""
        field = structure.field
        c = structure.rho.coefficient(0)
        exponent = structure.rho.degree_part(2).scale(field.one / c)
        half = field.convert(Fraction(1, 2))
        return (exponent - exponent.conjugate()).scale(-field.imag_unit * half)

    @staticmethod
    def _symplectic_brane_data(report: SubmanifoldReport, omega: Form, space: Subspace, flux: Form) -> None:
        field = omega.field
        n = omega.n
        basis = space.basis

        def as_map(x: Vector) -> dict[int, Scalar]:
            return {k + 1: v for k, v in x.items()}

        rows = []
        for y in basis:
            functional = omega.interior_vector(as_map(y))
            rows.append({k: -functional.coefficient(1 << k) for k in range(n)})
        orthogonal = Matrix.from_rows(rows, n, field).kernel() if rows else Subspace.full(n, field)
        report.coisotropic = orthogonal.issubset(space)
        report.lagrangian = orthogonal == space
        if report.coisotropic and not report.lagrangian:
            quotient = space.complement_basis(orthogonal)
            omega_q = Matrix.from_list(
                [[omega.evaluate(as_map(a), as_map(b)) for b in quotient] for a in quotient], field
            )
            flux_q = Matrix.from_list(
                [[flux.evaluate(as_map(a), as_map(b)) for b in quotient] for a in quotient], field
            )
            transverse = omega_q.inverse() @ flux_q
            report.transverse_complex = transverse @ transverse == -Matrix.identity(len(quotient), field)
