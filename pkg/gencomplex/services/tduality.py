"""T-duality for models fibred over a circle.

A circle bundle is a model together with a vertical generator ``∂_j`` and a
connection ``θ`` with ``θ(∂_j) = 1``. A connection with a horizontal part is
absorbed into the coframe first, so every bundle works in coordinates where
``θ`` is the generator ``e_j``. The dual model reuses the index ``j`` for the
dual connection ``θ̃``, which lets forms and generalized vectors of both sides
share one coordinate system.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from gencomplex.algebra.exterior import Form, GenVector, all_masks, operator_matrix
from gencomplex.algebra.grammar import format_form, format_genvector, format_scalar
from gencomplex.algebra.linalg import Matrix, Subspace
from gencomplex.algebra.liealg import LieModel, model_to_dict
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.tduality import (
    DualityReport,
    DualModelReport,
    KahlerTransportReport,
    TransportReport,
)

from . import exceptions
from .gcs import GCSService, GCStructure, courant_bracket, form_vector, mukai_scalar, vector_form

logger = logging.getLogger(__name__)


def substitute_generator(form: Form, index: int, replacement: Form) -> Form:
    """The algebra map sending e_index to a 1-form and fixing the other generators."""
    contracted = form.interior(index)
    if not contracted:
        return form
    generator = Form.generator(form.n, form.field, index)
    return replacement.wedge(contracted) + (form - generator.wedge(contracted))


def _adapted_model(model: LieModel, fiber: int, shift: Form) -> LieModel:
    """Rewrite the model in the coframe where the connection e_j + shift is a generator."""
    old = model.generator(fiber) - shift
    differentials = []
    for k, de in enumerate(model.differentials, start=1):
        if k == fiber:
            de = de + model.d(shift)
        differentials.append(substitute_generator(de, fiber, old))
    twist = substitute_generator(model.twist, fiber, old)
    return LieModel(differentials, twist=twist, field=model.field, coframe=model.coframe, name=model.name)


class CircleBundleData:
    """A model with vertical vector ``X = ∂_fiber`` and connection ``θ``."""

    def __init__(self, model: LieModel, fiber: int, connection: Form | None = None):
        if not 1 <= fiber <= model.n:
            raise exceptions.DimensionMismatchError(f"fiber generator e{fiber} outside 1..{model.n}")
        if fiber in model.coframe:
            raise exceptions.DomainError(f"the fiber generator e{fiber} is the differential of a formal variable")
        field = model.field
        theta = model.generator(fiber) if connection is None else connection.with_field(field)
        if not theta.is_homogeneous(1) or not theta:
            raise exceptions.InputError("the connection must be a nonzero 1-form")
        value = theta.coefficient(1 << (fiber - 1))
        if value != field.one:
            raise exceptions.InputError(f"θ(X) = {format_scalar(field, value)}, expected 1")
        self.source = model
        self.fiber = fiber
        self.connection = theta
        self.shift = theta - model.generator(fiber)
        self.model = _adapted_model(model, fiber, self.shift) if self.shift else model
        self.n = model.n
        self.field = field
        self.X = {fiber: field.one}
        self.theta = self.model.generator(fiber)
        self.F = self.model.differentials[fiber - 1]
        vertical = self.F.interior(fiber)
        if vertical:
            raise exceptions.DomainError(
                f"the connection is not horizontal: X⌟F = {format_form(vertical)}", witness=format_form(vertical)
            )
        twist = self.model.twist
        if twist and not self.model.is_invariant(self.X, twist):
            raise exceptions.DomainError(f"the twist {format_form(twist)} is not invariant along e{fiber}")
        self.F_tilde = twist.interior(fiber)
        self.h = twist - self.F_tilde.wedge(self.theta)

    def adapt(self, form: Form) -> Form:
        """A form written in the original coframe, rewritten in the adapted one."""
        form = form.with_field(self.field)
        if not self.shift:
            return form
        return substitute_generator(form, self.fiber, self.model.generator(self.fiber) - self.shift)

    def split(self, form: Form) -> tuple[Form, Form]:
        """(ρ1, ρ0) with ρ = θ∧ρ1 + ρ0 and both parts horizontal."""
        rho1 = form.interior(self.fiber)
        return rho1, form - self.theta.wedge(rho1)

    def is_horizontal(self, form: Form) -> bool:
        return not form.interior(self.fiber)

    def is_invariant(self, form: Form) -> bool:
        return self.model.is_invariant(self.X, form.with_field(self.field))

    @cached_property
    def invariant_forms(self) -> Subspace:
        masks = all_masks(self.n)
        lie = operator_matrix(lambda f: self.model.lie_derivative(self.X, f), self.n, self.field, masks, masks)
        return lie.kernel()

    @cached_property
    def invariant_vectors(self) -> Subspace:
        """Kernel of L_X on V ⊕ V*, in generalized-vector coordinates."""
        n, field = self.n, self.field
        columns = []
        for k in range(1, n + 1):
            bracket = self.model.lie_bracket(self.X, {k: field.one})
            columns.append({index - 1: value for index, value in bracket.items()})
        for k in range(1, n + 1):
            derivative = self.model.lie_derivative(self.X, self.model.generator(k))
            columns.append({n + (mask.bit_length() - 1): value for mask, value in derivative.items()})
        return Matrix.from_columns(columns, 2 * n, field).kernel()

    def is_invariant_vector(self, v: GenVector) -> bool:
        return self.invariant_vectors.contains(v.coordinates())

    def __repr__(self) -> str:
        return f"CircleBundleData({self.model.tuple_string()}, fiber=e{self.fiber})"


def _dual_name(name: str | None) -> str | None:
    return f"{name}~" if name else None


def dual_model(bundle: CircleBundleData) -> LieModel:
    """dθ̃ = F̃ and H̃ = F∧θ̃ + h; the other structure equations read θ as θ̃."""
    differentials = list(bundle.model.differentials)
    differentials[bundle.fiber - 1] = bundle.F_tilde
    twist = bundle.F.wedge(bundle.theta) + bundle.h
    try:
        return LieModel(
            differentials,
            twist=twist,
            field=bundle.field,
            coframe=bundle.model.coframe,
            name=_dual_name(bundle.model.name),
        )
    except (exceptions.JacobiError, exceptions.NonClosedFormError) as exc:
        raise exceptions.DomainError(
            f"the dual of {bundle.model.tuple_string()} along e{bundle.fiber} is not a Lie model: {exc}"
        ) from exc


@dataclass(frozen=True)
class DualityPair:
    source: CircleBundleData
    dual: CircleBundleData

    @property
    def fiber(self) -> int:
        return self.source.fiber

    def tau(self, form: Form) -> Form:
        """τ(θ∧ρ1 + ρ0) = ρ1 − θ̃∧ρ0 on invariant forms."""
        form = form.with_field(self.source.field)
        if not self.source.is_invariant(form):
            raise exceptions.DomainError(f"{format_form(form)} is not invariant along the fiber")
        rho1, rho0 = self.source.split(form)
        return rho1 - self.dual.theta.wedge(rho0)

    def phi(self, v: GenVector) -> GenVector:
        """φ(X + f∂θ + ξ + gθ) = −X − g∂θ̃ − ξ − fθ̃."""
        if not self.source.is_invariant_vector(v):
            raise exceptions.DomainError(f"{format_genvector(v)} is not invariant along the fiber")
        j = self.fiber - 1
        vector = [-a for a in v.vector]
        covector = [-a for a in v.covector]
        vector[j] = -v.covector[j]
        covector[j] = -v.vector[j]
        return GenVector(v.n, v.field, vector, covector)

    def reversed(self) -> "DualityPair":
        return DualityPair(self.dual, self.source)

    @property
    def is_self_dual(self) -> bool:
        return self.dual.model == self.source.model


def tau(pair: DualityPair, form: Form) -> Form:
    return pair.tau(form)


def phi_T(pair: DualityPair, v: GenVector) -> GenVector:
    return pair.phi(v)


@dataclass(frozen=True)
class TorusDuality:
    """Successive circle dualities; each pair starts from the previous dual."""

    pairs: tuple[DualityPair, ...]

    @property
    def fibers(self) -> tuple[int, ...]:
        return tuple(pair.fiber for pair in self.pairs)

    @property
    def dual_model(self) -> LieModel:
        return self.pairs[-1].dual.model

    def tau(self, form: Form) -> Form:
        for pair in self.pairs:
            form = pair.tau(form)
        return form


class TDualityService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)
        self._gcs = GCSService(self.settings)

    # pairs ------------------------------------------------------------------

    def dualize(self, bundle: CircleBundleData) -> DualityPair:
        dual = CircleBundleData(dual_model(bundle), bundle.fiber)
        pair = DualityPair(bundle, dual)
        self._logger.info(
            "model_dualized",
            extra={
                "algebra": bundle.model.tuple_string(),
                "fiber": bundle.fiber,
                "dual_algebra": dual.model.tuple_string(),
                "dual_twist": format_form(dual.model.twist),
                "self_dual": pair.is_self_dual,
            },
        )
        return pair

    def dual_model_report(self, pair: DualityPair, forms: Sequence[Form] = ()) -> DualModelReport:
        source, dual = pair.source, pair.dual
        images = {}
        for form in forms:
            adapted = source.adapt(form)
            images[format_form(form)] = format_form(pair.tau(adapted))
        return DualModelReport(
            algebra=source.model.tuple_string(),
            twist=format_form(source.model.twist),
            fiber=pair.fiber,
            connection=format_form(source.connection),
            curvature=format_form(source.F),
            fiber_twist=format_form(source.F_tilde),
            basic_twist=format_form(source.h),
            dual_algebra=dual.model.tuple_string(),
            dual_twist=format_form(dual.model.twist),
            self_dual=pair.is_self_dual,
            dual_model=model_to_dict(dual.model),
            images=images,
        )

    # the duality identities -----------------------------------------------------

    def duality_verify(self, pair: DualityPair) -> DualityReport:
        """Check every identity of the pair on invariant bases; failures carry a witness."""
        source, dual = pair.source, pair.dual
        n, field = source.n, source.field
        forms = [vector_form(n, field, b) for b in source.invariant_forms.basis]
        vectors = [GenVector.from_coordinates(n, field, b) for b in source.invariant_vectors.basis]
        images = [pair.tau(rho) for rho in forms]
        witnesses: dict[str, str] = {}

        d_ok = True
        for rho, image in zip(forms, images):
            if pair.tau(source.model.d_h(rho)) != -dual.model.d_h(image):
                d_ok = False
                witnesses["d_identity"] = format_form(rho)
                break

        clifford_ok = True
        for v in vectors:
            phi_v = pair.phi(v)
            for rho, image in zip(forms, images):
                if pair.tau(v.act(rho)) != phi_v.act(image):
                    clifford_ok = False
                    witnesses["clifford_identity"] = f"{format_genvector(v)} . {format_form(rho)}"
                    break
            if not clifford_ok:
                break

        bracket_ok = True
        orthogonal = True
        for a, u in enumerate(vectors):
            for v in vectors[a:]:
                if orthogonal and pair.phi(u).pairing(pair.phi(v)) != u.pairing(v):
                    orthogonal = False
                    witnesses["orthogonal"] = f"<{format_genvector(u)}, {format_genvector(v)}>"
                if bracket_ok:
                    lhs = pair.phi(courant_bracket(source.model, u, v))
                    rhs = -courant_bracket(dual.model, pair.phi(u), pair.phi(v))
                    if lhs != rhs:
                        bracket_ok = False
                        witnesses["bracket_identity"] = f"[{format_genvector(u)}, {format_genvector(v)}]"

        mukai_ok = True
        for a, alpha in enumerate(forms):
            for b, beta in enumerate(forms):
                if mukai_scalar(images[a], images[b]) != -mukai_scalar(alpha, beta):
                    mukai_ok = False
                    witnesses["mukai_identity"] = f"({format_form(alpha)}, {format_form(beta)})"
                    break
            if not mukai_ok:
                break

        back = pair.reversed()
        square_ok = True
        for rho, image in zip(forms, images):
            if back.tau(image) != -rho:
                square_ok = False
                witnesses["tau_squared"] = format_form(rho)
                break

        report = DualityReport(
            algebra=source.model.tuple_string(),
            dual_algebra=dual.model.tuple_string(),
            invariant_forms=len(forms),
            invariant_vectors=len(vectors),
            d_identity=d_ok,
            clifford_identity=clifford_ok,
            bracket_identity=bracket_ok,
            orthogonal=orthogonal,
            mukai_identity=mukai_ok,
            tau_squared=square_ok,
            passes=d_ok and clifford_ok and bracket_ok and orthogonal and mukai_ok and square_ok,
            witnesses=witnesses,
        )
        log = self._logger.info if report.passes else self._logger.warning
        log("duality_verified", extra={"algebra": report.algebra, "passes": report.passes, "witnesses": witnesses})
        return report

    # structures -------------------------------------------------------------------

    def _source_spinor(self, pair: DualityPair, structure: GCStructure) -> Form:
        if structure.model == pair.source.model:
            rho = structure.rho
        elif structure.model == pair.source.source:
            rho = pair.source.adapt(structure.rho)
        else:
            raise exceptions.InputError("the structure does not live on the source of this pair")
        if not pair.source.is_invariant(rho):
            raise exceptions.DomainError(f"{format_form(structure.rho)} is not invariant along the fiber")
        return rho

    def transport_gcs(self, pair: DualityPair, structure: GCStructure) -> tuple[GCStructure, TransportReport]:
        """The structure with spinor τ(ρ) on the dual, re-verified with the dual twist."""
        rho = self._source_spinor(pair, structure)
        source_structure = GCStructure(pair.source.model, rho)
        source_report = self._gcs.verify(source_structure)
        if not source_report.is_structure:
            raise exceptions.DomainError(f"{format_form(rho)} does not define a twisted structure")
        transported = GCStructure(pair.dual.model, pair.tau(rho))
        dual_report = self._gcs.verify(transported)

        type_change = None
        predicted = None
        correspondence: dict[str, bool] = {}
        lemma_source = lemma_dual = None
        if dual_report.is_structure:
            type_change = transported.type - source_structure.type
            lowest = rho.degree_part(source_structure.type)
            predicted = 1 if pair.source.is_horizontal(lowest) else -1
            if not pair.source.model.is_extended:
                correspondence = self._u_correspondence(pair, source_structure, transported)
                lemma_source = self._gcs.ddj_lemma(source_structure).holds
                lemma_dual = self._gcs.ddj_lemma(transported).holds

        report = TransportReport(
            spinor=format_form(rho),
            dual_spinor=format_form(transported.rho),
            source=source_report,
            dual=dual_report,
            type_change=type_change,
            predicted_type_change=predicted,
            u_correspondence=correspondence,
            lemma_source=lemma_source,
            lemma_dual=lemma_dual,
            passes=(
                dual_report.is_structure
                and type_change == predicted
                and all(correspondence.values())
                and lemma_source == lemma_dual
            ),
        )
        if not report.passes:
            self._logger.error("structure_transport_failed", extra={"spinor": report.spinor, "dual": report.dual_spinor})
            raise exceptions.VerificationFailure(
                f"the T-dual of {report.spinor} fails verification", witness=report.json()
            )
        self._logger.info(
            "structure_transported",
            extra={"spinor": report.spinor, "dual_spinor": report.dual_spinor, "type_change": type_change},
        )
        return transported, report

    @staticmethod
    def _u_correspondence(pair: DualityPair, source: GCStructure, dual: GCStructure) -> dict[str, bool]:
        """τ(U^k) = Ũ^k on invariant forms, level by level."""
        n, field = source.n, source.field
        size = len(all_masks(n))
        out: dict[str, bool] = {}
        for k in source.levels:
            invariant = source.u_spaces[k] & pair.source.invariant_forms
            images = [form_vector(pair.tau(vector_form(n, field, b))) for b in invariant.basis]
            mapped = Subspace.span(images, size, field)
            out[str(k)] = mapped == (dual.u_spaces[k] & pair.dual.invariant_forms)
        return out

    def transport_kahler_pair(
        self, pair: DualityPair, first: GCStructure, second: GCStructure
    ) -> KahlerTransportReport:
        dual_first, _ = self.transport_gcs(pair, first)
        dual_second, _ = self.transport_gcs(pair, second)
        source = self._gcs.kahler_pair_report(
            GCStructure(pair.source.model, self._source_spinor(pair, first)),
            GCStructure(pair.source.model, self._source_spinor(pair, second)),
        )
        dual = self._gcs.kahler_pair_report(dual_first, dual_second)
        return KahlerTransportReport(source=source, dual=dual, preserved=source.valid == dual.valid)

    # connections and B-fields -------------------------------------------------------

    def gauge_shift(self, pair: DualityPair, b: Form) -> DualityPair:
        """Change the dual connection to θ̃ + b for a closed basic 1-form b.

        The dual twist is the same form written against θ̃ + b, so its basic
        part becomes h − F∧b; the source twist changes by the same amount.
        """
        source = pair.source
        b = b.with_field(source.field)
        if not b.is_homogeneous(1) or not source.is_horizontal(b):
            raise exceptions.InputError("a gauge shift needs a horizontal 1-form")
        if not source.is_invariant(b):
            raise exceptions.DomainError(f"{format_form(b)} is not invariant along the fiber")
        db = pair.dual.model.d(b)
        if db:
            raise exceptions.NonClosedFormError(f"db = {format_form(db)} is not zero", witness=format_form(db))
        shifted = source.model.with_twist(source.model.twist - source.F.wedge(b))
        self._logger.info("gauge_shifted", extra={"shift": format_form(b), "fiber": pair.fiber})
        return self.dualize(CircleBundleData(shifted, pair.fiber))

    def b_field_image(self, pair: DualityPair, b_field: Form, form: Form) -> Form:
        """e^{b2}(ρ1 − (θ̃ − b1)∧ρ0) for B = b2 + θ∧b1, which equals τ(e^B ρ)."""
        source = pair.source
        b_field = b_field.with_field(source.field)
        if not b_field.is_homogeneous(2):
            raise exceptions.InputError("a B-field must be a 2-form")
        b1, b2 = source.split(b_field)
        rho1, rho0 = source.split(form.with_field(source.field))
        connection = pair.dual.theta - b1
        return b2.exp().wedge(rho1 - connection.wedge(rho0)) if b2 else rho1 - connection.wedge(rho0)

    # tori ---------------------------------------------------------------------------

    def dualize_torus(self, model: LieModel, fibers: Sequence[int]) -> TorusDuality:
        """Dualize along several fiber circles in the given order."""
        if len(set(fibers)) != len(fibers) or not fibers:
            raise exceptions.InputError("fiber generators must be distinct and non-empty")
        for a, b in itertools.combinations(fibers, 2):
            leg = model.twist.interior(a).interior(b)
            if leg:
                raise exceptions.DomainError(
                    f"H has a component along both e{a} and e{b}; the torus bundle is not T-dualizable",
                    witness=format_form(leg),
                )
        pairs = []
        current = model
        for fiber in fibers:
            pair = self.dualize(CircleBundleData(current, fiber))
            pairs.append(pair)
            current = pair.dual.model
        return TorusDuality(tuple(pairs))

    def torus_order_independent(self, model: LieModel, fibers: Sequence[int]) -> bool:
        duals = {
            order: self.dualize_torus(model, order).dual_model for order in itertools.permutations(fibers)
        }
        first = next(iter(duals.values()))
        independent = all(result == first for result in duals.values())
        self._logger.info(
            "torus_order_checked", extra={"algebra": model.tuple_string(), "fibers": list(fibers), "independent": independent}
        )
        return independent

    def transport_torus(self, torus: TorusDuality, structure: GCStructure) -> list[TransportReport]:
        reports = []
        current = structure
        for pair in torus.pairs:
            current, report = self.transport_gcs(pair, current)
            reports.append(report)
        return reports
