"""The sl(2) operators of a symplectic form and symplectic Hodge theory.

All operators are materialized as matrices on the monomial basis of Λ•,
ordered by :func:`all_masks`.
"""

from __future__ import annotations

import logging
from functools import cached_property
from math import factorial

from gencomplex.algebra.exterior import (
    Form,
    Multivector,
    all_masks,
    indices_of,
    masks_of_degree,
    operator_matrix,
    popcount,
    wedge_sign,
)
from gencomplex.algebra.grammar import format_form, format_scalar
from gencomplex.algebra.linalg import Matrix, Subspace, Vector
from gencomplex.algebra.liealg import LieModel
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.symplectic import HarmonicReport, PhiReport, SL2Report

from . import exceptions
from .cohomology import CohomologyService, LemmaResult, degree_grading
from .gcs import GCStructure, form_positions, form_vector, vector_form

logger = logging.getLogger(__name__)


class SymplecticData:
    """(model, ω) with L, Λ, the counting operator, the symplectic star and δ."""

    def __init__(self, model: LieModel, omega: Form):
        if model.n % 2:
            raise exceptions.DomainError("a symplectic form needs an even-dimensional algebra")
        if model.is_extended:
            raise exceptions.DomainError("symplectic operators need constant coefficients")
        omega = omega.with_field(model.field)
        if not omega.is_homogeneous(2) or not omega:
            raise exceptions.InputError("ω must be a nonzero 2-form")
        d_omega = model.d(omega)
        if d_omega:
            raise exceptions.NonClosedFormError(f"dω = {format_form(d_omega)}", witness=format_form(d_omega))
        self.m = model.n // 2
        top = omega.power(self.m)
        if not top:
            raise exceptions.DegenerateFormError(f"ω^{self.m} = 0", witness=format_form(omega))
        self.model = model.with_twist(None) if model.has_twist else model
        self.omega = omega
        self.n = model.n
        self.field = model.field
        self.volume = top.scale(self.field.convert(1) / self.field.convert(factorial(self.m)))
        self.masks = all_masks(self.n)

    # the Poisson bivector ----------------------------------------------------

    @cached_property
    def poisson(self) -> Multivector:
        """π = Σ_{i<j} (Ω⁻¹)_{ij} ∂_i∧∂_j with Ω_{ij} = ω(∂_i, ∂_j)."""
        n, field = self.n, self.field
        entries = {}
        for i in range(n):
            for j in range(n):
                value = self.omega.evaluate({i + 1: field.one}, {j + 1: field.one})
                if value:
                    entries[(i, j)] = value
        inverse = Matrix.from_entries(entries, (n, n), field).inverse()
        terms = {}
        for i in range(n):
            for j in range(i + 1, n):
                value = inverse.entry(i, j)
                if value:
                    terms[(1 << i) | (1 << j)] = value
        return Multivector(n, field, terms)

    def _pairing(self, a: int, b: int) -> object:
        """π(e_a, e_b) for 0-based generator indices."""
        if a == b:
            return self.field.zero
        lo, hi = min(a, b), max(a, b)
        value = self.poisson.terms.get((1 << lo) | (1 << hi), self.field.zero)
        return value if a < b else -value

    # operators ------------------------------------------------------------

    def _matrix(self, op) -> Matrix:
        return operator_matrix(op, self.n, self.field, self.masks, self.masks)

    @cached_property
    def L(self) -> Matrix:
        return self._matrix(lambda f: self.omega.wedge(f))

    @cached_property
    def Lambda(self) -> Matrix:
        return self._matrix(self.poisson.contract)

    @cached_property
    def H(self) -> Matrix:
        size = len(self.masks)
        entries = {(j, j): self.field.convert(self.m - popcount(mask)) for j, mask in enumerate(self.masks)}
        return Matrix.from_entries(entries, (size, size), self.field)

    @cached_property
    def d(self) -> Matrix:
        return self._matrix(self.model.d)

    @cached_property
    def delta(self) -> Matrix:
        """δ = [Λ, d] = Λd − dΛ."""
        return self.Lambda @ self.d - self.d @ self.Lambda

    def _gram(self, a: int, b: int) -> object:
        """det(π(e_i, e_j)) over the index sets of two monomials of equal degree."""
        rows, cols = indices_of(a), indices_of(b)
        if len(rows) != len(cols):
            return self.field.zero
        if not rows:
            return self.field.one
        minor = Matrix.from_list(
            [[self._pairing(i - 1, j - 1) for j in cols] for i in rows], self.field
        )
        return minor.domain_matrix.to_dense().det()

    @cached_property
    def star(self) -> Matrix:
        """β ∧ *α = G(β, α) v_M on monomials, G the determinant pairing induced by π."""
        size = len(self.masks)
        positions = form_positions(self.n)
        full = (1 << self.n) - 1
        volume = self.volume.coefficient(full)
        entries = {}
        for column, alpha in enumerate(self.masks):
            k = popcount(alpha)
            for beta in masks_of_degree(self.n, k):
                value = self._gram(beta, alpha)
                if not value:
                    continue
                complement = full ^ beta
                coefficient = value * volume
                if wedge_sign(beta, complement) < 0:
                    coefficient = -coefficient
                entries[(positions[complement], column)] = coefficient
        return Matrix.from_entries(entries, (size, size), self.field)

    def degree_projector(self, k: int) -> Matrix:
        size = len(self.masks)
        entries = {(j, j): self.field.one for j, mask in enumerate(self.masks) if popcount(mask) == k}
        return Matrix.from_entries(entries, (size, size), self.field)

    def apply(self, matrix: Matrix, form: Form) -> Form:
        return vector_form(self.n, self.field, matrix.apply(form_vector(form.with_field(self.field))))

    # primitive forms ------------------------------------------------------

    def primitive_space(self, k: int) -> Subspace:
        """P_k = ker Λ on Λ^k, inside the full form space."""
        size = len(self.masks)
        positions = form_positions(self.n)
        basis = [{positions[mask]: self.field.one} for mask in masks_of_degree(self.n, k)]
        degree_k = Subspace.span(basis, size, self.field)
        return self._lambda_kernel & degree_k

    @cached_property
    def _lambda_kernel(self) -> Subspace:
        return self.Lambda.kernel()

    def lefschetz_constants(self) -> dict[tuple[int, int], object]:
        """C_{j,p} with Λ^j L^j = C_{j,p}·Id on primitive p-forms."""
        constants: dict[tuple[int, int], object] = {}
        for p in range(self.m + 1):
            primitives = self.primitive_space(p).basis
            if not primitives:
                continue
            for j in range(1, self.m - p + 1):
                operator = _power(self.Lambda, j) @ _power(self.L, j)
                constant = None
                for vector in primitives:
                    image = operator.apply(vector)
                    pivot = next(iter(vector))
                    ratio = image.get(pivot, self.field.zero) / vector[pivot]
                    scaled = {k: v * ratio for k, v in vector.items()}
                    if {k: v for k, v in image.items() if v} != {k: v for k, v in scaled.items() if v}:
                        raise exceptions.VerificationFailure(
                            f"Λ^{j}L^{j} is not scalar on primitive {p}-forms",
                            witness=format_form(vector_form(self.n, self.field, vector)),
                        )
                    if constant is not None and ratio != constant:
                        raise exceptions.VerificationFailure(f"Λ^{j}L^{j} has two eigenvalues on P_{p}")
                    constant = ratio
                constants[(j, p)] = constant
        return constants

    def primitive_decomposition(self, form: Form) -> dict[int, Form]:
        """a = Σ_r L^r a_r with a_r primitive of degree k − 2r; returns {r: a_r}."""
        form = form.with_field(self.field)
        degrees = form.degrees()
        if len(degrees) > 1:
            raise exceptions.InputError("primitive decomposition needs a homogeneous form")
        if not degrees:
            return {}
        k = degrees[0]
        columns: list[Vector] = []
        labels: list[tuple[int, Vector]] = []
        for r in range(k // 2 + 1):
            power = _power(self.L, r)
            for vector in self.primitive_space(k - 2 * r).basis:
                columns.append(power.apply(vector))
                labels.append((r, vector))
        system = Matrix.from_columns(columns, len(self.masks), self.field)
        solution = system.solve(form_vector(form))
        if solution is None:
            raise exceptions.VerificationFailure(
                "the Lefschetz decomposition does not span the form", witness=format_form(form)
            )
        parts: dict[int, Form] = {}
        for index, value in solution.items():
            r, vector = labels[index]
            piece = vector_form(self.n, self.field, {k: v * value for k, v in vector.items()})
            parts[r] = parts[r] + piece if r in parts else piece
        return parts

    # the φ-map --------------------------------------------------------------

    @cached_property
    def structure(self) -> GCStructure:
        return GCStructure(self.model, self.omega.scale(self.field.imag_unit).exp())

    @cached_property
    def phi_matrix(self) -> Matrix:
        """φ(a) = e^{iω} ∧ e^{Λ/2i} a."""
        size = len(self.masks)
        step = self.Lambda.scale(-self.field.imag_unit / self.field.convert(2))
        series = Matrix.identity(size, self.field)
        power = Matrix.identity(size, self.field)
        for j in range(1, self.m + 1):
            power = power @ step
            series = series + power.scale(self.field.one / self.field.convert(factorial(j)))
        exp_omega = self.omega.scale(self.field.imag_unit).exp()
        return self._matrix(lambda f: exp_omega.wedge(f)) @ series

    def phi(self, form: Form) -> Form:
        return self.apply(self.phi_matrix, form)


def _power(matrix: Matrix, k: int) -> Matrix:
    result = Matrix.identity(matrix.rows, matrix.field)
    for _ in range(k):
        result = result @ matrix
    return result


class SymplecticService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)
        self._cohomology = CohomologyService(self.settings)

    def operators(self, model: LieModel, omega: Form | str) -> SymplecticData:
        if isinstance(omega, str):
            omega = model.parse(omega)
        return SymplecticData(model, omega)

    def relation_report(self, data: SymplecticData) -> SL2Report:
        L, Lam, H, d, delta, star = data.L, data.Lambda, data.H, data.d, data.delta, data.star
        size = len(data.masks)
        identity = Matrix.identity(size, data.field)

        def commutator(a: Matrix, b: Matrix) -> Matrix:
            return a @ b - b @ a

        delta_formula = Matrix.zeros(size, size, data.field)
        for k in range(data.n + 1):
            sign = 1 if k % 2 else -1
            delta_formula = delta_formula + (star @ d @ star @ data.degree_projector(k)).scale(sign)
        relations = {
            "[L,Lambda]=H": commutator(L, Lam) == H,
            "[L,d]=0": commutator(L, d).is_zero(),
            "[L,delta]=-d": commutator(L, delta) == -d,
            "[Lambda,d]=delta": commutator(Lam, d) == delta,
            "[Lambda,delta]=0": commutator(Lam, delta).is_zero(),
            "Lambda=-*L*": Lam == -(star @ L @ star),
            "L=-*Lambda*": L == -(star @ Lam @ star),
            "[L,H]=2L": commutator(L, H) == L.scale(2),
            "[Lambda,H]=-2Lambda": commutator(Lam, H) == Lam.scale(-2),
            "**=Id": star @ star == identity,
            "delta=(-1)^(k+1)*d*": delta == delta_formula,
            "delta^2=0": (delta @ delta).is_zero(),
            "jay=-(L+Lambda)": data.structure.jay_matrix == -(L + Lam),
        }
        computed = data.lefschetz_constants()
        constants = {f"C[{j},{p}]": format_scalar(data.field, value) for (j, p), value in computed.items()}
        relations["constants_nonzero"] = all(computed.values())
        report = SL2Report(
            algebra=data.model.tuple_string(),
            omega=format_form(data.omega),
            relations=relations,
            constants=constants,
            passes=all(relations.values()),
        )
        self._logger.info(
            "sl2_relations_checked",
            extra={"algebra": report.algebra, "passes": report.passes, "failed": [k for k, v in relations.items() if not v]},
        )
        return report

    def phi_report(self, data: SymplecticData) -> PhiReport:
        """Checks ∂̄φ(a) = φ(da) and φ(δa) = −2i∂φ(a) on every basis monomial."""
        structure = data.structure
        field = data.field
        failures: list[str] = []
        d_ok = delta_ok = True
        for mask in data.masks:
            alpha = Form(data.n, field, {mask: field.one})
            k = popcount(mask)
            image = data.phi(alpha)
            partial, partial_bar = structure.del_split(image, data.m - k)
            if partial_bar != data.phi(data.model.d(alpha)):
                d_ok = False
                failures.append(f"d: {format_form(alpha)}")
            if partial.scale(field.convert(-2) * field.imag_unit) != data.phi(data.apply(data.delta, alpha)):
                delta_ok = False
                failures.append(f"delta: {format_form(alpha)}")
        e1 = structure.e1_dims()
        betti = self._cohomology.cohomology(data.model).betti
        matches = all(e1.get(data.m - k) == betti[k] for k in range(data.n + 1))
        report = PhiReport(
            algebra=data.model.tuple_string(),
            omega=format_form(data.omega),
            forms_checked=len(data.masks),
            d_identity=d_ok,
            delta_identity=delta_ok,
            e1_dims={str(k): v for k, v in sorted(e1.items())},
            betti=betti,
            e1_matches_betti=matches,
            failures=failures[:10],
        )
        self._logger.info(
            "phi_identities_checked",
            extra={"algebra": report.algebra, "d": d_ok, "delta": delta_ok, "e1_matches": matches},
        )
        return report

    def ddelta_lemma(self, data: SymplecticData) -> LemmaResult:
        return self._cohomology.lemma_check(data.d, data.delta, grading=degree_grading(data.n))

    def harmonic_report(self, data: SymplecticData) -> HarmonicReport:
        """Classes with a d- and δ-closed representative, compared with Lefschetz and the dδ-lemma."""
        ring = self._cohomology.cohomology(data.model)
        d, delta = data.d, data.delta
        harmonic = d.kernel() & delta.kernel()
        exact = d.image()
        size = len(data.masks)
        positions = form_positions(data.n)
        dims = []
        for k in range(data.n + 1):
            degree_k = Subspace.span(
                [{positions[mask]: data.field.one} for mask in masks_of_degree(data.n, k)], size, data.field
            )
            closed_k = harmonic & degree_k
            dims.append(closed_k.dim - (closed_k & exact).dim)
        lefschetz = self._cohomology.lefschetz(data.model, data.omega).passes
        lemma_result = self.ddelta_lemma(data)
        lemma = lemma_result.holds
        all_harmonic = dims == ring.betti
        decompositions: dict[str, list[str]] = {}
        for k in range(data.n + 1):
            entries = []
            for rep in ring.degrees[k].representatives:
                form = Form.from_vector(data.n, data.field, rep, masks_of_degree(data.n, k))
                parts = data.primitive_decomposition(form)
                entries.append(
                    " + ".join(f"L^{r}({format_form(part)})" for r, part in sorted(parts.items())) or "0"
                )
            if entries:
                decompositions[str(k)] = entries
        report = HarmonicReport(
            algebra=data.model.tuple_string(),
            omega=format_form(data.omega),
            harmonic_dims=dims,
            betti=ring.betti,
            all_harmonic=all_harmonic,
            lefschetz=lefschetz,
            ddelta_lemma=lemma,
            consistent=all_harmonic == lefschetz == lemma,
            lemma=lemma_result.to_report(
                format_form(data.omega), lambda v: format_form(vector_form(data.n, data.field, v))
            ),
            decompositions=decompositions,
        )
        self._logger.info(
            "harmonic_report_computed",
            extra={"algebra": report.algebra, "harmonic": all_harmonic, "lefschetz": lefschetz, "lemma": lemma},
        )
        return report
