"""Chevalley–Eilenberg cohomology of Lie algebra models.

Cohomology rings with cup products, twisted cohomology, hard Lefschetz,
abstract ∂∂̄-type lemmas for pairs of differentials and Massey products. Forms
are vectors on the monomial basis of each degree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Mapping, Sequence

from gencomplex.algebra.dga import DGA, CEAlgebra
from gencomplex.algebra.exterior import Form, all_masks, masks_of_degree, popcount
from gencomplex.algebra.grammar import format_form
from gencomplex.algebra.linalg import Frame, Matrix, Subspace, Vector, vec_add, vec_clean, vec_combine, vec_scale
from gencomplex.algebra.liealg import LieModel
from gencomplex.algebra.scalars import Scalar
from gencomplex.core.cache import memoize
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.cohomology import (
    BettiReport,
    LefschetzLevel,
    LefschetzReport,
    LemmaDegreeReport,
    LemmaReport,
    MasseyReport,
    SymplecticExistenceReport,
    TwistedCohomologyReport,
)

from . import exceptions

logger = logging.getLogger(__name__)

ClassInput = tuple[int, Vector]


def _sign(degree: int) -> int:
    return -1 if degree % 2 else 1


def bar(degree: int, vector: Vector) -> Vector:
    """ā = (−1)^{|a|} a."""
    return vector if degree % 2 == 0 else {k: -v for k, v in vector.items()}


@dataclass
class CohomologyDegree:
    degree: int
    cocycles: Subspace
    coboundaries: Subspace
    representatives: list[Vector]
    frame: Frame | None

    @property
    def dim(self) -> int:
        return len(self.representatives)


class CohomologyRing:
    """H•(A) with echelon-chosen representatives and class coordinates."""

    def __init__(self, dga: DGA, degrees: dict[int, CohomologyDegree]):
        self.dga = dga
        self.field = dga.field
        self.degrees = degrees
        self.top = dga.top
        self._product_cache: dict[tuple[int, int, int, int], list[Scalar]] = {}

    @classmethod
    def build(cls, dga: DGA) -> "CohomologyRing":
        degrees: dict[int, CohomologyDegree] = {}
        for k in range(dga.top + 1):
            dim = dga.dimension(k)
            cocycles = dga.d_matrix(k).kernel() if k < dga.top else Subspace.full(dim, dga.field)
            if k > 0:
                coboundaries = Subspace.span(dga.d_matrix(k - 1).columns(), dim, dga.field)
            else:
                coboundaries = Subspace.zero(dim, dga.field)
            representatives = cocycles.complement_basis(coboundaries)
            vectors = representatives + coboundaries.basis
            frame = Frame(vectors, dim, dga.field) if vectors else None
            degrees[k] = CohomologyDegree(k, cocycles, coboundaries, representatives, frame)
            logger.debug("cohomology_degree", extra={"degree": k, "betti": len(representatives), "dim": dim})
        return cls(dga, degrees)

    # basic data ---------------------------------------------------------

    @property
    def betti(self) -> list[int]:
        return [self.degrees[k].dim for k in range(self.top + 1)]

    def betti_number(self, k: int) -> int:
        return self.degrees[k].dim if k in self.degrees else 0

    @property
    def euler_characteristic(self) -> int:
        return sum(_sign(k) * b for k, b in enumerate(self.betti))

    @property
    def total_dimension(self) -> int:
        return sum(self.betti)

    def representative(self, k: int, index: int) -> Vector:
        return dict(self.degrees[k].representatives[index])

    def is_closed(self, k: int, vector: Vector) -> bool:
        if k >= self.top:
            return True
        return not self.dga.d_matrix(k).apply(vector)

    def is_exact(self, k: int, vector: Vector) -> bool:
        if k not in self.degrees:
            return not vec_clean(vector)
        return self.degrees[k].coboundaries.contains(vector)

    def primitive(self, k: int, vector: Vector) -> Vector | None:
        """Some x with dx = vector (vector in degree k), or None."""
        if k == 0:
            return {} if not vec_clean(vector) else None
        return self.dga.d_matrix(k - 1).solve(vector)

    def class_coordinates(self, k: int, vector: Vector) -> list[Scalar]:
        if k not in self.degrees:
            if vec_clean(vector):
                raise exceptions.DimensionMismatchError(f"degree {k} outside 0..{self.top}")
            return []
        if not self.is_closed(k, vector):
            raise exceptions.InputError(f"{self.dga.format_vector(k, vector)} is not closed")
        entry = self.degrees[k]
        if entry.frame is None:
            return []
        coordinates = entry.frame.coordinates(vector)
        return coordinates[: entry.dim]

    def class_vector(self, k: int, coordinates: Sequence[Scalar]) -> Vector:
        return vec_combine(zip(coordinates, self.degrees[k].representatives))

    def class_span(self, k: int, vectors: Sequence[Vector]) -> Subspace:
        """The subspace of H^k spanned by the classes of closed vectors."""
        coords = [{i: c for i, c in enumerate(self.class_coordinates(k, v)) if c} for v in vectors]
        return Subspace.span(coords, self.betti_number(k), self.field)

    def is_zero_class(self, k: int, vector: Vector) -> bool:
        return not any(self.class_coordinates(k, vector))

    def format_vector(self, k: int, vector: Vector) -> str:
        return self.dga.format_vector(k, vector)

    def format_class(self, k: int, coordinates: Sequence[Scalar]) -> str:
        return self.format_vector(k, self.class_vector(k, coordinates))

    def representative_strings(self) -> dict[int, list[str]]:
        return {
            k: [self.format_vector(k, rep) for rep in entry.representatives] for k, entry in self.degrees.items()
        }

    # products -----------------------------------------------------------

    def multiply(self, p: int, a: Vector, q: int, b: Vector) -> Vector:
        if p + q > self.top:
            return {}
        return self.dga.multiply(p, a, q, b)

    def multiplication_matrix(self, p: int, x: Vector, q: int) -> Matrix:
        """Multiplication by a closed degree-p element, H^q → H^{p+q}, in class coordinates."""
        target = p + q
        columns = []
        for rep in self.degrees[q].representatives if q in self.degrees else []:
            product_vector = self.multiply(p, x, q, rep)
            coords = self.class_coordinates(target, product_vector) if target <= self.top else []
            columns.append({i: c for i, c in enumerate(coords) if c})
        return Matrix.from_columns(columns, self.betti_number(target) if target <= self.top else 0, self.field)

    def cup(self, p: int, i: int, q: int, j: int) -> list[Scalar]:
        key = (p, i, q, j)
        if key not in self._product_cache:
            product_vector = self.multiply(p, self.representative(p, i), q, self.representative(q, j))
            self._product_cache[key] = self.class_coordinates(p + q, product_vector) if p + q <= self.top else []
        return self._product_cache[key]

    def cup_table(self) -> dict[tuple[int, int, int, int], list[Scalar]]:
        table = {}
        for p in range(self.top + 1):
            for q in range(self.top + 1 - p):
                for i in range(self.betti_number(p)):
                    for j in range(self.betti_number(q)):
                        coords = self.cup(p, i, q, j)
                        if any(coords):
                            table[(p, i, q, j)] = coords
        return table

    def check_representative_independence(self) -> bool:
        """Perturb every representative by an exact element; products must keep their classes."""
        perturbed: dict[int, list[Vector]] = {}
        for k, entry in self.degrees.items():
            shift: Vector = {}
            if k > 0:
                for column in self.dga.d_matrix(k - 1).columns():
                    if column:
                        shift = column
                        break
            perturbed[k] = [vec_add(rep, shift) for rep in entry.representatives]
        for p in range(self.top + 1):
            for q in range(self.top + 1 - p):
                for i, a in enumerate(perturbed[p]):
                    for j, b in enumerate(perturbed[q]):
                        coords = self.class_coordinates(p + q, self.multiply(p, a, q, b))
                        if coords != self.cup(p, i, q, j):
                            return False
        return True


# results ------------------------------------------------------------------------


@dataclass
class LefschetzLevelResult:
    level: int
    source_dim: int
    target_dim: int
    rank: int
    kernel: Subspace

    @property
    def surjective(self) -> bool:
        return self.rank == self.target_dim

    @property
    def injective(self) -> bool:
        return self.kernel.dim == 0


@dataclass
class LefschetzResult:
    ring: CohomologyRing
    omega: Vector
    half_dimension: int
    levels: list[LefschetzLevelResult]

    @property
    def passes(self) -> bool:
        return all(level.surjective for level in self.levels)

    def kernel_vectors(self, level: int) -> list[Vector]:
        entry = self.levels[level]
        zero = self.ring.field.zero
        return [
            self.ring.class_vector(level, [vec.get(i, zero) for i in range(entry.source_dim)])
            for vec in entry.kernel.basis
        ]

    def kernel_span(self, level: int) -> Subspace:
        return self.levels[level].kernel

    def to_report(self, label: str) -> LefschetzReport:
        return LefschetzReport(
            algebra=label,
            omega=self.ring.format_vector(2, self.omega),
            passes=self.passes,
            levels=[
                LefschetzLevel(
                    level=level.level,
                    power=self.half_dimension - level.level,
                    source_dim=level.source_dim,
                    target_dim=level.target_dim,
                    rank=level.rank,
                    kernel_dim=level.kernel.dim,
                    surjective=level.surjective,
                    injective=level.injective,
                    kernel=[self.ring.format_vector(level.level, v) for v in self.kernel_vectors(level.level)],
                )
                for level in self.levels
            ],
        )


@dataclass
class LemmaDegree:
    label: str
    image_a_kernel_b: int
    image_b_kernel_a: int
    image_ab: int
    witnesses: list[Vector] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.image_a_kernel_b == self.image_ab == self.image_b_kernel_a


@dataclass
class LemmaResult:
    degrees: list[LemmaDegree]

    @property
    def holds(self) -> bool:
        return all(degree.holds for degree in self.degrees)

    @property
    def image_a_kernel_b(self) -> int:
        return sum(degree.image_a_kernel_b for degree in self.degrees)

    @property
    def image_b_kernel_a(self) -> int:
        return sum(degree.image_b_kernel_a for degree in self.degrees)

    @property
    def image_ab(self) -> int:
        return sum(degree.image_ab for degree in self.degrees)

    @property
    def failing_degrees(self) -> list[str]:
        return [degree.label for degree in self.degrees if not degree.holds]

    @property
    def witnesses(self) -> list[Vector]:
        return [w for degree in self.degrees for w in degree.witnesses]

    def to_report(self, label: str, formatter: Callable[[Vector], str] | None = None) -> LemmaReport:
        format_ = formatter or (lambda v: str(v))
        return LemmaReport(
            label=label,
            holds=self.holds,
            image_a_kernel_b=self.image_a_kernel_b,
            image_b_kernel_a=self.image_b_kernel_a,
            image_ab=self.image_ab,
            failing_degrees=self.failing_degrees,
            degrees=[
                LemmaDegreeReport(
                    degree=degree.label,
                    holds=degree.holds,
                    image_a_kernel_b=degree.image_a_kernel_b,
                    image_b_kernel_a=degree.image_b_kernel_a,
                    image_ab=degree.image_ab,
                    witnesses=[format_(w) for w in degree.witnesses],
                )
                for degree in self.degrees
            ],
            witnesses=[format_(w) for w in self.witnesses],
        )


def degree_grading(n: int) -> dict[str, list[int]]:
    """Coordinate blocks of Λ• by form degree, in the all_masks order."""
    blocks: dict[str, list[int]] = {}
    for position, mask in enumerate(all_masks(n)):
        blocks.setdefault(str(popcount(mask)), []).append(position)
    return blocks


def parity_grading(n: int) -> dict[str, list[int]]:
    blocks: dict[str, list[int]] = {"even": [], "odd": []}
    for position, mask in enumerate(all_masks(n)):
        blocks["odd" if popcount(mask) % 2 else "even"].append(position)
    return blocks


@dataclass
class MasseyProblem:
    ring: CohomologyRing
    degrees: tuple[int, ...]
    inputs: tuple[Vector, ...]
    primitives: dict[str, Vector]
    degree: int
    representative: Vector
    coordinates: list[Scalar]
    indeterminacy: Subspace
    verdict: str

    @property
    def nonvanishing(self) -> bool:
        return self.verdict == "nonvanishing"

    def to_report(self) -> MasseyReport:
        ring = self.ring
        return MasseyReport(
            inputs=[ring.format_vector(k, v) for k, v in zip(self.degrees, self.inputs)],
            primitives={name: ring.format_vector(self._primitive_degree(name), v) for name, v in self.primitives.items()},
            degree=self.degree,
            representative=ring.format_vector(self.degree, self.representative),
            indeterminacy_dim=self.indeterminacy.dim,
            indeterminacy=[
                ring.format_class(self.degree, [b.get(i, ring.field.zero) for i in range(ring.betti_number(self.degree))])
                for b in self.indeterminacy.basis
            ],
            verdict=self.verdict,
        )

    def _primitive_degree(self, name: str) -> int:
        i, j = int(name[1]), int(name[2])
        return sum(self.degrees[i - 1 : j - 1]) - (j - i - 1)


@dataclass
class SymplecticExistence:
    verdict: str
    closed_dimension: int
    certificate_zero: bool
    witness: Form | None
    tried: int


# service ----------------------------------------------------------------------------


@memoize("cohomology", key_builder=lambda model: (model.fingerprint, "ring"))
def _ce_ring(model: LieModel) -> CohomologyRing:
    return CohomologyRing.build(CEAlgebra(model))


class CohomologyService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)

    # rings ----------------------------------------------------------------

    def cohomology(self, source: LieModel | DGA) -> CohomologyRing:
        if isinstance(source, LieModel):
            ring = _ce_ring(source)
            label = source.tuple_string()
        else:
            ring = CohomologyRing.build(source)
            label = repr(source)
        self._logger.info("cohomology_computed", extra={"algebra": label, "betti": ring.betti})
        return ring

    def betti_report(self, model: LieModel) -> BettiReport:
        ring = self.cohomology(model)
        return BettiReport(
            algebra=model.tuple_string(),
            betti=ring.betti,
            euler_characteristic=ring.euler_characteristic,
            representatives={str(k): v for k, v in ring.representative_strings().items()},
        )

    # twisted -------------------------------------------------------------

    def twisted_dimensions(self, model: LieModel) -> tuple[int, int]:
        """(even, odd) dimensions of the d_H-cohomology."""
        even_to_odd = model.d_h_parity_matrix(0)
        odd_to_even = model.d_h_parity_matrix(1)
        rank_even, rank_odd = even_to_odd.rank(), odd_to_even.rank()
        even = even_to_odd.cols - rank_even - rank_odd
        odd = odd_to_even.cols - rank_odd - rank_even
        return even, odd

    def h_cohomology(self, model: LieModel, twist: Form | None = None) -> dict[int, int]:
        """Per-degree dims of ker[H]/im[H] acting on H•(g)."""
        twist = model.twist if twist is None else twist
        untwisted = model.with_twist(None) if model.has_twist else model
        ring = self.cohomology(untwisted)
        ce = ring.dga
        assert isinstance(ce, CEAlgebra)
        if twist and not twist.is_homogeneous(3):
            raise exceptions.InputError("the twist must be a 3-form")
        _, h_vector = ce.from_form(twist) if twist else (3, {})
        dims: dict[int, int] = {}
        maps = {k: ring.multiplication_matrix(3, h_vector, k) for k in range(model.n + 1)}
        for k in range(model.n + 1):
            outgoing = maps[k].rank() if k + 3 <= model.n else 0
            incoming = maps[k - 3].rank() if k >= 3 else 0
            dims[k] = ring.betti_number(k) - outgoing - incoming
        return dims

    def twisted_cohomology(self, model: LieModel) -> TwistedCohomologyReport:
        even, odd = self.twisted_dimensions(model)
        h_dims = self.h_cohomology(model)
        h_even = sum(dim for k, dim in h_dims.items() if k % 2 == 0)
        h_odd = sum(dim for k, dim in h_dims.items() if k % 2 == 1)
        report = TwistedCohomologyReport(
            algebra=model.tuple_string(),
            twist=format_form(model.twist),
            even=even,
            odd=odd,
            h_cohomology={str(k): v for k, v in h_dims.items()},
            h_even=h_even,
            h_odd=h_odd,
            agree=(even, odd) == (h_even, h_odd),
        )
        self._logger.info("twisted_cohomology_computed", extra={"algebra": report.algebra, "even": even, "odd": odd})
        return report

    # Lefschetz -----------------------------------------------------------

    def lefschetz(self, model: LieModel, omega: Form) -> LefschetzResult:
        if model.n % 2:
            raise exceptions.DomainError("the Lefschetz property needs an even-dimensional algebra")
        if not omega.is_homogeneous(2) or not omega:
            raise exceptions.InputError("ω must be a nonzero 2-form")
        if model.d(omega):
            raise exceptions.NonClosedFormError(f"dω = {model.d(omega)}", witness=str(model.d(omega)))
        half = model.n // 2
        if not omega.power(half):
            raise exceptions.DegenerateFormError(f"ω^{half} = 0", witness=str(omega))
        ring = self.cohomology(model.with_twist(None) if model.has_twist else model)
        ce = ring.dga
        assert isinstance(ce, CEAlgebra)
        levels = []
        # levels 0..half-1; at k = half the map is the identity
        for k in range(half):
            power = half - k
            _, power_vector = ce.from_form(omega.power(power))
            matrix = ring.multiplication_matrix(2 * power, power_vector, k)
            rank, kernel = matrix.rank_kernel() if matrix.cols else (0, Subspace.zero(0, ring.field))
            levels.append(
                LefschetzLevelResult(
                    level=k,
                    source_dim=ring.betti_number(k),
                    target_dim=ring.betti_number(model.n - k),
                    rank=rank,
                    kernel=kernel,
                )
            )
        _, omega_vector = ce.from_form(omega)
        result = LefschetzResult(ring=ring, omega=omega_vector, half_dimension=half, levels=levels)
        self._logger.info(
            "lefschetz_checked",
            extra={"algebra": model.tuple_string(), "passes": result.passes, "kernels": [lv.kernel.dim for lv in levels]},
        )
        return result

    # dd^J-type lemma ------------------------------------------------------

    def lemma_check(
        self, d_a: Matrix, d_b: Matrix, grading: Mapping[str, Sequence[int]] | None = None
    ) -> LemmaResult:
        """Im dA ∩ ker dB = Im dB ∩ ker dA = Im dA dB, degree by degree.

        `grading` splits the coordinates into blocks on which both differentials
        are homogeneous (form degree for d and δ, parity for d_H and d^J); without
        it the whole space is one block.
        """
        if d_a.shape != d_b.shape or d_a.rows != d_a.cols:
            raise exceptions.DimensionMismatchError("both differentials must act on the same space")
        for name, square in (("dA^2", d_a @ d_a), ("dB^2", d_b @ d_b), ("dA dB + dB dA", d_a @ d_b + d_b @ d_a)):
            if not square.is_zero():
                raise exceptions.AnticommutationError(f"{name} is not zero", witness=name)
        size, scalar_field = d_a.rows, d_a.field
        if grading is None:
            grading = {"all": range(size)}
        if sorted(i for block in grading.values() for i in block) != list(range(size)):
            raise exceptions.DimensionMismatchError("the grading must partition the coordinates")
        left = d_a.image().intersection(d_b.kernel())
        right = d_b.image().intersection(d_a.kernel())
        image_ab = (d_a @ d_b).image()
        degrees = []
        for label, block in grading.items():
            coordinates = Subspace.span([{i: scalar_field.one} for i in block], size, scalar_field)
            left_k, right_k, image_k = (space.intersection(coordinates) for space in (left, right, image_ab))
            witnesses = left_k.complement_basis(image_k)[:1] + right_k.complement_basis(image_k)[:1]
            degrees.append(LemmaDegree(label, left_k.dim, right_k.dim, image_k.dim, witnesses))
        result = LemmaResult(degrees)
        if (result.image_a_kernel_b, result.image_b_kernel_a, result.image_ab) != (left.dim, right.dim, image_ab.dim):
            raise exceptions.DomainError("the differentials are not homogeneous for this grading")
        self._logger.debug(
            "lemma_checked",
            extra={"holds": result.holds, "failing_degrees": result.failing_degrees},
        )
        return result

    # Massey products ------------------------------------------------------

    def _closed_inputs(self, ring: CohomologyRing, classes: Sequence[ClassInput]) -> None:
        for k, vector in classes:
            if not ring.is_closed(k, vector):
                raise exceptions.InputError(f"{ring.format_vector(k, vector)} is not closed")

    def _solve_primitive(self, ring: CohomologyRing, degree: int, target: Vector, label: str) -> Vector:
        solution = ring.primitive(degree, target)
        if solution is None:
            raise exceptions.MasseyUndefinedError(
                f"{label} = {ring.format_vector(degree, target)} is not exact", witness=ring.format_vector(degree, target)
            )
        return solution

    def _ideal(self, ring: CohomologyRing, degree: int, first: ClassInput, last: ClassInput) -> Subspace:
        """Degree slice of the ideal ([first], [last]) in H•, in class coordinates."""
        p, a = first
        r, c = last
        vectors = []
        for k in range(ring.top + 1):
            if k + r == degree:
                vectors += [ring.multiply(k, rep, r, c) for rep in ring.degrees[k].representatives]
            if p + k == degree:
                vectors += [ring.multiply(p, a, k, rep) for rep in ring.degrees[k].representatives]
        if degree > ring.top:
            return Subspace.zero(0, ring.field)
        return ring.class_span(degree, vectors)

    def massey(self, ring: CohomologyRing, classes: Sequence[ClassInput]) -> MasseyProblem:
        if len(classes) == 3:
            return self._massey_triple(ring, classes)
        if len(classes) == 4:
            return self._massey_quadruple(ring, classes)
        raise exceptions.InputError("Massey products take three or four classes")

    def _massey_triple(self, ring: CohomologyRing, classes: Sequence[ClassInput]) -> MasseyProblem:
        self._closed_inputs(ring, classes)
        (p, a12), (q, a23), (r, a34) = classes
        a13 = self._solve_primitive(ring, p + q, ring.multiply(p, bar(p, a12), q, a23), "a12·a23")
        a24 = self._solve_primitive(ring, q + r, ring.multiply(q, bar(q, a23), r, a34), "a23·a34")
        degree = p + q + r - 1
        representative = vec_add(
            ring.multiply(p, bar(p, a12), q + r - 1, a24),
            ring.multiply(p + q - 1, bar(p + q - 1, a13), r, a34),
        )
        return self._finish(ring, classes, {"a13": a13, "a24": a24}, degree, representative)

    def _finish(
        self,
        ring: CohomologyRing,
        classes: Sequence[ClassInput],
        primitives: dict[str, Vector],
        degree: int,
        representative: Vector,
        verdict: str | None = None,
    ) -> MasseyProblem:
        if degree > ring.top:
            coordinates: list[Scalar] = []
            indeterminacy = Subspace.zero(0, ring.field)
        else:
            coordinates = ring.class_coordinates(degree, representative)
            indeterminacy = self._ideal(ring, degree, classes[0], classes[-1])
        if verdict is None:
            coordinate_vector = {i: c for i, c in enumerate(coordinates) if c}
            verdict = "vanishing" if indeterminacy.contains(coordinate_vector) else "nonvanishing"
        problem = MasseyProblem(
            ring=ring,
            degrees=tuple(k for k, _ in classes),
            inputs=tuple(v for _, v in classes),
            primitives=primitives,
            degree=degree,
            representative=representative,
            coordinates=coordinates,
            indeterminacy=indeterminacy,
            verdict=verdict,
        )
        self._logger.info(
            "massey_computed",
            extra={
                "inputs": [ring.format_vector(k, v) for k, v in classes],
                "verdict": verdict,
                "indeterminacy_dim": indeterminacy.dim,
            },
        )
        return problem

    def _massey_quadruple(self, ring: CohomologyRing, classes: Sequence[ClassInput]) -> MasseyProblem:
        """Searches the affine space of primitives for a simultaneous vanishing of both triple products."""
        self._closed_inputs(ring, classes)
        (p1, a12), (p2, a23), (p3, a34), (p4, a45) = classes
        d13, d24, d35 = p1 + p2 - 1, p2 + p3 - 1, p3 + p4 - 1
        base13 = self._solve_primitive(ring, d13 + 1, ring.multiply(p1, bar(p1, a12), p2, a23), "a12·a23")
        base24 = self._solve_primitive(ring, d24 + 1, ring.multiply(p2, bar(p2, a23), p3, a34), "a23·a34")
        base35 = self._solve_primitive(ring, d35 + 1, ring.multiply(p3, bar(p3, a34), p4, a45), "a34·a45")
        t1, t2 = d13 + p3, p2 + d35  # degrees of the two triple representatives

        def triples(z13: Vector, z24: Vector, z35: Vector) -> tuple[Vector, Vector]:
            a13, a24, a35 = vec_add(base13, z13), vec_add(base24, z24), vec_add(base35, z35)
            first = vec_add(ring.multiply(p1, bar(p1, a12), d24, a24), ring.multiply(d13, bar(d13, a13), p3, a34))
            second = vec_add(ring.multiply(p2, bar(p2, a23), d35, a35), ring.multiply(d24, bar(d24, a24), p4, a45))
            return first, second

        blocks = [(d13, "z13"), (d24, "z24"), (d35, "z35")]
        unknowns: list[tuple[int, int]] = []  # (block, representative index)
        for block, (degree, _) in enumerate(blocks):
            unknowns += [(block, i) for i in range(ring.betti_number(degree))]

        def assemble(values: Sequence[Scalar]) -> tuple[Vector, Vector, Vector]:
            parts: list[Vector] = [{}, {}, {}]
            for (block, index), value in zip(unknowns, values):
                if value:
                    parts[block] = vec_add(parts[block], vec_scale(ring.representative(blocks[block][0], index), value))
            return parts[0], parts[1], parts[2]

        base_first, base_second = triples({}, {}, {})
        b1, b2 = ring.betti_number(t1), ring.betti_number(t2)
        columns = []
        zero = ring.field.zero
        for position in range(len(unknowns)):
            values = [zero] * len(unknowns)
            values[position] = ring.field.one
            first, second = triples(*assemble(values))
            delta_first = ring.class_coordinates(t1, vec_add(first, vec_scale(base_first, -ring.field.one)))
            delta_second = ring.class_coordinates(t2, vec_add(second, vec_scale(base_second, -ring.field.one)))
            column = {i: c for i, c in enumerate(delta_first) if c}
            column.update({b1 + i: c for i, c in enumerate(delta_second) if c})
            columns.append(column)
        system = Matrix.from_columns(columns, b1 + b2, ring.field)
        target = {i: -c for i, c in enumerate(ring.class_coordinates(t1, base_first)) if c}
        target.update({b1 + i: -c for i, c in enumerate(ring.class_coordinates(t2, base_second)) if c})
        solution = system.solve(target) if columns else (None if target else {})
        if solution is None:
            raise exceptions.MasseyUndefinedError(
                "no simultaneous choice of primitives makes both triple products vanish",
                witness=[ring.format_vector(t1, base_first), ring.format_vector(t2, base_second)],
            )
        values = [solution.get(i, zero) for i in range(len(unknowns))]
        free_directions = system.kernel().basis if columns else []

        def quadruple(choice: Sequence[Scalar]) -> tuple[Vector, dict[str, Vector]]:
            z13, z24, z35 = assemble(choice)
            a13, a24, a35 = vec_add(base13, z13), vec_add(base24, z24), vec_add(base35, z35)
            first, second = triples(z13, z24, z35)
            a14 = self._solve_primitive(ring, t1, first, "<a12,a23,a34>")
            a25 = self._solve_primitive(ring, t2, second, "<a23,a34,a45>")
            d14, d25 = t1 - 1, t2 - 1
            rep = vec_add(
                vec_add(ring.multiply(p1, bar(p1, a12), d25, a25), ring.multiply(d13, bar(d13, a13), d35, a35)),
                ring.multiply(d14, bar(d14, a14), p4, a45),
            )
            return rep, {"a13": a13, "a24": a24, "a35": a35, "a14": a14, "a25": a25}

        representative, primitives = quadruple(values)
        degree = p1 + p2 + p3 + p4 - 2
        verdict = None
        if degree <= ring.top and free_directions:
            indeterminacy = self._ideal(ring, degree, classes[0], classes[-1])
            base_coords = ring.class_coordinates(degree, representative)
            trials = []
            for direction in free_directions:
                step = [direction.get(i, zero) for i in range(len(unknowns))]
                trials.append(step)
                trials.append([2 * s for s in step])
            for first_dir, second_dir in combinations(free_directions, 2):
                trials.append([first_dir.get(i, zero) + second_dir.get(i, zero) for i in range(len(unknowns))])
            for step in trials:
                moved, _ = quadruple([v + s for v, s in zip(values, step)])
                delta = [x - y for x, y in zip(ring.class_coordinates(degree, moved), base_coords)]
                if not indeterminacy.contains({i: c for i, c in enumerate(delta) if c}):
                    verdict = "choice-dependent"
                    break
        return self._finish(ring, classes, primitives, degree, representative, verdict)

    def massey_forms(self, model: LieModel, forms: Sequence[Form]) -> MasseyProblem:
        ring = self.cohomology(model.with_twist(None) if model.has_twist else model)
        ce = ring.dga
        assert isinstance(ce, CEAlgebra)
        return self.massey(ring, [ce.from_form(form) for form in forms])

    # symplectic existence ------------------------------------------------------

    def symplectic_existence(self, model: LieModel) -> SymplecticExistence:
        if model.n % 2:
            raise exceptions.DomainError("symplectic forms need an even-dimensional algebra")
        half = model.n // 2
        closed = model.d_matrix(2).kernel()
        masks = masks_of_degree(model.n, 2)
        basis = [Form.from_vector(model.n, model.field, vector, masks) for vector in closed.basis]
        certificate_zero = not self._multilinear_nonzero(basis, half)
        witness: Form | None = None
        tried = 0
        verdict = "impossible" if certificate_zero else "inconclusive"
        if not certificate_zero:
            for coefficients in self._search_space(len(basis)):
                tried += 1
                omega = Form.zero(model.n, model.field)
                for c, form in zip(coefficients, basis):
                    if c:
                        omega = omega + form.scale(c)
                if omega.power(half):
                    witness = omega
                    verdict = "exists"
                    break
                if tried >= self.settings.SYMPLECTIC_SEARCH_LIMIT:
                    break
        self._logger.info(
            "symplectic_existence_checked",
            extra={"algebra": model.tuple_string(), "verdict": verdict, "closed_dim": closed.dim, "tried": tried},
        )
        return SymplecticExistence(verdict, closed.dim, certificate_zero, witness, tried)

    def symplectic_existence_report(self, model: LieModel) -> SymplecticExistenceReport:
        result = self.symplectic_existence(model)
        return SymplecticExistenceReport(
            algebra=model.tuple_string(),
            verdict=result.verdict,
            closed_two_forms=result.closed_dimension,
            certificate_zero=result.certificate_zero,
            witness=format_form(result.witness) if result.witness is not None else None,
            tried=result.tried,
        )

    @staticmethod
    def _multilinear_nonzero(basis: Sequence[Form], m: int) -> bool:
        """Whether z_{i1}∧…∧z_{im} is nonzero for some sorted index tuple."""
        if not basis:
            return False
        for indices in combinations_with_replacement(range(len(basis)), m):
            product_form = basis[indices[0]]
            for index in indices[1:]:
                product_form = product_form.wedge(basis[index])
                if not product_form:
                    break
            if product_form:
                return True
        return False

    def _search_space(self, size: int):
        """Coefficient vectors by growing support; the first nonzero coefficient is positive."""
        bound = self.settings.SYMPLECTIC_SEARCH_BOUND
        values = [v for v in range(-bound, bound + 1) if v]
        positive = [v for v in values if v > 0]
        for support in range(1, size + 1):
            for indices in combinations(range(size), support):
                for head in positive:
                    for tail in product(values, repeat=support - 1):
                        coefficients = [0] * size
                        coefficients[indices[0]] = head
                        for index, value in zip(indices[1:], tail):
                            coefficients[index] = value
                        yield coefficients
