"""Partial Sullivan minimal models and s-formality checks.

The model is built degree by degree: closed generators for cohomology the
model is still missing, then generators that kill the kernel of ρ* one degree
up. Free algebras are materialised only up to ``bound + 2``, which is enough to
read off cohomology through ``bound + 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator, Sequence

from gencomplex.algebra.cdga import CDGA, HirschExtension, hirsch_extend
from gencomplex.algebra.dga import DGA, CEAlgebra
from gencomplex.algebra.linalg import Matrix, Subspace, Vector, vec_add, vec_clean, vec_combine, vec_scale, vec_sub
from gencomplex.algebra.liealg import LieModel
from gencomplex.algebra.scalars import Scalar
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.minimal import (
    CDGAReport,
    FormalityReport,
    GeneratorReport,
    MasseyPairingReport,
    MinimalModelReport,
)

from . import exceptions
from .cohomology import CohomologyRing, CohomologyService, MasseyProblem

logger = logging.getLogger(__name__)

# Rounds of killing generators per degree; more than one only happens with degree-1 generators.
MAX_KILLING_ROUNDS = 12

_DEGREE_ONE_CAVEAT = (
    "degree-1 generators present: the model is a minimal model only when the fundamental group is nilpotent"
)


@dataclass
class ModelGenerator:
    label: str
    degree: int
    kind: str  # "closed" or "killing"
    image: Vector


@dataclass
class PartialMinimalModel:
    target: DGA
    target_ring: CohomologyRing
    algebra: CDGA
    ring: CohomologyRing
    generators: list[ModelGenerator]
    rho: dict[tuple[int, int], Vector]
    bound: int
    label: str
    quasi_isomorphic: dict[int, bool] = field(default_factory=dict)
    injective_next: bool = False
    chain_map: bool = False
    minimal: bool = False

    @property
    def verified_through(self) -> int | None:
        if all(self.quasi_isomorphic.values()) and self.injective_next:
            return self.bound
        return None

    @property
    def census(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for generator in self.generators:
            counts[generator.degree] = counts.get(generator.degree, 0) + 1
        return dict(sorted(counts.items()))

    def generator_vector(self, generator: ModelGenerator) -> Vector:
        return self.algebra.basis_vector(generator.label)[1]

    def differential(self, generator: ModelGenerator) -> Vector:
        return self.algebra.d_vector(generator.degree, self.generator_vector(generator))

    def rho_vector(self, k: int, vector: Vector) -> Vector:
        return vec_combine((c, self.rho.get((k, i), {})) for i, c in vector.items())

    def to_report(self) -> MinimalModelReport:
        algebra, target = self.algebra, self.target
        generators = [
            GeneratorReport(
                label=g.label,
                degree=g.degree,
                kind=g.kind,
                differential=algebra.format_vector(g.degree + 1, self.differential(g)),
                image=target.format_vector(g.degree, g.image),
            )
            for g in self.generators
        ]
        caveats = [_DEGREE_ONE_CAVEAT] if any(g.degree == 1 for g in self.generators) else []
        return MinimalModelReport(
            algebra=self.label,
            bound=self.bound,
            generators=generators,
            census={str(k): v for k, v in self.census.items()},
            quasi_isomorphic={str(k): v for k, v in self.quasi_isomorphic.items()},
            injective_next=self.injective_next,
            chain_map=self.chain_map,
            minimal=self.minimal,
            verified_through=self.verified_through,
            caveats=caveats,
        )


@dataclass
class FormalityResult:
    verdict: str
    witness: MasseyProblem | None
    triples_tried: int
    complements_tried: int
    checked_through: int
    formal_by_theorem: bool


class MinimalModelService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)
        self._cohomology = CohomologyService(self.settings)

    # CDGA summaries ----------------------------------------------------------------

    def cdga_report(self, algebra: CDGA) -> CDGAReport:
        ring = self._cohomology.cohomology(algebra)
        return CDGAReport(
            name=algebra.name,
            dimensions=algebra.dimensions,
            betti=ring.betti,
            orientation=algebra.orientation,
            representatives={str(k): v for k, v in ring.representative_strings().items() if v},
        )

    # construction ---------------------------------------------------------------------

    def minimal_model(self, source: LieModel | DGA, bound: int, *, label: str | None = None) -> PartialMinimalModel:
        if isinstance(source, LieModel):
            untwisted = source.with_twist(None) if source.has_twist else source
            target_ring = self._cohomology.cohomology(untwisted)
            label = label or untwisted.tuple_string()
        else:
            target_ring = self._cohomology.cohomology(source)
            label = label or getattr(source, "name", repr(source))
        target = target_ring.dga
        if bound < 1:
            raise exceptions.InputError("the degree bound must be positive")
        if target_ring.betti_number(0) != 1:
            raise exceptions.DomainError(f"H⁰ of {label} is not the ground field")
        first = next((k for k in range(1, target_ring.top + 1) if target_ring.betti_number(k)), None)
        if first is None:
            raise exceptions.DomainError(f"{label} has no positive-degree cohomology to model")
        if bound < first:
            raise exceptions.DomainError(
                f"bound {bound} is below the first nonzero positive degree {first} of the cohomology"
            )
        truncation = bound + 2
        field_ = target.field
        model: CDGA = CDGA.ground(field_, name=f"model({label})")
        rho: dict[tuple[int, int], Vector] = {(0, 0): {0: field_.one}}
        generators: list[ModelGenerator] = []
        counters: dict[str, int] = {}

        def extend(new: list[tuple[str, int, Vector, Vector, str]]) -> None:
            nonlocal model, rho
            model = hirsch_extend(
                model,
                [(name, degree, dv) for name, degree, dv, _, _ in new],
                max_degree=truncation,
                name=f"model({label})",
            )
            assert isinstance(model, HirschExtension)
            rho = model.induced_map(rho, [image for _, _, _, image, _ in new], target)
            generators.extend(ModelGenerator(name, degree, kind, image) for name, degree, _, image, kind in new)

        def fresh(prefix: str, degree: int) -> str:
            key = f"{prefix}{degree}"
            counters[key] = counters.get(key, 0) + 1
            return f"{key}_{counters[key]}"

        for degree in range(1, bound + 1):
            model_ring = CohomologyRing.build(model)
            image = self._rho_star(model_ring, target_ring, rho, degree).image()
            missing = Subspace.full(target_ring.betti_number(degree), field_).complement_basis(image)
            if missing:
                extend(
                    [
                        (fresh("z", degree), degree, {}, target_ring.class_vector(degree, _dense(c, target_ring.betti_number(degree), field_.zero)), "closed")
                        for c in missing
                    ]
                )
            for _ in range(MAX_KILLING_ROUNDS):
                model_ring = CohomologyRing.build(model)
                kernel = self._rho_star(model_ring, target_ring, rho, degree + 1).kernel()
                if not kernel.dim:
                    break
                new = []
                for coordinates in kernel.basis:
                    z = model_ring.class_vector(degree + 1, _dense(coordinates, model_ring.betti_number(degree + 1), field_.zero))
                    image_z = vec_combine((c, rho.get((degree + 1, i), {})) for i, c in z.items())
                    primitive = _target_primitive(target_ring, degree + 1, image_z)
                    if primitive is None:
                        raise exceptions.VerificationFailure(
                            f"ρ({model.format_vector(degree + 1, z)}) should be exact in {label}",
                            witness=target.format_vector(degree + 1, image_z),
                        )
                    new.append((fresh("b", degree), degree, z, primitive, "killing"))
                extend(new)
            else:
                raise exceptions.DomainError(
                    f"killing cohomology in degree {degree + 1} did not stabilise after {MAX_KILLING_ROUNDS} rounds"
                )
            self._logger.debug(
                "minimal_model_stage",
                extra={"algebra": label, "degree": degree, "generators": len(generators)},
            )

        model_ring = CohomologyRing.build(model)
        pm = PartialMinimalModel(
            target=target,
            target_ring=target_ring,
            algebra=model,
            ring=model_ring,
            generators=generators,
            rho=rho,
            bound=bound,
            label=label,
        )
        self._verify(pm)
        self._logger.info(
            "minimal_model_built",
            extra={
                "algebra": label,
                "bound": bound,
                "census": {str(k): v for k, v in pm.census.items()},
                "verified_through": pm.verified_through,
            },
        )
        return pm

    def _rho_star(
        self, model_ring: CohomologyRing, target_ring: CohomologyRing, rho: dict[tuple[int, int], Vector], k: int
    ) -> Matrix:
        """ρ*: H^k(model) → H^k(target) in class coordinates."""
        rows = target_ring.betti_number(k)
        columns = []
        for rep in model_ring.degrees[k].representatives if k in model_ring.degrees else []:
            image = vec_combine((c, rho.get((k, i), {})) for i, c in rep.items())
            coordinates = target_ring.class_coordinates(k, image) if rows else []
            columns.append({i: c for i, c in enumerate(coordinates) if c})
        return Matrix.from_columns(columns, rows, target_ring.field)

    def _verify(self, pm: PartialMinimalModel) -> None:
        model, target = pm.algebra, pm.target
        for k in range(pm.bound + 1):
            matrix = self._rho_star(pm.ring, pm.target_ring, pm.rho, k)
            pm.quasi_isomorphic[k] = matrix.rows == matrix.cols and matrix.rank() == matrix.rows
        pm.injective_next = not self._rho_star(pm.ring, pm.target_ring, pm.rho, pm.bound + 1).kernel().dim
        chain_map = True
        for k in range(model.top):
            for i in range(model.dimension(k)):
                left = target.d_matrix(k).apply(pm.rho.get((k, i), {})) if k < pm.target_ring.top else {}
                right = pm.rho_vector(k + 1, model.d_vector(k, {i: model.field.one}))
                if vec_sub(left, right):
                    chain_map = False
                    self._logger.warning(
                        "chain_map_violation",
                        extra={"algebra": pm.label, "element": model.basis[k][i]},
                    )
                    break
            if not chain_map:
                break
        pm.chain_map = chain_map
        linear = {model.locate(g.label) for g in pm.generators}
        pm.minimal = all(
            not any((g.degree + 1, index) in linear for index in pm.differential(g)) for g in pm.generators
        )

    # formality --------------------------------------------------------------------------

    def s_formality_check(
        self, pm: PartialMinimalModel, s: int | None = None, *, ambient: int | None = None
    ) -> FormalityResult:
        s = pm.bound if s is None else s
        if s > pm.bound or s < 1:
            raise exceptions.InputError(f"s = {s} outside the verified range 1..{pm.bound}")
        if s < pm.bound:
            # the ideal condition lives in ΛV^{≤s}
            pm = self.minimal_model(pm.target, s, label=pm.label)
        if pm.verified_through is None:
            raise exceptions.DomainError("the partial model is not a verified quasi-isomorphism")
        limit = self.settings.FORMALITY_SEARCH_LIMIT
        witness, triples = self._massey_witness(pm.target_ring, limit)
        checked = pm.bound + 1 if ambient is None else min(pm.bound + 1, ambient)
        by_theorem = ambient is not None and 2 * (s + 1) >= ambient
        if witness is not None:
            result = FormalityResult("nonformal", witness, triples, 0, checked, False)
        else:
            found, tried = self._complement_search(pm, s, checked, limit)
            verdict = "formal-certified" if found else "inconclusive"
            result = FormalityResult(verdict, None, triples, tried, checked, by_theorem and found)
        self._logger.info(
            "formality_checked",
            extra={"algebra": pm.label, "s": s, "verdict": result.verdict, "complements": result.complements_tried},
        )
        return result

    def formality_report(self, pm: PartialMinimalModel, result: FormalityResult) -> FormalityReport:
        return FormalityReport(
            algebra=pm.label,
            bound=pm.bound,
            verdict=result.verdict,
            witness=result.witness.to_report() if result.witness is not None else None,
            triples_tried=result.triples_tried,
            complements_tried=result.complements_tried,
            checked_through=result.checked_through,
            formal_by_theorem=result.formal_by_theorem,
        )

    def _massey_witness(self, ring: CohomologyRing, limit: int) -> tuple[MasseyProblem | None, int]:
        """First nonvanishing triple product among representative classes."""
        classes = [(k, i) for k in range(1, ring.top + 1) for i in range(ring.betti_number(k))]
        triples = [
            t for t in product(classes, repeat=3) if t[0][0] + t[1][0] + t[2][0] - 1 <= ring.top
        ]
        triples.sort(key=lambda t: (int(t[0] == t[1]) + int(t[1] == t[2]), t))
        tried = 0
        for (p, i), (q, j), (r, l) in triples:
            if any(ring.cup(p, i, q, j)) or any(ring.cup(q, j, r, l)):
                continue
            if tried >= limit:
                break
            tried += 1
            inputs = [(p, ring.representative(p, i)), (q, ring.representative(q, j)), (r, ring.representative(r, l))]
            try:
                problem = self._cohomology.massey(ring, inputs)
            except exceptions.MasseyUndefinedError:
                continue
            if problem.nonvanishing:
                return problem, tried
        return None, tried

    def _complement_search(self, pm: PartialMinimalModel, s: int, checked: int, limit: int) -> tuple[bool, int]:
        """Look for complements N^i of the closed generators with closed ideal elements exact."""
        model = pm.algebra
        one, zero = model.field.one, model.field.zero
        per_degree: list[list[list[Vector]]] = []
        for degree in range(1, s + 1):
            vectors = [pm.generator_vector(g) for g in pm.generators if g.degree == degree]
            if not vectors:
                continue
            d_images = [model.d_vector(degree, v) for v in vectors]
            d_on_generators = Matrix.from_columns(d_images, model.dimension(degree + 1), model.field)
            closed = d_on_generators.kernel()
            pivots = set(closed.pivots)
            free = [j for j in range(len(vectors)) if j not in pivots]
            if not free:
                continue
            options = []
            for shifts in _shift_grid(len(free) * closed.dim):
                complement = []
                for position, j in enumerate(free):
                    combination = {j: one}
                    for c_index, c_basis in enumerate(closed.basis):
                        shift = shifts[position * closed.dim + c_index]
                        if shift:
                            combination = vec_add(combination, vec_scale(c_basis, model.field.convert(shift)))
                    complement.append(vec_combine((c, vectors[g]) for g, c in combination.items()))
                options.append((degree, complement))
                if len(options) >= limit:
                    break
            per_degree.append(options)
        if not per_degree:
            return True, 1
        tried = 0
        for choice in product(*per_degree):
            tried += 1
            if self._ideal_closed_exact(pm, [(degree, v) for degree, complement in choice for v in complement], checked):
                return True, tried
            if tried >= limit:
                break
        return False, tried

    def _ideal_closed_exact(self, pm: PartialMinimalModel, complement: Sequence[tuple[int, Vector]], checked: int) -> bool:
        model = pm.algebra
        for k in range(1, checked + 1):
            spanning = []
            for degree, n in complement:
                if degree > k:
                    continue
                for index in range(model.dimension(k - degree)):
                    spanning.append(model.multiply(degree, n, k - degree, {index: model.field.one}))
            ideal = Subspace.span(spanning, model.dimension(k), model.field)
            if not ideal.dim:
                continue
            closed = ideal & model.d_matrix(k).kernel() if k < model.top else ideal
            exact = pm.ring.degrees[k].coboundaries if k in pm.ring.degrees else Subspace.zero(model.dimension(k), model.field)
            if not closed.issubset(exact):
                return False
        return True

    # Massey pairings ---------------------------------------------------------------------

    def massey_pairing(
        self, algebra: CDGA, classes: Sequence[tuple[int, Vector]], against: tuple[int, Vector]
    ) -> MasseyPairingReport:
        """∫⟨a,b,c⟩·x, and whether it is the same for every choice of primitives."""
        ring = self._cohomology.cohomology(algebra)
        problem = self._cohomology.massey(ring, classes)
        k, x = against
        if problem.degree + k != algebra.top:
            raise exceptions.DimensionMismatchError(
                f"pairing a degree-{problem.degree} product with a degree-{k} class misses the top degree {algebra.top}"
            )
        integral = algebra.integrate(algebra.top, ring.multiply(problem.degree, problem.representative, k, x))
        choice_independent = all(
            not algebra.integrate(
                algebra.top,
                ring.multiply(
                    problem.degree,
                    ring.class_vector(problem.degree, _dense(b, ring.betti_number(problem.degree), ring.field.zero)),
                    k,
                    x,
                ),
            )
            for b in problem.indeterminacy.basis
        )
        return MasseyPairingReport(
            massey=problem.to_report(),
            against=algebra.format_vector(k, x),
            integral=algebra.field.format(integral),
            choice_independent=choice_independent,
        )


# helpers ------------------------------------------------------------------------------


def _dense(vector: Vector, size: int, zero: Scalar) -> list[Scalar]:
    return [vector.get(i, zero) for i in range(size)]


def _target_primitive(ring: CohomologyRing, degree: int, vector: Vector) -> Vector | None:
    if not vec_clean(vector):
        return {}
    if degree > ring.top:
        return None
    return ring.primitive(degree, vector)


def _shift_grid(size: int) -> Iterator[tuple[int, ...]]:
    """Coefficient tuples in {-1, 0, 1}^size by growing support, zero first."""
    yield (0,) * size
    for support in range(1, size + 1):
        for positions in combinations(range(size), support):
            for signs in product((1, -1), repeat=support):
                shifts = [0] * size
                for position, sign in zip(positions, signs):
                    shifts[position] = sign
                yield tuple(shifts)
