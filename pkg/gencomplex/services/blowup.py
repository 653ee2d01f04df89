"""Cohomology rings of symplectic blow-ups and the fate of Lefschetz kernels.

For a symplectic submanifold i: M^{2d} → X^{2n} of codimension 2k the blow-up
has H(X̃) = H(X) ⊕ a·H(M) ⊕ … ⊕ a^{k−1}·H(M) with

    f*v · f*w = f*(vw)        f*v · a^j u = a^j (i*v · u)
    a^i u · a^j w = a^{i+j} (uw)
    a^k u = −f*(i_! u) − c_{k−1} a u − … − c_1 a^{k−1} u

where i_! is the Thom pushforward (``t = i_!(1)`` is the Thom class) and the
c_j are the Chern classes of the normal bundle. The ring is presented as a
CDGA with zero differential. f*ω + εa is a symplectic class for small ε > 0.

Both sides are normalised so that ω^n/n! and σ^d/d! (σ = i*ω) integrate to 1.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import anyio

from gencomplex.algebra.cdga import CDGA, UNIT
from gencomplex.algebra.dga import CEAlgebra
from gencomplex.algebra.linalg import Frame, Matrix, Subspace, Vector, vec_add, vec_clean, vec_combine, vec_scale
from gencomplex.algebra.liealg import LieModel, is_subalgebra, resolve_model, restrict_to_subalgebra
from gencomplex.algebra.scalars import Scalar, ScalarField
from gencomplex.core.config import Settings, get_settings
from gencomplex.schemas.blowup import (
    BlowupConditionsReport,
    BlowupLefschetzReport,
    BlowupLevel,
    BlowupRingReport,
    MasseySurvivalReport,
)

from . import exceptions
from .cohomology import CohomologyRing, CohomologyService, MasseyProblem

logger = logging.getLogger(__name__)

EPS = "eps"

UNCHANGED = "unchanged"
DROPS_BY_ONE = "drops by 1"
DROPS_BY_TWO = "drops by at least 2"
NO_GROWTH = "does not grow"


# ring sides -------------------------------------------------------------------------


@dataclass
class RingSide:
    """A cohomology ring in class coordinates, with a parser for cochain-level elements."""

    ring: CohomologyRing
    label: str
    parse: Callable[[str], tuple[int, Vector]]
    model: LieModel | None = None

    @property
    def field(self) -> ScalarField:
        return self.ring.field

    @property
    def top(self) -> int:
        return self.ring.top

    def betti(self, k: int) -> int:
        return self.ring.betti_number(k)

    def cochain(self, k: int, coords: Vector) -> Vector:
        representatives = self.ring.degrees[k].representatives
        return vec_combine((c, representatives[i]) for i, c in coords.items())

    def classes(self, k: int, vector: Vector) -> Vector:
        return _sparse(self.ring.class_coordinates(k, vector))

    def element(self, text: str) -> tuple[int, Vector]:
        k, vector = self.parse(text)
        return k, self.classes(k, vector)

    def product(self, p: int, x: Vector, q: int, y: Vector) -> Vector:
        if p + q > self.top or not x or not y:
            return {}
        return self.classes(p + q, self.ring.multiply(p, self.cochain(p, x), q, self.cochain(q, y)))

    def power(self, k: int, x: Vector, exponent: int) -> tuple[int, Vector]:
        degree, result = 0, {0: self.field.one}
        for _ in range(exponent):
            result = self.product(degree, result, k, x)
            degree += k
        return degree, result

    def format(self, k: int, coords: Vector) -> str:
        return self.ring.format_vector(k, self.cochain(k, coords))

    def lefschetz_matrix(self, omega: Vector, level: int, half: int) -> Matrix:
        """[ω]^{half−level}: H^level → H^{2 half − level} in class coordinates."""
        degree, omega_power = self.power(2, omega, half - level)
        one = self.field.one
        columns = [self.product(degree, omega_power, level, {i: one}) for i in range(self.betti(level))]
        return Matrix.from_columns(columns, self.betti(2 * half - level), self.field)

    def volume(self, omega: Vector, half: int) -> Scalar:
        """Coefficient of [ω^half / half!] on the single top class."""
        if self.betti(self.top) != 1:
            raise exceptions.DomainError(f"{self.label}: H^{self.top} is not one-dimensional")
        _, top = self.power(2, omega, half)
        return self.field.domain.quo(top.get(0, self.field.zero), self.field.convert(factorial(half)))


# input ----------------------------------------------------------------------------------


@dataclass
class BlowupInput:
    ambient: RingSide
    submanifold: RingSide
    restriction: dict[int, Matrix]
    omega: Vector
    chern: dict[int, Vector] = field(default_factory=dict)
    name: str = "blowup"
    _thom: dict[int, Matrix] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.ambient.top % 2 or self.submanifold.top % 2:
            raise exceptions.DomainError("ambient and submanifold must be even-dimensional")
        if self.submanifold.top >= self.ambient.top:
            raise exceptions.DomainError(
                f"codimension {self.ambient.top - self.submanifold.top} leaves nothing to blow up"
            )
        for side in (self.ambient, self.submanifold):
            if side.betti(0) != 1:
                raise exceptions.DomainError(f"{side.label} is not connected")
        for j, coords in self.chern.items():
            if not 1 <= j < self.k:
                raise exceptions.InputError(f"c_{j} is outside c_1 … c_{self.k - 1}")
        volume = self.ambient.volume(self.omega, self.n)
        if not volume:
            raise exceptions.DegenerateFormError(
                f"ω^{self.n} = 0 in H({self.ambient.label})", witness=self.ambient.format(2, self.omega)
            )
        self._ambient_volume = volume
        sub_volume = self.submanifold.volume(self.sigma, self.d)
        if not sub_volume:
            raise exceptions.DegenerateFormError(
                f"(i*ω)^{self.d} = 0: {self.submanifold.label} is not a symplectic submanifold",
                witness=self.submanifold.format(2, self.sigma) if self.d else None,
            )
        self._sub_volume = sub_volume
        self.check_ring_map()

    # dimensions -----------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.ambient.top // 2

    @property
    def d(self) -> int:
        return self.submanifold.top // 2

    @property
    def k(self) -> int:
        return self.n - self.d

    @property
    def codimension(self) -> int:
        return 2 * self.k

    @property
    def field(self) -> ScalarField:
        return self.ambient.field

    # maps ------------------------------------------------------------------------

    def restrict(self, j: int, coords: Vector) -> Vector:
        matrix = self.restriction.get(j)
        if matrix is None or not coords:
            return {}
        return matrix.apply(coords)

    @property
    def sigma(self) -> Vector:
        return self.restrict(2, self.omega)

    def check_ring_map(self) -> None:
        X, M = self.ambient, self.submanifold
        one = self.field.one
        for p in range(1, M.top + 1):
            for q in range(p, M.top + 1 - p):
                for i in range(X.betti(p)):
                    for j in range(X.betti(q)):
                        left = self.restrict(p + q, X.product(p, {i: one}, q, {j: one}))
                        right = M.product(p, self.restrict(p, {i: one}), q, self.restrict(q, {j: one}))
                        if vec_add(left, vec_scale(right, -one)):
                            raise exceptions.InputError(
                                "i* is not a ring map on "
                                f"{X.format(p, {i: one})} · {X.format(q, {j: one})}"
                            )

    def ambient_integral(self, coords: Vector) -> Scalar:
        return self.field.domain.quo(coords.get(0, self.field.zero), self._ambient_volume)

    def sub_integral(self, coords: Vector) -> Scalar:
        return self.field.domain.quo(coords.get(0, self.field.zero), self._sub_volume)

    def thom_matrix(self, j: int) -> Matrix:
        """i_!: H^j(M) → H^{j+2k}(X), defined by ∫_X i_!(u)·v = ∫_M u·i*v."""
        if j in self._thom:
            return self._thom[j]
        X, M = self.ambient, self.submanifold
        one = self.field.one
        degree, dual = j + 2 * self.k, 2 * self.d - j
        if X.betti(degree) != X.betti(dual):
            raise exceptions.DomainError(
                f"H({X.label}) fails Poincaré duality: b_{degree} = {X.betti(degree)}, b_{dual} = {X.betti(dual)}"
            )
        pairing = Matrix.from_rows(
            [
                vec_clean(
                    {a: self.ambient_integral(X.product(degree, {a: one}, dual, {b: one})) for a in range(X.betti(degree))}
                )
                for b in range(X.betti(dual))
            ],
            X.betti(degree),
            self.field,
        )
        if X.betti(degree) and not pairing.is_invertible():
            raise exceptions.DomainError(f"the pairing H^{degree} × H^{dual} of {X.label} is degenerate")
        columns = []
        for l in range(M.betti(j)):
            rhs = {
                b: self.sub_integral(M.product(j, {l: one}, dual, self.restrict(dual, {b: one})))
                for b in range(X.betti(dual))
            }
            columns.append((pairing.solve(vec_clean(rhs)) or {}) if X.betti(degree) else {})
        self._thom[j] = Matrix.from_columns(columns, X.betti(degree), self.field)
        return self._thom[j]

    def pushforward(self, j: int, coords: Vector) -> Vector:
        if not coords:
            return {}
        return self.thom_matrix(j).apply(coords)

    @property
    def thom_class(self) -> Vector:
        return self.pushforward(0, {0: self.field.one})


# ring -----------------------------------------------------------------------------------


class BlowupRing(CDGA):
    """H(X̃) presented with basis f*(v) and a^j·u, 1 ≤ j ≤ k−1."""

    def __init__(self, data: BlowupInput):
        self.data = data
        self.field = data.field
        X, M = data.ambient, data.submanifold
        self.n, self.k = data.n, data.k
        self.f_index: dict[tuple[int, int], int] = {}
        self.a_index: dict[tuple[int, int, int], int] = {}
        self._origin: dict[tuple[int, int], tuple] = {}
        basis: dict[int, list[str]] = {}
        one = data.field.one
        for m in range(2 * self.n + 1):
            labels: list[str] = []
            for i in range(X.betti(m)):
                self.f_index[(m, i)] = len(labels)
                self._origin[(m, len(labels))] = ("f", m, i)
                labels.append(UNIT if m == 0 else f"f*({X.format(m, {i: one})})")
            for j in range(1, self.k):
                r = m - 2 * j
                if not 0 <= r <= M.top:
                    continue
                for l in range(M.betti(r)):
                    self.a_index[(j, r, l)] = len(labels)
                    self._origin[(m, len(labels))] = ("a", j, r, l)
                    labels.append(_a_label(j, M.format(r, {l: one}) if r else ""))
            basis[m] = labels
        products: dict[tuple[int, int, int, int], Vector] = {}
        for (p, i), left in self._origin.items():
            for (q, j), right in self._origin.items():
                if p == 0 or q == 0 or p + q > 2 * self.n:
                    continue
                value = self._basis_product(left, right)
                if value:
                    products[(p, i, q, j)] = value
        top_label = basis[2 * self.n][self.f_index[(2 * self.n, 0)]]
        super().__init__(basis, products, {}, field=data.field, name=f"{data.name}~", orientation=top_label)

    # blocks ----------------------------------------------------------------

    def f_vector(self, m: int, coords: Vector) -> Vector:
        return {self.f_index[(m, i)]: c for i, c in coords.items() if c}

    def a_vector(self, j: int, r: int, coords: Vector) -> Vector:
        return {self.a_index[(j, r, l)]: c for l, c in coords.items() if c}

    @property
    def a(self) -> Vector:
        return self.a_vector(1, 0, {0: self.field.one})

    def a_power_times(self, power: int, r: int, coords: Vector) -> Vector:
        """a^power·u for u ∈ H^r(M), reduced with the a^k relation."""
        if not coords or 2 * power + r > 2 * self.n:
            return {}
        if power < self.k:
            return self.a_vector(power, r, coords)
        data, M = self.data, self.data.submanifold
        shift = power - self.k
        pushed = data.pushforward(r, coords)
        if shift == 0:
            out = vec_scale(self.f_vector(r + 2 * self.k, pushed), -self.field.one)
        else:
            out = vec_scale(self.a_power_times(shift, r + 2 * self.k, data.restrict(r + 2 * self.k, pushed)), -self.field.one)
        for l in range(1, self.k):
            chern = data.chern.get(self.k - l)
            if not chern:
                continue
            twisted = M.product(2 * (self.k - l), chern, r, coords)
            out = vec_add(out, vec_scale(self.a_power_times(shift + l, r + 2 * (self.k - l), twisted), -self.field.one))
        return out

    def _basis_product(self, left: tuple, right: tuple) -> Vector:
        data, X, M = self.data, self.data.ambient, self.data.submanifold
        one = self.field.one
        if left[0] == "f" and right[0] == "f":
            _, p, i = left
            _, q, j = right
            return self.f_vector(p + q, X.product(p, {i: one}, q, {j: one}))
        if left[0] == "f":
            _, p, i = left
            _, j, r, l = right
            return self.a_power_times(j, p + r, M.product(p, data.restrict(p, {i: one}), r, {l: one}))
        if right[0] == "f":
            _, j, r, l = left
            _, q, i = right
            return self.a_power_times(j, r + q, M.product(r, {l: one}, q, data.restrict(q, {i: one})))
        _, i, p, x = left
        _, j, q, y = right
        return self.a_power_times(i + j, p + q, M.product(p, {x: one}, q, {y: one}))

    # relation and symplectic class ----------------------------------------------------

    def relation_rhs(self) -> Vector:
        """−f*(t) − c_{k−1}a − … − c_1 a^{k−1}, assembled block by block."""
        minus = -self.field.one
        out = vec_scale(self.f_vector(2 * self.k, self.data.thom_class), minus)
        for l in range(1, self.k):
            chern = self.data.chern.get(self.k - l)
            if chern:
                out = vec_add(out, vec_scale(self.a_vector(l, 2 * (self.k - l), chern), minus))
        return out

    def relation_holds(self) -> bool:
        _, power = self.power(2, self.a, self.k)
        return not vec_add(power, vec_scale(self.relation_rhs(), -self.field.one))

    def omega_tilde(self, eps: Scalar, field: ScalarField | None = None) -> Vector:
        target = field or self.field
        omega = {index: target.convert(c) for index, c in self.f_vector(2, self.data.omega).items()}
        return vec_add(omega, {self.a_index[(1, 0, 0)]: eps})

    def expected_dimensions(self) -> list[int]:
        X, M = self.data.ambient, self.data.submanifold
        return [
            X.betti(m) + sum(M.betti(m - 2 * j) for j in range(1, self.k) if 0 <= m - 2 * j <= M.top)
            for m in range(2 * self.n + 1)
        ]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** m * dim for m, dim in enumerate(self.dimensions))


def _a_label(j: int, text: str) -> str:
    power = "a" if j == 1 else f"a^{j}"
    return f"{power}({text})" if text else power


def lefschetz_kernels(algebra: CDGA, omega: Vector, half: int) -> list[int]:
    """dim ker ω^{half−i}: A^i → A^{2half−i} for i < half, on an algebra with zero differential."""
    one = algebra.field.one
    dims = []
    for level in range(half):
        degree, omega_power = algebra.power(2, omega, half - level)
        columns = [algebra.multiply(degree, omega_power, level, {i: one}) for i in range(algebra.dimension(level))]
        matrix = Matrix.from_columns(columns, algebra.dimension(2 * half - level), algebra.field)
        dims.append(algebra.dimension(level) - (matrix.rank() if columns else 0))
    return dims


# results ---------------------------------------------------------------------------------


@dataclass
class BlowupConditions:
    kernel_restricts_nonzero: bool
    kernel_witness: Vector | None
    thom_outside_image: bool
    kernel_pair_restricts_nonzero: bool
    kernel_pair_witness: tuple[Vector, Vector] | None
    thom_times_kernel_outside_image: bool
    submanifold_lefschetz: bool
    predictions: dict[int, str]

    @property
    def equivalences_hold(self) -> bool:
        return self.kernel_restricts_nonzero == self.thom_outside_image and (
            self.kernel_pair_restricts_nonzero == self.thom_times_kernel_outside_image
        )


@dataclass
class BlowupLefschetz:
    samples: list[Fraction]
    ambient: list[int]
    generic: list[int] | None
    sampled: dict[Fraction, list[int]]
    predictions: dict[int, str]

    def stable(self, level: int) -> bool:
        """Kernel dims agree on the smaller half of the samples, and with the generic rank."""
        ordered = sorted(self.samples, reverse=True)
        tail = {self.sampled[eps][level] for eps in ordered[len(ordered) // 2 :]}
        if self.generic is not None:
            tail.add(self.generic[level])
        return len(tail) <= 1

    def reference(self, level: int) -> int:
        if self.generic is not None:
            return self.generic[level]
        return self.sampled[min(self.samples)][level]

    def prediction_holds(self, level: int) -> bool | None:
        prediction = self.predictions.get(level)
        if prediction is None:
            return None
        return _prediction_holds(prediction, self.ambient[level], self.reference(level))

    @property
    def passes(self) -> bool:
        return all(self.reference(level) == 0 for level in range(len(self.ambient)))


def _prediction_holds(prediction: str, ambient: int, blown_up: int) -> bool:
    if prediction == UNCHANGED:
        return blown_up == ambient
    if prediction == DROPS_BY_ONE:
        return blown_up == ambient - 1
    if prediction == DROPS_BY_TWO:
        return blown_up <= ambient - 2
    return blown_up <= ambient


# service ---------------------------------------------------------------------------------


class BlowupService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()
        self._logger = logging.getLogger(__name__)
        self._cohomology = CohomologyService(self.settings)

    # input -----------------------------------------------------------------------

    def load(self, path: str | Path) -> BlowupInput:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise exceptions.ParseError(f"cannot read blow-up data from {path}: {exc}") from exc
        return self.from_dict(data, base_dir=path.parent)

    def from_dict(self, data: Mapping[str, Any], *, base_dir: Path | None = None) -> BlowupInput:
        """``{name, ambient, submanifold, omega, tangent | restriction, chern}``."""
        try:
            ambient_spec, sub_spec, omega_text = data["ambient"], data["submanifold"], str(data["omega"])
        except KeyError as exc:
            raise exceptions.ParseError(f"blow-up data needs 'ambient', 'submanifold' and 'omega': {exc}") from exc
        ambient = self._side(ambient_spec, base_dir)
        submanifold = self._side(sub_spec, base_dir)
        degree, omega = ambient.element(omega_text)
        if degree != 2:
            raise exceptions.InputError(f"ω = {omega_text!r} has degree {degree}, expected 2")
        if "tangent" in data:
            restriction = self._tangent_restriction(ambient, submanifold, data["tangent"])
        else:
            restriction = self._pair_restriction(ambient, submanifold, data.get("restriction") or [])
        chern: dict[int, Vector] = {}
        for key, text in (data.get("chern") or {}).items():
            j = int(key)
            k, coords = submanifold.element(str(text))
            if coords and k != 2 * j:
                raise exceptions.InputError(f"c_{j} = {text!r} has degree {k}, expected {2 * j}")
            chern[j] = coords
        blowup_input = BlowupInput(
            ambient, submanifold, restriction, omega, chern, name=str(data.get("name") or "blowup")
        )
        self._logger.debug(
            "blowup_input_loaded",
            extra={"name": blowup_input.name, "n": blowup_input.n, "d": blowup_input.d, "k": blowup_input.k},
        )
        return blowup_input

    def _side(self, spec: Any, base_dir: Path | None) -> RingSide:
        if isinstance(spec, str):
            spec = {"algebra": spec}
        if not isinstance(spec, Mapping):
            raise exceptions.ParseError(f"cannot interpret ring description {spec!r}")
        if "algebra" in spec or "model" in spec:
            text = str(spec.get("algebra") or spec.get("model"))
            if not text.lstrip().startswith("(") and base_dir is not None:
                text = str(base_dir / text)
            model = resolve_model(text)
            if model.has_twist or model.is_extended:
                raise exceptions.DomainError("blow-up rings need untwisted models with constant coefficients")
            ring = self._cohomology.cohomology(model)
            ce = ring.dga
            assert isinstance(ce, CEAlgebra)

            def parse(source: str) -> tuple[int, Vector]:
                try:
                    return ce.from_form(model.parse(source))
                except ValueError as exc:
                    raise exceptions.InputError(f"{source!r} is not homogeneous") from exc

            return RingSide(ring, model.name or model.tuple_string(), parse, model)
        if "cdga" in spec:
            raw = spec["cdga"]
            if isinstance(raw, str):
                path = Path(raw) if base_dir is None else base_dir / raw
                try:
                    raw = json.loads(path.read_text(encoding="utf-8"))
                except (OSError, json.JSONDecodeError) as exc:
                    raise exceptions.ParseError(f"cannot read CDGA from {path}: {exc}") from exc
            algebra = CDGA.from_dict(raw)
            ring = self._cohomology.cohomology(algebra)
            return RingSide(ring, algebra.name, algebra.parse_element)
        raise exceptions.ParseError("a ring is given by 'algebra', 'model' or 'cdga'")

    def _tangent_restriction(
        self, ambient: RingSide, submanifold: RingSide, tangent: Sequence[Sequence[Any]]
    ) -> dict[int, Matrix]:
        if ambient.model is None or submanifold.model is None:
            raise exceptions.InputError("'tangent' needs Lie models on both sides")
        model, sub = ambient.model, submanifold.model
        if len(tangent) != sub.n:
            raise exceptions.DimensionMismatchError(f"{len(tangent)} tangent vectors for a {sub.n}-dimensional submanifold")
        if not is_subalgebra(model, tangent):
            raise exceptions.DomainError("the tangent vectors do not span a subalgebra")
        ce_x, ce_m = ambient.ring.dga, submanifold.ring.dga
        assert isinstance(ce_x, CEAlgebra) and isinstance(ce_m, CEAlgebra)
        restriction: dict[int, Matrix] = {0: Matrix.identity(1, submanifold.field)}
        for j in range(1, submanifold.top + 1):
            columns = []
            for representative in ambient.ring.degrees[j].representatives:
                form = restrict_to_subalgebra(model, tangent, ce_x.to_form(j, representative))
                _, vector = ce_m.from_form(form) if form else (j, {})
                columns.append(submanifold.classes(j, vector))
            restriction[j] = Matrix.from_columns(columns, submanifold.betti(j), submanifold.field)
        return restriction

    def _pair_restriction(
        self, ambient: RingSide, submanifold: RingSide, pairs: Sequence[Sequence[str]]
    ) -> dict[int, Matrix]:
        """i* from ``[[x, i*x], …]``; classes of X not spanned by the listed x restrict to zero."""
        field_ = ambient.field
        by_degree: dict[int, list[tuple[Vector, Vector]]] = {}
        for entry in pairs:
            try:
                source_text, image_text = entry
            except (TypeError, ValueError) as exc:
                raise exceptions.ParseError("restriction entries are [ambient element, submanifold element]") from exc
            p, source = ambient.element(str(source_text))
            q, image = submanifold.element(str(image_text))
            if image and p != q:
                raise exceptions.InputError(f"i*({source_text}) = {image_text} changes degree {p} → {q}")
            by_degree.setdefault(p, []).append((source, image))
        restriction: dict[int, Matrix] = {}
        for j in range(submanifold.top + 1):
            size = ambient.betti(j)
            if j == 0:
                by_degree.setdefault(0, [({0: field_.one}, {0: field_.one})])
            listed = by_degree.get(j, [])
            sources = [source for source, _ in listed]
            complement = Subspace.full(size, field_).complement_basis(Subspace.span(sources, size, field_))
            frame = Frame(sources + complement, size, field_) if size else None
            columns = []
            for a in range(size):
                coords = frame.coordinates({a: field_.one}) if frame else []
                columns.append(vec_combine((coords[i], image) for i, (_, image) in enumerate(listed)))
            restriction[j] = Matrix.from_columns(columns, submanifold.betti(j), field_)
        return restriction

    # ring ------------------------------------------------------------------------

    def build_blowup_ring(self, data: BlowupInput) -> BlowupRing:
        if data.codimension < 4:
            raise exceptions.DomainError(f"blow-ups need codimension at least 4, got {data.codimension}")
        ring = BlowupRing(data)
        self._logger.info(
            "blowup_ring_built",
            extra={"name": data.name, "k": data.k, "dimensions": ring.dimensions},
        )
        return ring

    def euler_characteristic(self, ring: BlowupRing) -> tuple[int, int]:
        """χ(X̃) and χ(X) + (k−1)χ(M)."""
        data = ring.data
        expected = data.ambient.ring.euler_characteristic + (data.k - 1) * data.submanifold.ring.euler_characteristic
        return ring.euler_characteristic, expected

    def ring_report(self, ring: BlowupRing) -> BlowupRingReport:
        data = ring.data
        euler, expected = self.euler_characteristic(ring)
        power = "a" if data.k == 1 else f"a^{data.k}"
        return BlowupRingReport(
            ambient=data.ambient.label,
            submanifold=data.submanifold.label,
            codimension=data.codimension,
            k=data.k,
            ambient_betti=data.ambient.ring.betti,
            submanifold_betti=data.submanifold.ring.betti,
            blowup_betti=ring.dimensions,
            expected_betti=ring.expected_dimensions(),
            thom_class=data.ambient.format(2 * data.k, data.thom_class),
            relation=f"{power} = {ring.format_vector(2 * data.k, ring.relation_rhs())}",
            relation_holds=ring.relation_holds(),
            euler_ambient=data.ambient.ring.euler_characteristic,
            euler_submanifold=data.submanifold.ring.euler_characteristic,
            euler_blowup=euler,
            euler_additive=euler == expected,
        )

    # conditions -----------------------------------------------------------------------

    def blowup_conditions(self, data: BlowupInput) -> BlowupConditions:
        X, M = data.ambient, data.submanifold
        n, d = data.n, data.d
        one = data.field.one
        thom = data.thom_class

        kernel_witness = None
        thom_outside = False
        if 2 * d < n:
            level = 2 * d
            matrix = X.lefschetz_matrix(data.omega, level, n)
            kernel = matrix.kernel() if matrix.cols else Subspace.zero(0, data.field)
            kernel_witness = next((v for v in kernel.basis if data.restrict(level, v)), None)
            image = matrix.image() if matrix.cols else Subspace.zero(X.betti(2 * data.k), data.field)
            thom_outside = not image.contains(thom)

        pair_witness = None
        thom_times_outside = False
        if n >= 2:
            matrix = X.lefschetz_matrix(data.omega, 1, n)
            kernel = matrix.kernel().basis if matrix.cols else []
            for a, v1 in enumerate(kernel):
                for v2 in kernel[a + 1 :]:
                    if data.restrict(2, X.product(1, v1, 1, v2)):
                        pair_witness = (v1, v2)
                        break
                if pair_witness:
                    break
            if d == 1 and kernel:
                image = matrix.image()
                thom_times_outside = any(not image.contains(X.product(2 * data.k, thom, 1, v)) for v in kernel)

        sub_lefschetz = all(
            M.lefschetz_matrix(data.sigma, level, d).rank() == M.betti(level) for level in range(d) if M.betti(level)
        )
        conditions = BlowupConditions(
            kernel_restricts_nonzero=kernel_witness is not None,
            kernel_witness=kernel_witness,
            thom_outside_image=thom_outside,
            kernel_pair_restricts_nonzero=pair_witness is not None,
            kernel_pair_witness=pair_witness,
            thom_times_kernel_outside_image=thom_times_outside,
            submanifold_lefschetz=sub_lefschetz,
            predictions={},
        )
        conditions.predictions = self._predictions(data, conditions)
        self._logger.info(
            "blowup_conditions_checked",
            extra={
                "name": data.name,
                "kernel_restricts": conditions.kernel_restricts_nonzero,
                "pair_restricts": conditions.kernel_pair_restricts_nonzero,
                "equivalences_hold": conditions.equivalences_hold,
            },
        )
        return conditions

    @staticmethod
    def _predictions(data: BlowupInput, conditions: BlowupConditions) -> dict[int, str]:
        n, d = data.n, data.d
        if 2 * d >= n:
            return {}
        predictions: dict[int, str] = {}
        for level in range(n):
            if level > 2 * d:
                predictions[level] = UNCHANGED
            elif level == 2 * d:
                predictions[level] = DROPS_BY_ONE if conditions.kernel_restricts_nonzero else UNCHANGED
            elif d == 1 and level == 1 and conditions.kernel_pair_restricts_nonzero:
                predictions[level] = DROPS_BY_TWO
            elif conditions.submanifold_lefschetz:
                predictions[level] = NO_GROWTH
        return predictions

    def conditions_report(self, data: BlowupInput, conditions: BlowupConditions) -> BlowupConditionsReport:
        X = data.ambient
        pair = conditions.kernel_pair_witness
        return BlowupConditionsReport(
            ambient=X.label,
            submanifold=data.submanifold.label,
            surface=data.d == 1,
            kernel_restricts_nonzero=conditions.kernel_restricts_nonzero,
            kernel_witness=X.format(2 * data.d, conditions.kernel_witness) if conditions.kernel_witness else None,
            thom_outside_image=conditions.thom_outside_image,
            kernel_pair_restricts_nonzero=conditions.kernel_pair_restricts_nonzero,
            kernel_pair_witness=[X.format(1, v) for v in pair] if pair else [],
            thom_times_kernel_outside_image=conditions.thom_times_kernel_outside_image,
            equivalences_hold=conditions.equivalences_hold,
            predictions={str(level): text for level, text in conditions.predictions.items()},
        )

    # Lefschetz ---------------------------------------------------------------------------

    def blowup_lefschetz(
        self, ring: BlowupRing, samples: Sequence[Fraction] | None = None, *, exact: bool = True
    ) -> BlowupLefschetz:
        return anyio.run(self.blowup_lefschetz_async, ring, samples, exact)

    async def blowup_lefschetz_async(
        self, ring: BlowupRing, samples: Sequence[Fraction] | None = None, exact: bool = True
    ) -> BlowupLefschetz:
        samples = list(self.settings.EPS_SAMPLES if samples is None else samples)
        if not samples and not exact:
            raise exceptions.InputError("nothing to evaluate: no ε samples and exact mode off")
        if any(eps <= 0 for eps in samples):
            raise exceptions.InputError("ε samples must be positive")
        data, n = ring.data, ring.n
        limiter = anyio.CapacityLimiter(self.settings.WORKER_CONCURRENCY)
        sampled: dict[Fraction, list[int]] = {}
        generic: list[list[int]] = []

        async def run_sample(eps: Fraction) -> None:
            omega = ring.omega_tilde(ring.field.convert(eps))
            sampled[eps] = await anyio.to_thread.run_sync(lefschetz_kernels, ring, omega, n, limiter=limiter)

        async def run_generic() -> None:
            extended = ScalarField([EPS])
            algebra = ring.over(extended)
            omega = ring.omega_tilde(extended.parse(EPS), extended)
            generic.append(await anyio.to_thread.run_sync(lefschetz_kernels, algebra, omega, n, limiter=limiter))

        async with anyio.create_task_group() as group:
            for eps in samples:
                group.start_soon(run_sample, eps)
            if exact:
                group.start_soon(run_generic)

        X = data.ambient
        ambient = [
            X.betti(level) - (X.lefschetz_matrix(data.omega, level, n).rank() if X.betti(level) else 0)
            for level in range(n)
        ]
        conditions = self.blowup_conditions(data)
        result = BlowupLefschetz(
            samples=samples,
            ambient=ambient,
            generic=generic[0] if generic else None,
            sampled=sampled,
            predictions=conditions.predictions,
        )
        self._logger.info(
            "blowup_lefschetz_checked",
            extra={
                "name": data.name,
                "ambient": ambient,
                "generic": result.generic,
                "samples": len(samples),
                "passes": result.passes,
            },
        )
        return result

    def lefschetz_report(self, ring: BlowupRing, result: BlowupLefschetz) -> BlowupLefschetzReport:
        data = ring.data
        levels = [
            BlowupLevel(
                level=level,
                power=data.n - level,
                ambient_kernel=result.ambient[level],
                generic_kernel=result.generic[level] if result.generic is not None else None,
                sampled_kernels={str(eps): result.sampled[eps][level] for eps in result.samples},
                stable=result.stable(level),
                predicted=result.predictions.get(level),
                prediction_holds=result.prediction_holds(level),
            )
            for level in range(data.n)
        ]
        return BlowupLefschetzReport(
            ambient=data.ambient.label,
            submanifold=data.submanifold.label,
            samples=[str(eps) for eps in result.samples],
            levels=levels,
            ambient_passes=all(value == 0 for value in result.ambient),
            generic_passes=None if result.generic is None else all(value == 0 for value in result.generic),
        )

    # Massey products -------------------------------------------------------------------------

    def massey_survives(
        self, ring: BlowupRing, classes: Sequence[str | tuple[int, Vector]]
    ) -> tuple[MasseyProblem, Vector, bool]:
        """A triple product of X, pulled back by f*, against the ideal (f*v₁, f*v₃) in H(X̃)."""
        X = ring.data.ambient
        parsed = [X.parse(item) if isinstance(item, str) else item for item in classes]
        if len(parsed) != 3:
            raise exceptions.InputError("Massey survival is checked for triple products")
        problem = self._cohomology.massey(X.ring, parsed)
        degree = problem.degree
        image = ring.f_vector(degree, X.classes(degree, problem.representative))
        (p, first), _, (r, last) = parsed
        f_first = ring.f_vector(p, X.classes(p, first))
        f_last = ring.f_vector(r, X.classes(r, last))
        one = ring.field.one
        spanning = [ring.multiply(p, f_first, degree - p, {i: one}) for i in range(ring.dimension(degree - p))]
        spanning += [ring.multiply(degree - r, {i: one}, r, f_last) for i in range(ring.dimension(degree - r))]
        ideal = Subspace.span(spanning, ring.dimension(degree), ring.field)
        survives = problem.nonvanishing and not ideal.contains(image)
        self._logger.info(
            "blowup_massey_checked",
            extra={"name": ring.data.name, "nonvanishing": problem.nonvanishing, "survives": survives},
        )
        return problem, image, survives

    def massey_report(self, ring: BlowupRing, classes: Sequence[str | tuple[int, Vector]]) -> MasseySurvivalReport:
        problem, image, survives = self.massey_survives(ring, classes)
        return MasseySurvivalReport(
            massey=problem.to_report(),
            image=ring.format_vector(problem.degree, image),
            survives=survives,
        )


def _sparse(coords: Sequence[Scalar]) -> Vector:
    return {i: c for i, c in enumerate(coords) if c}
