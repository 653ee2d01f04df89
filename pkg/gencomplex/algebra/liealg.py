"""Lie algebra models and their Chevalley–Eilenberg complexes.

A model on ``n`` generators is given by the differentials ``de_k`` (2-forms)
and an optional closed 3-form twist ``H``. In extended mode the coefficient
field carries formal real variables ``x_j`` with ``dx_j = e_{c_j}`` for
designated closed coframe generators ``c_j``, so ``d`` also differentiates
coefficients.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from gencomplex.algebra.exterior import (
    Form,
    Multivector,
    all_masks,
    indices_of,
    interior_sign,
    masks_of_degree,
    operator_matrix,
    popcount,
)
from gencomplex.algebra.grammar import format_form, normalize_table_notation, parse_form, split_tuple
from gencomplex.algebra.linalg import Frame, Matrix, Subspace, Vector
from gencomplex.algebra.scalars import Scalar, ScalarField, gaussian_field
from gencomplex.core.cache import memoize
from gencomplex.schemas.liealg import FiltrationReport
from gencomplex.services.exceptions import (
    DimensionMismatchError,
    DomainError,
    InputError,
    JacobiError,
    NonClosedFormError,
    ParseError,
)

logger = logging.getLogger(__name__)


class LieModel:
    """Structure equations ``de_k`` plus a twist ``H``; immutable once validated."""

    def __init__(
        self,
        differentials: Sequence[Form],
        *,
        twist: Form | None = None,
        field: ScalarField | None = None,
        coframe: Sequence[int] = (),
        name: str | None = None,
    ):
        if not differentials:
            raise InputError("a Lie model needs at least one generator")
        self.n = len(differentials)
        self.field = field or gaussian_field()
        self.differentials: tuple[Form, ...] = tuple(d.with_field(self.field) for d in differentials)
        self.twist = (twist or Form.zero(self.n, self.field)).with_field(self.field)
        self.coframe: tuple[int, ...] = tuple(coframe)
        self.name = name
        self._monomial_cache: dict[int, Form] = {}
        self._filtration: tuple[Subspace, ...] | None = None
        self._validate()
        self.fingerprint: tuple = (
            self.n,
            tuple(format_form(d) for d in self.differentials),
            format_form(self.twist),
            self.field.variables,
            self.coframe,
        )

    # validation ---------------------------------------------------------

    def _validate(self) -> None:
        for k, d in enumerate(self.differentials, start=1):
            if d.n != self.n:
                raise DimensionMismatchError(f"de{k} lives on {d.n} generators, expected {self.n}")
            if not d.is_homogeneous(2):
                raise InputError(f"de{k} must be a 2-form")
        if len(self.coframe) != len(self.field.variables):
            raise InputError("every formal variable needs exactly one coframe generator")
        for variable, index in zip(self.field.variables, self.coframe):
            if not 1 <= index <= self.n:
                raise InputError(f"coframe generator e{index} of {variable} outside 1..{self.n}")
            if self.differentials[index - 1]:
                raise InputError(f"coframe generator e{index} of {variable} is not closed")
        for k in range(1, self.n + 1):
            square = self.d(self.differentials[k - 1])
            if square:
                raise JacobiError(
                    f"d^2 e{k} = {square} is not zero; the structure equations violate Jacobi",
                    generator=k,
                    witness=str(square),
                )
        if self.twist:
            if not self.twist.is_homogeneous(3):
                raise InputError("the twist H must be a 3-form")
            dh = self.d(self.twist)
            if dh:
                raise NonClosedFormError(f"dH = {dh} is not zero", witness=str(dh))

    # convenience --------------------------------------------------------

    @property
    def is_extended(self) -> bool:
        return self.field.is_extended

    @property
    def has_twist(self) -> bool:
        return bool(self.twist)

    def parse(self, text: str) -> Form:
        return parse_form(text, self.n, self.field)

    def generator(self, k: int) -> Form:
        return Form.generator(self.n, self.field, k)

    def with_twist(self, twist: Form | None) -> "LieModel":
        return LieModel(self.differentials, twist=twist, field=self.field, coframe=self.coframe, name=self.name)

    def with_field(self, field: ScalarField, coframe: Sequence[int] | None = None) -> "LieModel":
        return LieModel(
            self.differentials,
            twist=self.twist,
            field=field,
            coframe=self.coframe if coframe is None else coframe,
            name=self.name,
        )

    def tuple_string(self) -> str:
        return "(" + ",".join(format_form(d) for d in self.differentials) + ")"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LieModel) and other.fingerprint == self.fingerprint

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        twist = f", H={format_form(self.twist)}" if self.twist else ""
        return f"LieModel({label}{self.tuple_string()}{twist})"

    # differentials --------------------------------------------------------

    def _monomial_d(self, mask: int) -> Form:
        cached = self._monomial_cache.get(mask)
        if cached is not None:
            return cached
        result = Form.zero(self.n, self.field)
        for index in indices_of(mask):
            bit = index - 1
            de = self.differentials[bit]
            if not de:
                continue
            rest = Form(self.n, self.field, {mask ^ (1 << bit): self.field.one})
            piece = de.wedge(rest)
            result = result + (piece if interior_sign(mask, bit) > 0 else -piece)
        self._monomial_cache[mask] = result
        return result

    def coefficient_differential(self, value: Scalar) -> Form:
        """Σ_j ∂value/∂x_j e_{c_j}; zero outside extended mode."""
        terms: dict[int, Scalar] = {}
        for j, index in enumerate(self.coframe):
            derivative = self.field.derivative(value, j)
            if derivative:
                terms[1 << (index - 1)] = derivative
        return Form(self.n, self.field, terms)

    def d(self, form: Form) -> Form:
        """The Chevalley–Eilenberg differential, a degree +1 derivation."""
        if form.n != self.n:
            raise DimensionMismatchError(f"form on {form.n} generators given to a model on {self.n}")
        form = form.with_field(self.field) if form.field != self.field else form
        result = Form.zero(self.n, self.field)
        for mask, value in form.items():
            monomial = self._monomial_d(mask)
            if monomial:
                result = result + monomial.scale(value)
            if self.coframe:
                dc = self.coefficient_differential(value)
                if dc:
                    result = result + dc.wedge(Form(self.n, self.field, {mask: self.field.one}))
        return result

    def d_h(self, form: Form) -> Form:
        """d_H = d + H∧."""
        result = self.d(form)
        if self.twist:
            result = result + self.twist.wedge(form.with_field(self.field))
        return result

    def d_matrix(self, k: int) -> Matrix:
        return _ce_matrix(self, k)

    def d_h_matrix(self) -> Matrix:
        return _twisted_matrix(self)

    def d_h_parity_matrix(self, parity: int) -> Matrix:
        """d_H from the forms of the given parity to the other parity."""
        return _twisted_parity_matrix(self, parity % 2)

    # brackets -------------------------------------------------------------

    def lie_bracket(self, x: Sequence[Scalar] | Mapping[int, Scalar], y: Sequence[Scalar] | Mapping[int, Scalar]) -> Vector:
        """[X, Y] from e_k([X, Y]) = −de_k(X, Y); returns {1-based index: coefficient}."""
        out: Vector = {}
        for k, de in enumerate(self.differentials, start=1):
            if not de:
                continue
            value = de.evaluate(x, y)
            if value:
                out[k] = -value
        return out

    def lie_derivative(self, x: Sequence[Scalar] | Mapping[int, Scalar], form: Form) -> Form:
        """Cartan's formula L_X = ι_X d + d ι_X."""
        return self.d(form).interior_vector(x) + self.d(form.interior_vector(x))

    def is_invariant(self, x: Sequence[Scalar] | Mapping[int, Scalar], form: Form) -> bool:
        return not self.lie_derivative(x, form)


def _fingerprint_key(model: LieModel, *extra: Any) -> tuple:
    return (model.fingerprint, *extra)


@memoize("ce_differential", key_builder=lambda model, k: _fingerprint_key(model, "d", k))
def _ce_matrix(model: LieModel, k: int) -> Matrix:
    logger.debug("ce_matrix_built", extra={"n": model.n, "degree": k})
    return operator_matrix(model.d, model.n, model.field, masks_of_degree(model.n, k), masks_of_degree(model.n, k + 1))


@memoize("ce_differential", key_builder=lambda model: _fingerprint_key(model, "d_h"))
def _twisted_matrix(model: LieModel) -> Matrix:
    masks = all_masks(model.n)
    return operator_matrix(model.d_h, model.n, model.field, masks, masks)


def parity_masks(n: int, parity: int) -> tuple[int, ...]:
    return tuple(mask for mask in all_masks(n) if popcount(mask) % 2 == parity % 2)


@memoize("ce_differential", key_builder=lambda model, parity: _fingerprint_key(model, "d_h", parity))
def _twisted_parity_matrix(model: LieModel, parity: int) -> Matrix:
    return operator_matrix(
        model.d_h, model.n, model.field, parity_masks(model.n, parity), parity_masks(model.n, parity + 1)
    )


# parsing and files ------------------------------------------------------------


def parse_algebra(
    text: str,
    *,
    twist: str | Form | None = None,
    variables: Sequence[str] = (),
    coframe: Sequence[int] = (),
    name: str | None = None,
) -> LieModel:
    """Build a model from the tuple shorthand, e.g. ``(0,0,12,13,14+35)``."""
    entries = split_tuple(normalize_table_notation(text))
    n = len(entries)
    field = ScalarField(variables) if variables else gaussian_field()
    differentials = []
    for position, entry in enumerate(entries, start=1):
        try:
            differentials.append(parse_form(entry, n, field))
        except ParseError as exc:
            raise ParseError(f"entry {position} ({entry!r}) of {text!r}: {exc}") from exc
    twist_form = _coerce_twist(twist, n, field)
    model = LieModel(differentials, twist=twist_form, field=field, coframe=coframe, name=name)
    logger.debug("lie_model_parsed", extra={"algebra": model.tuple_string(), "n": n})
    return model


def _coerce_twist(twist: str | Form | None, n: int, field: ScalarField) -> Form | None:
    if twist is None:
        return None
    if isinstance(twist, Form):
        return twist
    text = twist.strip()
    if not text or text == "0":
        return None
    return parse_form(text, n, field)


def model_from_dict(data: Mapping[str, Any]) -> LieModel:
    """The JSON structure-constant format ``{n, d, H, vars, coframe, name}``."""
    try:
        n = int(data["n"])
        entries = list(data["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"structure-constant data needs 'n' and 'd': {exc}") from exc
    if len(entries) != n:
        raise DimensionMismatchError(f"'d' lists {len(entries)} differentials for n = {n}")
    variables = list(data.get("vars") or [])
    field = ScalarField(variables) if variables else gaussian_field()
    differentials = [parse_form(str(entry), n, field) for entry in entries]
    twist = _coerce_twist(data.get("H"), n, field)
    return LieModel(
        differentials,
        twist=twist,
        field=field,
        coframe=[int(c) for c in data.get("coframe") or []],
        name=data.get("name"),
    )


def model_to_dict(model: LieModel) -> dict[str, Any]:
    data: dict[str, Any] = {
        "n": model.n,
        "d": [format_form(d) for d in model.differentials],
        "H": format_form(model.twist),
        "vars": list(model.field.variables),
    }
    if model.coframe:
        data["coframe"] = list(model.coframe)
    if model.name:
        data["name"] = model.name
    return data


def load_model(path: str | Path) -> LieModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read structure constants from {path}: {exc}") from exc
    return model_from_dict(data)


def resolve_model(spec: str, *, twist: str | None = None) -> LieModel:
    """A tuple string, or a path to a JSON model file."""
    text = spec.strip()
    if text.startswith("(") or text.startswith("($"):
        return parse_algebra(text, twist=twist)
    model = load_model(text)
    if twist is not None:
        model = model.with_twist(_coerce_twist(twist, model.n, model.field))
    return model


# filtration ------------------------------------------------------------------


@dataclass(frozen=True)
class Filtration:
    spaces: tuple[Subspace, ...]
    nilpotency_index: int
    central_series_dims: tuple[int, ...]
    quotient_dims: tuple[int, ...]
    generator_degrees: tuple[int, ...]
    excluded_types: tuple[int, ...] = dataclass_field(default=())
    exclusion_start: int | None = None

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(space.dim for space in self.spaces)

    def to_report(self, algebra: str) -> FiltrationReport:
        return FiltrationReport(
            algebra=algebra,
            dims=list(self.dims),
            nilpotency_index=self.nilpotency_index,
            central_series_dims=list(self.central_series_dims),
            quotient_dims=list(self.quotient_dims),
            generator_degrees=list(self.generator_degrees),
            excluded_types=list(self.excluded_types),
            exclusion_start=self.exclusion_start,
        )


def _wedge_square(space: Subspace, n: int, field: ScalarField) -> Subspace:
    """Λ²W inside Λ² for W ⊂ Λ¹, in degree-2 monomial coordinates."""
    basis = [Form(n, field, {1 << k: v for k, v in vector.items()}) for vector in space.basis]
    positions = {mask: position for position, mask in enumerate(masks_of_degree(n, 2))}
    products = [
        basis[a].wedge(basis[b]).to_vector(positions) for a in range(len(basis)) for b in range(a + 1, len(basis))
    ]
    return Subspace.span(products, len(positions), field)


def filtration_spaces(model: LieModel) -> tuple[Subspace, ...]:
    """V_0 = 0 ⊂ V_1 ⊂ … with V_i = {v : dv ∈ Λ²V_{i−1}}, up to V_nil = Λ¹."""
    if model._filtration is not None:
        return model._filtration
    n = model.n
    d1 = model.d_matrix(1)
    spaces = [Subspace.zero(n, model.field)]
    while spaces[-1].dim < n:
        nxt = d1.preimage(_wedge_square(spaces[-1], n, model.field))
        if nxt == spaces[-1]:
            raise DomainError(
                f"{model.tuple_string()} is not nilpotent: the central series stalls at dimension {n - nxt.dim}"
            )
        spaces.append(nxt)
    result = tuple(spaces)
    model._filtration = result
    return result


def _annihilator(space: Subspace) -> list[Vector]:
    """Vectors X (0-based coordinates) with ξ(X) = 0 for every ξ in the space."""
    if not space.dim:
        return [{k: space.field.one} for k in range(space.ambient)]
    return Matrix.from_rows(space.basis, space.ambient, space.field).kernel().basis


def lies_in_span_algebra(form: Form, space: Subspace) -> bool:
    """form ∈ Λ•W, tested as ι_X form = 0 for all X annihilating W."""
    for vector in _annihilator(space):
        if form.interior_vector({k + 1: v for k, v in vector.items()}):
            return False
    return True


def nilpotent_degree(model: LieModel, form: Form) -> int:
    """Smallest i with form ∈ Λ•V_i."""
    for i, space in enumerate(filtration_spaces(model)):
        if lies_in_span_algebra(form, space):
            return i
    raise DomainError("form does not lie in the filtration")  # unreachable: V_nil is everything


def filtration_report(model: LieModel) -> Filtration:
    spaces = filtration_spaces(model)
    nil = len(spaces) - 1
    quotients = tuple(spaces[i + 1].dim - spaces[i].dim for i in range(nil))
    start = None
    for j in range(nil):
        if all(quotients[i] == 1 for i in range(j, nil)):
            start = j
            break
    excluded: tuple[int, ...] = ()
    if start is not None:
        bound = model.n - nil + start
        excluded = tuple(k for k in range(model.n // 2 + 1) if k >= bound)
    degrees = tuple(nilpotent_degree(model, model.generator(k)) for k in range(1, model.n + 1))
    report = Filtration(
        spaces=spaces,
        nilpotency_index=nil,
        central_series_dims=tuple(model.n - space.dim for space in spaces),
        quotient_dims=quotients,
        generator_degrees=degrees,
        excluded_types=excluded,
        exclusion_start=start,
    )
    logger.info(
        "filtration_computed",
        extra={"algebra": model.tuple_string(), "nil": nil, "excluded_types": list(excluded)},
    )
    return report


# restriction to subspaces --------------------------------------------------------


def _tangent_vectors(model: LieModel, tangent: Iterable[Multivector | Sequence[Scalar]]) -> list[Vector]:
    vectors: list[Vector] = []
    for item in tangent:
        if isinstance(item, Multivector):
            if not item.is_homogeneous(1):
                raise InputError("tangent vectors must be degree-1 multivectors")
            vectors.append({indices_of(mask)[0] - 1: value for mask, value in item.items()})
        else:
            if len(item) != model.n:
                raise DimensionMismatchError(f"tangent vector of length {len(item)} for n = {model.n}")
            vectors.append({k: model.field.convert(v) for k, v in enumerate(item) if v})
    return vectors


def restrict_to_subalgebra(
    model: LieModel, tangent: Sequence[Multivector | Sequence[Scalar]], form: Form
) -> Form:
    """Pull a form back to span(tangent), written in the frame dual to ``tangent``."""
    vectors = _tangent_vectors(model, tangent)
    Frame(vectors, model.n, model.field)  # rejects dependent frames
    k = len(vectors)
    one_based = [{index + 1: value for index, value in vector.items()} for vector in vectors]
    terms: dict[int, Scalar] = {}
    for degree in form.degrees():
        part = form.degree_part(degree)
        for mask in masks_of_degree(k, degree):
            value = part.evaluate(*(one_based[index - 1] for index in indices_of(mask)))
            if value:
                terms[mask] = value
    return Form(k, form.field, terms)


def is_subalgebra(model: LieModel, tangent: Sequence[Multivector | Sequence[Scalar]]) -> bool:
    vectors = _tangent_vectors(model, tangent)
    span = Subspace.span(vectors, model.n, model.field)
    one_based = [{index + 1: value for index, value in vector.items()} for vector in vectors]
    for a in range(len(one_based)):
        for b in range(a + 1, len(one_based)):
            bracket = model.lie_bracket(one_based[a], one_based[b])
            if not span.contains({index - 1: value for index, value in bracket.items()}):
                return False
    return True
