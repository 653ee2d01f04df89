"""The exterior algebra on n generators with complex coefficients.

Monomials are bitmasks: bit ``k - 1`` stands for the generator ``e_k`` (or
``∂_k`` for multivectors). Forms are immutable sparse maps from masks to
scalars. The Clifford action of ``X + ξ`` is ``ι_X φ + ξ ∧ φ`` and the pairing
on ``V ⊕ V*`` is ``<X + ξ, Y + η> = (ξ(Y) + η(X)) / 2``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from gencomplex.algebra.linalg import Matrix, Vector
from gencomplex.algebra.scalars import Scalar, ScalarField
from gencomplex.services.exceptions import DimensionMismatchError, DomainError, InputError


# monomial bookkeeping -------------------------------------------------------------


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=1 << 16)
def wedge_sign(a: int, b: int) -> int:
    """Sign of e_a ∧ e_b = ±e_{a|b} for disjoint masks."""
    inversions = 0
    rest = b
    while rest:
        low = rest & -rest
        bit = low.bit_length() - 1
        inversions += popcount(a >> (bit + 1))
        rest ^= low
    return -1 if inversions & 1 else 1


def interior_sign(mask: int, bit: int) -> int:
    return -1 if popcount(mask & ((1 << bit) - 1)) & 1 else 1


def indices_of(mask: int) -> tuple[int, ...]:
    """1-based generator indices in increasing order."""
    out = []
    bit = 0
    while mask >> bit:
        if (mask >> bit) & 1:
            out.append(bit + 1)
        bit += 1
    return tuple(out)


def mask_of(indices: Iterable[int]) -> tuple[int, int]:
    """Wedge e_{i1} ∧ e_{i2} ∧ ... in the given order: returns (sign, mask); sign 0 on repeats."""
    sign, mask = 1, 0
    for index in indices:
        bit = 1 << (index - 1)
        if mask & bit:
            return 0, 0
        sign *= wedge_sign(mask, bit)
        mask |= bit
    return sign, mask


@lru_cache(maxsize=None)
def masks_of_degree(n: int, k: int) -> tuple[int, ...]:
    """Degree-k monomials in lexicographic order of their index tuples."""
    if k < 0 or k > n:
        return ()
    return tuple(sum(1 << i for i in combo) for combo in combinations(range(n), k))


@lru_cache(maxsize=None)
def all_masks(n: int) -> tuple[int, ...]:
    return tuple(mask for k in range(n + 1) for mask in masks_of_degree(n, k))


@lru_cache(maxsize=None)
def mask_positions(masks: tuple[int, ...]) -> dict[int, int]:
    return {mask: position for position, mask in enumerate(masks)}


def _coerce(field: ScalarField, value) -> Scalar:
    return field.convert(value)


def _inverse_factorial(field: ScalarField, k: int) -> Scalar:
    value = 1
    for j in range(2, k + 1):
        value *= j
    return field.convert(Fraction(1, value))


# forms --------------------------------------------------------------------------


class Form:
    """A sparse element of Λ•V* ⊗ C on ``n`` generators."""

    __slots__ = ("n", "field", "_terms")

    def __init__(self, n: int, field: ScalarField, terms: Mapping[int, Scalar] | None = None):
        self.n = n
        self.field = field
        self._terms: dict[int, Scalar] = {mask: value for mask, value in (terms or {}).items() if value}

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, field: ScalarField) -> "Form":
        return cls(n, field)

    @classmethod
    def scalar(cls, n: int, field: ScalarField, value=1) -> "Form":
        return cls(n, field, {0: _coerce(field, value)})

    @classmethod
    def one(cls, n: int, field: ScalarField) -> "Form":
        return cls.scalar(n, field, 1)

    @classmethod
    def generator(cls, n: int, field: ScalarField, index: int) -> "Form":
        if not 1 <= index <= n:
            raise DimensionMismatchError(f"generator e{index} outside 1..{n}")
        return cls(n, field, {1 << (index - 1): field.one})

    @classmethod
    def monomial(cls, n: int, field: ScalarField, indices: Sequence[int], coefficient=1) -> "Form":
        for index in indices:
            if not 1 <= index <= n:
                raise DimensionMismatchError(f"generator e{index} outside 1..{n}")
        sign, mask = mask_of(indices)
        if not sign:
            return cls.zero(n, field)
        return cls(n, field, {mask: _coerce(field, coefficient) * sign})

    @classmethod
    def from_vector(cls, n: int, field: ScalarField, vector: Mapping[int, Scalar], masks: Sequence[int]) -> "Form":
        return cls(n, field, {masks[position]: value for position, value in vector.items()})

    # access -------------------------------------------------------------

    @property
    def terms(self) -> dict[int, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mask: int) -> Scalar:
        return self._terms.get(mask, self.field.zero)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> list[int]:
        return sorted({popcount(mask) for mask in self._terms})

    def degree_part(self, k: int) -> "Form":
        return Form(self.n, self.field, {m: v for m, v in self._terms.items() if popcount(m) == k})

    def parity_part(self, parity: int) -> "Form":
        return Form(self.n, self.field, {m: v for m, v in self._terms.items() if popcount(m) % 2 == parity % 2})

    def lowest_degree(self) -> int | None:
        degrees = self.degrees()
        return degrees[0] if degrees else None

    def is_homogeneous(self, k: int | None = None) -> bool:
        degrees = self.degrees()
        if not degrees:
            return True
        return len(degrees) == 1 and (k is None or degrees[0] == k)

    def is_constant(self) -> bool:
        return all(self.field.is_constant(v) for v in self._terms.values())

    def to_vector(self, positions: Mapping[int, int]) -> Vector:
        out: Vector = {}
        for mask, value in self._terms.items():
            if mask not in positions:
                raise DimensionMismatchError(f"monomial {indices_of(mask)} outside the requested basis")
            out[positions[mask]] = value
        return out

    def with_field(self, field: ScalarField) -> "Form":
        return Form(self.n, field, {m: field.convert(v) for m, v in self._terms.items()})

    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "Form":
        return Form(self.n, self.field, {m: fn(v) for m, v in self._terms.items()})

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatchError(f"forms on {self.n} and {other.n} generators")
        if other.field != self.field:
            raise DimensionMismatchError(
                f"forms over {self.field.describe()} and {other.field.describe()}"
            )

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        terms = dict(self._terms)
        for mask, value in other._terms.items():
            total = terms.get(mask)
            terms[mask] = value if total is None else total + value
        return Form(self.n, self.field, terms)

    def __neg__(self) -> "Form":
        return Form(self.n, self.field, {m: -v for m, v in self._terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        c = _coerce(self.field, c)
        if not c:
            return Form.zero(self.n, self.field)
        return Form(self.n, self.field, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, c) -> "Form":
        if isinstance(c, Form):
            return self.wedge(c)
        return self.scale(c)

    __rmul__ = scale

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        terms: dict[int, Scalar] = {}
        for a, x in self._terms.items():
            for b, y in other._terms.items():
                if a & b:
                    continue
                mask = a | b
                value = x * y if wedge_sign(a, b) > 0 else -(x * y)
                total = terms.get(mask)
                terms[mask] = value if total is None else total + value
        return Form(self.n, self.field, terms)

    __xor__ = wedge

    def power(self, k: int) -> "Form":
        result = Form.one(self.n, self.field)
        for _ in range(k):
            result = result.wedge(self)
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form) or other.n != self.n:
            return False
        if other.field != self.field:
            return False
        return not (self - other)._terms

    __hash__ = None  # type: ignore[assignment]

    # interior products ----------------------------------------------------

    def interior(self, index: int) -> "Form":
        """ι_{∂_index}."""
        bit = index - 1
        flag = 1 << bit
        terms: dict[int, Scalar] = {}
        for mask, value in self._terms.items():
            if mask & flag:
                terms[mask ^ flag] = value if interior_sign(mask, bit) > 0 else -value
        return Form(self.n, self.field, terms)

    def interior_vector(self, vector: Sequence[Scalar] | Mapping[int, Scalar]) -> "Form":
        """ι_X for X = Σ X_k ∂_k; ``vector`` is 0-based (sequence) or {k: X_k} with 1-based k."""
        items = vector.items() if isinstance(vector, Mapping) else ((k + 1, v) for k, v in enumerate(vector))
        result = Form.zero(self.n, self.field)
        for index, coefficient in items:
            if coefficient:
                result = result + self.interior(index).scale(coefficient)
        return result

    def contract(self, multivector: "Multivector") -> "Form":
        return multivector.contract(self)

    def evaluate(self, *vectors: Sequence[Scalar] | Mapping[int, Scalar]) -> Scalar:
        """α(X1, ..., Xk) = ι_{Xk} ... ι_{X1} α, read off in degree 0."""
        result = self
        for vector in vectors:
            result = result.interior_vector(vector)
        return result.coefficient(0)

    # conjugation and pairings --------------------------------------------

    def conjugate(self) -> "Form":
        return Form(self.n, self.field, {m: self.field.conjugate(v) for m, v in self._terms.items()})

    def reversal(self) -> "Form":
        """The antiautomorphism α: degree k picks up (−1)^{k(k−1)/2}."""
        terms = {}
        for mask, value in self._terms.items():
            k = popcount(mask)
            terms[mask] = -value if (k * (k - 1) // 2) % 2 else value
        return Form(self.n, self.field, terms)

    def mukai(self, other: "Form") -> "Form":
        """Top-degree part of α(self) ∧ other."""
        return self.reversal().wedge(other).degree_part(self.n)

    def exp(self) -> "Form":
        """e^a for a form without scalar part (the series terminates)."""
        if self.coefficient(0):
            raise DomainError("exp needs a form without scalar part")
        result = Form.one(self.n, self.field)
        power = Form.one(self.n, self.field)
        k = 0
        while True:
            k += 1
            power = power.wedge(self)
            if not power:
                break
            result = result + power.scale(_inverse_factorial(self.field, k))
        return result

    def __str__(self) -> str:
        from gencomplex.algebra.grammar import format_form

        return format_form(self)

    def __repr__(self) -> str:
        return f"Form(n={self.n}, {self})"


# multivectors ---------------------------------------------------------------------


class Multivector:
    """A sparse element of Λ•V; contraction follows (∂_{i1}∧…∧∂_{ik})⌟α = ι_{ik}…ι_{i1}α."""

    __slots__ = ("n", "field", "_terms")

    def __init__(self, n: int, field: ScalarField, terms: Mapping[int, Scalar] | None = None):
        self.n = n
        self.field = field
        self._terms: dict[int, Scalar] = {mask: value for mask, value in (terms or {}).items() if value}

    @classmethod
    def zero(cls, n: int, field: ScalarField) -> "Multivector":
        return cls(n, field)

    @classmethod
    def vector(cls, n: int, field: ScalarField, coefficients: Sequence[object] | Mapping[int, object]) -> "Multivector":
        items = coefficients.items() if isinstance(coefficients, Mapping) else (
            (k + 1, v) for k, v in enumerate(coefficients)
        )
        terms = {}
        for index, value in items:
            value = _coerce(field, value)
            if value:
                terms[1 << (index - 1)] = value
        return cls(n, field, terms)

    @classmethod
    def from_form(cls, form: Form) -> "Multivector":
        """Reinterpret e-monomials as ∂-monomials (used by the grammar)."""
        return cls(form.n, form.field, form.terms)

    def as_form(self) -> Form:
        return Form(self.n, self.field, self._terms)

    @property
    def terms(self) -> dict[int, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degrees(self) -> list[int]:
        return sorted({popcount(mask) for mask in self._terms})

    def is_homogeneous(self, k: int) -> bool:
        return all(popcount(mask) == k for mask in self._terms)

    def _check(self, other: "Multivector") -> None:
        if other.n != self.n or other.field != self.field:
            raise DimensionMismatchError("multivectors over different algebras")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return Multivector.from_form(self.as_form() + other.as_form())

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, self.field, {m: -v for m, v in self._terms.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def scale(self, c) -> "Multivector":
        return Multivector.from_form(self.as_form().scale(c))

    def wedge(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return Multivector.from_form(self.as_form().wedge(other.as_form()))

    __xor__ = wedge

    def conjugate(self) -> "Multivector":
        return Multivector.from_form(self.as_form().conjugate())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Multivector) and other.n == self.n and self.as_form() == other.as_form()

    __hash__ = None  # type: ignore[assignment]

    def contract(self, form: Form) -> Form:
        if form.n != self.n:
            raise DimensionMismatchError("contraction between algebras of different rank")
        result = Form.zero(self.n, form.field)
        for mask, value in self._terms.items():
            piece = form
            for index in indices_of(mask):
                piece = piece.interior(index)
                if not piece:
                    break
            if piece:
                result = result + piece.scale(value)
        return result

    def vectors(self) -> list[dict[int, Scalar]]:
        """Degree-1 part as a {index: coefficient} vector."""
        return [{indices_of(mask)[0]: value} for mask, value in self._terms.items() if popcount(mask) == 1]

    def __str__(self) -> str:
        from gencomplex.algebra.grammar import format_multivector

        return format_multivector(self)

    def __repr__(self) -> str:
        return f"Multivector(n={self.n}, {self})"


# generalized vectors ---------------------------------------------------------------


class GenVector:
    """X + ξ in (V ⊕ V*) ⊗ C. Coordinates put the vector block first."""

    __slots__ = ("n", "field", "vector", "covector")

    def __init__(self, n: int, field: ScalarField, vector: Sequence[Scalar], covector: Sequence[Scalar]):
        if len(vector) != n or len(covector) != n:
            raise DimensionMismatchError("generalized vector has the wrong length")
        self.n = n
        self.field = field
        self.vector = tuple(vector)
        self.covector = tuple(covector)

    @classmethod
    def zero(cls, n: int, field: ScalarField) -> "GenVector":
        return cls(n, field, [field.zero] * n, [field.zero] * n)

    @classmethod
    def from_parts(
        cls,
        n: int,
        field: ScalarField,
        vector: Mapping[int, object] | Sequence[object] = (),
        covector: Mapping[int, object] | Sequence[object] = (),
    ) -> "GenVector":
        """Parts given either as 0-based sequences or as {1-based index: value} maps."""

        def _expand(part) -> list[Scalar]:
            values = [field.zero] * n
            items = part.items() if isinstance(part, Mapping) else ((k + 1, v) for k, v in enumerate(part))
            for index, value in items:
                values[index - 1] = _coerce(field, value)
            return values

        return cls(n, field, _expand(vector), _expand(covector))

    @classmethod
    def basis(cls, n: int, field: ScalarField, j: int) -> "GenVector":
        """j < n gives ∂_{j+1}; j ≥ n gives e_{j−n+1}."""
        return cls.from_coordinates(n, field, {j: field.one})

    @classmethod
    def from_coordinates(cls, n: int, field: ScalarField, coords: Mapping[int, Scalar]) -> "GenVector":
        vector = [field.zero] * n
        covector = [field.zero] * n
        for j, value in coords.items():
            if j < n:
                vector[j] = value
            else:
                covector[j - n] = value
        return cls(n, field, vector, covector)

    @classmethod
    def from_covector_form(cls, form: Form) -> "GenVector":
        if not form.is_homogeneous(1):
            raise DomainError("covector part must be a 1-form")
        return cls.from_parts(form.n, form.field, covector={indices_of(m)[0]: v for m, v in form.items()})

    def coordinates(self) -> Vector:
        coords: Vector = {}
        for j, value in enumerate(self.vector + self.covector):
            if value:
                coords[j] = value
        return coords

    def covector_form(self) -> Form:
        return Form(self.n, self.field, {1 << k: v for k, v in enumerate(self.covector) if v})

    def vector_field(self) -> Multivector:
        return Multivector(self.n, self.field, {1 << k: v for k, v in enumerate(self.vector) if v})

    def __bool__(self) -> bool:
        return any(self.vector) or any(self.covector)

    def __add__(self, other: "GenVector") -> "GenVector":
        return GenVector(
            self.n,
            self.field,
            [a + b for a, b in zip(self.vector, other.vector)],
            [a + b for a, b in zip(self.covector, other.covector)],
        )

    def __neg__(self) -> "GenVector":
        return GenVector(self.n, self.field, [-a for a in self.vector], [-a for a in self.covector])

    def __sub__(self, other: "GenVector") -> "GenVector":
        return self + (-other)

    def scale(self, c) -> "GenVector":
        c = _coerce(self.field, c)
        return GenVector(self.n, self.field, [a * c for a in self.vector], [a * c for a in self.covector])

    def conjugate(self) -> "GenVector":
        conj = self.field.conjugate
        return GenVector(self.n, self.field, [conj(a) for a in self.vector], [conj(a) for a in self.covector])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GenVector) or other.n != self.n:
            return False
        return not (self - other)

    __hash__ = None  # type: ignore[assignment]

    def pairing(self, other: "GenVector") -> Scalar:
        total = self.field.zero
        for x, eta in zip(self.vector, other.covector):
            total += x * eta
        for xi, y in zip(self.covector, other.vector):
            total += xi * y
        return total * self.field.convert(Fraction(1, 2))

    def act(self, form: Form) -> Form:
        """Clifford action ι_X φ + ξ ∧ φ."""
        if form.n != self.n:
            raise DimensionMismatchError("Clifford action across different ranks")
        return form.interior_vector(self.vector) + self.covector_form().with_field(form.field).wedge(form)

    def __str__(self) -> str:
        from gencomplex.algebra.grammar import format_genvector

        return format_genvector(self)

    def __repr__(self) -> str:
        return f"GenVector(n={self.n}, {self})"


def clifford_act(v: GenVector, form: Form) -> Form:
    return v.act(form)


# spin action of Λ²(V ⊕ V*) ---------------------------------------------------------


class SpinBivector:
    """Σ c·(u ∧ w) in Λ²(V ⊕ V*), acting on forms by ½(w·u·φ − u·w·φ)."""

    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, field: ScalarField, terms: Iterable[tuple[Scalar, GenVector, GenVector]] = ()):
        self.n = n
        self.field = field
        self.terms = tuple((field.convert(c), u, w) for c, u, w in terms)

    @classmethod
    def from_form(cls, form: Form) -> "SpinBivector":
        """A 2-form B; its spin action is −B∧."""
        if not form.is_homogeneous(2):
            raise DomainError("B-field must be a homogeneous 2-form")
        terms = []
        for mask, value in form.items():
            i, j = indices_of(mask)
            terms.append(
                (
                    value,
                    GenVector.from_parts(form.n, form.field, covector={i: 1}),
                    GenVector.from_parts(form.n, form.field, covector={j: 1}),
                )
            )
        return cls(form.n, form.field, terms)

    @classmethod
    def from_multivector(cls, beta: Multivector) -> "SpinBivector":
        """A bivector β; its spin action is the contraction β⌟."""
        if not beta.is_homogeneous(2):
            raise DomainError("β-field must be a homogeneous bivector")
        terms = []
        for mask, value in beta.items():
            i, j = indices_of(mask)
            terms.append(
                (
                    value,
                    GenVector.from_parts(beta.n, beta.field, vector={i: 1}),
                    GenVector.from_parts(beta.n, beta.field, vector={j: 1}),
                )
            )
        return cls(beta.n, beta.field, terms)

    def __add__(self, other: "SpinBivector") -> "SpinBivector":
        return SpinBivector(self.n, self.field, self.terms + other.terms)

    def scale(self, c) -> "SpinBivector":
        c = self.field.convert(c)
        return SpinBivector(self.n, self.field, [(coef * c, u, w) for coef, u, w in self.terms])

    def act(self, form: Form) -> Form:
        half = self.field.convert(Fraction(1, 2))
        result = Form.zero(self.n, form.field)
        for c, u, w in self.terms:
            piece = w.act(u.act(form)) - u.act(w.act(form))
            result = result + piece.scale(c * half)
        return result

    def endomorphism(self) -> Matrix:
        """The skew map z ↦ Σ c·2(<u,z>w − <w,z>u) on V ⊕ V* coordinates."""
        size = 2 * self.n
        columns = []
        for j in range(size):
            z = GenVector.basis(self.n, self.field, j)
            image = GenVector.zero(self.n, self.field)
            for c, u, w in self.terms:
                image = image + (w.scale(u.pairing(z)) - u.scale(w.pairing(z))).scale(2 * c)
            columns.append(image.coordinates())
        return Matrix.from_columns(columns, size, self.field)

    def exp_act(self, form: Form, *, max_terms: int | None = None) -> Form:
        limit = max_terms if max_terms is not None else 2 * self.n + 2
        result = form
        power = form
        for k in range(1, limit + 1):
            power = self.act(power)
            if not power:
                return result
            result = result + power.scale(_inverse_factorial(self.field, k))
        raise DomainError("spin exponential does not terminate; the bivector is not nilpotent")


def exp_act(kind: str, g, form: Form) -> Form:
    """Exponentiated actions: ``b-wedge`` e^B∧a, ``beta-contract`` e^β⌟a, ``bivector-clifford`` e^ε·a."""
    if kind == "b-wedge":
        if not isinstance(g, Form) or not g.is_homogeneous(2):
            raise InputError("b-wedge needs a homogeneous 2-form")
        return g.exp().wedge(form) if g else form
    if kind == "beta-contract":
        if not isinstance(g, Multivector) or not g.is_homogeneous(2):
            raise InputError("beta-contract needs a homogeneous bivector")
        result = form
        power = Multivector(g.n, g.field, {0: g.field.one})
        k = 0
        while True:
            k += 1
            power = power.wedge(g)
            if not power:
                return result
            result = result + power.contract(form).scale(_inverse_factorial(form.field, k))
    if kind == "bivector-clifford":
        if isinstance(g, Multivector):
            g = SpinBivector.from_multivector(g)
        if not isinstance(g, SpinBivector):
            raise InputError("bivector-clifford needs a spin bivector")
        return g.exp_act(form)
    raise InputError(f"unknown exponential kind {kind!r}")


def operator_matrix(
    op: Callable[[Form], Form],
    n: int,
    field: ScalarField,
    source_masks: Sequence[int],
    target_masks: Sequence[int],
) -> Matrix:
    """Matrix of a linear operator on forms between two monomial bases."""
    positions = mask_positions(tuple(target_masks))
    columns = []
    for mask in source_masks:
        image = op(Form(n, field, {mask: field.one}))
        columns.append(image.to_vector(positions))
    return Matrix.from_columns(columns, len(target_masks), field)
