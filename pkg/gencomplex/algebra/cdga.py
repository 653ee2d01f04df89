"""Presented commutative differential graded algebras.

A CDGA here is a finite graded vector space with labelled basis elements, a
sparse product table and the differential on basis elements. Degree 0 is the
ground field spanned by the unit. Hirsch extensions ``A ⊗ ΛV`` are built from
an existing CDGA and are CDGAs themselves, so extensions can be stacked.

Basis labels of presented algebras are identifiers. Labels produced by
extensions join factors with ``.`` and write powers with ``^``
(``vol.t``, ``x^2.y``).
"""

from __future__ import annotations

import json
import logging
import re
from itertools import product as cartesian
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from gencomplex.algebra.linalg import Matrix, Vector, vec_add, vec_clean, vec_scale
from gencomplex.algebra.scalars import Scalar, ScalarField, gaussian_field
from gencomplex.services.exceptions import DomainError, InputError, NonClosedFormError, ParseError

logger = logging.getLogger(__name__)

UNIT = "1"
_LABEL = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_COMPOSITE_LABEL = re.compile(r"[A-Za-z0-9_]+(?:[.^][A-Za-z0-9_]+)*")

Monomial = tuple[int, ...]


class CDGA:
    """A connected finite CDGA over a ScalarField.

    ``products`` maps ``(p, i, q, j)`` to the product of basis element ``i``
    of degree ``p`` with basis element ``j`` of degree ``q``; products with the
    unit are implicit. ``differential`` maps ``(k, i)`` to a vector of degree
    ``k + 1``.
    """

    def __init__(
        self,
        basis: Mapping[int, Sequence[str]],
        products: Mapping[tuple[int, int, int, int], Vector],
        differential: Mapping[tuple[int, int], Vector],
        *,
        field: ScalarField | None = None,
        name: str = "cdga",
        orientation: str | None = None,
        verify: bool = True,
    ):
        self.field = field or gaussian_field()
        self.name = name
        self.basis: dict[int, tuple[str, ...]] = {k: tuple(labels) for k, labels in basis.items() if labels}
        if self.basis.get(0) != (UNIT,):
            raise InputError(f"{name}: degree 0 must be spanned by the unit '1' alone")
        if any(k < 0 for k in self.basis):
            raise InputError(f"{name}: negative degrees are not allowed")
        self.top = max(self.basis)
        self._index: dict[str, tuple[int, int]] = {}
        for k, labels in self.basis.items():
            for i, label in enumerate(labels):
                if label in self._index:
                    raise InputError(f"{name}: duplicate basis label {label!r}")
                self._index[label] = (k, i)
        self._products = {key: vec_clean(value) for key, value in products.items() if vec_clean(value)}
        self._differential = {key: vec_clean(value) for key, value in differential.items() if vec_clean(value)}
        self.orientation = orientation
        if orientation is not None:
            if orientation not in self._index:
                raise InputError(f"{name}: orientation {orientation!r} is not a basis label")
            if self._index[orientation][0] != self.top:
                raise InputError(f"{name}: orientation {orientation!r} is not in the top degree {self.top}")
        self._d_cache: dict[int, Matrix] = {}
        if verify:
            self.verify()

    # basis ----------------------------------------------------------------

    def dimension(self, k: int) -> int:
        return len(self.basis.get(k, ()))

    @property
    def dimensions(self) -> list[int]:
        return [self.dimension(k) for k in range(self.top + 1)]

    def labels(self, k: int) -> tuple[str, ...]:
        return self.basis.get(k, ())

    def locate(self, label: str) -> tuple[int, int]:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"{self.name}: unknown basis label {label!r}") from None

    def basis_vector(self, label: str) -> tuple[int, Vector]:
        k, i = self.locate(label)
        return k, {i: self.field.one}

    def unit(self) -> Vector:
        return {0: self.field.one}

    def vector_from_labels(self, coefficients: Mapping[str, Any]) -> tuple[int, Vector]:
        """A homogeneous element from ``{label: coefficient}``."""
        degree: int | None = None
        vector: Vector = {}
        for label, raw in coefficients.items():
            k, i = self.locate(label)
            if degree is not None and k != degree:
                raise InputError(f"{self.name}: mixed degrees {degree} and {k} in {dict(coefficients)}")
            degree = k
            value = self.field.parse(raw) if isinstance(raw, str) else self.field.convert(raw)
            vector = vec_add(vector, {i: value})
        return (degree if degree is not None else 0), vector

    # differential -----------------------------------------------------------

    def d_vector(self, k: int, vector: Vector) -> Vector:
        out: Vector = {}
        for i, c in vector.items():
            image = self._differential.get((k, i))
            if image:
                out = vec_add(out, vec_scale(image, c))
        return out

    def d_matrix(self, k: int) -> Matrix:
        if k not in self._d_cache:
            columns = [self._differential.get((k, i), {}) for i in range(self.dimension(k))]
            self._d_cache[k] = Matrix.from_columns(columns, self.dimension(k + 1), self.field)
        return self._d_cache[k]

    # products ----------------------------------------------------------------

    def basis_product(self, p: int, i: int, q: int, j: int) -> Vector:
        if p == 0:
            return {j: self.field.one}
        if q == 0:
            return {i: self.field.one}
        return self._products.get((p, i, q, j), {})

    def multiply(self, p: int, a: Vector, q: int, b: Vector) -> Vector:
        if p + q > self.top:
            return {}
        out: Vector = {}
        for i, x in a.items():
            for j, y in b.items():
                value = self.basis_product(p, i, q, j)
                if value:
                    out = vec_add(out, vec_scale(value, x * y))
        return out

    def power(self, k: int, a: Vector, exponent: int) -> tuple[int, Vector]:
        degree, result = 0, self.unit()
        for _ in range(exponent):
            result = self.multiply(degree, result, k, a)
            degree += k
        return degree, result

    # checks --------------------------------------------------------------------

    def verify(self) -> None:
        """d² = 0, graded commutativity, the Leibniz rule and associativity on basis elements."""
        self.check_differential()
        one = self.field.one
        for (p, i, q, j), value in self._products.items():
            if p + q > self.top or any(index >= self.dimension(p + q) for index in value):
                raise InputError(f"{self.name}: product of {self.basis[p][i]} and {self.basis[q][j]} leaves the algebra")
            swapped = self.basis_product(q, j, p, i)
            sign = -one if (p * q) % 2 else one
            if vec_add(value, vec_scale(swapped, -sign)):
                raise InputError(
                    f"{self.name}: {self.basis[p][i]}·{self.basis[q][j]} breaks graded commutativity"
                )
        degrees = [k for k in self.basis if k > 0]
        for p, q in cartesian(degrees, repeat=2):
            if p + q + 1 > self.top:
                continue
            for i, j in cartesian(range(self.dimension(p)), range(self.dimension(q))):
                x, y = {i: one}, {j: one}
                left = self.d_vector(p + q, self.multiply(p, x, q, y))
                right = vec_add(
                    self.multiply(p + 1, self.d_vector(p, x), q, y),
                    vec_scale(self.multiply(p, x, q + 1, self.d_vector(q, y)), -one if p % 2 else one),
                )
                if vec_add(left, vec_scale(right, -one)):
                    raise InputError(f"{self.name}: Leibniz rule fails on {self.basis[p][i]}, {self.basis[q][j]}")
        for p, q, r in cartesian(degrees, repeat=3):
            if p + q + r > self.top:
                continue
            for i, j, l in cartesian(range(self.dimension(p)), range(self.dimension(q)), range(self.dimension(r))):
                x, y, z = {i: one}, {j: one}, {l: one}
                left = self.multiply(p + q, self.multiply(p, x, q, y), r, z)
                right = self.multiply(p, x, q + r, self.multiply(q, y, r, z))
                if vec_add(left, vec_scale(right, -one)):
                    raise InputError(
                        f"{self.name}: product is not associative on "
                        f"{self.basis[p][i]}, {self.basis[q][j]}, {self.basis[r][l]}"
                    )

    def check_differential(self) -> None:
        for k in range(self.top - 1):
            if not (self.d_matrix(k + 1) @ self.d_matrix(k)).is_zero():
                raise InputError(f"{self.name}: d² ≠ 0 on degree {k}")

    # Poincaré duality ----------------------------------------------------------

    def integrate(self, k: int, vector: Vector) -> Scalar:
        """Coefficient of the orientation class; zero below the top degree."""
        if self.orientation is None:
            raise DomainError(f"{self.name} declares no orientation")
        if k != self.top:
            return self.field.zero
        _, index = self._index[self.orientation]
        return vector.get(index, self.field.zero)

    # printing and parsing ----------------------------------------------------------

    def format_vector(self, k: int, vector: Vector) -> str:
        pieces: list[str] = []
        for i in sorted(vector):
            value = vector[i]
            if not value:
                continue
            label = self.basis[k][i]
            term = _format_term(self.field, value, label)
            if pieces and not term.startswith("-"):
                pieces.append(" + ")
            elif pieces:
                pieces.append(" - ")
                term = term[1:]
            pieces.append(term)
        return "".join(pieces) or "0"

    def parse_element(self, text: str) -> tuple[int, Vector]:
        """Parse ``2*v1 - (1 + I)*u.v2``-style linear combinations of basis labels."""
        coefficients: dict[str, Scalar] = {}
        for sign, body, position in _split_terms(text):
            coefficient_text, label = _split_coefficient(body)
            if label is None:
                label, coefficient_text = UNIT, body
            coefficient = self.field.parse(coefficient_text, position=position) if coefficient_text else self.field.one
            if label not in self._index:
                raise ParseError(f"unknown basis label {label!r}", position=position, text=text)
            coefficients[label] = coefficients.get(label, self.field.zero) + (-coefficient if sign < 0 else coefficient)
        if not coefficients:
            raise ParseError("empty element", position=0, text=text)
        return self.vector_from_labels({label: c for label, c in coefficients.items()})

    # serialisation --------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        products = []
        for (p, i, q, j), value in sorted(self._products.items()):
            if (p, i) <= (q, j):
                products.append([self.basis[p][i], self.basis[q][j], _labelled(self, p + q, value)])
        return {
            "name": self.name,
            "basis": {str(k): list(labels) for k, labels in sorted(self.basis.items())},
            "products": products,
            "d": {self.basis[k][i]: _labelled(self, k + 1, value) for (k, i), value in sorted(self._differential.items())},
            "orientation": self.orientation,
        }

    def over(self, field: ScalarField) -> "CDGA":
        """The same presentation with coefficients moved into ``field``."""

        def moved(vector: Vector) -> Vector:
            return {i: field.convert(c) for i, c in vector.items()}

        return CDGA(
            self.basis,
            {key: moved(value) for key, value in self._products.items()},
            {key: moved(value) for key, value in self._differential.items()},
            field=field,
            name=self.name,
            orientation=self.orientation,
            verify=False,
        )

    @classmethod
    def ground(cls, field: ScalarField | None = None, name: str = "ground") -> "CDGA":
        return cls({0: [UNIT]}, {}, {}, field=field, name=name)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], *, field: ScalarField | None = None) -> "CDGA":
        """The JSON format ``{name, basis, products, d, orientation, hirsch}``."""
        field = field or gaussian_field()
        try:
            raw_basis = {int(k): list(v) for k, v in data["basis"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"CDGA data needs a 'basis' mapping degree -> labels: {exc}") from exc
        raw_basis.setdefault(0, [UNIT])
        name = str(data.get("name") or "cdga")
        for labels in raw_basis.values():
            for label in labels:
                if label != UNIT and not _LABEL.fullmatch(label):
                    raise ParseError(f"{name}: basis label {label!r} is not an identifier")
        index = {label: (k, i) for k, labels in raw_basis.items() for i, label in enumerate(labels)}

        def locate(label: str) -> tuple[int, int]:
            if label not in index:
                raise InputError(f"{name}: unknown basis label {label!r}")
            return index[label]

        def vector(entries: Mapping[str, Any], degree: int) -> Vector:
            out: Vector = {}
            for label, raw in entries.items():
                k, i = locate(label)
                if k != degree:
                    raise InputError(f"{name}: {label!r} has degree {k}, expected {degree}")
                value = field.parse(raw) if isinstance(raw, str) else field.convert(raw)
                out = vec_add(out, {i: value})
            return out

        products: dict[tuple[int, int, int, int], Vector] = {}
        for entry in data.get("products") or []:
            try:
                left, right, value = entry
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{name}: product entries are [left, right, {{label: coefficient}}]") from exc
            (p, i), (q, j) = locate(left), locate(right)
            if p == 0 or q == 0:
                raise InputError(f"{name}: products with the unit are implicit")
            image = vector(value, p + q)
            one = field.one
            sign = -one if (p * q) % 2 else one
            for key, candidate in (((p, i, q, j), image), ((q, j, p, i), vec_scale(image, sign))):
                existing = products.get(key)
                if existing is not None and vec_add(existing, vec_scale(candidate, -one)):
                    raise InputError(f"{name}: conflicting products for {left}·{right}")
                products[key] = candidate
        differential: dict[tuple[int, int], Vector] = {}
        for label, value in (data.get("d") or {}).items():
            k, i = locate(label)
            differential[(k, i)] = vector(value, k + 1)
        algebra = cls(raw_basis, products, differential, field=field, name=name, orientation=data.get("orientation"))
        for extension in data.get("hirsch") or []:
            try:
                generator = (str(extension["label"]), int(extension["degree"]), dict(extension.get("d") or {}))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{name}: hirsch entries need 'label', 'degree' and 'd': {exc}") from exc
            algebra = hirsch_extend(
                algebra,
                [generator],
                max_degree=extension.get("max_degree"),
                orientation=extension.get("orientation"),
            )
        return algebra

    def __repr__(self) -> str:
        return f"CDGA({self.name!r}, dims={self.dimensions})"


# Hirsch extensions ------------------------------------------------------------------


class HirschExtension(CDGA):
    """``base ⊗ Λ(generators)`` with dv ∈ base, truncated above ``max_degree``.

    Basis elements are ``a ⊗ m`` for a base basis element ``a`` and a monomial
    ``m`` in the new generators. The product is
    ``(a1⊗m1)(a2⊗m2) = (−1)^{|m1||a2|} a1a2 ⊗ m1m2`` and the differential is
    ``d(a⊗m) = da⊗m + (−1)^{|a|} a·dm``.
    """

    def __init__(
        self,
        base: CDGA,
        generators: Sequence[tuple[str, int, Vector]],
        max_degree: int,
        *,
        name: str,
        orientation: str | None = None,
    ):
        self.base = base
        self.generator_labels = tuple(label for label, _, _ in generators)
        self.generator_degrees = tuple(degree for _, degree, _ in generators)
        self.generator_differentials = tuple(dv for _, _, dv in generators)
        self.max_degree = max_degree
        field = base.field
        monomials = _monomials(self.generator_degrees, max_degree)
        basis: dict[int, list[str]] = {}
        self.factors: dict[tuple[int, int], tuple[int, int, Monomial]] = {}
        positions: dict[tuple[int, int, Monomial], tuple[int, int]] = {}
        for monomial in monomials:
            m_degree = self._monomial_degree(monomial)
            for a_degree in sorted(base.basis):
                k = a_degree + m_degree
                if k > max_degree:
                    continue
                for a_index, a_label in enumerate(base.labels(a_degree)):
                    label = _join_label(a_label, self._monomial_label(monomial))
                    slot = (k, len(basis.setdefault(k, [])))
                    basis[k].append(label)
                    self.factors[slot] = (a_degree, a_index, monomial)
                    positions[(a_degree, a_index, monomial)] = slot
        self._positions = positions
        products: dict[tuple[int, int, int, int], Vector] = {}
        one = field.one
        slots = list(self.factors.items())
        for (p, i), (a1_degree, a1, m1) in slots:
            if p == 0:
                continue
            for (q, j), (a2_degree, a2, m2) in slots:
                if q == 0 or p + q > max_degree:
                    continue
                merged = _merge(m1, m2, self.generator_degrees)
                if merged is None:
                    continue
                monomial, sign = merged
                if (self._monomial_degree(m1) * a2_degree) % 2:
                    sign = -sign
                base_product = base.multiply(a1_degree, {a1: one}, a2_degree, {a2: one})
                value: Vector = {}
                for index, c in base_product.items():
                    slot = positions.get((a1_degree + a2_degree, index, monomial))
                    if slot is not None:
                        value[slot[1]] = c if sign > 0 else -c
                if value:
                    products[(p, i, q, j)] = value
        super().__init__(basis, products, {}, field=field, name=name, orientation=orientation, verify=False)
        self._differential = self._build_differential()
        self._d_cache.clear()
        self.check_differential()

    def _monomial_degree(self, monomial: Monomial) -> int:
        return sum(e * d for e, d in zip(monomial, self.generator_degrees))

    def _monomial_label(self, monomial: Monomial) -> str:
        parts = []
        for label, exponent in zip(self.generator_labels, monomial):
            if exponent == 1:
                parts.append(label)
            elif exponent > 1:
                parts.append(f"{label}^{exponent}")
        return ".".join(parts) or UNIT

    def embed(self, k: int, vector: Vector) -> Vector:
        """The inclusion a ↦ a ⊗ 1 of the base."""
        zero_monomial = (0,) * len(self.generator_labels)
        out: Vector = {}
        for index, c in vector.items():
            slot = self._positions.get((k, index, zero_monomial))
            if slot is not None:
                out[slot[1]] = c
        return out

    def generator_vector(self, position: int) -> tuple[int, Vector]:
        monomial = tuple(1 if g == position else 0 for g in range(len(self.generator_labels)))
        degree = self.generator_degrees[position]
        return degree, {self._positions[(0, 0, monomial)][1]: self.field.one}

    def _build_differential(self) -> dict[tuple[int, int], Vector]:
        one = self.field.one
        monomial_d: dict[Monomial, tuple[int, Vector]] = {}

        def d_monomial(monomial: Monomial) -> tuple[int, Vector]:
            # d(g·m') = dg·m' + (−1)^{|g|} g·dm' with g the first generator present
            if monomial in monomial_d:
                return monomial_d[monomial]
            degree = self._monomial_degree(monomial)
            first = next((g for g, e in enumerate(monomial) if e), None)
            if first is None or degree + 1 > self.max_degree:
                monomial_d[monomial] = (degree + 1, {})
                return monomial_d[monomial]
            rest = tuple(e - 1 if g == first else e for g, e in enumerate(monomial))
            g_degree = self.generator_degrees[first]
            rest_vector = {self._positions[(0, 0, rest)][1]: one}
            rest_degree = degree - g_degree
            dg = self.embed(g_degree + 1, self.generator_differentials[first])
            value = self.multiply(g_degree + 1, dg, rest_degree, rest_vector)
            _, generator = self.generator_vector(first)
            _, d_rest = d_monomial(rest)
            tail = self.multiply(g_degree, generator, rest_degree + 1, d_rest)
            value = vec_add(value, vec_scale(tail, -one if g_degree % 2 else one))
            monomial_d[monomial] = (degree + 1, value)
            return monomial_d[monomial]

        differential: dict[tuple[int, int], Vector] = {}
        zero_monomial = (0,) * len(self.generator_labels)
        for (k, index), (a_degree, a_index, monomial) in self.factors.items():
            if k + 1 > self.max_degree:
                continue
            m_degree = self._monomial_degree(monomial)
            m_vector = {self._positions[(0, 0, monomial)][1]: one}
            da = self.embed(a_degree + 1, self.base.d_vector(a_degree, {a_index: one}))
            value = self.multiply(a_degree + 1, da, m_degree, m_vector)
            if monomial != zero_monomial:
                _, dm = d_monomial(monomial)
                a_vector = self.embed(a_degree, {a_index: one})
                tail = self.multiply(a_degree, a_vector, m_degree + 1, dm)
                value = vec_add(value, vec_scale(tail, -one if a_degree % 2 else one))
            if value:
                differential[(k, index)] = value
        return differential

    def induced_map(
        self,
        base_images: Mapping[tuple[int, int], Vector],
        generator_images: Sequence[Vector],
        target: Any,
    ) -> dict[tuple[int, int], Vector]:
        """Extend a multiplicative map on the base by images of the new generators.

        ``target`` is any object with ``multiply(p, a, q, b)``; images of
        base basis elements are looked up in ``base_images``.
        """
        images: dict[tuple[int, int], Vector] = {}
        for (k, index), (a_degree, a_index, monomial) in self.factors.items():
            degree, value = a_degree, dict(base_images.get((a_degree, a_index), {}))
            for g, exponent in enumerate(monomial):
                for _ in range(exponent):
                    g_degree = self.generator_degrees[g]
                    value = target.multiply(degree, value, g_degree, generator_images[g])
                    degree += g_degree
            images[(k, index)] = value
        return images


def hirsch_extend(
    algebra: CDGA,
    generators: Sequence[tuple[str, int, Mapping[str, Any] | Vector]],
    *,
    max_degree: int | None = None,
    orientation: str | None = None,
    name: str | None = None,
) -> HirschExtension:
    """Adjoin free generators ``(label, degree, dv)`` with closed dv in the base.

    ``dv`` is ``{label: coefficient}`` or a coordinate vector of degree
    ``degree + 1``. Even generators need an explicit ``max_degree``.
    """
    labels = [label for label, _, _ in generators]
    if not generators:
        raise InputError("a Hirsch extension needs at least one generator")
    if len(set(labels)) != len(labels):
        raise InputError(f"duplicate generator labels {labels}")
    resolved: list[tuple[str, int, Vector]] = []
    for label, degree, dv in generators:
        if not _LABEL.fullmatch(label):
            raise InputError(f"generator label {label!r} is not an identifier")
        if any(label in existing.split(".") for k in algebra.basis for existing in algebra.labels(k)):
            raise InputError(f"generator label {label!r} already names a basis element")
        if degree < 1:
            raise InputError(f"generator {label!r} must have positive degree")
        if dv and all(isinstance(key, str) for key in dv):
            target_degree, vector = algebra.vector_from_labels(dv)  # type: ignore[arg-type]
            if vector and target_degree != degree + 1:
                raise InputError(f"d{label} must have degree {degree + 1}, got {target_degree}")
        else:
            vector = vec_clean(dv)  # type: ignore[arg-type]
        if degree + 1 <= algebra.top and algebra.d_vector(degree + 1, vector):
            raise NonClosedFormError(
                f"d{label} = {algebra.format_vector(degree + 1, vector)} is not closed",
                witness=algebra.format_vector(degree + 1, vector),
            )
        resolved.append((label, degree, vector))
    if max_degree is None:
        if any(degree % 2 == 0 for _, degree, _ in resolved):
            raise InputError("extensions by even generators need max_degree")
        max_degree = algebra.top + sum(degree for _, degree, _ in resolved)
    extension = HirschExtension(
        algebra,
        resolved,
        int(max_degree),
        name=name or f"{algebra.name}+{'+'.join(labels)}",
        orientation=orientation,
    )
    logger.debug(
        "hirsch_extended",
        extra={"base": algebra.name, "generators": labels, "dims": extension.dimensions},
    )
    return extension


def load_cdga(path: str | Path) -> CDGA:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read CDGA data from {path}: {exc}") from exc
    return CDGA.from_dict(data)


def sphere_bundle_model(k: int, euler: int = 1) -> HirschExtension:
    """H•(S^{k+1} × S^{k+1}) extended by u of degree 2k+1 with du = euler·v1v2."""
    if k < 1:
        raise DomainError("the sphere-bundle model needs k ≥ 1")
    degree = k + 1
    data = {
        "name": f"sphere_bundle_k{k}",
        "basis": {"0": [UNIT], str(degree): ["v1", "v2"], str(2 * degree): ["p"]},
        "products": [["v1", "v2", {"p": 1}]],
    }
    base = CDGA.from_dict(data)
    return hirsch_extend(base, [("u", 2 * k + 1, {"p": euler})], orientation="p.u", name=data["name"])


# helpers --------------------------------------------------------------------------


def _monomials(degrees: Sequence[int], max_degree: int) -> list[Monomial]:
    ranges = []
    for degree in degrees:
        if degree % 2:
            ranges.append(range(2))
        else:
            ranges.append(range(max_degree // degree + 1))
    monomials = [
        m for m in cartesian(*ranges) if sum(e * d for e, d in zip(m, degrees)) <= max_degree
    ]
    return sorted(monomials, key=lambda m: (sum(e * d for e, d in zip(m, degrees)), tuple(-e for e in m)))


def _merge(m1: Monomial, m2: Monomial, degrees: Sequence[int]) -> tuple[Monomial, int] | None:
    """m1·m2 in canonical order with its Koszul sign, or None when an odd square appears."""
    sign = 1
    for g, (e1, e2) in enumerate(zip(m1, m2)):
        if degrees[g] % 2 and e1 + e2 > 1:
            return None
    for i, e1 in enumerate(m1):
        if not e1 or degrees[i] % 2 == 0:
            continue
        for j in range(i):
            if m2[j] and degrees[j] % 2:
                sign = -sign
    return tuple(e1 + e2 for e1, e2 in zip(m1, m2)), sign


def _join_label(base_label: str, monomial_label: str) -> str:
    if monomial_label == UNIT:
        return base_label
    if base_label == UNIT:
        return monomial_label
    return f"{base_label}.{monomial_label}"


def _labelled(algebra: CDGA, k: int, vector: Vector) -> dict[str, str]:
    return {algebra.basis[k][i]: algebra.field.format(c) for i, c in sorted(vector.items())}


def _format_term(field: ScalarField, value: Scalar, label: str) -> str:
    text = field.format(value)
    if label == UNIT:
        return text if not any(ch in text[1:] for ch in "+- ") else f"({text})"
    if text == "1":
        return label
    if text == "-1":
        return f"-{label}"
    if any(ch in text[1:] for ch in "+- ") or "I" in text:
        return f"({text})*{label}"
    return f"{text}*{label}"


def _split_terms(text: str) -> Iterable[tuple[int, str, int]]:
    """(sign, term, position) at top-level + and - signs."""
    depth, start, sign = 0, 0, 1
    stripped = text.strip()
    if stripped in ("", "0"):
        return []
    terms: list[tuple[int, str, int]] = []
    for position, char in enumerate(stripped):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char in "+-" and depth == 0:
            body = stripped[start:position].strip()
            if body:
                terms.append((sign, body, start))
            elif position != 0:
                raise ParseError("dangling sign", position=position, text=text)
            sign = -1 if char == "-" else 1
            start = position + 1
    body = stripped[start:].strip()
    if not body:
        raise ParseError("expression ends with a sign", position=len(stripped), text=text)
    terms.append((sign, body, start))
    return terms


def _split_coefficient(body: str) -> tuple[str, str | None]:
    """('2', 'v1') for ``2*v1``; ('', 'v1') for ``v1``; (body, None) for a bare scalar."""
    if body.startswith("(") and ")*" in body:
        close = body.rindex(")*")
        return body[1:close], body[close + 2 :].strip()
    if "*" in body:
        head, _, tail = body.rpartition("*")
        if _COMPOSITE_LABEL.fullmatch(tail.strip()) and not tail.strip().isdigit():
            return head.strip(), tail.strip()
    if _COMPOSITE_LABEL.fullmatch(body) and not body[0].isdigit() and body != UNIT:
        return "", body
    return body, None
