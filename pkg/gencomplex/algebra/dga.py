"""Finite-dimensional differential graded algebras seen through their bases.

Cohomology, Massey products and the lemma checks only need a graded vector
space with differential matrices and a product on coordinate vectors, so both
Chevalley–Eilenberg complexes and presented CDGAs plug into the same code.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from gencomplex.algebra.exterior import Form, masks_of_degree, mask_positions
from gencomplex.algebra.grammar import format_form
from gencomplex.algebra.linalg import Matrix, Vector
from gencomplex.algebra.liealg import LieModel
from gencomplex.algebra.scalars import ScalarField


@runtime_checkable
class DGA(Protocol):
    field: ScalarField
    top: int

    def dimension(self, k: int) -> int:
        ...

    def d_matrix(self, k: int) -> Matrix:
        """The differential from degree k to degree k + 1."""
        ...

    def multiply(self, p: int, a: Vector, q: int, b: Vector) -> Vector:
        ...

    def format_vector(self, k: int, vector: Vector) -> str:
        ...


class CEAlgebra:
    """The untwisted Chevalley–Eilenberg complex of a LieModel as a DGA."""

    def __init__(self, model: LieModel):
        self.model = model
        self.field = model.field
        self.top = model.n

    @property
    def n(self) -> int:
        return self.model.n

    def dimension(self, k: int) -> int:
        return len(masks_of_degree(self.n, k))

    def d_matrix(self, k: int) -> Matrix:
        if k < 0 or k >= self.top:
            return Matrix.zeros(self.dimension(k + 1), self.dimension(k), self.field)
        return self.model.d_matrix(k)

    def to_form(self, k: int, vector: Vector) -> Form:
        return Form.from_vector(self.n, self.field, vector, masks_of_degree(self.n, k))

    def from_form(self, form: Form) -> tuple[int, Vector]:
        """(degree, coordinates) of a homogeneous form; zero forms report degree 0."""
        degrees = form.degrees()
        if len(degrees) > 1:
            raise ValueError("form is not homogeneous")
        k = degrees[0] if degrees else 0
        return k, form.with_field(self.field).to_vector(mask_positions(masks_of_degree(self.n, k)))

    def multiply(self, p: int, a: Vector, q: int, b: Vector) -> Vector:
        product = self.to_form(p, a).wedge(self.to_form(q, b))
        return product.to_vector(mask_positions(masks_of_degree(self.n, p + q)))

    def format_vector(self, k: int, vector: Vector) -> str:
        return format_form(self.to_form(k, vector))

    def __repr__(self) -> str:
        return f"CEAlgebra({self.model!r})"
