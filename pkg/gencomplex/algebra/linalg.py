"""Exact linear algebra over a ScalarField.

Vectors are sparse ``dict[int, scalar]`` maps without stored zeros. Matrices
wrap sympy's sparse ``DomainMatrix``; subspaces keep a reduced row echelon
basis, so two subspaces are equal exactly when their bases are.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from gencomplex.algebra.scalars import Scalar, ScalarField
from gencomplex.services.exceptions import DimensionMismatchError

Vector = dict[int, Scalar]


# sparse vector helpers ------------------------------------------------------


def vec_add(a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> Vector:
    out = dict(a)
    for key, value in b.items():
        total = out.get(key)
        total = value if total is None else total + value
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


def vec_scale(a: Mapping[int, Scalar], c: Scalar) -> Vector:
    if not c:
        return {}
    return {key: value * c for key, value in a.items() if value * c}


def vec_sub(a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> Vector:
    return vec_add(a, {key: -value for key, value in b.items()})


def vec_combine(terms: Iterable[tuple[Scalar, Mapping[int, Scalar]]]) -> Vector:
    out: Vector = {}
    for coefficient, vector in terms:
        if coefficient:
            out = vec_add(out, vec_scale(vector, coefficient))
    return out


def vec_clean(a: Mapping[int, Scalar]) -> Vector:
    return {key: value for key, value in a.items() if value}


# matrices ---------------------------------------------------------------------


class Matrix:
    """An exact ``rows x cols`` matrix over a ScalarField."""

    __slots__ = ("field", "rows", "cols", "_dm", "_columns")

    def __init__(self, dm: DomainMatrix, field: ScalarField):
        self.field = field
        self.rows, self.cols = dm.shape
        self._dm = dm.convert_to(field.domain) if dm.domain != field.domain else dm
        self._columns: dict[int, Vector] | None = None

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, entries: Mapping[tuple[int, int], Scalar], shape: tuple[int, int], field: ScalarField) -> "Matrix":
        dod: dict[int, dict[int, Scalar]] = {}
        for (i, j), value in entries.items():
            value = field.convert(value)
            if value:
                dod.setdefault(i, {})[j] = value
        return cls(DomainMatrix.from_dod(dod, shape, field.domain), field)

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping[int, Scalar]], rows: int, field: ScalarField) -> "Matrix":
        dod: dict[int, dict[int, Scalar]] = {}
        for j, column in enumerate(columns):
            for i, value in column.items():
                if value:
                    dod.setdefault(i, {})[j] = field.convert(value)
        return cls(DomainMatrix.from_dod(dod, (rows, len(columns)), field.domain), field)

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, Scalar]], cols: int, field: ScalarField) -> "Matrix":
        dod = {i: {j: field.convert(v) for j, v in row.items() if v} for i, row in enumerate(rows) if row}
        return cls(DomainMatrix.from_dod(dod, (len(rows), cols), field.domain), field)

    @classmethod
    def from_list(cls, rows: Sequence[Sequence[object]], field: ScalarField) -> "Matrix":
        cols = len(rows[0]) if rows else 0
        return cls.from_rows([{j: v for j, v in enumerate(row)} for row in rows], cols, field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: ScalarField) -> "Matrix":
        return cls(DomainMatrix.zeros((rows, cols), field.domain), field)

    @classmethod
    def identity(cls, n: int, field: ScalarField) -> "Matrix":
        return cls(DomainMatrix.eye(n, field.domain).to_sparse(), field)

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def domain_matrix(self) -> DomainMatrix:
        return self._dm

    def to_dod(self) -> dict[int, dict[int, Scalar]]:
        return self._dm.to_dod()

    def entry(self, i: int, j: int) -> Scalar:
        return self.to_dod().get(i, {}).get(j, self.field.zero)

    def column(self, j: int) -> Vector:
        return dict(self._column_map().get(j, {}))

    def row(self, i: int) -> Vector:
        return dict(self.to_dod().get(i, {}))

    def columns(self) -> list[Vector]:
        colmap = self._column_map()
        return [dict(colmap.get(j, {})) for j in range(self.cols)]

    def _column_map(self) -> dict[int, Vector]:
        if self._columns is None:
            colmap: dict[int, Vector] = {}
            for i, row in self.to_dod().items():
                for j, value in row.items():
                    colmap.setdefault(j, {})[i] = value
            self._columns = colmap
        return self._columns

    def to_list(self) -> list[list[Scalar]]:
        return self._dm.to_dense().to_list()

    # arithmetic ---------------------------------------------------------

    def apply(self, v: Mapping[int, Scalar]) -> Vector:
        colmap = self._column_map()
        out: Vector = {}
        for j, coefficient in v.items():
            if not coefficient:
                continue
            if j >= self.cols:
                raise DimensionMismatchError(f"vector index {j} out of range for {self.cols} columns")
            for i, value in colmap.get(j, {}).items():
                total = out.get(i)
                product = value * coefficient
                total = product if total is None else total + product
                if total:
                    out[i] = total
                else:
                    out.pop(i, None)
        return out

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot compose {self.shape} with {other.shape}")
        return Matrix(self._dm.matmul(other._dm), self.field)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self._dm + other._dm, self.field)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self._dm - other._dm, self.field)

    def __neg__(self) -> "Matrix":
        return Matrix(-self._dm, self.field)

    def scale(self, c: object) -> "Matrix":
        return Matrix(self._dm.scalarmul(self.field.convert(c)), self.field)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix) or self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not any(row for row in self.to_dod().values())

    def transpose(self) -> "Matrix":
        return Matrix(self._dm.transpose(), self.field)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self._dm.extract(list(rows), list(cols)), self.field)

    def hstack(self, *others: "Matrix") -> "Matrix":
        return Matrix(self._dm.hstack(*(o._dm for o in others)), self.field)

    def vstack(self, *others: "Matrix") -> "Matrix":
        return Matrix(self._dm.vstack(*(o._dm for o in others)), self.field)

    def conjugate(self) -> "Matrix":
        entries = {(i, j): self.field.conjugate(v) for i, row in self.to_dod().items() for j, v in row.items()}
        return Matrix.from_entries(entries, self.shape, self.field)

    # elimination --------------------------------------------------------

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        # Fraction-free elimination keeps entry growth bounded.
        _, _, pivots = self._dm.rref_den(method="FF", keep_domain=True)
        return len(pivots)

    def rref(self) -> tuple[list[Vector], tuple[int, ...]]:
        """Nonzero rows of the reduced row echelon form and the pivot columns."""
        if self.rows == 0 or self.cols == 0:
            return [], ()
        reduced, pivots = self._dm.rref()
        dod = reduced.to_dod()
        rows = [dict(dod.get(i, {})) for i in range(len(pivots))]
        return rows, tuple(pivots)

    def rank_kernel(self) -> tuple[int, "Subspace"]:
        rows, pivots = self.rref()
        pivot_set = set(pivots)
        kernel: list[Vector] = []
        for free in range(self.cols):
            if free in pivot_set:
                continue
            vector: Vector = {free: self.field.one}
            for row, pivot in zip(rows, pivots):
                value = row.get(free)
                if value:
                    vector[pivot] = -value
            kernel.append(vector)
        return len(pivots), Subspace.span(kernel, self.cols, self.field)

    def kernel(self) -> "Subspace":
        return self.rank_kernel()[1]

    def image(self) -> "Subspace":
        return Subspace.span(self.columns(), self.rows, self.field)

    def solve(self, b: Mapping[int, Scalar]) -> Vector | None:
        """Some x with ``self @ x == b``, or None when b is outside the column space."""
        augmented = self.hstack(Matrix.from_columns([b], self.rows, self.field))
        rows, pivots = augmented.rref()
        if pivots and pivots[-1] == self.cols:
            return None
        solution: Vector = {}
        for row, pivot in zip(rows, pivots):
            value = row.get(self.cols)
            if value:
                solution[pivot] = value
        return solution

    def preimage(self, target: "Subspace") -> "Subspace":
        """{v : self.apply(v) in target}."""
        if target.ambient != self.rows:
            raise DimensionMismatchError("target subspace lives in the wrong space")
        basis = target.basis
        if not basis:
            return self.kernel()
        negated = Matrix.from_columns([vec_scale(b, -self.field.one) for b in basis], self.rows, self.field)
        combined = self.hstack(negated)
        kernel = combined.kernel()
        head = [{k: v for k, v in vector.items() if k < self.cols} for vector in kernel.basis]
        return Subspace.span(head, self.cols, self.field)

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionMismatchError("only square matrices are invertible")
        return Matrix(self._dm.to_dense().inv().to_sparse(), self.field)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def leading_minors(self) -> list[Scalar]:
        """Determinants of the leading principal minors, in order."""
        dense = self._dm.to_dense()
        return [dense.extract(list(range(k)), list(range(k))).det() for k in range(1, self.rows + 1)]

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols} over {self.field.describe()})"


# subspaces --------------------------------------------------------------------


class Subspace:
    """A subspace of field^ambient held by its reduced echelon basis."""

    __slots__ = ("ambient", "field", "_rows", "_pivots")

    def __init__(self, ambient: int, field: ScalarField, rows: Sequence[Vector], pivots: Sequence[int]):
        self.ambient = ambient
        self.field = field
        self._rows = tuple(rows)
        self._pivots = tuple(pivots)

    @classmethod
    def span(cls, vectors: Iterable[Mapping[int, Scalar]], ambient: int, field: ScalarField) -> "Subspace":
        vectors = [vec_clean(v) for v in vectors]
        vectors = [v for v in vectors if v]
        for v in vectors:
            if v and max(v) >= ambient:
                raise DimensionMismatchError(f"vector index {max(v)} outside ambient dimension {ambient}")
        if not vectors:
            return cls(ambient, field, (), ())
        rows, pivots = Matrix.from_rows(vectors, ambient, field).rref()
        return cls(ambient, field, rows, pivots)

    @classmethod
    def zero(cls, ambient: int, field: ScalarField) -> "Subspace":
        return cls(ambient, field, (), ())

    @classmethod
    def full(cls, ambient: int, field: ScalarField) -> "Subspace":
        return cls(ambient, field, [{k: field.one} for k in range(ambient)], range(ambient))

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def basis(self) -> list[Vector]:
        return [dict(row) for row in self._rows]

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    def _check(self, other: "Subspace") -> None:
        if other.ambient != self.ambient:
            raise DimensionMismatchError(f"ambient mismatch {self.ambient} vs {other.ambient}")

    def reduce(self, v: Mapping[int, Scalar]) -> Vector:
        """Residual of v after eliminating the pivot columns; zero iff v is in the span."""
        residual = vec_clean(v)
        for row, pivot in zip(self._rows, self._pivots):
            value = residual.get(pivot)
            if value:
                residual = vec_sub(residual, vec_scale(row, value))
        return residual

    def contains(self, v: Mapping[int, Scalar]) -> bool:
        return not self.reduce(v)

    __contains__ = contains

    def coordinates(self, v: Mapping[int, Scalar]) -> list[Scalar]:
        """Coordinates of v (assumed in the span) in the echelon basis."""
        return [v.get(pivot, self.field.zero) for pivot in self._pivots]

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(list(self._rows) + list(other._rows), self.ambient, self.field)

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not self.dim or not other.dim:
            return Subspace.zero(self.ambient, self.field)
        # (x, y) with sum x_i a_i = sum y_j b_j
        columns = list(self._rows) + [vec_scale(b, -self.field.one) for b in other._rows]
        kernel = Matrix.from_columns(columns, self.ambient, self.field).kernel()
        vectors = [
            vec_combine((vector.get(i, self.field.zero), row) for i, row in enumerate(self._rows))
            for vector in kernel.basis
        ]
        return Subspace.span(vectors, self.ambient, self.field)

    __and__ = intersection

    def issubset(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(row) for row in self._rows)

    def quotient_dim(self, other: "Subspace") -> int:
        """dim self/(self ∩ other)."""
        return self.dim - self.intersection(other).dim

    def complement_basis(self, sub: "Subspace") -> list[Vector]:
        """Basis vectors of self extending sub to a basis of sub + self, in echelon order."""
        self._check(sub)
        chosen: list[Vector] = []
        running = sub
        for row in self._rows:
            if not running.contains(row):
                chosen.append(dict(row))
                running = running + Subspace.span([row], self.ambient, self.field)
        return chosen

    def image(self, matrix: Matrix) -> "Subspace":
        return Subspace.span([matrix.apply(row) for row in self._rows], matrix.rows, self.field)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace) or other.ambient != self.ambient:
            return False
        if other.dim != self.dim or other._pivots != self._pivots:
            return False
        return all(not vec_sub(a, b) for a, b in zip(self._rows, other._rows))

    __hash__ = None  # type: ignore[assignment]

    def as_matrix(self) -> Matrix:
        """Columns are the echelon basis vectors."""
        return Matrix.from_columns(self.basis, self.ambient, self.field)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


class Frame:
    """Coordinates with respect to a fixed list of independent vectors."""

    def __init__(self, vectors: Sequence[Mapping[int, Scalar]], ambient: int, field: ScalarField):
        self.vectors = [vec_clean(v) for v in vectors]
        self.ambient = ambient
        self.field = field
        self._matrix = Matrix.from_columns(self.vectors, ambient, field)
        k = len(self.vectors)
        if k == 0:
            self._rows: tuple[int, ...] = ()
            self._inverse = None
            return
        _, row_pivots = self._matrix.transpose().rref()
        if len(row_pivots) != k:
            raise DimensionMismatchError("frame vectors are linearly dependent")
        self._rows = tuple(row_pivots)
        self._inverse = self._matrix.submatrix(self._rows, range(k)).inverse()

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def span(self) -> Subspace:
        return Subspace.span(self.vectors, self.ambient, self.field)

    def coordinates(self, v: Mapping[int, Scalar], *, check: bool = True) -> list[Scalar]:
        k = len(self.vectors)
        if k == 0:
            if check and vec_clean(v):
                raise DimensionMismatchError("vector outside the span of an empty frame")
            return []
        restricted = {position: v[row] for position, row in enumerate(self._rows) if v.get(row)}
        solution = self._inverse.apply(restricted)
        coords = [solution.get(a, self.field.zero) for a in range(k)]
        if check:
            rebuilt = vec_combine(zip(coords, self.vectors))
            if vec_sub(rebuilt, v):
                raise DimensionMismatchError("vector outside the span of the frame")
        return coords

    def combine(self, coords: Sequence[Scalar]) -> Vector:
        return vec_combine(zip(coords, self.vectors))
