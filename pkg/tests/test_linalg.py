import random
from fractions import Fraction

import pytest

from gencomplex.algebra.linalg import Frame, Matrix, Subspace
from gencomplex.algebra.scalars import ScalarField, gaussian_field
from gencomplex.services.exceptions import DimensionMismatchError, ParseError


def _field():
    return gaussian_field()


def _vec(*values):
    field = _field()
    return {k: field.convert(v) for k, v in enumerate(values) if v}


def _random_subspace(rng, ambient, size):
    field = _field()
    vectors = [_vec(*(rng.randint(-2, 2) for _ in range(ambient))) for _ in range(size)]
    return Subspace.span(vectors, ambient, field)


def test_rank_kernel_identity_and_zero():
    field = _field()
    rank, kernel = Matrix.identity(3, field).rank_kernel()
    assert rank == 3
    assert kernel.dim == 0

    rank, kernel = Matrix.zeros(2, 4, field).rank_kernel()
    assert rank == 0
    assert kernel == Subspace.full(4, field)


def test_rank_kernel_over_gaussian_rationals():
    field = _field()
    i = field.imag_unit
    m = Matrix.from_list([[1, i], [i, -1]], field)
    rank, kernel = m.rank_kernel()
    assert rank == 1
    assert kernel.dim == 1
    assert kernel == Subspace.span([{0: -i, 1: field.one}], 2, field)
    for vector in kernel.basis:
        assert m.apply(vector) == {}


def test_empty_matrix_has_rank_zero():
    field = _field()
    assert Matrix.zeros(0, 3, field).rank() == 0
    assert Matrix.zeros(0, 3, field).rank_kernel()[1].dim == 3


def test_solve_cases():
    field = _field()
    b = _vec(1, 1)
    assert Matrix.identity(2, field).solve(b) == b
    assert Matrix.zeros(2, 2, field).solve(b) is None

    m = Matrix.from_list([[2, 0], [0, Fraction(1, 3)]], field)
    x = m.solve(b)
    assert x == {0: field.convert(Fraction(1, 2)), 1: field.convert(3)}
    assert m.apply(x) == b


def test_solve_reproduces_b_on_random_systems():
    field = _field()
    rng = random.Random(7)
    for _ in range(25):
        rows = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(3)]
        m = Matrix.from_list(rows, field)
        b = _vec(*(rng.randint(-3, 3) for _ in range(3)))
        x = m.solve(b)
        if x is None:
            assert not m.image().contains(b)
        else:
            assert m.apply(x) == b


def test_rank_agrees_with_integer_cleared_rank():
    field = _field()
    rng = random.Random(11)
    for _ in range(20):
        rows = [[Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(4)] for _ in range(4)]
        cleared = [[value * 60 for value in row] for row in rows]
        assert Matrix.from_list(rows, field).rank() == Matrix.from_list(cleared, field).rank()


def test_subspace_sum_and_intersection():
    field = _field()
    a = Subspace.span([_vec(1, 0, 0, 0), _vec(0, 1, 0, 0)], 4, field)
    b = Subspace.span([_vec(0, 0, 1, 0), _vec(0, 0, 0, 1)], 4, field)
    assert (a & b).dim == 0
    assert (a + b).dim == 4
    assert a & a == a

    line = Subspace.span([_vec(1, 1, 0)], 3, field)
    plane = Subspace.span([_vec(1, 0, 0), _vec(0, 1, 0)], 3, field)
    assert plane.intersection(line) == line
    assert line.issubset(plane)
    assert plane.quotient_dim(line) == 1
    assert _vec(2, 2, 0) in line
    assert _vec(1, 0, 0) not in line


def test_grassmann_identity_on_random_subspaces():
    rng = random.Random(3)
    for _ in range(30):
        a = _random_subspace(rng, 5, rng.randint(0, 4))
        b = _random_subspace(rng, 5, rng.randint(0, 4))
        assert (a + b).dim + (a & b).dim == a.dim + b.dim


def test_subspace_ambient_mismatch():
    field = _field()
    with pytest.raises(DimensionMismatchError):
        Subspace.zero(3, field) + Subspace.zero(4, field)


def test_complement_and_preimage():
    field = _field()
    plane = Subspace.span([_vec(1, 0, 0), _vec(0, 1, 0)], 3, field)
    line = Subspace.span([_vec(1, 1, 0)], 3, field)
    complement = plane.complement_basis(line)
    assert len(complement) == 1
    assert (line + Subspace.span(complement, 3, field)) == plane

    projection = Matrix.from_list([[1, 0, 0], [0, 0, 0]], field)
    target = Subspace.zero(2, field)
    assert projection.preimage(target) == Subspace.span([_vec(0, 1, 0), _vec(0, 0, 1)], 3, field)


def test_frame_coordinates():
    field = _field()
    frame = Frame([_vec(1, 1, 0), _vec(0, 1, 1)], 3, field)
    coords = frame.coordinates(_vec(2, 5, 3))
    assert coords == [field.convert(2), field.convert(3)]
    assert frame.combine(coords) == _vec(2, 5, 3)
    with pytest.raises(DimensionMismatchError):
        frame.coordinates(_vec(1, 0, 0))
    with pytest.raises(DimensionMismatchError):
        Frame([_vec(1, 1, 0), _vec(2, 2, 0)], 3, field)


def test_inverse_and_leading_minors():
    field = _field()
    m = Matrix.from_list([[2, 1], [1, 1]], field)
    assert m.is_invertible()
    assert m @ m.inverse() == Matrix.identity(2, field)
    assert m.leading_minors() == [field.convert(2), field.convert(1)]


def test_scalar_field_rejects_floats_and_stray_variables():
    field = _field()
    with pytest.raises(ParseError):
        field.convert(0.5)
    assert field.parse("1/2 + I") == field.gaussian(Fraction(1, 2), 1)
    with pytest.raises(ParseError):
        field.parse("x1 + 1")


def test_extended_field_conjugation_and_evaluation():
    field = ScalarField(["x1"])
    a = field.parse("x1 + i/(1 + x1**2)")
    assert field.conjugate(a) == field.parse("x1 - i/(1 + x1**2)")
    assert not field.is_real(a)
    assert field.is_real(field.parse("x1**2"))
    assert field.derivative(field.parse("x1**3"), 0) == field.parse("3*x1**2")
