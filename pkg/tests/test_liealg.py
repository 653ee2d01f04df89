import pytest

from gencomplex.algebra.exterior import Form, Multivector
from gencomplex.algebra.liealg import (
    filtration_report,
    is_subalgebra,
    model_from_dict,
    model_to_dict,
    parse_algebra,
    resolve_model,
    restrict_to_subalgebra,
)
from gencomplex.algebra.scalars import gaussian_field
from gencomplex.services.exceptions import (
    DimensionMismatchError,
    DomainError,
    JacobiError,
    NonClosedFormError,
    ParseError,
)


def _tangent(n, *vectors):
    return [Multivector.vector(n, gaussian_field(), vector) for vector in vectors]


def test_parse_heisenberg_and_torus(heisenberg, torus6):
    assert heisenberg.n == 3
    assert heisenberg.differentials[2] == heisenberg.parse("12")
    assert heisenberg.tuple_string() == "(0,0,12)"
    assert not any(torus6.differentials)
    assert all(not torus6.d(torus6.generator(k)) for k in range(1, 7))


def test_parse_eight_dimensional_example():
    model = parse_algebra("(0,0,12,13,14,15,16,36-45-27)")
    assert model.n == 8
    assert model.differentials[7] == model.parse("36-45-27")


def test_jacobi_failure_names_the_generator():
    with pytest.raises(JacobiError) as excinfo:
        parse_algebra("(0,0,12,13,24)")
    assert excinfo.value.generator == 5
    assert excinfo.value.witness


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_algebra("0,0,12")
    with pytest.raises(ParseError):
        parse_algebra("(0,0,14)")
    with pytest.raises(NonClosedFormError):
        parse_algebra("(0,0,12,0,0)", twist="345")


def test_differential_is_a_derivation(heisenberg):
    assert heisenberg.d(heisenberg.parse("3")) == heisenberg.parse("12")
    assert not heisenberg.d(heisenberg.parse("13"))
    assert not heisenberg.d(heisenberg.parse("23"))
    for text in ("3", "13", "23", "123"):
        assert not heisenberg.d(heisenberg.d(heisenberg.parse(text)))


def test_twisted_differential_adds_h(su2):
    one = Form.one(3, su2.field)
    assert su2.d_h(one) == su2.parse("123")
    assert not su2.d(su2.parse("123"))


def test_structure_constant_files(su2, su2_su2):
    assert su2.n == 3
    assert su2.has_twist
    assert su2_su2.n == 6
    rebuilt = model_from_dict(model_to_dict(su2))
    assert rebuilt == su2


def test_resolve_model_accepts_tuples_and_files(data_dir):
    assert resolve_model("(0,0,12)", twist="0").n == 3
    model = resolve_model(str(data_dir / "models" / "su2.json"))
    assert model.name == "su2"


def test_lie_bracket_from_structure_equations(su2, heisenberg):
    field = su2.field
    assert su2.lie_bracket([1, 0, 0], [0, 1, 0]) == {3: field.convert(-1)}
    assert is_subalgebra(heisenberg, _tangent(3, [1, 0, 0], [0, 0, 1]))
    assert not is_subalgebra(heisenberg, _tangent(3, [1, 0, 0], [0, 1, 0]))


def test_filtration_of_six_dimensional_algebra():
    model = parse_algebra("(0,0,0,12,13,14+35)")
    report = filtration_report(model)
    assert report.dims == (0, 3, 5, 6)
    assert report.nilpotency_index == 3
    assert report.quotient_dims == (3, 2, 1)
    assert report.excluded_types == ()


def test_filtration_of_maximal_index_algebra_excludes_high_types():
    model = parse_algebra("(0,0,12,13,14,15,16,36-45-27)")
    report = filtration_report(model)
    assert report.nilpotency_index == 7
    assert report.exclusion_start == 1
    assert report.excluded_types == (2, 3, 4)
    assert report.generator_degrees == (1, 1, 2, 3, 4, 5, 6, 7)


def test_filtration_of_torus(torus6):
    report = filtration_report(torus6)
    assert report.nilpotency_index == 1
    assert report.excluded_types == ()
    assert report.to_report("T6").dims == [0, 6]


def test_filtration_rejects_non_nilpotent(su2):
    with pytest.raises(DomainError):
        filtration_report(su2)


def test_restriction_to_subspaces(hxh):
    restricted = restrict_to_subalgebra(hxh, _tangent(6, [1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]), hxh.parse("25"))
    assert restricted == Form.monomial(2, hxh.field, [1, 2])

    t4 = parse_algebra("(0,0,0,0)")
    assert not restrict_to_subalgebra(t4, _tangent(4, [0, 0, 1, 0], [0, 0, 0, 1]), t4.parse("12"))
    restricted = restrict_to_subalgebra(t4, _tangent(4, [1, 0, 0, 0], [0, 1, 0, 0]), t4.parse("12+34"))
    assert restricted == Form.monomial(2, t4.field, [1, 2])


def test_restriction_rejects_dependent_tangent_sets(hxh):
    with pytest.raises(DimensionMismatchError):
        restrict_to_subalgebra(hxh, _tangent(6, [1, 0, 0, 0, 0, 0], [2, 0, 0, 0, 0, 0]), hxh.parse("12"))
