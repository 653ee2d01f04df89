import pytest

from gencomplex.algebra.exterior import Form
from gencomplex.algebra.liealg import parse_algebra
from gencomplex.services import exceptions
from gencomplex.services.symplectic import SymplecticService

KT_OMEGA = "13+24"
HXH_OMEGA = "14+23+56"
TORUS_OMEGA = "12+34+56"


def _data(model, omega):
    return SymplecticService().operators(model, omega)


@pytest.mark.parametrize(
    "fixture, omega",
    [("torus6", TORUS_OMEGA), ("kt", KT_OMEGA), ("hxh", HXH_OMEGA)],
)
def test_sl2_relations_hold_as_operator_identities(request, fixture, omega):
    model = request.getfixturevalue(fixture)
    report = SymplecticService().relation_report(_data(model, omega))
    failed = [name for name, ok in report.relations.items() if not ok]
    assert failed == []
    assert report.passes
    assert report.constants


def test_star_is_an_involution_and_delta_squares_to_zero(kt):
    data = _data(kt, KT_OMEGA)
    size = len(data.masks)
    assert (data.star @ data.star) == data.star.identity(size, data.field)
    assert (data.delta @ data.delta).is_zero()


def test_operator_errors(heisenberg, kt):
    service = SymplecticService()
    with pytest.raises(exceptions.DomainError):
        service.operators(heisenberg, "12")
    with pytest.raises(exceptions.NonClosedFormError):
        service.operators(kt, "34+12")
    with pytest.raises(exceptions.DegenerateFormError):
        service.operators(kt, "13")
    with pytest.raises(exceptions.InputError):
        service.operators(kt, "1+13+24")


def test_primitive_decomposition_on_the_four_torus():
    t4 = parse_algebra("(0,0,0,0)")
    data = _data(t4, "12+34")
    parts = data.primitive_decomposition(t4.parse("12"))
    assert parts[0] == t4.parse("1/2*12-1/2*34")
    assert parts[1] == t4.parse("#1/2")
    assert not data.apply(data.Lambda, parts[0])
    assert data.primitive_space(1).dim == 4
    assert data.primitive_space(2).dim == 5


def test_primitive_decomposition_needs_a_homogeneous_form():
    t4 = parse_algebra("(0,0,0,0)")
    data = _data(t4, "12+34")
    with pytest.raises(exceptions.InputError):
        data.primitive_decomposition(t4.parse("1+12"))
    assert data.primitive_decomposition(Form.zero(4, t4.field)) == {}


@pytest.mark.parametrize("fixture, omega", [("torus6", TORUS_OMEGA), ("kt", KT_OMEGA)])
def test_phi_map_intertwines_d_and_delta(request, fixture, omega):
    model = request.getfixturevalue(fixture)
    report = SymplecticService().phi_report(_data(model, omega))
    assert report.forms_checked == 2 ** model.n
    assert report.d_identity
    assert report.delta_identity
    assert report.failures == []
    assert report.e1_matches_betti


def test_harmonic_representatives_on_the_torus(torus6):
    report = SymplecticService().harmonic_report(_data(torus6, TORUS_OMEGA))
    assert report.harmonic_dims == report.betti == [1, 6, 15, 20, 15, 6, 1]
    assert report.all_harmonic and report.lefschetz and report.ddelta_lemma
    assert report.consistent


@pytest.mark.parametrize("fixture, omega", [("kt", KT_OMEGA), ("hxh", HXH_OMEGA)])
def test_harmonic_verdicts_agree_on_non_lefschetz_nilmanifolds(request, fixture, omega):
    model = request.getfixturevalue(fixture)
    report = SymplecticService().harmonic_report(_data(model, omega))
    assert not report.all_harmonic
    assert not report.lefschetz
    assert not report.ddelta_lemma
    assert report.consistent
    assert report.decompositions["1"]


def test_ddelta_lemma_fails_in_degree_three_on_kodaira_thurston(kt, torus6):
    service = SymplecticService()
    result = service.ddelta_lemma(_data(kt, KT_OMEGA))
    assert not result.holds
    assert "3" in result.failing_degrees
    third = {degree.label: degree for degree in result.degrees}["3"]
    assert third.image_ab == 0
    assert third.image_a_kernel_b >= 1
    assert third.witnesses
    report = service.harmonic_report(_data(kt, KT_OMEGA))
    assert "3" in report.lemma.failing_degrees

    flat = service.ddelta_lemma(_data(torus6, TORUS_OMEGA))
    assert flat.holds
    assert flat.failing_degrees == []
    assert [degree.label for degree in flat.degrees] == [str(k) for k in range(7)]
