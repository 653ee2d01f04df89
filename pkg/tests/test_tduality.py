import pytest

from gencomplex.algebra.exterior import exp_act
from gencomplex.algebra.liealg import parse_algebra
from gencomplex.services import exceptions
from gencomplex.services.gcs import GCStructure
from gencomplex.services.tduality import CircleBundleData, TDualityService


def _kt_pair(kt):
    return TDualityService().dualize(CircleBundleData(kt, 4))


def test_kodaira_thurston_dualizes_to_twisted_torus(kt):
    pair = _kt_pair(kt)
    report = TDualityService().dual_model_report(pair, [kt.parse("1"), kt.parse("4")])
    assert report.dual_algebra == "(0,0,0,0)"
    assert pair.dual.model.twist == pair.dual.model.parse("124")
    assert report.curvature == "12"
    assert not report.self_dual
    assert report.images["4"] == "#1"
    assert pair.dual.model.parse(report.images["1"]) == pair.dual.model.parse("-41")


def test_duality_identities_on_kodaira_thurston(kt):
    report = TDualityService().duality_verify(_kt_pair(kt))
    assert report.invariant_forms == 16
    assert report.invariant_vectors == 8
    assert report.d_identity
    assert report.clifford_identity
    assert report.bracket_identity
    assert report.orthogonal
    assert report.mukai_identity
    assert report.tau_squared
    assert report.passes
    assert report.witnesses == {}


def test_su2_is_self_dual_along_a_circle(su2):
    service = TDualityService()
    pair = service.dualize(CircleBundleData(su2, 3))
    assert pair.is_self_dual
    assert service.duality_verify(pair).passes


def test_flat_torus_is_self_dual():
    t4 = parse_algebra("(0,0,0,0)")
    service = TDualityService()
    pair = service.dualize(CircleBundleData(t4, 1))
    assert pair.is_self_dual
    assert service.duality_verify(pair).passes


def test_symplectic_structure_transports_to_type_one(kt):
    service = TDualityService()
    pair = _kt_pair(kt)
    structure = GCStructure(kt, kt.parse("exp(i(13+24))"))
    transported, report = service.transport_gcs(pair, structure)
    assert report.passes
    assert transported.type == 1
    assert report.type_change == report.predicted_type_change == 1
    assert report.dual.integrable
    assert report.u_correspondence and all(report.u_correspondence.values())
    assert report.lemma_source == report.lemma_dual
    assert pair.reversed().tau(transported.rho) == -structure.rho


def test_transport_rejects_structures_from_another_model(kt, torus6):
    pair = _kt_pair(kt)
    with pytest.raises(exceptions.InputError):
        TDualityService().transport_gcs(pair, GCStructure(torus6, torus6.parse("exp(i(12+34+56))")))


def test_tau_needs_invariant_forms():
    model = parse_algebra("(0,0,12,13)")
    pair = TDualityService().dualize(CircleBundleData(model, 3))
    with pytest.raises(exceptions.DomainError):
        pair.tau(model.parse("4"))


def test_b_field_image_matches_tau_of_the_transform(kt):
    service = TDualityService()
    pair = _kt_pair(kt)
    rho = kt.parse("exp(i(13+24))")
    for text in ("13", "42", "13+42"):
        b_field = kt.parse(text)
        expected = pair.tau(exp_act("b-wedge", b_field, rho))
        assert service.b_field_image(pair, b_field, rho) == expected


def test_gauge_shift_moves_the_basic_twist(kt):
    service = TDualityService()
    pair = _kt_pair(kt)
    shifted = service.gauge_shift(pair, kt.parse("3"))
    assert shifted.source.model.twist == kt.parse("-123")
    assert shifted.dual.model.twist == shifted.dual.model.parse("124-123")
    assert service.duality_verify(shifted).passes
    with pytest.raises(exceptions.InputError):
        service.gauge_shift(pair, kt.parse("4"))


def test_circle_bundle_input_errors(kt):
    with pytest.raises(exceptions.DimensionMismatchError):
        CircleBundleData(kt, 5)
    with pytest.raises(exceptions.InputError):
        CircleBundleData(kt, 4, connection=kt.parse("2*4"))


def test_torus_dualization_order():
    service = TDualityService()
    t4 = parse_algebra("(0,0,0,0)")
    torus = service.dualize_torus(t4, [3, 4])
    assert torus.fibers == (3, 4)
    assert torus.dual_model == t4
    assert service.torus_order_independent(t4, [3, 4])
    with pytest.raises(exceptions.DomainError) as caught:
        service.dualize_torus(parse_algebra("(0,0,0,0)", twist="134"), [3, 4])
    assert caught.value.witness in ("1", "-1")
    assert "e3 and e4" in str(caught.value)
    with pytest.raises(exceptions.InputError):
        service.dualize_torus(t4, [3, 3])
