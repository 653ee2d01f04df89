import pytest

from gencomplex.algebra.cdga import CDGA, hirsch_extend, load_cdga, sphere_bundle_model
from gencomplex.algebra.liealg import parse_algebra
from gencomplex.services import exceptions
from gencomplex.services.cohomology import CohomologyService
from gencomplex.services.minimal import MinimalModelService


def _sphere():
    return CDGA.from_dict({"name": "S2", "basis": {"0": ["1"], "2": ["x"]}})


def _integral(algebra, *labels):
    degree, value = algebra.basis_vector(labels[0])
    for label in labels[1:]:
        k, vector = algebra.basis_vector(label)
        value = algebra.multiply(degree, value, k, vector)
        degree += k
    return algebra.integrate(degree, value)


def test_heisenberg_is_its_own_minimal_model(heisenberg):
    pm = MinimalModelService().minimal_model(heisenberg, 3)
    assert [g.label for g in pm.generators] == ["z1_1", "z1_2", "b1_1"]
    assert pm.census == {1: 3}
    assert pm.verified_through == 3
    assert pm.chain_map and pm.minimal
    report = pm.to_report()
    assert report.generators[2].kind == "killing"
    assert report.generators[2].differential == "z1_1.z1_2"
    assert report.caveats


def test_even_sphere_model():
    pm = MinimalModelService().minimal_model(_sphere(), 5)
    assert pm.census == {2: 1, 3: 1}
    killing = pm.to_report().generators[1]
    assert killing.label == "b3_1"
    assert killing.differential == "z2_1^2"
    assert pm.verified_through == 5
    assert pm.minimal
    assert pm.to_report().caveats == []


def test_torus_model_is_free_and_formal():
    service = MinimalModelService()
    pm = service.minimal_model(parse_algebra("(0,0)"), 2)
    assert pm.census == {1: 2}
    assert all(g.kind == "closed" for g in pm.generators)
    result = service.s_formality_check(pm)
    assert result.verdict == "formal-certified"
    assert result.witness is None


def test_heisenberg_is_nonformal(heisenberg):
    service = MinimalModelService()
    pm = service.minimal_model(heisenberg, 3)
    result = service.s_formality_check(pm)
    assert result.verdict == "nonformal"
    report = service.formality_report(pm, result)
    assert report.witness.verdict == "nonvanishing"


def test_minimal_model_is_idempotent(heisenberg):
    service = MinimalModelService()
    first = service.minimal_model(heisenberg, 3)
    second = service.minimal_model(first.algebra, 3)
    assert second.census == first.census


def test_minimal_model_input_errors(heisenberg):
    service = MinimalModelService()
    with pytest.raises(exceptions.InputError):
        service.minimal_model(heisenberg, 0)
    with pytest.raises(exceptions.DomainError):
        service.minimal_model(_sphere(), 1)
    pm = service.minimal_model(heisenberg, 2)
    with pytest.raises(exceptions.InputError):
        service.s_formality_check(pm, 3)


def test_hirsch_extension_checks_closed_targets():
    base = CDGA.from_dict(
        {"name": "pair", "basis": {"0": ["1"], "2": ["x"], "3": ["y"]}, "d": {"x": {"y": 1}}}
    )
    with pytest.raises(exceptions.NonClosedFormError):
        hirsch_extend(base, [("u", 1, {"x": 1})])
    with pytest.raises(exceptions.InputError):
        hirsch_extend(base, [("v", 0, {})])
    with pytest.raises(exceptions.InputError):
        hirsch_extend(_sphere(), [("w", 2, {})])


def test_free_factor_grows_cohomology():
    extended = hirsch_extend(_sphere(), [("u", 1, {})])
    assert CohomologyService().cohomology(extended).betti == [1, 1, 1, 1]


def test_sphere_bundle_model(data_dir):
    algebra = load_cdga(data_dir / "cdga" / "sharp.json")
    report = MinimalModelService().cdga_report(algebra)
    assert report.betti == [1, 0, 2, 0, 0, 2, 0, 1]
    assert report.orientation == "p.u"
    built = sphere_bundle_model(1)
    assert built.dimensions == algebra.dimensions
    assert CohomologyService().cohomology(built).betti == report.betti


def test_sphere_bundle_massey_product_pairs_with_v1(data_dir):
    algebra = load_cdga(data_dir / "cdga" / "sharp.json")
    classes = [algebra.basis_vector(label) for label in ("v1", "v2", "v2")]
    pairing = MinimalModelService().massey_pairing(algebra, classes, algebra.basis_vector("v1"))
    assert pairing.massey.verdict == "nonvanishing"
    assert pairing.integral in ("1", "-1")
    assert pairing.choice_independent


def test_sphere_bundle_is_nonformal(data_dir):
    service = MinimalModelService()
    pm = service.minimal_model(load_cdga(data_dir / "cdga" / "sharp.json"), 2)
    assert pm.census == {2: 2}
    assert service.s_formality_check(pm).verdict == "nonformal"


def test_second_seven_manifold_model(data_dir):
    algebra = load_cdga(data_dir / "cdga" / "second7.json")
    assert CohomologyService().cohomology(algebra).betti == [1, 0, 4, 1, 1, 4, 0, 1]
    classes = [algebra.basis_vector(label) for label in ("a1", "a2", "a3")]
    pairing = MinimalModelService().massey_pairing(algebra, classes, algebra.basis_vector("w"))
    assert pairing.massey.verdict == "nonvanishing"
    assert pairing.massey.representative == "2*W.t"
    assert pairing.integral == "2"
    assert pairing.choice_independent
    with pytest.raises(exceptions.DimensionMismatchError):
        MinimalModelService().massey_pairing(algebra, classes, algebra.basis_vector("W"))


def test_second_seven_manifold_sign_data(data_dir):
    algebra = load_cdga(data_dir / "cdga" / "second7.json")
    field = algebra.field
    # φ = −θ∧w is the element −w.t; ∫φ·x·y = −∫ x·y·w.t
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            value = -_integral(algebra, f"a{i}", f"a{j}", "w", "t")
            assert value == (field.convert(-2) if i == j else field.zero)
    assert -_integral(algebra, "w", "w", "w", "t") == field.convert(-2)
