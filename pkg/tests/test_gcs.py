import random
from itertools import combinations

import pytest

from gencomplex.algebra.exterior import Form, exp_act
from gencomplex.algebra.grammar import normalize_table_notation, parse_multivector
from gencomplex.algebra.liealg import parse_algebra
from gencomplex.algebra.linalg import Matrix
from gencomplex.core.config import get_settings
from gencomplex.services import exceptions
from gencomplex.services.gcs import GCSService, GCStructure, vector_form
from gencomplex.workers.table_worker import load_entries

SIX = "(0,0,12,13,23,14+25)"


def _structure(model, text):
    structure, report = GCSService().structure_from_spinor(model, text)
    return structure, report


def test_type_three_and_type_two_structures_on_nilpotent_algebra():
    model = parse_algebra(SIX)
    _, report = _structure(model, "(1+i2)(4+i5)(3+i6)")
    assert report.pure and report.nondegenerate and report.closed
    assert report.integrable and report.integrable_courant
    assert report.type == 3
    assert report.is_structure
    assert report.dict()["is_structure"] is True

    _, report = _structure(model, "(1+i2)(4+i5)exp(i36)")
    assert report.closed
    assert report.type == 2
    assert report.is_structure


def test_real_spinor_is_pure_but_degenerate():
    model = parse_algebra("(0,0,0,0)")
    structure, report = _structure(model, "12")
    assert report.pure
    assert not report.nondegenerate
    assert report.witnesses["intersection_dim"] == "4"
    with pytest.raises(exceptions.DomainError):
        structure.jay


def test_non_integrable_spinor_reports_a_courant_witness(kt):
    _, report = _structure(kt, "exp(i(12+34))")
    assert report.nondegenerate
    assert not report.integrable
    assert report.integrable_courant is False
    assert "courant" in report.witnesses


def test_construction_errors(heisenberg, kt):
    with pytest.raises(exceptions.DomainError):
        GCStructure(heisenberg, heisenberg.parse("1"))
    with pytest.raises(exceptions.InputError):
        GCStructure(kt, Form.zero(4, kt.field))


def test_j_acts_on_the_spinor_by_im(torus6):
    structure, _ = _structure(torus6, "(1+i2)(3+i4)(5+i6)")
    i = torus6.field.imag_unit
    assert structure.jay_action(structure.rho) == structure.rho.scale(3 * i)
    assert structure.jay @ structure.jay == -Matrix.identity(12, torus6.field)


def test_u_decomposition_of_complex_torus(torus6):
    service = GCSService()
    structure, _ = _structure(torus6, "(1+i2)(3+i4)(5+i6)")
    report = service.uk_decomposition(structure, torus6.parse("1+135"))
    assert report.dims == {"-3": 1, "-2": 6, "-1": 15, "0": 20, "1": 15, "2": 6, "3": 1}
    assert report.eigenspaces_match
    assert report.mukai_orthogonal
    assert report.mukai_nondegenerate
    recombined = sum(
        (torus6.parse(text) for text in report.components.values()), Form.zero(6, torus6.field)
    )
    assert recombined == torus6.parse("1+135")


def test_canonical_spectral_sequence_on_flat_torus(torus6):
    service = GCSService()
    structure, _ = _structure(torus6, "exp(i(12+34+56))")
    report = service.canonical_e1(structure)
    assert report.total == 64
    assert report.twisted_total == 64
    assert report.degenerates
    assert report.euler_ok
    assert service.ddj_lemma(structure).holds


def test_del_split_reassembles_the_differential(kt):
    structure, _ = _structure(kt, "exp(i(13+24))")
    assert structure.is_structure
    for k in structure.levels:
        for vector in structure.u_basis(k):
            form = vector_form(4, kt.field, vector)
            assert structure.level_of(form) == k
            del_part, delbar_part = structure.del_split(form, k)
            assert del_part + delbar_part == kt.d(form)


def test_b_transform_preserves_structures():
    service = GCSService()
    t4 = parse_algebra("(0,0,0,0)")
    structure, _ = _structure(t4, "exp(i(12+34))")
    transformed = service.transform(structure, t4.parse("13"))
    assert transformed.rho == t4.parse("exp(13+i(12+34))")
    assert service.verify(transformed).is_structure


def test_b_transform_by_non_closed_form_needs_a_twist_shift(kt):
    service = GCSService()
    structure, _ = _structure(kt, "exp(i(13+24))")
    with pytest.raises(exceptions.NonClosedFormError):
        service.transform(structure, kt.parse("34"))
    shifted = service.transform(structure, kt.parse("34"), shift_twist=True)
    assert shifted.model.twist == -kt.d(kt.parse("34"))
    assert service.verify(shifted).integrable


def test_zero_deformation_is_trivial(torus6):
    service = GCSService()
    structure, _ = _structure(torus6, "(1+i2)(3+i4)(5+i6)")
    result = service.deform(structure, parse_multivector("0", 6))
    assert result.maurer_cartan
    assert result.structure.rho == structure.rho
    assert result.graph_matches_annihilator


def test_deformation_outside_lbar_is_rejected(torus6):
    structure, _ = _structure(torus6, "(1+i2)(3+i4)(5+i6)")
    with pytest.raises(exceptions.InputError):
        GCSService().deform(structure, parse_multivector("12", 6))


def test_iwasawa_bivector_deformation(iwasawa):
    service = GCSService()
    structure, report = _structure(iwasawa, "(1+i2)(3+i4)(5+i6)")
    assert report.is_structure and report.type == 3
    beta = parse_multivector("-1/4*(3-i4)(5-i6)", 6)
    result = service.deform(structure, beta)
    assert result.maurer_cartan
    assert result.graph_matches_annihilator
    # e^β⌟ρ is the negative of e^{−(e35−e46)−i(e45+e36)}(e1+ie2); both span the same line
    expected = iwasawa.parse("exp(-(35-46)-i(45+36))(1+i2)")
    assert result.structure.rho == expected.scale(-1)
    assert result.report.is_structure
    assert result.structure.type == 1


def test_non_commuting_holomorphic_bivector_fails_maurer_cartan(iwasawa):
    service = GCSService()
    structure, _ = _structure(iwasawa, "(1+i2)(3+i4)(5+i6)")
    beta = parse_multivector("(1-i2)(3-i4)", 6)
    result = service.deform(structure, beta)
    assert not result.maurer_cartan
    assert result.witness
    with pytest.raises(exceptions.MaurerCartanError) as caught:
        service.deform(structure, beta, strict=True)
    assert caught.value.witness == result.witness


def test_complex_beta_deformation_drops_the_type(iwasawa):
    structure, _ = _structure(iwasawa, "(1+i2)(3+i4)(5+i6)")
    result = GCSService().complex_beta_deformation(structure)
    assert result.maurer_cartan
    assert result.structure.type == structure.m - 2
    assert result.report.is_structure


def test_complex_beta_deformation_needs_a_complex_structure(torus6):
    structure, _ = _structure(torus6, "exp(i(12+34+56))")
    with pytest.raises(exceptions.DomainError):
        GCSService().complex_beta_deformation(structure)


def test_hyperkahler_torus_gives_generalized_kahler_pair():
    # ωI = 12+34, ωJ = 13-24, ωK = 14+23; B carries the same 1/2 as the symplectic part
    t4 = parse_algebra("(0,0,0,0)")
    first, _ = _structure(t4, "exp(1/2*(14+23)+1/2*i(12+34-13+24))")
    second, _ = _structure(t4, "exp(-1/2*(14+23)+1/2*i(12+34+13-24))")
    assert first.is_structure and second.is_structure
    report = GCSService().kahler_pair_report(first, second)
    assert report.commute
    assert report.metric_squares_to_identity
    assert report.positive_definite
    assert report.valid

    flipped_first, _ = _structure(t4, "exp(-1/2*(14+23)+1/2*i(12+34-13+24))")
    flipped_second, _ = _structure(t4, "exp(1/2*(14+23)+1/2*i(12+34+13-24))")
    flipped = GCSService().kahler_pair_check(flipped_first, flipped_second)
    assert flipped.commute and flipped.metric_squares_to_identity
    assert not flipped.positive_definite


def test_unnormalized_hyperkahler_family_does_not_commute():
    t4 = parse_algebra("(0,0,0,0)")
    first, _ = _structure(t4, "exp(14+23+1/2*i(12+34-13+24))")
    second, _ = _structure(t4, "exp(-14-23+1/2*i(12+34+13-24))")
    pair = GCSService().kahler_pair_check(first, second)
    assert not pair.commute
    assert not pair.valid
    with pytest.raises(exceptions.KahlerPairError):
        GCSService().kahler_pair_check(first, second, strict=True)


def test_kahler_torus_pair_and_orientation(torus6):
    service = GCSService()
    complex_structure, _ = _structure(torus6, "(1+i2)(3+i4)(5+i6)")
    symplectic, _ = _structure(torus6, "exp(i(12+34+56))")
    pair = service.kahler_pair_check(complex_structure, symplectic)
    assert pair.valid
    assert not pair.b_field
    assert pair.metric == [
        [torus6.field.one if r == c else torus6.field.zero for c in range(6)] for r in range(6)
    ]
    assert pair.j_plus_complex and pair.j_minus_complex

    opposite, _ = _structure(torus6, "exp(-i(12+34+56))")
    pair = service.kahler_pair_check(complex_structure, opposite)
    assert pair.commute and pair.metric_squares_to_identity
    assert not pair.positive_definite
    assert pair.failing_minor == 1
    with pytest.raises(exceptions.KahlerPairError) as caught:
        service.kahler_pair_check(complex_structure, opposite, strict=True)
    assert caught.value.minor_index == 1


def test_equal_structures_are_not_a_kahler_pair():
    t4 = parse_algebra("(0,0,0,0)")
    structure, _ = _structure(t4, "exp(i(12+34))")
    pair = GCSService().kahler_pair_check(structure, structure)
    assert pair.commute
    assert not pair.valid


def test_submanifolds_of_symplectic_torus():
    service = GCSService()
    t4 = parse_algebra("(0,0,0,0)")
    structure, _ = _structure(t4, "exp(i(12+34))")

    lagrangian = service.submanifold_check(structure, [[1, 0, 0, 0], [0, 0, 1, 0]])
    assert lagrangian.invariant
    assert lagrangian.lagrangian

    symplectic_plane = service.submanifold_check(structure, [[1, 0, 0, 0], [0, 1, 0, 0]])
    assert not symplectic_plane.invariant
    assert not symplectic_plane.coisotropic

    whole = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert not service.submanifold_check(structure, whole).invariant
    brane = service.submanifold_check(structure, whole, flux=t4.parse("13-24"))
    assert brane.coisotropic and not brane.lagrangian
    assert brane.transverse_complex
    assert brane.invariant


def test_complex_submanifolds_of_complex_torus():
    service = GCSService()
    t4 = parse_algebra("(0,0,0,0)")
    structure, _ = _structure(t4, "(1+i2)(3+i4)")
    assert service.submanifold_check(structure, [[1, 0, 0, 0], [0, 1, 0, 0]]).invariant
    assert not service.submanifold_check(structure, [[1, 0, 0, 0], [0, 0, 1, 0]]).invariant
    with pytest.raises(exceptions.DimensionMismatchError):
        service.submanifold_check(structure, [[1, 0, 0, 0], [2, 0, 0, 0]])


def _table_structures(data_dir):
    for entry in load_entries(data_dir / "table1"):
        model = parse_algebra(entry.algebra)
        for column, text in entry.cells.items():
            if text is None:
                continue
            spinor = normalize_table_notation(text)
            if column == "symplectic":
                spinor = f"exp(i({spinor}))"
            yield model, GCStructure(model, model.parse(spinor))


def test_table_structures_split_mukai_orthogonally(data_dir):
    service = GCSService()
    for model, structure in _table_structures(data_dir):
        report = service.uk_decomposition(structure)
        assert report.mukai_orthogonal, (model.tuple_string(), structure.rho)
        assert report.mukai_nondegenerate, (model.tuple_string(), structure.rho)


def test_integrability_routes_agree_on_perturbed_structures(data_dir):
    service = GCSService()
    rng = random.Random(get_settings().RANDOM_SEED)
    structures = list(_table_structures(data_dir))
    for _, structure in structures:
        report = service.verify(structure)
        assert report.integrable_courant == report.integrable
    masks = [(1 << a) | (1 << b) for a, b in combinations(range(6), 2)]
    perturbed = 0
    while perturbed < 100:
        model, structure = rng.choice(structures)
        field = model.field
        b_field = Form(6, field, {mask: field.convert(rng.randint(-2, 2)) for mask in rng.sample(masks, 3)})
        if not b_field or not model.d(b_field):
            continue
        report = service.verify(GCStructure(model, exp_act("b-wedge", b_field, structure.rho)))
        assert report.pure and report.nondegenerate
        assert report.integrable_courant == report.integrable
        perturbed += 1
