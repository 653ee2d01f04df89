import pytest

from gencomplex.algebra.linalg import Matrix
from gencomplex.algebra.liealg import parse_algebra
from gencomplex.services import exceptions
from gencomplex.services.cohomology import CohomologyService, degree_grading


def _service():
    return CohomologyService()


def _class_span(ring, model, texts):
    ce = ring.dga
    vectors = [ce.from_form(model.parse(text)) for text in texts]
    degree = vectors[0][0]
    return ring.class_span(degree, [vector for _, vector in vectors])


def test_betti_numbers_of_small_nilmanifolds(heisenberg, kt, hxh, iwasawa, torus6):
    service = _service()
    assert service.cohomology(heisenberg).betti == [1, 2, 2, 1]
    assert service.cohomology(kt).betti == [1, 3, 4, 3, 1]
    assert service.cohomology(hxh).betti == [1, 4, 8, 10, 8, 4, 1]
    assert service.cohomology(iwasawa).betti == [1, 4, 8, 10, 8, 4, 1]
    assert service.cohomology(torus6).betti == [1, 6, 15, 20, 15, 6, 1]


def test_nilmanifold_euler_characteristic_vanishes(hxh):
    ring = _service().cohomology(hxh)
    assert ring.euler_characteristic == 0
    assert ring.total_dimension == 36


def test_betti_report_lists_representatives(heisenberg):
    report = _service().betti_report(heisenberg)
    assert report.algebra == "(0,0,12)"
    assert report.betti == [1, 2, 2, 1]
    assert report.representatives["1"] == ["1", "2"]
    assert len(report.representatives["2"]) == 2


def test_cup_products_do_not_depend_on_representatives(kt, heisenberg):
    service = _service()
    assert service.cohomology(kt).check_representative_independence()
    assert service.cohomology(heisenberg).check_representative_independence()


def test_exactness_and_primitives(heisenberg):
    ring = _service().cohomology(heisenberg)
    _, e12 = ring.dga.from_form(heisenberg.parse("12"))
    assert ring.is_exact(2, e12)
    primitive = ring.primitive(2, e12)
    assert heisenberg.d(ring.dga.to_form(1, primitive)) == heisenberg.parse("12")
    _, e13 = ring.dga.from_form(heisenberg.parse("13"))
    assert not ring.is_exact(2, e13)
    with pytest.raises(exceptions.InputError):
        ring.class_coordinates(1, ring.dga.from_form(heisenberg.parse("3"))[1])


def test_twisted_cohomology_of_compact_semisimple_pairs(su2, su2_su2):
    service = _service()
    assert service.twisted_dimensions(su2) == (0, 0)
    report = service.twisted_cohomology(su2_su2)
    assert (report.even, report.odd) == (0, 0)
    assert report.agree
    assert all(dim == 0 for dim in report.h_cohomology.values())


def test_twisted_cohomology_agrees_with_untwisted_when_h_vanishes(kt):
    report = _service().twisted_cohomology(kt)
    assert (report.even, report.odd) == (6, 6)
    assert report.agree


def test_lefschetz_fails_on_product_of_heisenberg_manifolds(hxh):
    service = _service()
    result = service.lefschetz(hxh, hxh.parse("14+23+56"))
    assert not result.passes
    assert [level.kernel.dim for level in result.levels] == [0, 2, 1]
    ring = result.ring
    assert ring.class_span(2, result.kernel_vectors(2)) == _class_span(ring, hxh, ["25"])
    assert ring.class_span(1, result.kernel_vectors(1)) == ring.class_span(
        1, [ring.dga.from_form(hxh.parse(text))[1] for text in ("2", "5")]
    )
    report = result.to_report(hxh.tuple_string())
    assert report.levels[2].kernel_dim == 1
    assert report.levels[2].power == 1


def test_lefschetz_holds_on_the_torus(torus6):
    result = _service().lefschetz(torus6, torus6.parse("12+34+56"))
    assert result.passes
    assert all(level.injective for level in result.levels)
    assert [level.level for level in result.levels] == [0, 1, 2]
    assert [level.rank for level in result.levels] == [1, 6, 15]


def test_lefschetz_input_errors(heisenberg, kt):
    service = _service()
    with pytest.raises(exceptions.DomainError):
        service.lefschetz(heisenberg, heisenberg.parse("13"))
    with pytest.raises(exceptions.NonClosedFormError):
        service.lefschetz(kt, kt.parse("34+12"))
    with pytest.raises(exceptions.DegenerateFormError):
        service.lefschetz(kt, kt.parse("13"))


def test_lemma_check_on_de_rham_differential(heisenberg, torus6):
    service = _service()
    d = heisenberg.d_h_matrix()
    result = service.lemma_check(d, d)
    assert not result.holds
    assert result.witnesses
    flat = torus6.d_h_matrix()
    assert service.lemma_check(flat, flat).holds


def test_lemma_check_reports_each_failing_degree(heisenberg):
    service = _service()
    d = heisenberg.d_h_matrix()
    result = service.lemma_check(d, d, grading=degree_grading(3))
    assert [degree.label for degree in result.degrees] == ["0", "1", "2", "3"]
    assert result.failing_degrees == ["2"]
    second = {degree.label: degree for degree in result.degrees}["2"]
    assert (second.image_a_kernel_b, second.image_ab) == (1, 0)
    assert len(second.witnesses) == 2
    report = result.to_report("(0,0,12)")
    assert report.failing_degrees == ["2"]
    assert report.degrees[2].witnesses
    with pytest.raises(exceptions.DimensionMismatchError):
        service.lemma_check(d, d, grading={"all": [0, 1]})


def test_lemma_check_rejects_non_anticommuting_operators():
    field = parse_algebra("(0,0)").field
    identity = Matrix.identity(2, field)
    with pytest.raises(exceptions.AnticommutationError):
        _service().lemma_check(identity, identity)


def test_triple_massey_product_on_heisenberg(heisenberg):
    problem = _service().massey_forms(heisenberg, [heisenberg.parse(t) for t in ("1", "2", "1")])
    assert problem.degree == 2
    assert problem.nonvanishing
    assert problem.indeterminacy.dim == 0
    assert problem.ring.dga.to_form(2, problem.representative) == heisenberg.parse("-2*13")
    report = problem.to_report()
    assert report.verdict == "nonvanishing"
    assert report.representative == "-#2*13"


def test_triple_massey_product_vanishes_on_the_torus():
    torus = parse_algebra("(0,0,0)")
    problem = _service().massey_forms(torus, [torus.parse(t) for t in ("1", "1", "1")])
    assert problem.verdict == "vanishing"


def test_massey_product_undefined_when_products_are_not_exact(kt):
    with pytest.raises(exceptions.MasseyUndefinedError):
        _service().massey_forms(kt, [kt.parse(t) for t in ("1", "3", "2")])


def test_massey_product_rejects_wrong_arity_and_open_inputs(heisenberg):
    service = _service()
    with pytest.raises(exceptions.InputError):
        service.massey_forms(heisenberg, [heisenberg.parse(t) for t in ("1", "2")])
    with pytest.raises(exceptions.InputError):
        service.massey_forms(heisenberg, [heisenberg.parse(t) for t in ("1", "3", "1")])


def test_symplectic_existence_verdicts(kt, hxh):
    service = _service()
    assert service.symplectic_existence(kt).verdict == "exists"
    result = service.symplectic_existence(hxh)
    assert result.verdict == "exists"
    assert result.witness.power(3)
    no_symplectic = parse_algebra("(0,0,0,0,0,12+34)")
    report = service.symplectic_existence_report(no_symplectic)
    assert report.verdict == "impossible"
    assert report.certificate_zero
    with pytest.raises(exceptions.DomainError):
        service.symplectic_existence(parse_algebra("(0,0,12)"))


def test_eight_dimensional_algebra_has_no_symplectic_form():
    model = parse_algebra("(0,0,12,13,14,15,16,36-45-27)")
    service = _service()
    ring = service.cohomology(model)
    assert ring.betti[2] == 3
    assert ring.class_span(2, ring.degrees[2].representatives) == _class_span(
        ring, model, ["23", "34-25", "17"]
    )
    report = service.symplectic_existence_report(model)
    assert report.certificate_zero
    assert report.verdict == "impossible"
