from fractions import Fraction

import pytest

from gencomplex.services import exceptions
from gencomplex.services.blowup import DROPS_BY_ONE, DROPS_BY_TWO, NO_GROWTH, UNCHANGED, BlowupService


def _load(data_dir, name):
    service = BlowupService()
    data = service.load(data_dir / "blowup" / f"{name}.json")
    return service, data, service.build_blowup_ring(data)


def test_heisenberg_square_blown_up_along_a_torus(data_dir):
    service, data, ring = _load(data_dir, "gil")
    assert (data.n, data.d, data.k) == (3, 1, 2)
    report = service.ring_report(ring)
    assert report.blowup_betti == report.expected_betti == [1, 4, 9, 12, 9, 4, 1]
    assert report.relation_holds
    assert report.euler_blowup == 0
    assert report.euler_additive


def test_gil_conditions_predict_the_kernel_drop(data_dir):
    service, data, _ = _load(data_dir, "gil")
    conditions = service.blowup_conditions(data)
    assert conditions.kernel_restricts_nonzero
    assert conditions.kernel_pair_restricts_nonzero
    assert conditions.equivalences_hold
    assert conditions.predictions == {0: NO_GROWTH, 1: DROPS_BY_TWO, 2: DROPS_BY_ONE}
    report = service.conditions_report(data, conditions)
    assert report.surface
    assert report.kernel_witness is not None
    assert len(report.kernel_pair_witness) == 2


def test_gil_blowup_is_lefschetz(data_dir):
    service, _, ring = _load(data_dir, "gil")
    result = service.blowup_lefschetz(ring, samples=[Fraction(1, 8)])
    assert result.ambient == [0, 2, 1]
    assert result.generic == [0, 0, 0]
    assert result.passes
    assert all(result.prediction_holds(level) for level in (0, 1, 2))
    report = service.lefschetz_report(ring, result)
    assert not report.ambient_passes
    assert report.generic_passes
    assert report.levels[1].predicted == DROPS_BY_TWO
    assert report.samples == ["1/8"]


def test_projective_plane_blown_up_at_a_point(data_dir):
    service, data, ring = _load(data_dir, "cp2_point")
    assert ring.dimensions == [1, 0, 2, 0, 1]
    assert service.euler_characteristic(ring) == (4, 4)
    field = ring.field
    half = field.domain.quo(field.one, field.convert(2))
    assert ring.multiply(2, ring.a, 2, ring.a) == ring.f_vector(4, {0: -half})
    conditions = service.blowup_conditions(data)
    assert not conditions.kernel_restricts_nonzero
    assert not conditions.thom_outside_image
    assert conditions.predictions == {0: UNCHANGED, 1: UNCHANGED}
    result = service.blowup_lefschetz(ring, samples=[Fraction(1, 4)])
    assert result.generic == [0, 0]
    assert result.passes


def test_torus_blown_up_along_a_torus_keeps_lefschetz(data_dir):
    service, data, ring = _load(data_dir, "t6_torus")
    assert ring.dimensions == [1, 6, 16, 22, 16, 6, 1]
    conditions = service.blowup_conditions(data)
    assert not conditions.kernel_restricts_nonzero
    assert not conditions.kernel_pair_restricts_nonzero
    assert not conditions.thom_outside_image
    assert conditions.equivalences_hold
    result = service.blowup_lefschetz(ring, samples=[], exact=True)
    assert result.ambient == [0, 0, 0]
    assert result.generic == [0, 0, 0]


def test_massey_product_survives_the_blowup(data_dir):
    service, _, ring = _load(data_dir, "gil")
    problem, image, survives = service.massey_survives(ring, ["1", "2", "1"])
    assert problem.nonvanishing
    assert image
    assert survives
    report = service.massey_report(ring, ["1", "2", "1"])
    assert report.survives
    assert report.massey.verdict == "nonvanishing"


def test_blowup_input_errors():
    service = BlowupService()
    t4 = {
        "ambient": {"algebra": "(0,0,0,0)"},
        "submanifold": {"algebra": "(0,0)"},
        "tangent": [[1, 0, 0, 0], [0, 1, 0, 0]],
        "omega": "12+34",
    }
    with pytest.raises(exceptions.DomainError):
        service.build_blowup_ring(service.from_dict(t4))
    with pytest.raises(exceptions.InputError):
        service.from_dict({**t4, "omega": "1"})
    with pytest.raises(exceptions.DimensionMismatchError):
        service.from_dict({**t4, "tangent": [[1, 0, 0, 0]]})
    with pytest.raises(exceptions.ParseError):
        service.from_dict({"ambient": {"algebra": "(0,0,0,0)"}})

    t6 = {
        "ambient": {"algebra": "(0,0,0,0,0,0)"},
        "submanifold": {"algebra": "(0,0)"},
        "tangent": [[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]],
        "omega": "12+34+56",
    }
    with pytest.raises(exceptions.DegenerateFormError):
        service.from_dict(t6)


def test_blowup_lefschetz_sample_errors(data_dir):
    service, _, ring = _load(data_dir, "cp2_point")
    with pytest.raises(exceptions.InputError):
        service.blowup_lefschetz(ring, samples=[], exact=False)
    with pytest.raises(exceptions.InputError):
        service.blowup_lefschetz(ring, samples=[Fraction(-1, 2)])
