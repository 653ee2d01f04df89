import random
from fractions import Fraction

import pytest

from gencomplex.algebra.exterior import Form, GenVector, Multivector, clifford_act, exp_act
from gencomplex.algebra.grammar import (
    format_form,
    normalize_table_notation,
    parse_form,
    parse_multivector,
    split_tuple,
)
from gencomplex.algebra.scalars import gaussian_field
from gencomplex.services.exceptions import DimensionMismatchError, InputError, ParseError


def _f(text, n=4):
    return parse_form(text, n)


def _random_form(rng, n):
    field = gaussian_field()
    form = Form.zero(n, field)
    for mask in rng.sample(range(1 << n), 4):
        form = form + Form(n, field, {mask: field.gaussian(rng.randint(-2, 2), rng.randint(-2, 2))})
    return form


def _random_genvector(rng, n):
    field = gaussian_field()
    return GenVector.from_parts(
        n,
        field,
        vector=[field.gaussian(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(n)],
        covector=[field.gaussian(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(n)],
    )


def test_wedge_basics():
    assert not _f("1").wedge(_f("1"))
    assert _f("1") ^ _f("2") == _f("12")
    assert _f("2") ^ _f("1") == _f("-12")
    assert _f("#1+i12", 2) ^ _f("#1-i12", 2) == Form.one(2, gaussian_field())


def test_wedge_rejects_different_generator_counts():
    with pytest.raises(DimensionMismatchError):
        _f("1", 2).wedge(_f("1", 3))


def test_contraction_conventions():
    d1 = parse_multivector("1", 2)
    d2 = parse_multivector("2", 2)
    assert d1.contract(_f("12", 2)) == _f("2", 2)
    assert not d2.contract(_f("1", 2))
    # nested contraction: ∂2 ⌟ (∂1 ⌟ e12)
    assert parse_multivector("12", 2).contract(_f("12", 2)) == Form.one(2, gaussian_field())


def test_contraction_is_a_derivation_in_degree_one():
    rng = random.Random(5)
    for _ in range(20):
        a = _random_form(rng, 4).degree_part(2)
        b = _random_form(rng, 4)
        x = Multivector.vector(4, gaussian_field(), [rng.randint(-2, 2) for _ in range(4)])
        left = x.contract(a ^ b)
        right = (x.contract(a) ^ b) + (a ^ x.contract(b))
        assert left == right


def test_clifford_action_examples():
    field = gaussian_field()
    v = GenVector.from_parts(2, field, vector={1: 1}, covector={1: 1})
    once = clifford_act(v, Form.one(2, field))
    assert once == _f("1", 2)
    assert clifford_act(v, once) == Form.one(2, field)
    assert v.pairing(v) == field.one

    w = GenVector.from_parts(2, field, vector={1: 1}, covector={2: 1})
    assert w.act(_f("1", 2)) == _f("#1-12", 2)

    isotropic = GenVector.from_parts(2, field, covector={1: 1})
    assert not isotropic.act(isotropic.act(_f("2+12", 2)))


def test_clifford_relation_on_random_samples():
    rng = random.Random(13)
    for _ in range(30):
        v = _random_genvector(rng, 3)
        a = _random_form(rng, 3)
        assert v.act(v.act(a)) == a.scale(v.pairing(v))


def test_mukai_pairing_examples():
    field = gaussian_field()
    omega = _f("12", 2)
    i = field.imag_unit
    assert omega.scale(i).exp().mukai(omega.scale(-i).exp()) == _f("-2*i12", 2)
    assert not Form.one(2, field).mukai(Form.one(2, field))
    assert _f("1+i2", 2).mukai(_f("1-i2", 2)) == _f("-2*i12", 2)


def test_reversal_is_an_antiautomorphism():
    rng = random.Random(17)
    for _ in range(20):
        a = _random_form(rng, 4)
        assert a.reversal().reversal() == a
        for p in range(5):
            for q in range(5):
                x, y = a.degree_part(p), _random_form(rng, 4).degree_part(q)
                assert (x ^ y).reversal() == y.reversal() ^ x.reversal()


def test_exponential_actions():
    field = gaussian_field()
    a = _f("34")
    assert exp_act("b-wedge", Form.zero(4, field), a) == a
    assert exp_act("b-wedge", _f("12"), a) == _f("34+1234")

    beta = parse_multivector("12", 4)
    assert exp_act("beta-contract", beta, _f("1234")) == _f("1234+34")

    with pytest.raises(InputError):
        exp_act("b-wedge", _f("1+12"), a)
    with pytest.raises(InputError):
        exp_act("rotation", _f("12"), a)


def test_bivector_clifford_matches_beta_contraction():
    beta = parse_multivector("12-34", 4)
    rho = _f("1234+13")
    assert exp_act("bivector-clifford", beta, rho) == exp_act("beta-contract", beta, rho)


def test_exp_terminates_on_symplectic_form():
    omega = parse_form("12+34+56", 6)
    expected = parse_form("#1+12+34+56+1234+1256+3456+123456", 6)
    assert omega.exp() == expected
    assert omega.power(3) == parse_form("6*123456", 6)


def test_grammar_reads_table_shorthand():
    field = gaussian_field()
    assert parse_form("2*34", 4) == Form.monomial(4, field, [3, 4], 2)
    assert parse_form("i*34", 4) == Form.monomial(4, field, [3, 4], field.imag_unit)
    assert parse_form("(1+i2)(3+i4)", 4) == _f("13+i14+i23-24")
    assert parse_form("1/2*12", 4) == Form.monomial(4, field, [1, 2], field.convert(Fraction(1, 2)))
    assert parse_form("[10]", 10) == Form.generator(10, field, 10)
    assert not parse_form("0", 3)


def test_grammar_errors_carry_positions():
    with pytest.raises(ParseError) as excinfo:
        parse_form("12+5", 4)
    assert excinfo.value.position == 3
    with pytest.raises(ParseError):
        parse_form("exp(#1+12)", 4)
    with pytest.raises(ParseError):
        parse_form("", 4)


def test_printed_forms_reparse():
    form = parse_form("exp(i(12+34))+1/2*13-(#2+i)*24", 4)
    assert parse_form(format_form(form), 4) == form


def test_table_notation_is_normalized():
    assert normalize_table_notation("exp i(36-45)") == "exp(i(36-45))"
    assert normalize_table_notation("exp(3+i1)6") == "exp((3+i1)6)"
    assert normalize_table_notation("2×34") == "2*34"
    assert split_tuple("(0,0,12,13-24)") == ["0", "0", "12", "13-24"]
    with pytest.raises(ParseError):
        split_tuple("0,0,12")
