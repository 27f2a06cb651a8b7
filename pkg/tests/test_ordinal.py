import pytest
from hypothesis import given, settings, strategies as hst

from simgame.ordinal import (OMEGA, ONE, ZERO, Ordinal, OrdinalError, add, cmp, from_nat, nat_sum,
                             omega_power, parse, render, to_nat)

from ordinals import ordinals, small_ordinals, vec_add, vec_cmp, vec_nat_sum

W = OMEGA


def test_cmp_examples():
    assert cmp(ZERO, ONE) == "less"
    for n in range(50):
        assert cmp(W, from_nat(n)) == "greater"
    assert cmp(parse("w*2+3"), parse("w*3")) == "less"


def test_add_examples():
    assert add(ONE, W) == W
    assert add(W, ONE) == parse("w+1")
    a = parse("w^2*3+w+4")
    assert add(a, ZERO) == a
    assert add(parse("w+5"), parse("w^2")) == parse("w^2")
    assert add(parse("w^2+w*2"), parse("w*3+1")) == parse("w^2+w*5+1")


def test_nat_sum_examples():
    assert nat_sum(ONE, W) == parse("w+1")
    assert nat_sum(parse("w+1"), W) == parse("w*2+1")
    a = parse("w^w+3")
    assert nat_sum(a, ZERO) == a
    assert nat_sum(from_nat(2), from_nat(3)) == from_nat(5)


def test_nat_round_trip():
    assert from_nat(0) == ZERO
    assert to_nat(from_nat(7)) == 7
    assert to_nat(W) is None
    with pytest.raises(OrdinalError):
        from_nat(-1)


def test_classification():
    assert W.is_limit() and not W.is_successor()
    assert parse("w+1").is_successor()
    assert parse("w+1").predecessor() == W
    assert from_nat(3).predecessor() == from_nat(2)
    assert not ZERO.is_limit() and not ZERO.is_successor()
    with pytest.raises(OrdinalError):
        W.predecessor()


@pytest.mark.parametrize("text", ["0", "1", "17", "w", "w+1", "w*2", "w^2*3+w+4", "w^w", "w^(w+1)*2+w^3+5",
                                  "w^(w^2)", "w^(w*2+1)"])
def test_render_parse_round_trip(text):
    assert render(parse(text)) == text


@pytest.mark.parametrize("text", ["", "w+w", "1+w", "w^0", "w^1", "w*1", "w*0", "01", "w^2+w^3", "w^w^2",
                                  "w+", "2w", "w^(1)"])
def test_parse_rejects_non_canonical(text):
    with pytest.raises(OrdinalError):
        parse(text)


def test_int_comparisons():
    assert from_nat(3) == 3 and from_nat(3) < 4 and W > 10**9
    assert max(from_nat(2), W) == W


@given(small_ordinals(), small_ordinals())
def test_against_vector_oracle(x, y):
    (a, va), (b, vb) = x, y
    assert {-1: "less", 0: "equal", 1: "greater"}[vec_cmp(va, vb)] == cmp(a, b)
    assert add(a, b) == _vec(vec_add(va, vb))
    assert nat_sum(a, b) == _vec(vec_nat_sum(va, vb))


def _vec(v):
    from ordinals import from_vector
    return from_vector(v)


@settings(max_examples=300)
@given(ordinals(), ordinals(), ordinals())
def test_algebra_laws(a, b, c):
    assert nat_sum(a, b) == nat_sum(b, a)
    assert nat_sum(nat_sum(a, b), c) == nat_sum(a, nat_sum(b, c))
    assert add(add(a, b), c) == add(a, add(b, c))
    assert nat_sum(a, b) >= add(a, b)
    if b < c:
        assert nat_sum(a, b) < nat_sum(a, c)
        assert add(a, b) < add(a, c)


@given(ordinals())
def test_text_round_trip(a):
    assert parse(render(a)) == a


@given(ordinals(), ordinals())
def test_total_order(a, b):
    assert (a < b) + (a == b) + (a > b) == 1
    assert (a == b) == (hash(a) == hash(b)) or a != b


def test_omega_power():
    assert omega_power(ONE) == W
    assert render(omega_power(W, 2)) == "w^w*2"
    with pytest.raises(OrdinalError):
        Ordinal([(ONE, 1), (from_nat(2), 1)])
