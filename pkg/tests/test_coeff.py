from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cubar.coeff import (RingSpec, WeightVector, egcd, index, ncd_witness, span_is_unit)


def test_index_examples():
    assert index(WeightVector.of((9, 1, 4, -3))) == 11
    assert index(WeightVector.of((1, -1))) == 0
    assert index(WeightVector.of((1, 4))) == 5


def test_span_examples():
    ok, r = span_is_unit(WeightVector.of((9, 1, 4, -3)))
    assert ok and r == (0, 1, 0, 0)
    assert span_is_unit(WeightVector.of((2, 4))) == (False, None)
    assert span_is_unit(WeightVector.of((2, 3))) == (True, (-1, 1))


def test_ncd_examples():
    w = ncd_witness(1, -1, 3)
    assert (w.x, w.y) == (1, 0)
    w = ncd_witness(2, 3, 2)
    assert (w.x, w.y) == (-2, 1)
    assert ncd_witness(2, 4, 1) is None


def test_ring_parsing_and_json():
    for text, ring in (("Z", RingSpec.integers()), ("Q", RingSpec.rationals()),
                       ("Z/5", RingSpec.mod(5)), ("Zn:7", RingSpec.mod(7))):
        assert RingSpec.parse(text) == ring
        assert RingSpec.from_json(ring.to_json()) == ring
    with pytest.raises(ValueError):
        RingSpec.parse("Z/1")
    with pytest.raises(ValueError):
        RingSpec.parse("R")


def test_elements():
    Z5 = RingSpec.mod(5)
    assert Z5.elem(7) == 2
    assert Z5.elem("1/2") == 3
    assert RingSpec.rationals().elem("3/4") == Fraction(3, 4)
    with pytest.raises(ValueError):
        RingSpec.integers().elem(Fraction(1, 2))
    with pytest.raises(ValueError):
        WeightVector.of((1,))


def test_span_over_other_rings():
    ok, r = span_is_unit(WeightVector.of((2, 4), RingSpec.mod(9)))
    assert ok
    ok, _ = span_is_unit(WeightVector.of((3, 6), RingSpec.mod(9)))
    assert not ok
    ok, r = span_is_unit(WeightVector.of((0, "2/3"), RingSpec.rationals()))
    assert ok and r[1] == Fraction(3, 2)
    assert span_is_unit(WeightVector.of((0, 0), RingSpec.rationals()))[0] is False


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_egcd(a, b):
    g, x, y = egcd(a, b)
    assert g >= 0 and x * a + y * b == g
    if a or b:
        assert a % g == 0 and b % g == 0


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=6))
def test_span_witness_property(entries):
    w = WeightVector.of(entries)
    ok, r = span_is_unit(w)
    g = 0
    for e in entries:
        from math import gcd
        g = gcd(g, e)
    assert ok == (g == 1)
    if ok:
        assert sum(a * b for a, b in zip(r, entries)) == 1


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 4))
def test_ncd_witness_property(a, b, k):
    from math import gcd
    wit = ncd_witness(a, b, k)
    if gcd(a, b) != 1:
        assert wit is None
    else:
        assert wit.x * a ** k + wit.y * b ** k == 1
        B = b ** k
        if B and not abs(a ** k) == 1:
            assert abs(wit.x) <= abs(B)


@given(st.integers(2, 40), st.integers(-100, 100), st.integers(-100, 100), st.integers(1, 3))
def test_ncd_mod_n(n, a, b, k):
    R = RingSpec.mod(n)
    wit = ncd_witness(a, b, k, R)
    if wit is not None:
        assert R.add(R.mul(wit.x, R.power(R.elem(a), k)),
                     R.mul(wit.y, R.power(R.elem(b), k))) == 1
