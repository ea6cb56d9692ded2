from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from shor21.numtheory import (
    continued_fraction, convergents, evaluate, extract_order, factor_from_order, shor_pipeline,
)


def brute_order(a, n):
    return next(r for r in range(1, n + 1) if pow(a, r, n) == 1)


def test_order_of_four_mod_21():
    assert brute_order(4, 21) == 3


def test_expansion_of_five_eighths():
    assert continued_fraction(Fraction(5, 8)) == [0, 1, 1, 1, 2]
    assert convergents([0, 1, 1, 1, 2]) == [0, 1, Fraction(1, 2), Fraction(2, 3), Fraction(5, 8)]


def test_expansion_of_six_eighths():
    assert continued_fraction(Fraction(6, 8)) == [0, 1, 3]
    assert convergents([0, 1, 3]) == [0, 1, Fraction(3, 4)]


def test_three_eighths_convergents():
    assert convergents(continued_fraction(Fraction(3, 8))) == [0, Fraction(1, 2), Fraction(1, 3), Fraction(3, 8)]


@pytest.mark.parametrize("outcome,order", [(0, None), (1, None), (2, None), (3, 3), (4, None), (5, 3), (6, None), (7, None)])
def test_extract_order_per_outcome(outcome, order):
    assert extract_order(outcome, 3, 4, 21) == order


def test_factor_from_order_three():
    # 4 = 2^2, so 4^(3/2) = 2^3 = 8
    assert factor_from_order(4, 3, 21) == (3, 7)
    assert (gcd(8 - 1, 21), gcd(8 + 1, 21)) == (7, 3)


def test_factor_from_even_order():
    assert factor_from_order(2, 6, 21) == (3, 7)


def test_factor_rejects_non_order():
    with pytest.raises(ValueError):
        factor_from_order(4, 2, 21)


def test_odd_order_without_square_root():
    assert factor_from_order(5, 3, 31) is None
    assert factor_from_order(2, 5, 31) is None


def test_bad_outcome():
    with pytest.raises(ValueError):
        extract_order(8, 3, 4, 21)
    with pytest.raises(ValueError):
        continued_fraction(Fraction(-1, 2))


def test_pipeline_golden_counts():
    counts = {"000": 2898, "001": 119, "010": 473, "011": 1888, "100": 269, "101": 1933, "110": 504, "111": 108}
    out = shor_pipeline(counts)
    assert out["factors"] == [3, 7]
    assert out["success_fraction"] == (1888 + 1933) / 8192
    assert out["outcomes"]["011"]["order"] == 3
    assert out["outcomes"]["110"]["order"] is None


def test_pipeline_without_success():
    out = shor_pipeline({"000": 10, "110": 4})
    assert out["factors"] is None and out["success_fraction"] == 0


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 2**10).flatmap(lambda q: st.tuples(st.integers(0, q - 1), st.just(q))))
def test_round_trip(pq):
    p, q = pq
    x = Fraction(p, q)
    cf = continued_fraction(x)
    assert evaluate(cf) == x
    assert convergents(cf)[-1] == x


def test_round_trip_exhaustive_small():
    for q in range(2, 65):
        for p in range(q):
            assert evaluate(continued_fraction(Fraction(p, q))) == Fraction(p, q)


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 2**10).flatmap(lambda q: st.tuples(st.integers(1, q - 1), st.just(q))))
def test_convergent_error_bound(pq):
    """Each convergent h/k satisfies |x - h/k| <= 1/k^2 and denominators grow."""
    x = Fraction(*pq)
    cs = convergents(continued_fraction(x))
    for c in cs:
        assert abs(x - c) <= Fraction(1, c.denominator**2)
    dens = [c.denominator for c in cs]
    assert dens == sorted(dens)
