import numpy as np
import pytest

from shor21.stats import bootstrap_ci


def test_constant_columns_give_zero_width():
    data = np.tile(np.array([[50], [30], [20]]), 10)
    mean, lo, hi = bootstrap_ci(data)
    assert np.array_equal(mean, [50, 30, 20])
    assert np.array_equal(lo, mean) and np.array_equal(hi, mean)


def test_interval_contains_mean(rng):
    data = rng.multinomial(1000, [0.5, 0.3, 0.2], size=20).T
    mean, lo, hi = bootstrap_ci(data, seed=3)
    assert (lo <= mean).all() and (mean <= hi).all()
    assert (hi - lo > 0).all()


def test_seeded_is_deterministic(rng):
    data = rng.multinomial(100, [0.25] * 4, size=8).T
    a = bootstrap_ci(data, seed=9)
    b = bootstrap_ci(data, seed=9)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_interval_narrows_with_more_columns():
    r = np.random.default_rng(0)
    small = r.multinomial(500, [0.6, 0.4], size=5).T
    large = r.multinomial(500, [0.6, 0.4], size=200).T
    _, lo_s, hi_s = bootstrap_ci(small)
    _, lo_l, hi_l = bootstrap_ci(large)
    assert (hi_l - lo_l)[0] < (hi_s - lo_s)[0]


@pytest.mark.parametrize("bad", [np.ones(4), np.ones((3, 1)), np.array([[1, 2], [3, 3]])])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        bootstrap_ci(bad)


def test_rejects_bad_confidence():
    with pytest.raises(ValueError):
        bootstrap_ci(np.ones((2, 3)), confidence=1.0)
