from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from certbound.errors import FixedPointOverflowError, InvalidInputError
from certbound.fixedpoint import FxScale, FxVector, avg_round_down, avg_round_up, check_headroom, shift

ints = st.lists(st.integers(-10**12, 10**12), min_size=1, max_size=20)


def test_round_up_examples():
    assert avg_round_up([1, 1, 1, 2], 4) == 2
    assert avg_round_up([0, 0, 0, 0], 4) == 0
    assert avg_round_up([3, 3], 2) == 3


def test_round_down_examples():
    assert avg_round_down([1, 1, 1, 2], 4) == 1
    assert avg_round_down([-1, 0], 2) == -1
    assert avg_round_down([4, 4], 4) == 2


def test_shift_examples():
    s = FxScale()
    assert shift(FxVector.zeros(3, s), 5).values.tolist() == [5, 5, 5]
    v = FxVector(s, np.array([50000, 150000], dtype=np.int64))
    assert shift(v, -50005).values.tolist() == [-5, 99995]
    assert shift(shift(v, 123), -123) == v


def test_overflow_detected():
    big = 2**62
    with pytest.raises(FixedPointOverflowError):
        avg_round_up([big, big], 2)
    with pytest.raises(FixedPointOverflowError):
        shift(FxVector(FxScale(), np.array([2**63 - 10], dtype=np.int64)), 11)
    with pytest.raises(FixedPointOverflowError):
        check_headroom(np.array([2**60], dtype=np.int64), 16)
    check_headroom(np.array([2**58], dtype=np.int64), 16)


def test_bad_arguments():
    with pytest.raises(InvalidInputError):
        FxScale(0)
    with pytest.raises(InvalidInputError):
        FxScale(10, -1)
    with pytest.raises(InvalidInputError):
        avg_round_up([1], 0)
    with pytest.raises(InvalidInputError):
        FxVector(FxScale(), np.zeros(2, dtype=np.int32))


@given(ints, st.integers(1, 1000))
def test_rounding_brackets_exact_mean(xs, d):
    exact = Fraction(sum(xs), d)
    up, down = avg_round_up(xs, d), avg_round_down(xs, d)
    assert down <= exact <= up
    assert up - down == (0 if exact.denominator == 1 else 1)


@given(ints, st.integers(-10**9, 10**9))
def test_rounding_translates(xs, m):
    shifted = [x + m for x in xs]
    d = len(xs)
    assert avg_round_up(shifted, d) == avg_round_up(xs, d) + m
    assert avg_round_down(shifted, d) == avg_round_down(xs, d) + m


@given(ints, st.integers(1, 100), st.data())
def test_rounding_monotone(xs, d, data):
    bumped = [x + data.draw(st.integers(0, 1000)) for x in xs]
    assert avg_round_up(bumped, d) >= avg_round_up(xs, d)
    assert avg_round_down(bumped, d) >= avg_round_down(xs, d)
