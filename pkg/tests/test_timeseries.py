import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xfmrlife.timeseries import (HourlySeries, SeriesError, Unit, concat_days, slice_day,
                                 trailing_mean_profile, zeros_like)

D0 = dt.date(2018, 1, 1)


def kw(values):
    return HourlySeries(D0, np.asarray(values, dtype=float), Unit.KILOWATT)


def test_slice_day_zeros():
    assert np.array_equal(slice_day(kw(np.zeros(48)), 1), np.zeros(24))


def test_slice_day_indexing():
    assert np.array_equal(slice_day(kw(np.arange(48)), 1), np.arange(24, 48))


def test_slice_day_out_of_range():
    with pytest.raises(SeriesError):
        slice_day(kw(np.zeros(24)), 1)
    with pytest.raises(SeriesError):
        slice_day(kw(np.zeros(24)), -1)


def test_slice_day_is_a_copy():
    s = kw(np.arange(48))
    day = slice_day(s, 0)
    day[:] = -1
    assert s.samples[0] == 0


@pytest.mark.parametrize("bad", [[], np.zeros(23), np.zeros(25)])
def test_length_must_be_multiple_of_24(bad):
    with pytest.raises(SeriesError):
        kw(bad)


@pytest.mark.parametrize("value", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(value):
    x = np.zeros(24)
    x[5] = value
    with pytest.raises(SeriesError):
        kw(x)


def test_samples_are_immutable():
    s = kw(np.zeros(24))
    with pytest.raises(ValueError):
        s.samples[0] = 1.0


def test_unit_mismatch_is_error():
    t = HourlySeries(D0, np.zeros(24), Unit.CELSIUS)
    with pytest.raises(SeriesError):
        kw(np.zeros(24)) + t


def test_alignment_mismatch_is_error():
    other = HourlySeries(D0 + dt.timedelta(days=1), np.zeros(24), Unit.KILOWATT)
    with pytest.raises(SeriesError):
        kw(np.zeros(24)) - other
    with pytest.raises(SeriesError):
        kw(np.zeros(24)) + kw(np.zeros(48))


def test_arithmetic():
    a, b = kw(np.arange(24)), kw(np.ones(24))
    assert np.array_equal((a + b).samples, np.arange(24) + 1)
    assert np.array_equal((a - b).samples, np.arange(24) - 1)
    assert np.array_equal((-a).samples, -np.arange(24))
    assert np.array_equal(a.scale(2).samples, 2 * np.arange(24))
    assert zeros_like(a) == kw(np.zeros(24))


def test_calendar_helpers():
    s = kw(np.zeros(48))
    assert s.days == 2
    assert s.date_of_day(1) == dt.date(2018, 1, 2)
    assert s.hour_dates()[24] == dt.date(2018, 1, 2)
    assert s.by_day().shape == (2, 24)


def test_trailing_mean_constant():
    s = kw(np.full(24 * 15, 5.0))
    for j in (10, 12, 14):
        assert np.array_equal(trailing_mean_profile(s, j, 10), np.full(24, 5.0))


def test_trailing_mean_two_days():
    days = [np.zeros(24), np.full(24, 4.0), np.full(24, 2.0), np.zeros(24)]
    s = kw(np.concatenate(days))
    assert np.allclose(trailing_mean_profile(s, 3, 2), np.full(24, 3.0))


def test_trailing_mean_insufficient_history():
    with pytest.raises(SeriesError):
        trailing_mean_profile(kw(np.zeros(24 * 20)), 5, 10)
    with pytest.raises(SeriesError):
        trailing_mean_profile(kw(np.zeros(24 * 20)), 12, 0)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(lambda d: st.lists(finite, min_size=24 * d, max_size=24 * d)))
def test_slice_then_concat_roundtrip(values):
    s = kw(values)
    again = concat_days([slice_day(s, j) for j in range(s.days)], D0, Unit.KILOWATT)
    assert again == s


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=24, max_size=24), st.integers(1, 5), st.integers(0, 4))
def test_trailing_mean_of_periodic_series(day, window, extra):
    days = window + 1 + extra
    s = kw(np.tile(day, days))
    assert np.allclose(trailing_mean_profile(s, days - 1, window), day, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), finite, finite)
def test_trailing_mean_is_linear(seed, a, b):
    r = np.random.default_rng(seed)
    x, y = kw(r.normal(size=24 * 6)), kw(r.normal(size=24 * 6))
    lhs = trailing_mean_profile(x.scale(a) + y.scale(b), 5, 4)
    rhs = a * trailing_mean_profile(x, 5, 4) + b * trailing_mean_profile(y, 5, 4)
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + abs(a) + abs(b)) * 1e3)
