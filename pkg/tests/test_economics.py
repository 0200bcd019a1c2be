import dataclasses
import datetime as dt

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from xfmrlife.bess import BessParams
from xfmrlife.economics import (FinancialParams, ScenarioResults, annual_profit, eac, eac_delta,
                                evaluate_investment, investment_cost, npv, npv_series,
                                payback_period, transformer_life_years)
from xfmrlife.ingest import DatasetBundle
from xfmrlife.thermal import TransformerParams
from xfmrlife.timeseries import HourlySeries, Unit

F = FinancialParams()
T = TransformerParams()
mpmath.mp.dps = 40


def mp_eac(v, r, life):
    r = mpmath.mpf(r)
    return float(v * r / (1 - (1 + r) ** (-mpmath.mpf(life))))


def year_bundle():
    d0 = dt.date(2018, 1, 1)
    n = 365 * 24
    return DatasetBundle(
        load_kw=HourlySeries(d0, np.full(n, 20.0), Unit.KILOWATT),
        temperature_c=HourlySeries(d0, np.full(n, 25.0), Unit.CELSIUS),
        pv_kw=HourlySeries(d0, np.zeros(n), Unit.KILOWATT),
    )


def test_npv_examples():
    assert npv(100, [50, 60], 0.0) == 10.0
    assert npv(0, [100], 0.03) == pytest.approx(97.087, abs=1e-3)
    assert npv(0, [100], 0.03) == pytest.approx(100 / 1.03, rel=1e-15)
    assert npv(250, [0, 0, 0], 0.05) == -250.0


def test_npv_series_shape():
    s = npv_series(100, [50, 60], 0.0)
    assert s.tolist() == [-100.0, -50.0, 10.0]


def test_payback_examples():
    assert payback_period(100, [60, 60], 0.0) == 2
    assert payback_period(0, [1, 2], 0.03) == 0
    assert payback_period(1000, [1] * 20, 0.03) is None


def test_payback_requires_staying_positive():
    assert payback_period(100, [150, -200, 300], 0.0) == 3
    assert payback_period(100, [150, -200], 0.0) is None


def test_eac_examples():
    assert eac(5000, 0.03, 20) == pytest.approx(mp_eac(5000, "0.03", 20), rel=1e-13)
    assert eac(5000, 0.03, 20) == pytest.approx(336.08, abs=1e-2)
    assert eac(5000, 0.03, 1) == pytest.approx(5000 * 1.03, rel=1e-13)
    assert eac(0, 0.03, 7) == 0.0


def test_eac_zero_rate_is_error():
    with pytest.raises(ValueError):
        eac(5000, 0.0, 10)
    with pytest.raises(ValueError):
        FinancialParams(discount_rate=0.0)


def test_transformer_life():
    assert transformer_life_years(0.0, T, 40) == 40
    assert transformer_life_years(33.45, T, 40) == pytest.approx(112000 / (0.3345 * 180000))
    assert transformer_life_years(0.45, T, 40) == 40


def test_eac_delta_examples():
    assert eac_delta(3.0, 3.0, F, T) == 0.0
    d = eac_delta(33.45, 0.45, F, T)
    life_before = 112000 / (0.3345 * 180000)
    assert life_before == pytest.approx(1.86, abs=0.01)
    assert d == pytest.approx(mp_eac(5000, "0.03", life_before) - mp_eac(5000, "0.03", 40), rel=1e-12)
    assert d > 0
    assert eac_delta(0.45, 33.45, F, T) == pytest.approx(-d, abs=1e-9)


def test_annual_profit_identical_flows():
    b = year_bundle()
    assert annual_profit(b, b.load_kw, b.load_kw) == 0.0


def test_annual_profit_summer_displacement():
    b = year_bundle()
    saved = np.zeros(365 * 24)
    july = (dt.date(2018, 7, 1) - dt.date(2018, 1, 1)).days * 24
    saved[july : july + 1000] = 10.0  # 10 000 kWh of July purchases
    with_pv = b.load_kw.with_samples(b.load_kw.samples - saved)
    assert annual_profit(b, with_pv, b.load_kw) == pytest.approx(1369.0, rel=1e-12)
    year2 = annual_profit(b, with_pv, b.load_kw, year=2, price_growth=0.026)
    assert year2 == pytest.approx(1369.0 * 1.026, rel=1e-12)
    assert year2 == pytest.approx(1404.6, abs=0.05)


def test_annual_profit_misaligned():
    b = year_bundle()
    short = HourlySeries(dt.date(2018, 1, 1), np.zeros(24), Unit.KILOWATT)
    with pytest.raises(ValueError):
        annual_profit(b, short, short)


def test_investment_costs():
    assert investment_cost(0.0, None, F) == 0.0
    assert investment_cost(10.0, None, F) == pytest.approx(21300.0)
    bess = BessParams(40.0, rated_kw=10.0)
    assert investment_cost(0.0, bess, F) == pytest.approx(4000.0)
    per_kwh = dataclasses.replace(F, bess_cost_per_kwh=300.0)
    assert investment_cost(0.0, bess, per_kwh) == pytest.approx(12000.0)


def test_evaluate_zero_investment():
    rep = evaluate_investment(ScenarioResults("a", 0.01, 8760.0), F, T)
    assert rep.inv0 == 0.0 and rep.payback_with_lol == 0 and rep.payback_without_lol == 0
    d = rep.to_dict()
    for key in ("scenario_id", "lol_percent", "inv0", "annual_saving", "payback_with_lol",
                "payback_without_lol", "npv_series"):
        assert key in d


def test_evaluate_needs_baseline():
    with pytest.raises(ValueError):
        evaluate_investment(ScenarioResults("c", 0.01, 8760.0, pv_kw=10.0), F, T)


def test_evaluate_lol_shortens_payback():
    bess = BessParams(40.0)
    res = ScenarioResults("d.b", 1.6, 8760.0, bess=bess, energy_profit=-100.0,
                          baseline_lol_percent=33.45)
    rep = evaluate_investment(res, F, T)
    assert rep.eac_saving > 0
    assert rep.payback_without_lol is None
    assert rep.payback_with_lol is not None and rep.payback_with_lol <= 3
    assert rep.annual_saving == pytest.approx(rep.energy_saving + rep.eac_saving)


def test_lol_rate_annualised_from_period():
    short = ScenarioResults("x", 1.0, 4380.0)
    assert short.lol_percent_per_year == pytest.approx(2.0)


money = st.floats(-5000, 5000, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(money, min_size=1, max_size=30), st.floats(0, 1e5))
def test_npv_zero_rate_is_cumulative_sum(profits, inv0):
    assert npv(inv0, profits, 0.0) == pytest.approx(sum(profits) - inv0, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.lists(money, min_size=1, max_size=25), st.floats(0, 2e4), st.integers(0, 24),
       st.floats(0, 3000), st.floats(0.001, 0.2))
def test_payback_monotone_in_profit(profits, inv0, k, bump, r):
    assume(k < len(profits))
    better = list(profits)
    better[k] += bump
    before, after = payback_period(inv0, profits, r), payback_period(inv0, better, r)
    if before is not None:
        assert after is not None and after <= before


@settings(max_examples=60, deadline=None)
@given(st.floats(1, 1e5), st.floats(1, 1e5), st.floats(0.001, 0.2), st.floats(0.5, 60),
       st.floats(0.5, 60))
def test_eac_monotone(v1, v2, r, l1, l2):
    assume(abs(v1 - v2) > 1e-6 * max(v1, v2) and abs(l1 - l2) > 1e-6)
    assert (eac(v1, r, 10) < eac(v2, r, 10)) == (v1 < v2)
    assert (eac(1000, r, l1) > eac(1000, r, l2)) == (l1 < l2)


@settings(max_examples=80, deadline=None)
@given(st.floats(0, 100), st.floats(0, 100))
def test_eac_delta_antisymmetric(a, b):
    assert eac_delta(a, a, F, T) == 0.0
    assert abs(eac_delta(a, b, F, T) + eac_delta(b, a, F, T)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.lists(money, min_size=1, max_size=25), st.floats(0, 2e4), st.floats(0, 3000),
       st.floats(0.001, 0.2))
def test_positive_eac_delta_never_lengthens_payback(profits, inv0, delta, r):
    without = payback_period(inv0, profits, r)
    with_lol = payback_period(inv0, profits, r, np.full(len(profits), delta))
    if without is not None:
        assert with_lol is not None and with_lol <= without
