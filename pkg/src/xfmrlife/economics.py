"""Discounted cash flow evaluation of PV and battery investments.

Year ``t`` cash flows are indexed from 1; ``profits[0]`` is the first year.
The transformer term enters as an annual change in equivalent annual cost
(EAC) of owning the transformer, added undiscounted to each year's
discounted profit.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .bess import BessParams
from .ingest import DatasetBundle, RetailTariff, hourly_retail_rates
from .thermal import HOURS_PER_YEAR, TransformerParams
from .timeseries import HourlySeries


@dataclass(frozen=True)
class FinancialParams:
    pv_cost_per_w: float = 2.13
    bess_cost_per_w: float = 0.40
    bess_cost_per_kwh: float | None = None  # overrides the per-W price when set
    transformer_npv: float = 5000.0
    price_growth: float = 0.026
    discount_rate: float = 0.030
    horizon_years: int = 25
    life_cap_years: float = 40.0

    def __post_init__(self):
        if self.discount_rate <= 0:
            raise ValueError("discount_rate must be positive")
        costs = [self.pv_cost_per_w, self.bess_cost_per_w, self.transformer_npv]
        if self.bess_cost_per_kwh is not None:
            costs.append(self.bess_cost_per_kwh)
        if min(costs) < 0:
            raise ValueError("costs must be nonnegative")
        if self.horizon_years < 1 or self.life_cap_years <= 0:
            raise ValueError("horizon and life cap must be positive")


def npv_series(inv0: float, profits, r: float, extras=None) -> np.ndarray:
    """NPV through horizon T for every T = 0..len(profits)."""
    if r <= -1:
        raise ValueError("discount rate must exceed -1")
    pr = np.asarray(profits, dtype=float)
    t = np.arange(1, pr.size + 1)
    terms = pr / (1.0 + r) ** t
    if extras is not None:
        ex = np.broadcast_to(np.asarray(extras, dtype=float), pr.shape)
        terms = terms + ex
    return np.concatenate([[-float(inv0)], -float(inv0) + np.cumsum(terms)])


def npv(inv0: float, profits, r: float, extras=None) -> float:
    return float(npv_series(inv0, profits, r, extras)[-1])


def payback_period(inv0: float, profits, r: float, extras=None) -> int | None:
    """First year from which NPV stays nonnegative to the end of the ledger.

    ``None`` means the investment is not recovered within the ledger.
    """
    series = npv_series(inv0, profits, r, extras)
    negative = np.flatnonzero(series < 0)
    if negative.size == 0:
        return 0
    last = int(negative[-1])
    return None if last == series.size - 1 else last + 1


def eac(asset_npv: float, r: float, life_years: float) -> float:
    """Equivalent annual cost of ``asset_npv`` spread over ``life_years``."""
    if r == 0:
        raise ValueError("EAC annuity factor is undefined at r = 0")
    if life_years <= 0:
        raise ValueError("life must be positive")
    return asset_npv * r / (1.0 - (1.0 + r) ** (-life_years))


def transformer_life_years(lol_pct_per_year: float, tparams: TransformerParams = TransformerParams(),
                           cap_years: float = 40.0) -> float:
    """Years until the remaining insulation life is used up at a constant aging rate."""
    if lol_pct_per_year < 0:
        raise ValueError("loss of life must be nonnegative")
    consumed_hours = lol_pct_per_year / 100.0 * tparams.normal_life_hours
    if consumed_hours <= 0:
        return cap_years
    return min(cap_years, tparams.remaining_life_hours / consumed_hours)


def eac_delta(lol_before_pct_per_yr: float, lol_after_pct_per_yr: float,
              params: FinancialParams = FinancialParams(),
              tparams: TransformerParams = TransformerParams()) -> float:
    """Annual transformer-cost saving (positive when aging slows)."""
    life_before = transformer_life_years(lol_before_pct_per_yr, tparams, params.life_cap_years)
    life_after = transformer_life_years(lol_after_pct_per_yr, tparams, params.life_cap_years)
    r = params.discount_rate
    return eac(params.transformer_npv, r, life_before) - eac(params.transformer_npv, r, life_after)


def annual_profit(bundle: DatasetBundle, flows_with: HourlySeries, flows_without: HourlySeries,
                  tariff: RetailTariff | None = None, year: int = 1, price_growth: float = 0.0) -> float:
    """Value of the energy no longer bought through the transformer, per year.

    Hourly energy differences are priced at the retail rate of their month and
    scaled to a 365-day year; prices compound by ``price_growth`` after year 1.
    The monthly service fee is paid either way and drops out.
    """
    tariff = tariff or bundle.retail_price
    for s in (flows_with, flows_without):
        if len(s) != len(bundle.load_kw) or s.start_date != bundle.start_date:
            raise ValueError("flow series are not aligned with the bundle")
    saved = flows_without.samples - flows_with.samples
    rates = hourly_retail_rates(tariff, flows_with)
    value = float(np.sum(saved * rates)) * 365.0 / flows_with.days
    return value * (1.0 + price_growth) ** (year - 1)


def investment_cost(pv_kw: float, bess: BessParams | None, params: FinancialParams = FinancialParams()) -> float:
    cost = pv_kw * 1000.0 * params.pv_cost_per_w
    if bess is not None:
        if params.bess_cost_per_kwh is not None:
            cost += bess.capacity_kwh * params.bess_cost_per_kwh
        else:
            cost += bess.rated_kw * 1000.0 * params.bess_cost_per_w
    return cost


@dataclass(frozen=True)
class ScenarioResults:
    scenario_id: str
    lol_percent: float  # over the simulated period
    period_hours: float
    pv_kw: float = 0.0
    bess: BessParams | None = None
    energy_profit: float = 0.0  # year-1 $, already annualised
    baseline_lol_percent: float | None = None  # over the same period
    extra: dict = field(default_factory=dict)

    @property
    def lol_percent_per_year(self) -> float:
        return self.lol_percent * HOURS_PER_YEAR / self.period_hours


@dataclass(frozen=True)
class ScenarioReport:
    scenario_id: str
    lol_percent: float
    inv0: float
    annual_saving: float
    energy_saving: float
    eac_saving: float
    payback_with_lol: int | None
    payback_without_lol: int | None
    npv_series: list[float]
    npv_series_without_lol: list[float]
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_investment(results: ScenarioResults, params: FinancialParams = FinancialParams(),
                        tparams: TransformerParams = TransformerParams()) -> ScenarioReport:
    inv0 = investment_cost(results.pv_kw, results.bess, params)
    years = params.horizon_years
    if inv0 > 0 and results.baseline_lol_percent is None:
        raise ValueError(f"scenario {results.scenario_id}: investment needs a baseline")
    if results.baseline_lol_percent is None:
        delta = 0.0
    else:
        base = results.baseline_lol_percent * HOURS_PER_YEAR / results.period_hours
        delta = eac_delta(base, results.lol_percent_per_year, params, tparams)
    growth = (1.0 + params.price_growth) ** np.arange(years)
    profits = results.energy_profit * growth
    r = params.discount_rate
    with_lol = npv_series(inv0, profits, r, np.full(years, delta))
    without = npv_series(inv0, profits, r)
    return ScenarioReport(
        scenario_id=results.scenario_id,
        lol_percent=results.lol_percent,
        inv0=inv0,
        annual_saving=results.energy_profit + delta,
        energy_saving=results.energy_profit,
        eac_saving=delta,
        payback_with_lol=payback_period(inv0, profits, r, np.full(years, delta)),
        payback_without_lol=payback_period(inv0, profits, r),
        npv_series=[float(x) for x in with_lol],
        npv_series_without_lol=[float(x) for x in without],
        extra=dict(results.extra),
    )
