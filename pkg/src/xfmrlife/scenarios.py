"""The seven-case study: EV load, PV and battery combinations over a year.

==========  ====  ===  =========
scenario    PV    EV   battery
==========  ====  ===  =========
a           -     -    -
b           -     yes  -
c           10kW  yes  -
d.a / d.b   -     yes  20 / 40 kWh
e.a / e.b   10kW  yes  20 / 40 kWh
==========  ====  ===  =========

Scenario b is the economic baseline: the status quo once EVs arrive.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bess import BessParams, GAConfig, HorizonPlan, plan_net
from .economics import FinancialParams, ScenarioReport, ScenarioResults, annual_profit, evaluate_investment
from .ingest import DatasetBundle, SyntheticProfile, format_value
from .pev import PevParams, fleet_series
from .thermal import AgingResult, TransformerParams, simulate_year
from .timeseries import HourlySeries, Unit, zeros_like

SCENARIO_IDS = ("a", "b", "c", "d.a", "d.b", "e.a", "e.b")
SAVINGS_IDS = ("c", "d.a", "d.b", "e.a", "e.b")
BASELINE_ID = "b"

_FAMILY = {  # id -> (pv, pev, battery)
    "a": (False, False, False),
    "b": (False, True, False),
    "c": (True, True, False),
    "d": (False, True, True),
    "e": (True, True, True),
}
_BATTERY_SIZE = {"a": 20.0, "b": 40.0}


@dataclass(frozen=True)
class ScenarioConfig:
    id: str
    pv_kw: float = 0.0
    pev_enabled: bool = False
    bess_kwh: float = 0.0
    seed: int = 42
    days: int = 365

    def __post_init__(self):
        family = self.id.split(".")[0]
        if family not in _FAMILY:
            raise ValueError(f"unknown scenario {self.id!r}")
        pv, pev, bat = _FAMILY[family]
        if (self.pv_kw > 0) != pv or self.pev_enabled != pev or (self.bess_kwh > 0) != bat:
            raise ValueError(f"scenario {self.id!r} does not match its family's PV/EV/battery mix")
        if self.days < 11:
            raise ValueError("scenarios need at least 11 days")

    @property
    def family(self) -> str:
        return self.id.split(".")[0]


def scenario_config(scenario_id: str, seed: int = 42, days: int = 365, pv_kw: float = 10.0) -> ScenarioConfig:
    """Standard configuration for one of the seven table rows."""
    family, _, variant = scenario_id.partition(".")
    if family not in _FAMILY:
        raise ValueError(f"unknown scenario {scenario_id!r}")
    pv, pev, bat = _FAMILY[family]
    bess_kwh = _BATTERY_SIZE[variant] if bat else 0.0
    if bat and not variant:
        raise ValueError(f"battery scenario {scenario_id!r} needs a size variant (.a or .b)")
    return ScenarioConfig(scenario_id, pv_kw if pv else 0.0, pev, bess_kwh, seed, days)


@dataclass(frozen=True)
class Settings:
    """Every tunable of a run; defaults reproduce the documented case study."""

    pev: PevParams = PevParams()
    ga: GAConfig = GAConfig()
    transformer: TransformerParams = TransformerParams()
    finance: FinancialParams = FinancialParams()
    synthetic: SyntheticProfile = SyntheticProfile()
    bess_efficiency: float = 0.90
    bess_soc_min: float = 0.20
    bess_soc_initial: float = 0.50
    bess_hours: float = 4.0  # rated power = capacity / hours
    pv_kw: float = 10.0

    def bess_params(self, capacity_kwh: float) -> BessParams:
        return BessParams(
            capacity_kwh=capacity_kwh,
            rated_kw=capacity_kwh / self.bess_hours,
            efficiency=self.bess_efficiency,
            soc_min=self.bess_soc_min,
            soc_initial=self.bess_soc_initial,
        )


_SECTIONS = {"pev": "pev", "ga": "ga", "transformer": "transformer", "finance": "finance",
             "synthetic": "synthetic"}


def settings_from_config(flat: dict) -> Settings:
    """Build settings from a flat ``{"section.field": value}`` mapping.

    Keys without a section address top-level fields (``bess_efficiency``...).
    """
    groups: dict[str, dict] = {}
    top: dict = {}
    for key, value in flat.items():
        section, dot, name = key.partition(".")
        if dot:
            if section not in _SECTIONS:
                raise ValueError(f"unknown config section {section!r}")
            groups.setdefault(section, {})[name] = value
        else:
            top[key] = value
    base = Settings()
    kwargs = {}
    for section, values in groups.items():
        current = getattr(base, section)
        known = {f.name for f in dataclasses.fields(current)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown {section} keys: {sorted(unknown)}")
        if section == "synthetic" and "class_scale" in values:
            values["class_scale"] = tuple(values["class_scale"])
        kwargs[section] = dataclasses.replace(current, **values)
    known_top = {f.name for f in dataclasses.fields(Settings)} - set(_SECTIONS)
    unknown = set(top) - known_top
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return dataclasses.replace(base, **kwargs, **top)


def load_config(path) -> Settings:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or any(isinstance(v, dict) for v in data.values()):
        raise ValueError("config must be a flat JSON object")
    return settings_from_config(data)


@dataclass
class ScenarioRun:
    config: ScenarioConfig
    flow: HourlySeries  # kW through the transformer
    pev: HourlySeries
    pv: HourlySeries
    battery: HourlySeries
    aging: AgingResult
    plan: HorizonPlan | None = None


def simulate_scenario(config: ScenarioConfig, bundle: DatasetBundle, settings: Settings = Settings(),
                      pev_series: HourlySeries | None = None) -> ScenarioRun:
    """Physical side of a scenario: flows, battery plan and transformer aging."""
    if bundle.days < config.days:
        raise ValueError(f"bundle covers {bundle.days} days, scenario needs {config.days}")
    bundle = _truncate(bundle, config.days)
    load = bundle.load_kw
    if config.pev_enabled:
        pev = pev_series if pev_series is not None else fleet_series(
            settings.pev, config.days, config.seed, bundle.start_date)
    else:
        pev = zeros_like(load)
    pv = bundle.pv_kw.scale(config.pv_kw / bundle.pv_rated_kw) if config.pv_kw > 0 else zeros_like(load)
    net = load + pev - pv
    plan = None
    battery = zeros_like(load)
    if config.bess_kwh > 0:
        plan = plan_net(net, settings.bess_params(config.bess_kwh), settings.ga, config.seed)
        battery = plan.power
    flow = net + battery
    aging = simulate_year(flow, bundle.temperature_c, settings.transformer)
    return ScenarioRun(config, flow, pev, pv, battery, aging, plan)


def _truncate(bundle: DatasetBundle, days: int) -> DatasetBundle:
    if bundle.days == days:
        return bundle
    n = days * 24
    cut = lambda s: None if s is None else s.with_samples(s.samples[:n])
    return dataclasses.replace(
        bundle, load_kw=cut(bundle.load_kw), temperature_c=cut(bundle.temperature_c),
        pv_kw=cut(bundle.pv_kw), wholesale_price=cut(bundle.wholesale_price),
    )


def report_for(run: ScenarioRun, bundle: DatasetBundle, settings: Settings,
               baseline: ScenarioRun | None) -> ScenarioReport:
    cfg = run.config
    bundle = _truncate(bundle, cfg.days)
    invests = cfg.pv_kw > 0 or cfg.bess_kwh > 0
    if invests and baseline is None:
        raise ValueError(f"scenario {cfg.id} needs the scenario-{BASELINE_ID} baseline")
    profit = 0.0
    base_lol = None
    if invests:
        profit = annual_profit(bundle, run.flow, baseline.flow, bundle.retail_price)
        base_lol = baseline.aging.loss_of_life_percent
    results = ScenarioResults(
        scenario_id=cfg.id,
        lol_percent=run.aging.loss_of_life_percent,
        period_hours=float(len(run.flow)),
        pv_kw=cfg.pv_kw,
        bess=settings.bess_params(cfg.bess_kwh) if cfg.bess_kwh > 0 else None,
        energy_profit=profit,
        baseline_lol_percent=base_lol,
        extra={
            "f_eqa": run.aging.f_eqa,
            "max_theta_h": run.aging.max_theta_h,
            "peak_flow_kw": float(run.flow.samples.max()),
            "pv_kw": cfg.pv_kw,
            "bess_kwh": cfg.bess_kwh,
            "pev_enabled": cfg.pev_enabled,
            "seed": cfg.seed,
            "days": cfg.days,
        },
    )
    return evaluate_investment(results, settings.finance, settings.transformer)


def run_scenario(config: ScenarioConfig, bundle: DatasetBundle, settings: Settings = Settings(),
                 baseline: ScenarioRun | None = None) -> ScenarioReport:
    """Simulate one scenario and price it against the EV-only baseline."""
    run = simulate_scenario(config, bundle, settings)
    if baseline is None and (config.pv_kw > 0 or config.bess_kwh > 0):
        baseline = simulate_scenario(
            scenario_config(BASELINE_ID, config.seed, config.days), bundle, settings, run.pev)
    return report_for(run, bundle, settings, baseline)


@dataclass
class StudyResults:
    reports: dict[str, ScenarioReport]
    runs: dict[str, ScenarioRun] = field(default_factory=dict)

    def lol(self) -> dict[str, float]:
        return {k: r.lol_percent for k, r in self.reports.items()}


def _simulate_task(args):
    cfg, bundle, settings, pev = args
    return simulate_scenario(cfg, bundle, settings, pev if cfg.pev_enabled else None)


def run_all(bundle: DatasetBundle, seed: int = 42, settings: Settings = Settings(),
            days: int | None = None, workers: int = 1) -> StudyResults:
    """All seven rows in table order; scenarios are independent given the EV series."""
    days = days or bundle.days
    configs = [scenario_config(sid, seed, days, settings.pv_kw) for sid in SCENARIO_IDS]
    pev = fleet_series(settings.pev, days, seed, bundle.start_date)
    tasks = [(cfg, bundle, settings, pev) for cfg in configs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_simulate_task, tasks))
    else:
        runs = [_simulate_task(t) for t in tasks]
    by_id = {r.config.id: r for r in runs}
    baseline = by_id[BASELINE_ID]
    reports = {sid: report_for(by_id[sid], bundle, settings, baseline) for sid in SCENARIO_IDS}
    return StudyResults(reports, by_id)


def _fmt(x) -> str:
    if x is None:
        return "never"
    if isinstance(x, float):
        return format_value(x)
    return str(x)


def write_outputs(results: StudyResults, out_dir) -> list[Path]:
    """Tables, plot data and per-scenario JSON; byte-stable for equal inputs."""
    out = Path(out_dir)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    written = []

    def table(name, header, rows):
        path = out / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        written.append(path)

    reps = results.reports
    table("table2.csv", ["scenario", "loss_of_life_percent"],
          [(sid, reps[sid].lol_percent) for sid in SCENARIO_IDS if sid in reps])
    table("table3.csv", ["scenario", "annual_saving", "energy_saving", "eac_saving"],
          [(sid, reps[sid].annual_saving, reps[sid].energy_saving, reps[sid].eac_saving)
           for sid in SAVINGS_IDS if sid in reps])
    table("payback.csv", ["scenario", "inv0", "payback_with_lol", "payback_without_lol"],
          [(sid, reps[sid].inv0, reps[sid].payback_with_lol, reps[sid].payback_without_lol)
           for sid in SAVINGS_IDS if sid in reps])
    plot_rows = []
    for sid in SCENARIO_IDS:
        if sid not in reps:
            continue
        r = reps[sid]
        plot_rows += [
            (sid, "loss_of_life_percent", r.lol_percent),
            (sid, "max_theta_h", r.extra.get("max_theta_h")),
            (sid, "annual_saving", r.annual_saving),
            (sid, "payback_with_lol", r.payback_with_lol),
            (sid, "payback_without_lol", r.payback_without_lol),
        ]
    table("plot_data.csv", ["scenario", "metric", "value"], plot_rows)
    for sid, r in reps.items():
        path = out / "reports" / f"{sid}.json"
        path.write_text(json.dumps(r.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    return written
