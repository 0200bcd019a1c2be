"""Day-ahead battery scheduling for transformer peak shaving.

The forecast for day ``j`` is the hour-by-hour mean of the previous ten days of
net transformer flow (load + PEV - PV). The battery gets one contiguous charge
window and one contiguous discharge window per day, each at uniform power,
and the schedule minimises the total absolute deviation of the forecast flow
(plus battery) from the forecast's daily mean.

Sign convention: ``power_kw`` is positive while charging, negative while
discharging. Round-trip efficiency ``eta`` is split evenly: energy enters the
cells at ``sqrt(eta)`` and leaves at ``1/sqrt(eta)`` per kWh at the terminals.
Per-window energy caps use ``eta`` as a whole, which keeps every accepted
schedule inside ``[soc_min, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .timeseries import HOURS_PER_DAY, HourlySeries, Unit, trailing_mean_profile

WARMUP_DAYS = 10
_TOL = 1e-9


class ScheduleError(ValueError):
    """Schedule is structurally invalid or a search is too large."""


@dataclass(frozen=True)
class BessParams:
    capacity_kwh: float
    rated_kw: float | None = None  # defaults to a 4-hour battery
    efficiency: float = 0.90
    soc_min: float = 0.20
    soc_initial: float = 0.50

    def __post_init__(self):
        if self.rated_kw is None:
            object.__setattr__(self, "rated_kw", self.capacity_kwh / 4.0)
        if self.capacity_kwh <= 0 or self.rated_kw <= 0:
            raise ValueError("capacity and rated power must be positive")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if not 0.0 <= self.soc_min < 1.0:
            raise ValueError("soc_min must lie in [0, 1)")
        if not self.soc_min <= self.soc_initial <= 1.0:
            raise ValueError("soc_initial must lie in [soc_min, 1]")

    @property
    def sqrt_eta(self) -> float:
        return math.sqrt(self.efficiency)


@dataclass(frozen=True)
class GAConfig:
    population: int = 60
    generations: int = 200
    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.15
    elitism: int = 2
    window_sigma_hours: float = 2.0
    power_sigma_frac: float = 0.2  # of rated power
    reset_share: float = 0.5  # share of mutations that redraw the gene uniformly

    def __post_init__(self):
        if self.population < 2 or not 0 < self.elitism < self.population:
            raise ValueError("need population >= 2 and 0 < elitism < population")
        if self.generations < 0 or self.tournament < 1:
            raise ValueError("bad GA budget")


@dataclass(frozen=True)
class BatterySchedule:
    power_kw: np.ndarray
    charge_window: tuple[int, int] | None
    discharge_window: tuple[int, int] | None
    soc_trajectory: np.ndarray  # 25 hour-boundary values

    @property
    def soc_start(self) -> float:
        return float(self.soc_trajectory[0])

    @property
    def soc_end(self) -> float:
        return float(self.soc_trajectory[-1])

    @property
    def charged_kwh(self) -> float:
        return float(self.power_kw[self.power_kw > 0].sum())

    @property
    def discharged_kwh(self) -> float:
        return float(-self.power_kw[self.power_kw < 0].sum())


@dataclass(frozen=True)
class ScheduleObjective:
    cost: float


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def zero_schedule(soc: float) -> BatterySchedule:
    return BatterySchedule(np.zeros(HOURS_PER_DAY), None, None, np.full(HOURS_PER_DAY + 1, float(soc)))


def build_schedule(charge_window, charge_kw, discharge_window, discharge_kw,
                   soc_start: float, params: BessParams) -> BatterySchedule:
    """Lay out uniform-power windows and integrate the SOC trajectory.

    Does not enforce any limit; see :func:`validate`.
    """
    power = np.zeros(HOURS_PER_DAY)
    if charge_window is not None and charge_kw > 0:
        power[charge_window[0] : charge_window[1] + 1] += charge_kw
    else:
        charge_window = None
    if discharge_window is not None and discharge_kw > 0:
        power[discharge_window[0] : discharge_window[1] + 1] -= discharge_kw
    else:
        discharge_window = None
    return BatterySchedule(power, charge_window, discharge_window,
                           soc_path(power, soc_start, params))


def soc_path(power_kw, soc_start: float, params: BessParams) -> np.ndarray:
    soc = np.empty(len(power_kw) + 1)
    soc[0] = soc_start
    e, r = params.capacity_kwh, params.sqrt_eta
    for i, p in enumerate(power_kw):
        soc[i + 1] = soc[i] + (p * r / e if p >= 0 else p / (r * e))
    return soc


def schedule_from_genes(genes, soc_start: float, params: BessParams) -> BatterySchedule:
    c1, c2, d1, d2, pc, pd = (float(x) for x in genes)
    return build_schedule((int(c1), int(c2)), pc, (int(d1), int(d2)), pd, soc_start, params)


def _check_structure(schedule: BatterySchedule) -> list[Violation]:
    out = []
    p = np.asarray(schedule.power_kw, dtype=float)
    if p.shape != (HOURS_PER_DAY,) or not np.all(np.isfinite(p)):
        return [Violation("shape", "power_kw must hold 24 finite values")]
    if np.shape(schedule.soc_trajectory) != (HOURS_PER_DAY + 1,):
        return [Violation("shape", "soc_trajectory must hold 25 values")]
    inside = np.zeros(HOURS_PER_DAY, dtype=bool)
    for code, win, sign in (("charge", schedule.charge_window, 1.0),
                            ("discharge", schedule.discharge_window, -1.0)):
        if win is None:
            continue
        a, b = win
        if not (0 <= a <= b <= HOURS_PER_DAY - 1):
            out.append(Violation("window_order", f"{code} window {win} not ordered within 0..23"))
            continue
        if np.any(inside[a : b + 1]):
            out.append(Violation("window_overlap", "charge and discharge windows overlap"))
        inside[a : b + 1] = True
        if np.any(sign * p[a : b + 1] < -_TOL):
            out.append(Violation("window_sign", f"{code} window carries power of the wrong sign"))
    if np.any(np.abs(p[~inside]) > _TOL):
        out.append(Violation("window_power", "nonzero power outside the charge/discharge windows"))
    signs = np.sign(np.where(np.abs(p) > _TOL, p, 0.0))
    blocks = [s for i, s in enumerate(signs) if s != 0 and (i == 0 or signs[i - 1] != s)]
    if len(blocks) > 2 or (len(blocks) == 2 and blocks[0] == blocks[1]):
        out.append(Violation("single_cycle", "more than one charge and one discharge block"))
    return out


def objective(net_day, schedule: BatterySchedule) -> ScheduleObjective:
    """Total absolute deviation of forecast flow plus battery from the forecast mean."""
    net = np.asarray(net_day, dtype=float)
    problems = _check_structure(schedule)
    if problems:
        raise ScheduleError("; ".join(v.message for v in problems))
    target = float(net.mean())
    return ScheduleObjective(float(np.abs(net + schedule.power_kw - target).sum()))


def validate(schedule: BatterySchedule, params: BessParams) -> list[Violation]:
    """Every broken operating limit of ``schedule``; empty means feasible."""
    out = _check_structure(schedule)
    if out and out[0].code == "shape":
        return out
    p = np.asarray(schedule.power_kw, dtype=float)
    soc = np.asarray(schedule.soc_trajectory, dtype=float)
    e, eta = params.capacity_kwh, params.efficiency

    over = np.flatnonzero(np.abs(p) > params.rated_kw * (1 + _TOL))
    if over.size:
        out.append(Violation("power_cap", f"|P_B| exceeds {params.rated_kw} kW at hours {over.tolist()}"))

    expected = soc_path(p, soc[0], params)
    if not np.allclose(soc, expected, rtol=0.0, atol=1e-9):
        out.append(Violation("soc_linkage", "SOC trajectory inconsistent with the power profile"))

    if schedule.charge_window is not None:
        a, b = schedule.charge_window
        energy = p[a : b + 1].sum()
        cap = eta * e * (1.0 - soc[a])
        if energy > cap + _TOL * max(1.0, cap):
            out.append(Violation("charge_energy", f"charging {energy:.6g} kWh exceeds cap {cap:.6g} kWh"))
    if schedule.discharge_window is not None:
        a, b = schedule.discharge_window
        energy = -p[a : b + 1].sum()
        cap = eta * e * (soc[a] - params.soc_min)
        if energy > cap + _TOL * max(1.0, abs(cap)):
            out.append(Violation("discharge_energy", f"discharging {energy:.6g} kWh exceeds cap {cap:.6g} kWh"))

    if soc.min() < params.soc_min - _TOL:
        out.append(Violation("discharge_energy", f"SOC falls to {soc.min():.6g} below {params.soc_min}"))
    if soc.max() > 1.0 + _TOL:
        out.append(Violation("charge_energy", f"SOC rises to {soc.max():.6g} above 1"))
    return out


@dataclass(frozen=True)
class _GADraws:
    pop0: np.ndarray
    tour: np.ndarray
    cx_gate: np.ndarray
    mut_gate: np.ndarray
    mut_noise: np.ndarray
    reset_gate: np.ndarray
    reset_value: np.ndarray


def _draw_ga(rng: np.random.Generator, cfg: GAConfig, rated_kw: float) -> _GADraws:
    n, g, c = cfg.population, cfg.generations, cfg.population - cfg.elitism
    pop0 = np.empty((n, 6))
    pop0[0] = 0.0  # the idle schedule is always a candidate
    pop0[1:, :4] = rng.uniform(0.0, HOURS_PER_DAY - 1, size=(n - 1, 4))
    pop0[1:, 4:] = rng.uniform(0.0, rated_kw, size=(n - 1, 2))
    tour = rng.integers(0, n, size=(g, c, 2, cfg.tournament), dtype=np.int64)
    cx = rng.random((g, c, 1)) < cfg.crossover_rate
    cx_gate = np.ascontiguousarray(cx & (rng.random((g, c, 6)) < 0.5))
    mut_gate = rng.random((g, c, 6)) < cfg.mutation_rate
    sigma = np.array([cfg.window_sigma_hours] * 4 + [cfg.power_sigma_frac * rated_kw] * 2)
    mut_noise = rng.standard_normal((g, c, 6)) * sigma
    reset_gate = rng.random((g, c, 6)) < cfg.reset_share
    hi = np.array([HOURS_PER_DAY - 1] * 4 + [rated_kw] * 2)
    reset_value = rng.random((g, c, 6)) * hi
    return _GADraws(pop0, tour, cx_gate, mut_gate, mut_noise, reset_gate, reset_value)


def _run(net: np.ndarray, soc_start: float, params: BessParams, draws: _GADraws, elite: int):
    genes, cost = kernels.run_ga(
        net, float(net.mean()), soc_start, params.capacity_kwh, params.rated_kw,
        params.efficiency, params.sqrt_eta, params.soc_min,
        draws.pop0, draws.tour, draws.cx_gate, draws.mut_gate, draws.mut_noise,
        draws.reset_gate, draws.reset_value, elite,
    )
    return schedule_from_genes(genes, soc_start, params), cost


def optimize_day(net_day, params: BessParams, ga_config: GAConfig = GAConfig(),
                 rng: np.random.Generator | int | None = None,
                 soc_start: float | None = None) -> BatterySchedule:
    """Genetic search for the best single-cycle schedule of one day.

    Never worse than leaving the battery idle: the idle schedule seeds the
    population and elitism keeps the incumbent.
    """
    net = np.asarray(net_day, dtype=float)
    if net.shape != (HOURS_PER_DAY,) or not np.all(np.isfinite(net)):
        raise ScheduleError("net_day must hold 24 finite values")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    soc = params.soc_initial if soc_start is None else float(soc_start)
    draws = _draw_ga(rng, ga_config, params.rated_kw)
    schedule, _ = _run(net, soc, params, draws, ga_config.elitism)
    return schedule


def _intervals():
    a, b = np.triu_indices(HOURS_PER_DAY)
    return a, b


def optimize_exact(net_day, params: BessParams, grid_steps: int = 4,
                   soc_start: float | None = None, max_candidates: int = 5_000_000) -> BatterySchedule:
    """Exhaustive search over windows and ``grid_steps`` power levels per window.

    Levels are ``k/grid_steps`` of the largest power the window can take given
    the rating and the energy caps, ``k = 1..grid_steps``. Used as a test
    oracle for :func:`optimize_day`.
    """
    net = np.asarray(net_day, dtype=float)
    soc0 = params.soc_initial if soc_start is None else float(soc_start)
    e, eta, r, pn, smin = (params.capacity_kwh, params.efficiency, params.sqrt_eta,
                           params.rated_kw, params.soc_min)
    a, b = _intervals()
    hours = np.arange(HOURS_PER_DAY)
    ind = ((hours >= a[:, None]) & (hours <= b[:, None])).astype(float)  # (300, 24)
    length = (b - a + 1).astype(float)

    ci, di = np.meshgrid(np.arange(a.size), np.arange(a.size), indexing="ij")
    ci, di = ci.ravel(), di.ravel()
    disjoint = (b[ci] < a[di]) | (b[di] < a[ci])
    ci, di = ci[disjoint], di[disjoint]
    levels = np.arange(1, grid_steps + 1) / grid_steps
    total = 1 + 2 * a.size * grid_steps + ci.size * grid_steps**2
    if grid_steps < 1 or total > max_candidates:
        raise ScheduleError(f"search space of {total} candidates exceeds limit {max_candidates}")

    base = net - net.mean()
    best = (float(np.abs(base).sum()), None, 0.0, None, 0.0)

    def consider(cost, cw, pc, dw, pd):
        nonlocal best
        k = int(np.argmin(cost))
        if cost[k] < best[0]:
            best = (float(cost[k]), cw(k), float(pc[k]), dw(k), float(pd[k]))

    win = lambda idx: (lambda k: (int(a[idx[k]]), int(b[idx[k]])))
    allidx = np.arange(a.size)
    none = lambda k: None
    zeros = np.zeros(a.size)

    # single-window families
    cmax = np.minimum(pn, np.maximum(eta * e * (1.0 - soc0), 0.0) / length)
    dmax = np.minimum(pn, np.maximum(eta * e * (soc0 - smin), 0.0) / length)
    for lv in levels:
        pc = cmax * lv
        consider(np.abs(base + pc[:, None] * ind).sum(axis=1), win(allidx), pc, none, zeros)
        pd = dmax * lv
        consider(np.abs(base - pd[:, None] * ind).sum(axis=1), none, zeros, win(allidx), pd)

    # both windows, in whichever order they fall
    lc, ld = length[ci], length[di]
    charge_first = a[ci] < a[di]
    ic, idd = ind[ci], ind[di]
    for kc in levels:
        for kd in levels:
            # charge first
            mc = np.minimum(pn, max(eta * e * (1.0 - soc0), 0.0) / lc)
            pc_a = mc * kc
            mid = soc0 + pc_a * lc * r / e
            md = np.minimum(pn, np.maximum(eta * e * (mid - smin), 0.0) / ld)
            pd_a = md * kd
            # discharge first
            md = np.minimum(pn, max(eta * e * (soc0 - smin), 0.0) / ld)
            pd_b = md * kd
            mid = soc0 - pd_b * ld / (r * e)
            mc = np.minimum(pn, np.maximum(eta * e * (1.0 - mid), 0.0) / lc)
            pc_b = mc * kc
            pc = np.where(charge_first, pc_a, pc_b)
            pd = np.where(charge_first, pd_a, pd_b)
            cost = np.abs(base + pc[:, None] * ic - pd[:, None] * idd).sum(axis=1)
            consider(cost, win(ci), pc, win(di), pd)

    _, cw, pc, dw, pd = best
    return build_schedule(cw, pc, dw, pd, soc0, params)


@dataclass
class HorizonPlan:
    power: HourlySeries
    schedules: list[BatterySchedule] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)
    forecasts: list[np.ndarray] = field(default_factory=list)

    @property
    def soc(self) -> np.ndarray:
        """SOC at every hour boundary of the horizon (length hours + 1)."""
        parts = [s.soc_trajectory[:-1] for s in self.schedules]
        return np.concatenate(parts + [self.schedules[-1].soc_trajectory[-1:]])

    def day_report(self) -> list[dict]:
        out = []
        for j, (s, obj) in enumerate(zip(self.schedules, self.objectives)):
            out.append({
                "day": j,
                "objective": obj,
                "charge_window": list(s.charge_window) if s.charge_window else None,
                "discharge_window": list(s.discharge_window) if s.discharge_window else None,
                "soc_start": s.soc_start,
                "soc_end": s.soc_end,
            })
        return out


def plan_net(net: HourlySeries, params: BessParams, ga_config: GAConfig = GAConfig(),
             seed: int = 0) -> HorizonPlan:
    """Schedule every day of ``net`` (kW), chaining SOC from day to day.

    The first ten days have no history and leave the battery idle. Every day
    reuses the same GA random stream, so identical forecasts and starting SOC
    give identical schedules.
    """
    if net.days < WARMUP_DAYS + 1:
        raise ScheduleError(f"horizon of {net.days} days is shorter than {WARMUP_DAYS + 1}")
    draws = _draw_ga(np.random.default_rng(np.random.SeedSequence([int(seed), 0xBE55])),
                     ga_config, params.rated_kw)
    soc = params.soc_initial
    plan = HorizonPlan(power=net)
    power = np.zeros(len(net))
    for j in range(net.days):
        if j < WARMUP_DAYS:
            sched, obj, forecast = zero_schedule(soc), 0.0, None
        else:
            forecast = trailing_mean_profile(net, j, WARMUP_DAYS)
            sched, obj = _run(forecast, soc, params, draws, ga_config.elitism)
        power[j * HOURS_PER_DAY : (j + 1) * HOURS_PER_DAY] = sched.power_kw
        plan.schedules.append(sched)
        plan.objectives.append(float(obj))
        plan.forecasts.append(forecast)
        soc = sched.soc_end
    plan.power = HourlySeries(net.start_date, power, Unit.KILOWATT)
    return plan


def plan_horizon(bundle, pev_series: HourlySeries | None, params: BessParams,
                 ga_config: GAConfig = GAConfig(), rng: np.random.Generator | int = 0,
                 pv_kw: HourlySeries | None = None) -> HourlySeries:
    """Battery power series for a dataset bundle plus EV load.

    ``pv_kw`` overrides the bundle's PV series (pass zeros for a no-PV case).
    """
    seed = int(rng.integers(2**63)) if isinstance(rng, np.random.Generator) else int(rng)
    net = bundle.load_kw
    if pev_series is not None:
        net = net + pev_series
    net = net - (bundle.pv_kw if pv_kw is None else pv_kw)
    return plan_net(net, params, ga_config, seed).power
