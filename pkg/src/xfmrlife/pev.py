"""Monte Carlo plug-in EV charging demand for a shared parking lot.

Each vehicle comes home once a day at a normally distributed time after a
log-normally distributed trip, then charges at constant power until it is back
at the required state of charge. Chargers are a limited pool of slots served
first-come first-served; sessions that run past midnight carry over.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .timeseries import HOURS_PER_DAY, HourlySeries, Unit


@dataclass(frozen=True)
class PevParams:
    fleet_size: int = 12
    slots: int = 10
    battery_kwh: float = 24.0  # Nissan Leaf
    consumption_kwh_per_mile: float = 0.340
    soc_required: float = 0.95
    charger_kw: float = 6.6
    charger_efficiency: float = 0.90
    arrival_mean_hour: float = 17.0
    arrival_std_hours: float = 2.28
    distance_log_mean: float = 3.37
    distance_log_std: float = 0.5

    def __post_init__(self):
        if self.fleet_size < 0 or self.slots < 1:
            raise ValueError("fleet_size must be >= 0 and slots >= 1")
        if not 0.0 < self.soc_required <= 1.0:
            raise ValueError("soc_required must lie in (0, 1]")
        positive = (
            self.battery_kwh, self.consumption_kwh_per_mile, self.charger_kw,
            self.charger_efficiency, self.arrival_std_hours, self.distance_log_std,
        )
        if min(positive) <= 0:
            raise ValueError("PEV physical parameters must be positive")
        if self.charger_efficiency > 1.0:
            raise ValueError("charger_efficiency must be <= 1")


@dataclass(frozen=True)
class PevArrival:
    vehicle_id: int
    arrival_time: float  # hour of day in [0, 24)
    distance_miles: float
    soc_initial: float
    charge_hours: float
    day: int = 0

    @property
    def absolute_arrival(self) -> float:
        return self.day * HOURS_PER_DAY + self.arrival_time


@dataclass(frozen=True)
class ChargingSession:
    vehicle_id: int
    day: int
    arrival: float  # absolute hours from series start
    start: float
    end: float
    kw: float

    @property
    def energy_kwh(self) -> float:
        return (self.end - self.start) * self.kw


_LATEST_ARRIVAL = math.nextafter(float(HOURS_PER_DAY), 0.0)


def sample_arrivals(rng: np.random.Generator, n: int, params: PevParams = PevParams()) -> np.ndarray:
    # Out-of-range draws are clamped, not redrawn, so each vehicle consumes one draw.
    t = rng.normal(params.arrival_mean_hour, params.arrival_std_hours, size=n)
    return np.clip(t, 0.0, _LATEST_ARRIVAL)


def sample_distances(rng: np.random.Generator, n: int, params: PevParams = PevParams()) -> np.ndarray:
    return rng.lognormal(params.distance_log_mean, params.distance_log_std, size=n)


def sample_arrival(rng: np.random.Generator, params: PevParams = PevParams()) -> float:
    return float(sample_arrivals(rng, 1, params)[0])


def sample_distance(rng: np.random.Generator, params: PevParams = PevParams()) -> float:
    return float(sample_distances(rng, 1, params)[0])


def initial_soc(distance_miles: float, params: PevParams = PevParams()) -> float:
    """State of charge on arrival, assuming the car left home full."""
    soc = 1.0 - params.consumption_kwh_per_mile * distance_miles / params.battery_kwh
    return max(0.0, soc)


def charge_duration(soc_initial: float, params: PevParams = PevParams()) -> float:
    """Hours at constant charger power needed to reach ``soc_required``."""
    deficit = params.soc_required - soc_initial
    if deficit <= 0:
        return 0.0
    return deficit * params.battery_kwh / (params.charger_efficiency * params.charger_kw)


def sample_fleet_day(rng: np.random.Generator, params: PevParams = PevParams(), day: int = 0) -> list[PevArrival]:
    """Draw one day's arrival record for every vehicle in the fleet."""
    n = params.fleet_size
    arrivals = sample_arrivals(rng, n, params)
    distances = sample_distances(rng, n, params)
    out = []
    for vid in range(n):
        soc = initial_soc(float(distances[vid]), params)
        out.append(
            PevArrival(
                vehicle_id=vid,
                arrival_time=float(arrivals[vid]),
                distance_miles=float(distances[vid]),
                soc_initial=soc,
                charge_hours=charge_duration(soc, params),
                day=day,
            )
        )
    return out


def prorate(buffer: np.ndarray, start: float, end: float, kw: float, origin: float = 0.0) -> None:
    """Add ``kw`` over ``[start, end)`` into hourly bins of ``buffer``.

    ``origin`` is the absolute hour of ``buffer[0]``.
    """
    s, e = start - origin, end - origin
    h = int(math.floor(s))
    while h < e:
        overlap = min(e, h + 1) - max(s, h)
        if overlap > 0:
            buffer[h] += kw * overlap
        h += 1


class PevLoadGenerator:
    """Day-by-day P_PEV generator with charger queue state carried across midnight."""

    def __init__(self, params: PevParams = PevParams(), rng: np.random.Generator | None = None):
        self.params = params
        self.rng = rng if rng is not None else np.random.default_rng()
        self.day = 0
        self._slots = [0.0] * params.slots  # absolute free-at times, min-heap
        self._pending = np.zeros(3 * HOURS_PER_DAY)  # kW from current day start onward
        self.sessions: list[ChargingSession] = []

    def _admit(self, arrivals: list[PevArrival]) -> None:
        p = self.params
        origin = self.day * HOURS_PER_DAY
        for a in sorted(arrivals, key=lambda a: (a.absolute_arrival, a.vehicle_id)):
            if a.charge_hours <= 0:
                continue
            free_at = self._slots[0]
            start = max(a.absolute_arrival, free_at)
            end = start + a.charge_hours
            heapq.heapreplace(self._slots, end)
            need = int(math.ceil(end - origin)) + 1
            if need > self._pending.size:
                self._pending = np.concatenate([self._pending, np.zeros(need - self._pending.size)])
            prorate(self._pending, start, end, p.charger_kw, origin=origin)
            self.sessions.append(
                ChargingSession(a.vehicle_id, a.day, a.absolute_arrival, start, end, p.charger_kw)
            )

    def step(self, arrivals: list[PevArrival] | None = None) -> np.ndarray:
        """Advance one day and return its 24 hourly kW values.

        ``arrivals`` overrides sampling (used to inject hand-built scenarios).
        """
        if arrivals is None:
            arrivals = sample_fleet_day(self.rng, self.params, self.day)
        self._admit(arrivals)
        out = self._pending[:HOURS_PER_DAY].copy()
        rest = self._pending[HOURS_PER_DAY:]
        self._pending = np.concatenate([rest, np.zeros(max(0, 3 * HOURS_PER_DAY - rest.size))])
        self.day += 1
        return out


def fleet_day_load(rng: np.random.Generator, params: PevParams = PevParams(), day: int = 0,
                   arrivals: list[PevArrival] | None = None) -> np.ndarray:
    """P_PEV for a single, stand-alone day (charging past midnight is cut off)."""
    gen = PevLoadGenerator(params, rng)
    gen.day = day
    return gen.step(arrivals)


def fleet_series(params: PevParams, days: int, seed: int, start_date=None) -> HourlySeries:
    """Continuous multi-day P_PEV series, bit-identical for a fixed seed."""
    from .ingest import DEFAULT_START

    gen = PevLoadGenerator(params, np.random.default_rng(np.random.SeedSequence([int(seed), 0xE7])))
    days_out = [gen.step() for _ in range(days)]
    return HourlySeries(start_date or DEFAULT_START, np.concatenate(days_out), Unit.KILOWATT)


def max_concurrency(sessions: list[ChargingSession]) -> int:
    """Peak number of simultaneously active sessions."""
    events = []
    for s in sessions:
        if s.end > s.start:
            events.append((s.start, 1))
            events.append((s.end, -1))
    events.sort(key=lambda e: (e[0], e[1]))  # ends before starts at equal times
    active = peak = 0
    for _, delta in events:
        active += delta
        peak = max(peak, active)
    return peak
