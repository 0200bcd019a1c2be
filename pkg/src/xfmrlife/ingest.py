"""Input datasets: CSV ingestion, synthetic year generation and the retail tariff.

Every hourly input uses one canonical CSV layout::

    timestamp,value
    2018-01-01T00:00,12.5
    2018-01-01T01:00,11.875

Timestamps advance by exactly one hour per row and the first row must be at
hour 00, so a file always covers whole days.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .timeseries import HOURS_PER_DAY, HourlySeries, SeriesError, Unit

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
HEADER = ("timestamp", "value")
DEFAULT_START = dt.date(2018, 1, 1)
MIN_SYNTHETIC_DAYS = 11


class IngestError(ValueError):
    """A CSV file or dataset bundle failed validation."""


@dataclass(frozen=True)
class RetailTariff:
    summer_rate: float = 0.1369  # $/kWh, May-Oct
    winter_rate: float = 0.1323  # $/kWh, Nov-Apr
    monthly_fee: float = 7.0

    def __post_init__(self):
        if min(self.summer_rate, self.winter_rate, self.monthly_fee) < 0:
            raise IngestError("tariff rates and fee must be nonnegative")


def retail_rate_at(tariff: RetailTariff, date: dt.date) -> float:
    return tariff.summer_rate if 5 <= date.month <= 10 else tariff.winter_rate


def hourly_retail_rates(tariff: RetailTariff, series: HourlySeries) -> np.ndarray:
    """Retail $/kWh for every hour of ``series``."""
    daily = [retail_rate_at(tariff, series.date_of_day(j)) for j in range(series.days)]
    return np.repeat(np.asarray(daily, dtype=float), HOURS_PER_DAY)


@dataclass(frozen=True)
class DatasetBundle:
    load_kw: HourlySeries
    temperature_c: HourlySeries
    pv_kw: HourlySeries
    retail_price: RetailTariff = field(default_factory=RetailTariff)
    wholesale_price: HourlySeries | None = None
    pv_rated_kw: float = 10.0

    def __post_init__(self):
        validate_bundle(self)

    @property
    def days(self) -> int:
        return self.load_kw.days

    @property
    def start_date(self) -> dt.date:
        return self.load_kw.start_date


def validate_bundle(bundle: DatasetBundle) -> None:
    expected = {
        "load_kw": Unit.KILOWATT,
        "temperature_c": Unit.CELSIUS,
        "pv_kw": Unit.KILOWATT,
        "wholesale_price": Unit.DOLLARS_PER_KWH,
    }
    ref = bundle.load_kw
    for name, unit in expected.items():
        s = getattr(bundle, name)
        if s is None:
            continue
        if s.unit != unit:
            raise IngestError(f"{name} must be in {unit.value}, got {s.unit.value}")
        if len(s) != len(ref) or s.start_date != ref.start_date:
            raise IngestError(f"{name} is not aligned with load_kw")
    if np.any(bundle.load_kw.samples < 0):
        raise IngestError("load_kw must be nonnegative")
    if np.any(bundle.pv_kw.samples < 0):
        raise IngestError("pv_kw must be nonnegative")
    if bundle.pv_rated_kw <= 0:
        raise IngestError("pv_rated_kw must be positive")


def load_csv(path, expected_unit: Unit | str) -> HourlySeries:
    """Read a canonical ``timestamp,value`` file.

    Errors name the data row (1-based, header excluded) that failed.
    """
    path = Path(path)
    unit = Unit(expected_unit)
    values: list[float] = []
    start: dt.datetime | None = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise IngestError(f"{path}: header must be 'timestamp,value', got {header}")
        for row_no, row in enumerate(reader, start=1):
            if len(row) != 2:
                raise IngestError(f"{path}: row {row_no}: expected 2 columns, got {len(row)}")
            ts_text, value_text = row
            try:
                ts = dt.datetime.strptime(ts_text.strip(), TIMESTAMP_FORMAT)
            except ValueError:
                raise IngestError(f"{path}: row {row_no}: bad timestamp {ts_text!r}") from None
            try:
                value = float(value_text)
            except ValueError:
                raise IngestError(f"{path}: row {row_no}: bad value {value_text!r}") from None
            if not math.isfinite(value):
                raise IngestError(f"{path}: row {row_no}: non-finite value {value_text!r}")
            if start is None:
                if ts.hour != 0 or ts.minute != 0:
                    raise IngestError(f"{path}: row {row_no}: first timestamp must be at 00:00")
                start = ts
            elif ts != start + dt.timedelta(hours=len(values)):
                raise IngestError(
                    f"{path}: row {row_no}: timestamps must advance by exactly one hour"
                )
            values.append(value)
    if not values or len(values) % HOURS_PER_DAY:
        raise IngestError(
            f"{path}: {len(values)} rows; row count must be a positive multiple of 24"
        )
    try:
        return HourlySeries(start.date(), np.asarray(values), unit)
    except SeriesError as exc:  # pragma: no cover - already checked row by row
        raise IngestError(f"{path}: {exc}") from exc


def format_value(value: float) -> str:
    return repr(float(value))


def write_csv(series: HourlySeries, path) -> None:
    """Write ``series`` in the canonical layout (values via ``repr``)."""
    base = dt.datetime.combine(series.start_date, dt.time())
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(HEADER) + "\n")
        for i, v in enumerate(series.samples):
            ts = (base + dt.timedelta(hours=i)).strftime(TIMESTAMP_FORMAT)
            fh.write(f"{ts},{format_value(v)}\n")


@dataclass(frozen=True)
class SyntheticProfile:
    """Knobs for the synthetic stand-in year.

    Defaults describe a 10-unit residential building on a 63 kVA transformer
    in a hot-summer climate; the aggregate no-EV peak sits near 60 % of rating.
    """

    start_date: dt.date = DEFAULT_START
    # building load
    customers_low: int = 3
    customers_medium: int = 6
    customers_high: int = 1
    class_scale: tuple[float, float, float] = (0.6, 1.0, 1.6)
    morning_peak_hour: float = 7.0
    evening_peak_hour: float = 19.0
    morning_peak_share: float = 0.6
    peak_trough_ratio: float = 2.5
    seasonal_load_amplitude: float = 0.25
    target_peak_kw: float = 0.60 * 63.0
    load_noise: float = 0.08
    # PV
    pv_rated_kw: float = 10.0
    pv_derate: float = 0.85
    solar_noon_hour: float = 13.0
    # ambient temperature
    temp_mean_c: float = 20.0
    temp_seasonal_amplitude_c: float = 9.0
    temp_daily_amplitude_c: float = 5.0
    temp_peak_hour: float = 15.0
    temp_noise_c: float = 1.0


def _daily_load_shape(p: SyntheticProfile) -> np.ndarray:
    h = np.arange(HOURS_PER_DAY, dtype=float)

    def bump(center: float, width: float) -> np.ndarray:
        d = np.abs(h - center)
        d = np.minimum(d, HOURS_PER_DAY - d)
        return np.exp(-0.5 * (d / width) ** 2)

    raw = p.morning_peak_share * bump(p.morning_peak_hour, 1.5) + bump(p.evening_peak_hour, 2.5)
    raw = (raw - raw.min()) / (raw.max() - raw.min())
    return 1.0 + (p.peak_trough_ratio - 1.0) * raw  # min 1, max = ratio


def _day_of_year(start: dt.date, days: int) -> np.ndarray:
    first = start.timetuple().tm_yday - 1
    return (first + np.arange(days)) % 365


def synthesize_bundle(
    seed: int, days: int = 365, profile_params: SyntheticProfile | None = None
) -> DatasetBundle:
    """Generate a deterministic stand-in for the measured load/PV/temperature year."""
    if days < MIN_SYNTHETIC_DAYS:
        raise IngestError(f"synthetic bundle needs at least {MIN_SYNTHETIC_DAYS} days, got {days}")
    p = profile_params or SyntheticProfile()
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5EED]))
    doy = _day_of_year(p.start_date, days)
    hours = np.arange(HOURS_PER_DAY, dtype=float)

    # Load: per-customer shape with summer cooling uplift and multiplicative noise.
    shape = _daily_load_shape(p)
    season = 1.0 + p.seasonal_load_amplitude * np.cos(2 * np.pi * (doy - 200) / 365)
    scales = np.repeat(
        np.asarray(p.class_scale, dtype=float),
        [p.customers_low, p.customers_medium, p.customers_high],
    )
    unit_peak = p.target_peak_kw / (
        scales.sum() * p.peak_trough_ratio * (1.0 + p.seasonal_load_amplitude)
    )
    noise = rng.lognormal(-0.5 * p.load_noise**2, p.load_noise, size=(scales.size, days, HOURS_PER_DAY))
    per_customer = scales[:, None, None] * shape[None, None, :] * season[None, :, None] * noise
    load = unit_peak * per_customer.sum(axis=0)

    # PV: half-sine bell between sunrise and sunset, scaled by a daily clearness draw.
    day_length = 12.0 + 2.0 * np.sin(2 * np.pi * (doy - 80) / 365)
    sunrise = p.solar_noon_hour - day_length / 2
    t = hours[None, :] + 0.5
    phase = (t - sunrise[:, None]) / day_length[:, None]
    bell = np.where((phase > 0) & (phase < 1), np.sin(np.pi * np.clip(phase, 0, 1)) ** 1.5, 0.0)
    irradiance = 0.9 + 0.1 * np.cos(2 * np.pi * (doy - 172) / 365)
    clearness = rng.beta(5.0, 1.5, size=days)
    pv = p.pv_rated_kw * p.pv_derate * bell * (irradiance * clearness)[:, None]
    pv[:, 0] = 0.0  # bell is already zero here; keep midnight exact

    # Ambient temperature: seasonal + diurnal sinusoids with a daily anomaly.
    seasonal = -p.temp_seasonal_amplitude_c * np.cos(2 * np.pi * (doy + 10) / 365)
    diurnal = p.temp_daily_amplitude_c * np.cos(2 * np.pi * (hours - p.temp_peak_hour) / 24)
    anomaly = rng.normal(0.0, p.temp_noise_c, size=days)
    temp = p.temp_mean_c + (seasonal + anomaly)[:, None] + diurnal[None, :]

    start = p.start_date
    return DatasetBundle(
        load_kw=HourlySeries(start, load.reshape(-1), Unit.KILOWATT),
        temperature_c=HourlySeries(start, temp.reshape(-1), Unit.CELSIUS),
        pv_kw=HourlySeries(start, pv.reshape(-1), Unit.KILOWATT),
        pv_rated_kw=p.pv_rated_kw,
    )


def load_bundle(load, temperature, pv, prices=None, pv_rated_kw: float = 10.0,
                tariff: RetailTariff | None = None) -> DatasetBundle:
    """Assemble a bundle from canonical CSV files."""
    return DatasetBundle(
        load_kw=load_csv(load, Unit.KILOWATT),
        temperature_c=load_csv(temperature, Unit.CELSIUS),
        pv_kw=load_csv(pv, Unit.KILOWATT),
        retail_price=tariff or RetailTariff(),
        wholesale_price=load_csv(prices, Unit.DOLLARS_PER_KWH) if prices else None,
        pv_rated_kw=pv_rated_kw,
    )


def write_bundle(bundle: DatasetBundle, out_dir) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "load": out_dir / "load.csv",
        "temperature": out_dir / "temperature.csv",
        "pv": out_dir / "pv.csv",
    }
    write_csv(bundle.load_kw, paths["load"])
    write_csv(bundle.temperature_c, paths["temperature"])
    write_csv(bundle.pv_kw, paths["pv"])
    if bundle.wholesale_price is not None:
        paths["prices"] = out_dir / "prices.csv"
        write_csv(bundle.wholesale_price, paths["prices"])
    return paths
