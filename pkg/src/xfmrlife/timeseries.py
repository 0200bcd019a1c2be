"""Calendar-aligned hourly series shared by every stage of the simulator."""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass

import numpy as np

HOURS_PER_DAY = 24


class Unit(str, enum.Enum):
    KILOWATT = "kilowatt"
    CELSIUS = "celsius"
    DOLLARS_PER_KWH = "dollars_per_kwh"
    DIMENSIONLESS = "dimensionless"


class SeriesError(ValueError):
    """Raised for malformed series or invalid day indexing."""


@dataclass(frozen=True, eq=False)
class HourlySeries:
    """Hourly samples starting at midnight of ``start_date``.

    The sample buffer is copied and frozen on construction, so instances can be
    shared freely. Arithmetic is only defined between series with the same
    unit, length and start date.
    """

    start_date: dt.date
    samples: np.ndarray
    unit: Unit

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float, copy=True).reshape(-1)
        if arr.size == 0 or arr.size % HOURS_PER_DAY:
            raise SeriesError(
                f"series length must be a positive multiple of 24, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise SeriesError(f"non-finite sample at index {bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "unit", Unit(self.unit))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def days(self) -> int:
        return self.samples.size // HOURS_PER_DAY

    def date_of_day(self, j: int) -> dt.date:
        return self.start_date + dt.timedelta(days=j)

    def hour_dates(self) -> list[dt.date]:
        """Calendar date of every sample."""
        return [self.date_of_day(j) for j in range(self.days) for _ in range(HOURS_PER_DAY)]

    def by_day(self) -> np.ndarray:
        """Read-only ``(days, 24)`` view."""
        return self.samples.reshape(self.days, HOURS_PER_DAY)

    def with_samples(self, samples) -> "HourlySeries":
        return HourlySeries(self.start_date, samples, self.unit)

    def _check_compatible(self, other: "HourlySeries") -> None:
        if self.unit != other.unit:
            raise SeriesError(f"unit mismatch: {self.unit.value} vs {other.unit.value}")
        if len(self) != len(other) or self.start_date != other.start_date:
            raise SeriesError("series are not calendar-aligned")

    def __add__(self, other: "HourlySeries") -> "HourlySeries":
        if not isinstance(other, HourlySeries):
            return NotImplemented
        self._check_compatible(other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "HourlySeries") -> "HourlySeries":
        if not isinstance(other, HourlySeries):
            return NotImplemented
        self._check_compatible(other)
        return self.with_samples(self.samples - other.samples)

    def __neg__(self) -> "HourlySeries":
        return self.with_samples(-self.samples)

    def scale(self, factor: float) -> "HourlySeries":
        return self.with_samples(self.samples * float(factor))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HourlySeries):
            return NotImplemented
        return (
            self.unit == other.unit
            and self.start_date == other.start_date
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


def zeros_like(series: HourlySeries, unit: Unit | None = None) -> HourlySeries:
    return HourlySeries(series.start_date, np.zeros(len(series)), unit or series.unit)


def slice_day(series: HourlySeries, j: int) -> np.ndarray:
    """Return the 24 samples of day ``j`` (a copy)."""
    if j < 0 or j >= series.days:
        raise SeriesError(f"day index {j} out of range for {series.days}-day series")
    start = j * HOURS_PER_DAY
    return series.samples[start : start + HOURS_PER_DAY].copy()


def concat_days(days, start_date: dt.date, unit: Unit) -> HourlySeries:
    return HourlySeries(start_date, np.concatenate([np.asarray(d, dtype=float) for d in days]), unit)


def trailing_mean_profile(series: HourlySeries, j: int, window_days: int = 10) -> np.ndarray:
    """Hour-by-hour mean of the ``window_days`` days preceding day ``j``.

    Applied to the net transformer flow (load + PEV - PV) this is the
    day-ahead forecast profile the battery scheduler flattens.
    """
    if window_days < 1:
        raise SeriesError("window_days must be >= 1")
    if j < window_days:
        raise SeriesError(f"day {j} has insufficient history for a {window_days}-day window")
    if j > series.days:
        raise SeriesError(f"day index {j} out of range for {series.days}-day series")
    block = series.by_day()[j - window_days : j]
    return block.sum(axis=0) / window_days
