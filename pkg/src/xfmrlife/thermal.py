"""Distribution transformer hot-spot temperature and insulation aging.

Exponential top-oil / winding response toward ultimate rises, Arrhenius aging
acceleration referenced to a 110 C hot spot, and loss of life relative to the
normal insulation life. Defaults are typical ONAN distribution-unit constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .timeseries import HourlySeries

REFERENCE_HOT_SPOT_C = 110.0
HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class TransformerParams:
    rated_kva: float = 63.0
    delta_theta_to_rated: float = 55.0
    delta_theta_h_rated: float = 25.0
    loss_ratio_R: float = 5.0
    exponent_m: float = 0.8
    exponent_n: float = 0.8
    tau_to_hours: float = 3.5
    tau_w_hours: float = 5.0 / 60.0
    normal_life_hours: float = 180000.0
    remaining_life_hours: float = 112000.0
    power_factor: float = 1.0

    def __post_init__(self):
        positive = (
            self.rated_kva, self.delta_theta_to_rated, self.delta_theta_h_rated,
            self.loss_ratio_R, self.tau_to_hours, self.tau_w_hours,
            self.normal_life_hours, self.remaining_life_hours,
        )
        if min(positive) <= 0:
            raise ValueError("transformer parameters must be positive")
        for name in ("exponent_m", "exponent_n", "power_factor"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.remaining_life_hours > self.normal_life_hours:
            raise ValueError("remaining life cannot exceed normal life")

    def per_unit(self, load_kw) -> np.ndarray:
        """Load ratio K_u from kW; reverse power flow heats the unit just the same."""
        return np.abs(np.asarray(load_kw, dtype=float)) / (self.rated_kva * self.power_factor)


@dataclass(frozen=True)
class ThermalState:
    delta_theta_to: float
    delta_theta_h: float
    theta_h: float


@dataclass(frozen=True)
class AgingResult:
    faa_series: np.ndarray
    f_eqa: float
    loss_of_life_percent: float
    theta_h: np.ndarray
    delta_theta_to: np.ndarray
    delta_theta_h: np.ndarray
    final_state: ThermalState

    @property
    def max_theta_h(self) -> float:
        return float(self.theta_h.max())

    def summary(self) -> dict:
        return {
            "f_eqa": self.f_eqa,
            "loss_of_life_percent": self.loss_of_life_percent,
            "max_theta_h": self.max_theta_h,
        }


def ultimate_rises(load_pu: float, params: TransformerParams = TransformerParams()) -> tuple[float, float]:
    """Steady-state (top-oil, hot-spot-over-oil) rises at load ratio ``load_pu``."""
    if load_pu < 0:
        raise ValueError("load ratio must be nonnegative")
    r = params.loss_ratio_R
    to_ult = params.delta_theta_to_rated * ((load_pu**2 * r + 1.0) / (r + 1.0)) ** params.exponent_n
    h_ult = params.delta_theta_h_rated * load_pu ** (2.0 * params.exponent_m)
    return to_ult, h_ult


def steady_state(ambient_c: float, load_pu: float, params: TransformerParams = TransformerParams()) -> ThermalState:
    to_ult, h_ult = ultimate_rises(load_pu, params)
    return ThermalState(to_ult, h_ult, ambient_c + to_ult + h_ult)


def relax(initial: float, ultimate: float, dt: float, tau: float) -> float:
    return (ultimate - initial) * (1.0 - math.exp(-dt / tau)) + initial


def step_thermal(state: ThermalState, ambient_c: float, load_pu: float, dt_hours: float,
                 params: TransformerParams = TransformerParams()) -> ThermalState:
    """Advance both rises by ``dt_hours`` under constant load and ambient."""
    if dt_hours <= 0:
        raise ValueError("dt must be positive")
    to_ult, h_ult = ultimate_rises(load_pu, params)
    to = relax(state.delta_theta_to, to_ult, dt_hours, params.tau_to_hours)
    h = relax(state.delta_theta_h, h_ult, dt_hours, params.tau_w_hours)
    return ThermalState(to, h, ambient_c + to + h)


def aging_factor(theta_h_c):
    """Aging acceleration relative to the 110 C reference hot spot."""
    theta = np.asarray(theta_h_c, dtype=float)
    if np.any(theta <= -273.0):
        raise ValueError("hot-spot temperature below absolute zero")
    out = np.exp(15000.0 / (REFERENCE_HOT_SPOT_C + 273.0) - 15000.0 / (theta + 273.0))
    return float(out) if out.ndim == 0 else out


def equivalent_aging(faa_series, dt_series) -> float:
    faa = np.asarray(faa_series, dtype=float)
    dt = np.asarray(dt_series, dtype=float)
    if faa.size == 0:
        raise ValueError("empty aging series")
    if faa.shape != dt.shape:
        raise ValueError("faa and dt lengths differ")
    if np.any(dt <= 0):
        raise ValueError("time steps must be positive")
    return float(np.sum(faa * dt) / np.sum(dt))


def loss_of_life(f_eqa: float, period_hours: float, params: TransformerParams = TransformerParams()) -> float:
    """Percent of normal insulation life consumed over ``period_hours``."""
    if period_hours <= 0:
        raise ValueError("period must be positive")
    return f_eqa * period_hours / params.normal_life_hours * 100.0


def simulate_year(load_kw_series, ambient_series, params: TransformerParams = TransformerParams(),
                  initial_state: ThermalState | None = None, dt_hours: float = 1.0) -> AgingResult:
    """Hour-by-hour thermal and aging pass over a load/ambient pair.

    Each sample is one step of ``dt_hours``. Without ``initial_state`` the
    recurrence starts at the steady state of the first sample, so a chained
    run (passing the previous ``final_state``) matches one long run exactly.
    """
    load = load_kw_series.samples if isinstance(load_kw_series, HourlySeries) else load_kw_series
    ambient = ambient_series.samples if isinstance(ambient_series, HourlySeries) else ambient_series
    load = np.asarray(load, dtype=float)
    ambient = np.asarray(ambient, dtype=float)
    if load.shape != ambient.shape:
        raise ValueError(f"load ({load.size}) and ambient ({ambient.size}) lengths differ")
    if load.size == 0:
        raise ValueError("empty series")
    k_u = params.per_unit(load)
    if initial_state is None:
        initial_state = steady_state(float(ambient[0]), float(k_u[0]), params)
    to, h, theta = kernels.thermal_path(
        ambient, k_u, initial_state.delta_theta_to, initial_state.delta_theta_h,
        params.delta_theta_to_rated, params.delta_theta_h_rated, params.loss_ratio_R,
        params.exponent_m, params.exponent_n, params.tau_to_hours, params.tau_w_hours, dt_hours,
    )
    faa = kernels.aging_factors(theta)
    f_eqa = equivalent_aging(faa, np.full(faa.size, dt_hours))
    lol = loss_of_life(f_eqa, faa.size * dt_hours, params)
    final = ThermalState(float(to[-1]), float(h[-1]), float(theta[-1]))
    return AgingResult(faa, f_eqa, lol, theta, to, h, final)
