"""Deterministic synthetic net-load scenarios.

Generates desk-scale series with the diurnal and seasonal structure of a
solar-heavy distribution feeder: a demand profile with morning and evening
peaks, a half-sine irradiance depression scaled by the penetration level
(the duck curve), and seeded Gaussian noise. The same seed produces the
same noise realization at every penetration level, so the penetration
effect is isolated from the noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from datetime import date, timedelta
from datetime import datetime, time

import numpy as np

from .errors import NlfError
from .timeseries import NetLoadSeries, PenetrationLevel, Resolution, resample

MIN_DAYS = 32  # 30-day warm-up + at least one scored day + margin


class ConfigInvalid(NlfError):
    """A scenario configuration violates its declared ranges."""


def scenario_id(penetration: PenetrationLevel, resolution: Resolution) -> str:
    return f"p{penetration.percent}_{resolution.label}"


@dataclass(frozen=True)
class ScenarioConfig:
    penetration: PenetrationLevel
    resolution: Resolution
    start_date: date
    days: int
    seed: int
    base_load_kw: float = 100.0
    solar_capacity_kw: float = 120.0
    noise_sd_kw: float = 4.0

    def __post_init__(self) -> None:
        if self.days < MIN_DAYS:
            raise ConfigInvalid(f"days must be >= {MIN_DAYS}, got {self.days}")
        for name in ("base_load_kw", "solar_capacity_kw", "noise_sd_kw"):
            if not getattr(self, name) > 0:
                raise ConfigInvalid(f"{name} must be positive")


def _day_of_year(config: ScenarioConfig) -> np.ndarray:
    doy = np.empty(config.days)
    for k in range(config.days):
        doy[k] = (config.start_date + timedelta(days=k)).timetuple().tm_yday
    return doy


def _generate_values(config: ScenarioConfig, percent: int) -> np.ndarray:
    """Net-load values at an explicit penetration percent (test hook)."""
    spd = config.resolution.steps_per_day
    n = config.days * spd
    tod = np.tile(np.arange(spd) * (config.resolution.step_minutes / 60.0), config.days)
    doy = np.repeat(_day_of_year(config), spd)

    # Gaussian bumps on circular time-of-day distance so the profile is
    # smooth across midnight.
    dist_morning = np.minimum(np.abs(tod - 8.0), 24.0 - np.abs(tod - 8.0))
    dist_evening = np.minimum(np.abs(tod - 19.0), 24.0 - np.abs(tod - 19.0))
    morning = np.exp(-0.5 * (dist_morning / 3.0) ** 2)
    evening = np.exp(-0.5 * (dist_evening / 3.5) ** 2)
    seasonal = 1.0 + 0.15 * np.cos(2.0 * np.pi * (doy - 15.0) / 365.0)
    demand = config.base_load_kw * (0.7 + 0.2 * morning + 0.3 * evening) * seasonal

    # Daylight half-width swings +/-1.5h around 6h, widest near the summer
    # solstice; the half-sine is clamped to zero outside daylight.
    half_width = 6.0 + 1.5 * -np.cos(2.0 * np.pi * (doy + 10.0) / 365.0)
    sunrise = 12.0 - half_width
    irradiance = np.sin(np.pi * (tod - sunrise) / (2.0 * half_width))
    irradiance = np.clip(irradiance, 0.0, None)
    irradiance[(tod <= sunrise) | (tod >= sunrise + 2.0 * half_width)] = 0.0

    noise = np.random.default_rng(config.seed).normal(0.0, config.noise_sd_kw, n)
    return demand - (percent / 100.0) * config.solar_capacity_kw * irradiance + noise


def generate(config: ScenarioConfig) -> NetLoadSeries:
    """One deterministic scenario series; same config, same bits."""
    values = _generate_values(config, config.penetration.percent)
    return NetLoadSeries(
        resolution=config.resolution,
        penetration=config.penetration,
        start=datetime.combine(config.start_date, time()),
        values=values,
        scenario_id=scenario_id(config.penetration, config.resolution),
    )


def generate_suite(
    seed: int,
    start_date: date,
    days: int,
    base_load_kw: float = 100.0,
    solar_capacity_kw: float = 120.0,
    noise_sd_kw: float = 4.0,
) -> list[NetLoadSeries]:
    """The 3x2 scenario grid: penetrations 20/30/50 at 15-min and 1-hour.

    All six series share one demand/solar/noise realization; the 1-hour
    series are derived from their 15-minute parents by mean resampling.
    Ordered by penetration, then resolution (15min before 1h).
    """
    suite: list[NetLoadSeries] = []
    for pen in PenetrationLevel:
        config = ScenarioConfig(
            penetration=pen,
            resolution=Resolution.MIN15,
            start_date=start_date,
            days=days,
            seed=seed,
            base_load_kw=base_load_kw,
            solar_capacity_kw=solar_capacity_kw,
            noise_sd_kw=noise_sd_kw,
        )
        fine = generate(config)
        coarse = resample(fine, Resolution.HOUR1)
        coarse = dc_replace(coarse, scenario_id=scenario_id(pen, Resolution.HOUR1))
        suite.extend([fine, coarse])
    return suite
