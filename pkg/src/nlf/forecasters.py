"""Probabilistic forecasters behind one pluggable interface.

Two history-only models are provided. The reference model mirrors the
persistence benchmark used in net-load forecasting competitions: an
ensemble of the same-time-of-day observations from the trailing 30 days.
The candidate is a deliberately simple quantile forecaster (trailing-window
empirical quantiles nudged toward yesterday) whose job is to exercise the
comparison pipeline, not to be a serious model.

Forecasts issued for day D may only use observations strictly before the
issue time, the last grid point of day D-1. Missing days are skipped and
the window extended further back, so the member count is constant and
scores stay comparable across dates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from enum import Enum

import numpy as np

from .errors import NlfError
from .timeseries import NetLoadSeries, format_timestamp

DEFAULT_QUANTILE_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 20))

REFERENCE_MODEL_ID = "reference"
CANDIDATE_MODEL_ID = "candidate"


class InsufficientHistory(NlfError):
    """Fewer usable prior days exist than the forecaster's window needs."""


class EmptyRange(NlfError):
    """A schedule over an empty date range."""


class ForecasterKind(Enum):
    REFERENCE_30DAY = "reference_30day"
    CANDIDATE_CLIMATOLOGY = "candidate_climatology"


@dataclass(frozen=True, eq=False)
class Forecast:
    """Probabilistic day-ahead prediction for one target timestamp.

    Exactly one representation is populated: an unordered ensemble of
    members, or values at strictly increasing quantile levels. Quantile
    values are rearranged (sorted) at construction so they are always
    non-decreasing.
    """

    model_id: str
    issue_time: datetime
    target_time: datetime
    members: np.ndarray | None = None
    quantile_levels: np.ndarray | None = None
    quantile_values: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.issue_time >= self.target_time:
            raise ValueError("issue_time must precede target_time")
        has_ensemble = self.members is not None
        has_quantiles = self.quantile_levels is not None or self.quantile_values is not None
        if has_ensemble == has_quantiles:
            raise ValueError("exactly one of ensemble/quantile representation required")
        if has_ensemble:
            members = np.asarray(self.members, dtype=np.float64)
            if members.size == 0:
                raise ValueError("ensemble must be non-empty")
            if not np.isfinite(members).all():
                raise ValueError("ensemble members must be finite")
            members.setflags(write=False)
            object.__setattr__(self, "members", members)
        else:
            levels = np.asarray(self.quantile_levels, dtype=np.float64)
            values = np.asarray(self.quantile_values, dtype=np.float64)
            if levels.size == 0 or levels.size != values.size:
                raise ValueError("quantile levels/values must be non-empty and same length")
            if not ((levels > 0).all() and (levels < 1).all() and (np.diff(levels) > 0).all()):
                raise ValueError("quantile levels must be strictly increasing in (0,1)")
            if not np.isfinite(values).all():
                raise ValueError("quantile values must be finite")
            values = np.sort(values)
            levels.setflags(write=False)
            values.setflags(write=False)
            object.__setattr__(self, "quantile_levels", levels)
            object.__setattr__(self, "quantile_values", values)

    @property
    def is_ensemble(self) -> bool:
        return self.members is not None

    def to_json_dict(self) -> dict:
        doc: dict = {
            "model_id": self.model_id,
            "issue_time": format_timestamp(self.issue_time),
            "target_time": format_timestamp(self.target_time),
        }
        if self.is_ensemble:
            doc["ensemble"] = [float(v) for v in self.members]
        else:
            doc["quantile_levels"] = [float(v) for v in self.quantile_levels]
            doc["quantile_values"] = [float(v) for v in self.quantile_values]
        return doc


@dataclass(frozen=True)
class ForecasterSpec:
    """Identity and parameters of one pluggable forecaster."""

    model_id: str
    kind: ForecasterKind
    window_days: int
    blend_weight: float = 0.5
    quantile_levels: tuple[float, ...] = field(default=DEFAULT_QUANTILE_LEVELS)

    def __post_init__(self) -> None:
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
        levels = self.quantile_levels
        if not levels or any(not 0 < lv < 1 for lv in levels):
            raise ValueError("quantile levels must lie in (0,1)")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("quantile levels must be strictly increasing")

    @classmethod
    def reference(cls, model_id: str = REFERENCE_MODEL_ID, window_days: int = 30) -> "ForecasterSpec":
        return cls(model_id=model_id, kind=ForecasterKind.REFERENCE_30DAY, window_days=window_days)

    @classmethod
    def candidate(
        cls,
        model_id: str = CANDIDATE_MODEL_ID,
        window_days: int = 14,
        blend_weight: float = 0.5,
        quantile_levels: tuple[float, ...] = DEFAULT_QUANTILE_LEVELS,
    ) -> "ForecasterSpec":
        return cls(
            model_id=model_id,
            kind=ForecasterKind.CANDIDATE_CLIMATOLOGY,
            window_days=window_days,
            blend_weight=blend_weight,
            quantile_levels=quantile_levels,
        )


def issue_time_for(target: datetime, series: NetLoadSeries) -> datetime:
    """Day-ahead issue convention: the last grid point of the prior day."""
    return datetime.combine(target.date(), time()) - series.resolution.step


def history_window(
    series: NetLoadSeries,
    target: datetime,
    window_days: int,
    cutoff: datetime | None = None,
) -> np.ndarray:
    """Same-time-of-day values on the most recent usable days before target.

    Walks back one day at a time, skipping days where the time point is
    missing, unobserved, or not strictly before ``cutoff``, until exactly
    ``window_days`` values are collected (most recent first). Raises
    InsufficientHistory when the series is exhausted first.
    """
    base = series.grid_offset(target)
    spd = series.resolution.steps_per_day
    n = len(series)
    values = series.values

    # The walked timestamps share the target's time-of-day, so the cutoff
    # reduces to a minimum days-back: the smallest k with target - k days
    # strictly before it.
    first_day_back = 1
    if cutoff is not None and target >= cutoff:
        first_day_back = (target - cutoff) // timedelta(days=1) + 1

    # Fast path: the window of consecutive prior days, fully observed.
    start_idx = base - first_day_back * spd
    stop_idx = start_idx - window_days * spd
    if start_idx < n and stop_idx >= -spd:
        window = values[start_idx : stop_idx if stop_idx >= 0 else None : -spd]
        if window.size == window_days and not np.isnan(window).any():
            return window.copy()

    out = np.empty(window_days)
    collected = 0
    idx = base - first_day_back * spd
    while collected < window_days:
        if idx < 0:
            raise InsufficientHistory(
                f"only {collected} usable prior days at {target.time()} "
                f"before {format_timestamp(target)}; need {window_days}"
            )
        if idx < n:
            v = values[idx]
            if not np.isnan(v):
                out[collected] = v
                collected += 1
        idx -= spd
    return out


def reference_forecast(
    series: NetLoadSeries,
    target: datetime,
    window_days: int = 30,
    model_id: str = REFERENCE_MODEL_ID,
) -> Forecast:
    """Persistence ensemble: the trailing-window same-time observations.

    Members are the net-load values at the target's time-of-day on the
    ``window_days`` most recent usable days, honoring the day-ahead issue
    cutoff; the member count is always exactly ``window_days``.
    """
    issue = issue_time_for(target, series)
    members = history_window(series, target, window_days, cutoff=issue)
    return Forecast(model_id=model_id, issue_time=issue, target_time=target, members=members)


def empirical_quantiles(values: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Order-statistic quantiles at positions p*(n-1), linearly interpolated.

    The classic type-7 rule, matching ``np.quantile``'s default method.
    """
    data = np.sort(np.asarray(values, dtype=np.float64))
    n = data.size
    pos = np.asarray(levels, dtype=np.float64) * (n - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, n - 1)
    frac = pos - lo
    return data[lo] + frac * (data[hi] - data[lo])


def candidate_forecast(series: NetLoadSeries, target: datetime, spec: ForecasterSpec) -> Forecast:
    """Trailing-window empirical quantiles, nudged toward yesterday.

    Quantiles (type-7 interpolation) of the last ``window_days`` usable
    same-time observations, each shifted by ``blend_weight`` times the gap
    between the most recent usable observation and the window median.
    """
    issue = issue_time_for(target, series)
    window = history_window(series, target, spec.window_days, cutoff=issue)
    levels = np.asarray(spec.quantile_levels)
    yesterday = window[0]
    quantiles = empirical_quantiles(window, np.append(levels, 0.5))
    shift = spec.blend_weight * (yesterday - quantiles[-1])
    return Forecast(
        model_id=spec.model_id,
        issue_time=issue,
        target_time=target,
        quantile_levels=levels,
        quantile_values=quantiles[:-1] + shift,
    )


def make_forecast(series: NetLoadSeries, target: datetime, spec: ForecasterSpec) -> Forecast:
    if spec.kind is ForecasterKind.REFERENCE_30DAY:
        return reference_forecast(series, target, spec.window_days, model_id=spec.model_id)
    return candidate_forecast(series, target, spec)


@dataclass(frozen=True)
class ScheduleResult:
    """Forecasts ordered by target time, plus the targets skipped as gaps."""

    forecasts: list[Forecast]
    gaps: list[datetime]


def day_ahead_schedule(
    series: NetLoadSeries,
    spec: ForecasterSpec,
    date_range: tuple[date, date],
) -> ScheduleResult:
    """Forecast every grid time of every date in the range, day-ahead.

    All targets of date D share issue time = last grid point of D-1 and
    use only observations strictly before it. Targets whose history
    requirement cannot be met are recorded as gaps, not forecasts.
    """
    start_date, end_date = date_range
    if start_date > end_date:
        raise EmptyRange(f"start {start_date} after end {end_date}")

    forecasts: list[Forecast] = []
    gaps: list[datetime] = []
    step = series.resolution.step
    spd = series.resolution.steps_per_day
    day = start_date
    while day <= end_date:
        midnight = datetime.combine(day, time())
        for k in range(spd):
            target = midnight + k * step
            try:
                forecasts.append(make_forecast(series, target, spec))
            except InsufficientHistory:
                gaps.append(target)
        day += timedelta(days=1)
    return ScheduleResult(forecasts=forecasts, gaps=gaps)
