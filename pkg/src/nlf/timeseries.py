"""Calendar-indexed net-load time series.

A series is a contiguous grid of observations at a fixed resolution
(15-minute or 1-hour steps), labelled with one solar-penetration scenario.
Timestamps are timezone-naive wall-clock times; missing observations are
carried as NaN so the grid never has holes. Series are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date, datetime, time, timedelta
from enum import Enum, IntEnum

import numpy as np

from .errors import NlfError

TIMESTAMP_FMT = "%Y-%m-%dT%H:%M"
CSV_HEADER = "timestamp,net_load_kw"


class MalformedRow(NlfError):
    """A CSV row could not be parsed (bad timestamp or field count)."""


class NonMonotonic(NlfError):
    """CSV timestamps are not strictly increasing."""


class GridMisaligned(NlfError):
    """A timestamp does not sit on the resolution grid."""


class Upsample(NlfError):
    """Requested resampling to a finer resolution than the source."""


class InvertedRange(NlfError):
    """A date range with start after end."""


class Resolution(Enum):
    """Sampling interval of a series: 96 or 24 steps per day."""

    MIN15 = "15min"
    HOUR1 = "1h"

    @property
    def label(self) -> str:
        return self.value

    @property
    def step(self) -> timedelta:
        return timedelta(minutes=15) if self is Resolution.MIN15 else timedelta(hours=1)

    @property
    def step_minutes(self) -> int:
        return 15 if self is Resolution.MIN15 else 60

    @property
    def steps_per_day(self) -> int:
        return 96 if self is Resolution.MIN15 else 24

    @classmethod
    def from_label(cls, label: str) -> "Resolution":
        for res in cls:
            if res.value == label:
                return res
        raise ValueError(f"unknown resolution label {label!r}")


class PenetrationLevel(IntEnum):
    """Declared solar-penetration scenario labels."""

    P20 = 20
    P30 = 30
    P50 = 50

    @property
    def percent(self) -> int:
        return int(self)


def parse_timestamp(text: str) -> datetime:
    """Parse the canonical ``YYYY-MM-DDTHH:MM`` timestamp format."""
    try:
        return datetime.strptime(text, TIMESTAMP_FMT)
    except ValueError as exc:
        raise MalformedRow(f"unparseable timestamp {text!r}") from exc


def format_timestamp(ts: datetime) -> str:
    return ts.strftime(TIMESTAMP_FMT)


def is_grid_aligned(ts: datetime, resolution: Resolution) -> bool:
    if ts.second != 0 or ts.microsecond != 0:
        return False
    return ts.minute % resolution.step_minutes == 0


@dataclass(frozen=True, eq=False)
class NetLoadSeries:
    """Uniformly spaced net-load observations for one scenario.

    ``values`` is a float64 array where NaN marks a missing observation;
    every non-missing value is finite. The grid runs from ``start`` in
    steps of ``resolution.step``. A zero-length series (the degenerate
    result of slicing a disjoint range) is permitted.
    """

    resolution: Resolution
    penetration: PenetrationLevel
    start: datetime
    values: np.ndarray
    scenario_id: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not is_grid_aligned(self.start, self.resolution):
            raise GridMisaligned(
                f"series start {format_timestamp(self.start)} is off the "
                f"{self.resolution.label} grid"
            )
        if np.isinf(values).any():
            raise ValueError("non-missing values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> datetime | None:
        """Timestamp of the last grid point, or None for an empty series."""
        if len(self.values) == 0:
            return None
        return self.start + (len(self.values) - 1) * self.resolution.step

    def timestamp_at(self, index: int) -> datetime:
        return self.start + index * self.resolution.step

    def grid_offset(self, ts: datetime) -> int:
        """Signed grid position of ``ts`` relative to ``start``.

        May fall outside [0, len); raises GridMisaligned off the grid.
        """
        delta = ts - self.start
        step = self.resolution.step
        if delta % step != timedelta(0):
            raise GridMisaligned(
                f"{format_timestamp(ts)} is off the {self.resolution.label} grid"
            )
        return delta // step

    def value_at(self, ts: datetime) -> float:
        """Observation at ``ts``; NaN when missing or outside the series."""
        idx = self.grid_offset(ts)
        if idx < 0 or idx >= len(self.values):
            return math.nan
        return float(self.values[idx])

    def timestamps(self) -> list[datetime]:
        step = self.resolution.step
        return [self.start + i * step for i in range(len(self.values))]


def parse_series(
    csv_text: str,
    resolution: Resolution,
    penetration: PenetrationLevel,
    scenario_id: str = "",
) -> NetLoadSeries:
    """Parse the canonical CSV format into a contiguous series.

    Grid timestamps absent from the file, empty fields, and non-numeric
    values all become missing (NaN). Timestamps must be strictly
    increasing and on the resolution grid.
    """
    lines = csv_text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise MalformedRow(f"expected header {CSV_HEADER!r}")

    stamps: list[datetime] = []
    loads: list[float] = []
    prev: datetime | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedRow(f"line {lineno}: expected 2 fields, got {len(parts)}")
        ts = parse_timestamp(parts[0].strip())
        if not is_grid_aligned(ts, resolution):
            raise GridMisaligned(
                f"line {lineno}: {parts[0].strip()} is off the {resolution.label} grid"
            )
        if prev is not None and ts <= prev:
            raise NonMonotonic(f"line {lineno}: {parts[0].strip()} not after {format_timestamp(prev)}")
        prev = ts
        raw = parts[1].strip()
        try:
            value = float(raw) if raw else math.nan
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            value = math.nan
        stamps.append(ts)
        loads.append(value)

    if not stamps:
        raise MalformedRow("no data rows")

    start = stamps[0]
    step = resolution.step
    n = (stamps[-1] - start) // step + 1
    values = np.full(n, np.nan)
    for ts, value in zip(stamps, loads):
        values[(ts - start) // step] = value
    return NetLoadSeries(resolution, penetration, start, values, scenario_id)


def series_to_csv(series: NetLoadSeries) -> str:
    """Render a series in the canonical CSV format (missing -> empty field).

    Finite values use shortest round-trip formatting so parse_series
    recovers them bit-identically.
    """
    lines = [CSV_HEADER]
    ts = series.start
    step = series.resolution.step
    for value in series.values:
        field = "" if math.isnan(value) else repr(float(value))
        lines.append(f"{format_timestamp(ts)},{field}")
        ts += step
    return "\n".join(lines) + "\n"


def resample(series: NetLoadSeries, target: Resolution) -> NetLoadSeries:
    """Down-sample to a coarser resolution by arithmetic mean.

    Net load is an average power over the interval, so the hourly value is
    the mean of its four 15-minute values; an hour with any missing source
    value is missing. Identity when the resolutions already match.
    """
    if target is series.resolution:
        return series
    if target.step < series.resolution.step:
        raise Upsample(f"cannot resample {series.resolution.label} to finer {target.label}")

    ratio = target.step // series.resolution.step
    if len(series) == 0:
        return replace(series, resolution=target, start=series.start.replace(minute=0))

    # Output grid covers the coarse slots overlapping the source span;
    # source slots outside the series count as missing.
    first_out = series.start.replace(minute=0)
    offset = (series.start - first_out) // series.resolution.step
    n_out = (offset + len(series) + ratio - 1) // ratio
    padded = np.full(n_out * ratio, np.nan)
    padded[offset : offset + len(series)] = series.values
    grouped = padded.reshape(n_out, ratio)
    out = grouped.mean(axis=1)  # propagates NaN: any missing source poisons its hour
    return replace(series, resolution=target, start=first_out, values=out)


def slice_series(series: NetLoadSeries, start_date: date, end_date: date) -> NetLoadSeries:
    """All grid points with calendar date in [start_date, end_date].

    The result may be empty when the range is disjoint from the series.
    """
    if start_date > end_date:
        raise InvertedRange(f"start {start_date} after end {end_date}")
    lo_ts = datetime.combine(start_date, time())
    hi_ts = datetime.combine(end_date + timedelta(days=1), time())
    step = series.resolution.step
    lo = max(0, -((lo_ts - series.start) // -step))  # ceil division
    hi = min(len(series), (hi_ts - series.start) // step)
    if lo >= hi:
        return replace(series, start=lo_ts, values=np.empty(0))
    return replace(series, start=series.timestamp_at(lo), values=series.values[lo:hi])
