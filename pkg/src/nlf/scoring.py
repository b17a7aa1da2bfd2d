"""CRPS/CRPSS scoring and the aggregations behind both comparison views.

The ensemble CRPS is the energy form

    CRPS = (1/n) sum_i |x_i - y|  -  (1/(2 n^2)) sum_i sum_j |x_i - x_j|

evaluated in O(n log n) through the sorted-member identity

    sum_i sum_j |x_i - x_j| = 2 sum_k (2k - n - 1) x_(k)

which agrees with the quadratic definition to floating-point accuracy.
Quantile forecasts are scored as twice the mean pinball loss across their
levels, the standard bridge between quantile submissions and CRPS; the
approximation error vanishes as the level grid densifies.

CRPSS is 1 - CRPS_model / CRPS_reference: positive when the model beats
the reference, 1 for a perfect forecast, negative when it is worse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as date_type, datetime
from typing import Iterable, Sequence

import numpy as np

from .errors import NlfError
from .forecasters import Forecast
from .timeseries import PenetrationLevel, Resolution

# Pointwise skill records whose reference CRPS falls below this are dropped
# from heatmap aggregation and tallied instead of producing huge ratios.
REFERENCE_CRPS_GUARD_KW = 1e-9

CANONICAL_HEATMAP_MONTHS = tuple(range(2, 13))  # Feb..Dec, the canonical run's rows


class EmptyEnsemble(NlfError):
    """CRPS of an empty ensemble."""


class NonFinite(NlfError):
    """A CRPS input (member or observation) is not finite."""


class LevelOrder(NlfError):
    """Quantile levels are not strictly increasing inside (0,1)."""


class LengthMismatch(NlfError):
    """Quantile levels and values differ in length."""


class DegenerateReference(NlfError):
    """Skill against a zero-CRPS reference while the model errs."""


class TimepointMismatch(NlfError):
    """Model and reference score sets cover different target times."""


class EmptyDay(NlfError):
    """Daily skill of an empty record set."""


class EmptyInput(NlfError):
    """Box statistics of an empty value list."""


@dataclass(frozen=True)
class ScoreRecord:
    """CRPS of one (model, target time, scenario) triple."""

    model_id: str
    target_time: datetime
    penetration: PenetrationLevel
    resolution: Resolution
    crps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.crps) and self.crps >= 0):
            raise ValueError(f"crps must be finite and >= 0, got {self.crps}")


@dataclass(frozen=True)
class DailySkill:
    """Per-calendar-date CRPSS of a model against the reference."""

    model_id: str
    date: date_type
    penetration: PenetrationLevel
    resolution: Resolution
    crpss: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.crpss) and self.crpss <= 1.0):
            raise ValueError(f"crpss must be finite and <= 1, got {self.crpss}")


@dataclass(frozen=True)
class BoxStats:
    """Tukey box-plot statistics with attained-value whiskers."""

    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]
    n: int


@dataclass(frozen=True)
class HeatmapCell:
    """Mean CRPSS for one (month, hour-of-day) pair; absent when n = 0."""

    month: int
    hour: int
    mean_crpss: float | None
    n: int


def crps_ensemble(members: Sequence[float] | np.ndarray, observation: float) -> float:
    """Energy-form CRPS of an empirical ensemble, O(n log n)."""
    x = np.asarray(members, dtype=np.float64)
    if x.size == 0:
        raise EmptyEnsemble("ensemble has no members")
    if not (np.isfinite(x).all() and math.isfinite(observation)):
        raise NonFinite("members and observation must be finite")
    x = np.sort(x)
    n = x.size
    term_obs = float(np.abs(x - observation).mean())
    k = np.arange(1, n + 1, dtype=np.float64)
    term_spread = float(((2.0 * k - n - 1.0) * x).sum()) / (n * n)
    return term_obs - term_spread


def crps_quantile(
    levels: Sequence[float] | np.ndarray,
    values: Sequence[float] | np.ndarray,
    observation: float,
) -> float:
    """Twice the mean pinball loss across quantile levels."""
    tau = np.asarray(levels, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if tau.size != v.size:
        raise LengthMismatch(f"{tau.size} levels vs {v.size} values")
    if tau.size == 0 or not ((tau > 0).all() and (tau < 1).all() and (np.diff(tau) > 0).all()):
        raise LevelOrder("levels must be strictly increasing in (0,1)")
    if not (np.isfinite(v).all() and math.isfinite(observation)):
        raise NonFinite("values and observation must be finite")
    u = observation - v
    pinball = u * (tau - (u < 0))
    return 2.0 * float(pinball.mean())


def score_forecast(forecast: Forecast, observation: float) -> float:
    """CRPS of a forecast in whichever representation it carries."""
    if forecast.is_ensemble:
        return crps_ensemble(forecast.members, observation)
    return crps_quantile(forecast.quantile_levels, forecast.quantile_values, observation)


def crpss(crps_model: float, crps_reference: float) -> float:
    """Skill score 1 - model/reference; both zero maps to 0 by convention."""
    if crps_model < 0 or crps_reference < 0:
        raise ValueError("CRPS inputs must be >= 0")
    if crps_reference == 0.0:
        if crps_model > 0.0:
            raise DegenerateReference("reference CRPS is zero while model CRPS is positive")
        return 0.0
    return 1.0 - crps_model / crps_reference


def daily_skill(
    records_model: Sequence[ScoreRecord],
    records_reference: Sequence[ScoreRecord],
) -> DailySkill:
    """Skill of the aggregate: CRPSS of the two daily mean CRPS values.

    Aggregating CRPS before the ratio avoids the instability of averaging
    pointwise ratios when a single reference CRPS is near zero.
    """
    if not records_model or not records_reference:
        raise EmptyDay("both record sets must be non-empty")
    dates = {r.target_time.date() for r in records_model} | {
        r.target_time.date() for r in records_reference
    }
    pens = {r.penetration for r in records_model} | {r.penetration for r in records_reference}
    ress = {r.resolution for r in records_model} | {r.resolution for r in records_reference}
    if len(dates) != 1 or len(pens) != 1 or len(ress) != 1:
        raise TimepointMismatch("records must share one date, penetration, and resolution")
    times_model = sorted(r.target_time for r in records_model)
    times_ref = sorted(r.target_time for r in records_reference)
    if times_model != times_ref:
        raise TimepointMismatch("model and reference target-time sets differ")

    mean_model = math.fsum(r.crps for r in records_model) / len(records_model)
    mean_ref = math.fsum(r.crps for r in records_reference) / len(records_reference)
    return DailySkill(
        model_id=records_model[0].model_id,
        date=dates.pop(),
        penetration=pens.pop(),
        resolution=ress.pop(),
        crpss=crpss(mean_model, mean_ref),
    )


def pointwise_skill(
    records_model: Sequence[ScoreRecord],
    records_reference: Sequence[ScoreRecord],
    guard_kw: float = REFERENCE_CRPS_GUARD_KW,
) -> tuple[list[tuple[datetime, float]], int]:
    """Per-timepoint CRPSS, dropping near-zero-reference points.

    Returns the (timestamp, crpss) list ordered by time and the count of
    records dropped by the reference guard.
    """
    by_time_ref = {r.target_time: r.crps for r in records_reference}
    times_model = sorted(r.target_time for r in records_model)
    if times_model != sorted(by_time_ref):
        raise TimepointMismatch("model and reference target-time sets differ")
    dropped = 0
    out: list[tuple[datetime, float]] = []
    for record in sorted(records_model, key=lambda r: r.target_time):
        ref = by_time_ref[record.target_time]
        if ref < guard_kw:
            dropped += 1
            continue
        out.append((record.target_time, crpss(record.crps, ref)))
    return out, dropped


def _quantile_linear(sorted_values: np.ndarray, p: float) -> float:
    """Order-statistic quantile at position p*(n-1) with linear interpolation."""
    n = sorted_values.size
    pos = p * (n - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(sorted_values[lo])
    frac = pos - lo
    return float(sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac)


def box_stats(values: Sequence[float] | np.ndarray) -> BoxStats:
    """Tukey box statistics: 1.5*IQR fences, whiskers at attained values."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise EmptyInput("box statistics need at least one value")
    if not np.isfinite(data).all():
        raise ValueError("box statistics inputs must be finite")
    data = np.sort(data)
    q1 = _quantile_linear(data, 0.25)
    median = _quantile_linear(data, 0.5)
    q3 = _quantile_linear(data, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = data[(data >= lo_fence) & (data <= hi_fence)]
    outliers = data[(data < lo_fence) | (data > hi_fence)]
    return BoxStats(
        median=median,
        q1=q1,
        q3=q3,
        whisker_lo=float(inside[0]),
        whisker_hi=float(inside[-1]),
        outliers=tuple(float(v) for v in outliers),
        n=int(data.size),
    )


def heatmap_aggregate(
    points: Iterable[tuple[datetime, float]],
    months: Sequence[int] | None = None,
) -> list[HeatmapCell]:
    """Mean CRPSS per (month, hour-of-day) cell.

    When ``months`` is given, the grid rows are exactly those months and
    points outside them are ignored. Otherwise the rows are the months
    present in the input, falling back to the canonical Feb-Dec extent for
    empty input. Cells are ordered by month then hour; a cell with no
    contributing points has mean None.
    """
    points = list(points)
    if months is not None:
        rows = sorted(set(months))
        points = [(ts, s) for ts, s in points if ts.month in set(rows)]
    else:
        present = sorted({ts.month for ts, _ in points})
        rows = present if present else list(CANONICAL_HEATMAP_MONTHS)

    sums: dict[tuple[int, int], list[float]] = {}
    for ts, skill in points:
        sums.setdefault((ts.month, ts.hour), []).append(skill)

    cells: list[HeatmapCell] = []
    for month in rows:
        for hour in range(24):
            bucket = sums.get((month, hour))
            if bucket:
                cells.append(HeatmapCell(month, hour, math.fsum(bucket) / len(bucket), len(bucket)))
            else:
                cells.append(HeatmapCell(month, hour, None, 0))
    return cells
