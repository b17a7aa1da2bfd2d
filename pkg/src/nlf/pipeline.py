"""Day-ahead backtest of one scenario: schedule, score, aggregate.

A calendar date enters the score store only when every grid time of that
date was forecast by every model and observed in the series. Partially
forecastable dates at the warm-up boundary (the last grid time of a day
needs one extra day of history because the issue-time observation is off
limits) are dropped whole, which keeps daily CRPS means comparable across
dates and, for a run starting January 1 with the 30-day reference window,
makes February the first scored month.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta

from .forecasters import Forecast, ForecasterSpec, day_ahead_schedule
from .scoring import DailySkill, ScoreRecord, daily_skill, pointwise_skill, score_forecast
from .timeseries import NetLoadSeries


@dataclass(frozen=True)
class ScenarioScores:
    """Everything cmd_score writes for one scenario."""

    scenario_id: str
    records: list[ScoreRecord]
    daily: list[DailySkill]
    pointwise: dict[str, list[tuple[datetime, float]]]
    scored_dates: list[date]
    gap_counts: dict[str, int]
    guard_dropped: int


def backtest_scenario(
    series: NetLoadSeries,
    specs: list[ForecasterSpec],
    reference_id: str = "reference",
) -> ScenarioScores:
    """Backtest every model over the series span and score common full days."""
    if reference_id not in {s.model_id for s in specs}:
        raise ValueError(f"specs must include the reference model {reference_id!r}")
    if len({s.model_id for s in specs}) != len(specs):
        raise ValueError("model_id must be unique within a run")
    if len(series) == 0:
        raise ValueError("cannot backtest an empty series")

    first_day = series.start.date()
    last_day = series.end.date()
    by_model: dict[str, dict[datetime, Forecast]] = {}
    gap_counts: dict[str, int] = {}
    for spec in specs:
        result = day_ahead_schedule(series, spec, (first_day, last_day))
        by_model[spec.model_id] = {f.target_time: f for f in result.forecasts}
        gap_counts[spec.model_id] = len(result.gaps)

    step = series.resolution.step
    spd = series.resolution.steps_per_day
    scored_dates: list[date] = []
    records: list[ScoreRecord] = []
    records_by_model: dict[str, list[ScoreRecord]] = {s.model_id: [] for s in specs}

    day = first_day
    while day <= last_day:
        midnight = datetime.combine(day, time())
        targets = [midnight + k * step for k in range(spd)]
        complete = all(
            all(t in by_model[s.model_id] for s in specs)
            and math.isfinite(series.value_at(t))
            for t in targets
        )
        if complete:
            scored_dates.append(day)
            for t in targets:
                obs = series.value_at(t)
                for spec in specs:
                    record = ScoreRecord(
                        model_id=spec.model_id,
                        target_time=t,
                        penetration=series.penetration,
                        resolution=series.resolution,
                        crps=score_forecast(by_model[spec.model_id][t], obs),
                    )
                    records.append(record)
                    records_by_model[spec.model_id].append(record)
        day += timedelta(days=1)

    def by_date(model_records: list[ScoreRecord]) -> dict[date, list[ScoreRecord]]:
        grouped: dict[date, list[ScoreRecord]] = {}
        for record in model_records:
            grouped.setdefault(record.target_time.date(), []).append(record)
        return grouped

    daily: list[DailySkill] = []
    pointwise: dict[str, list[tuple[datetime, float]]] = {}
    guard_dropped = 0
    reference_by_date = by_date(records_by_model[reference_id])
    for spec in specs:
        if spec.model_id == reference_id:
            continue
        model_by_date = by_date(records_by_model[spec.model_id])
        for scored_day in scored_dates:
            daily.append(daily_skill(model_by_date[scored_day], reference_by_date[scored_day]))
        points, dropped = pointwise_skill(records_by_model[spec.model_id], records_by_model[reference_id])
        pointwise[spec.model_id] = points
        guard_dropped += dropped

    return ScenarioScores(
        scenario_id=series.scenario_id,
        records=records,
        daily=daily,
        pointwise=pointwise,
        scored_dates=scored_dates,
        gap_counts=gap_counts,
        guard_dropped=guard_dropped,
    )
