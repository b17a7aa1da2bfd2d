from datetime import date, datetime

import numpy as np
import pytest

from nlf.forecasters import ForecasterSpec
from nlf.pipeline import backtest_scenario
from nlf.scoring import daily_skill
from nlf.synthdata import ScenarioConfig, generate
from nlf.timeseries import PenetrationLevel, Resolution


@pytest.fixture(scope="module")
def hourly_35d():
    cfg = ScenarioConfig(PenetrationLevel.P30, Resolution.HOUR1, date(2023, 1, 1), 35, 9)
    return generate(cfg)


@pytest.fixture(scope="module")
def scores_35d(hourly_35d):
    return backtest_scenario(hourly_35d, [ForecasterSpec.reference(), ForecasterSpec.candidate()])


def test_complete_day_rule_starts_scoring_in_february(scores_35d):
    # Jan 31 is only partially forecastable (its last hour lacks one day of
    # usable history), so the first fully scored date is Feb 1.
    assert scores_35d.scored_dates[0] == date(2023, 2, 1)
    assert scores_35d.scored_dates[-1] == date(2023, 2, 4)
    assert len(scores_35d.scored_dates) == 4


def test_record_counts_and_grouping(scores_35d):
    assert len(scores_35d.records) == 4 * 24 * 2  # days x hours x models
    models = {r.model_id for r in scores_35d.records}
    assert models == {"reference", "candidate"}
    assert len(scores_35d.daily) == 4
    assert all(d.model_id == "candidate" for d in scores_35d.daily)
    assert len(scores_35d.pointwise["candidate"]) == 4 * 24


def test_daily_entries_match_recomputation(scores_35d):
    by_model_day = {}
    for record in scores_35d.records:
        by_model_day.setdefault((record.model_id, record.target_time.date()), []).append(record)
    for entry in scores_35d.daily:
        recomputed = daily_skill(
            by_model_day[("candidate", entry.date)],
            by_model_day[("reference", entry.date)],
        )
        assert recomputed.crpss == entry.crpss


def test_reference_self_skill_is_identically_zero(scores_35d):
    by_day = {}
    for record in scores_35d.records:
        if record.model_id == "reference":
            by_day.setdefault(record.target_time.date(), []).append(record)
    for day_records in by_day.values():
        assert daily_skill(day_records, day_records).crpss == 0.0


def test_determinism(hourly_35d):
    specs = [ForecasterSpec.reference(), ForecasterSpec.candidate()]
    a = backtest_scenario(hourly_35d, specs)
    b = backtest_scenario(hourly_35d, specs)
    assert [(r.model_id, r.target_time, r.crps) for r in a.records] == [
        (r.model_id, r.target_time, r.crps) for r in b.records
    ]
    assert [d.crpss for d in a.daily] == [d.crpss for d in b.daily]


def test_missing_observation_drops_the_whole_day(hourly_35d):
    values = np.array(hourly_35d.values)
    values[hourly_35d.grid_offset(datetime(2023, 2, 2, 13, 0))] = np.nan
    from nlf.timeseries import NetLoadSeries

    mutated = NetLoadSeries(
        hourly_35d.resolution, hourly_35d.penetration, hourly_35d.start, values,
        hourly_35d.scenario_id,
    )
    scores = backtest_scenario(mutated, [ForecasterSpec.reference(), ForecasterSpec.candidate()])
    assert date(2023, 2, 2) not in scores.scored_dates
    assert date(2023, 2, 1) in scores.scored_dates


def test_requires_reference_spec(hourly_35d):
    with pytest.raises(ValueError):
        backtest_scenario(hourly_35d, [ForecasterSpec.candidate()])
    with pytest.raises(ValueError):
        backtest_scenario(
            hourly_35d, [ForecasterSpec.reference(), ForecasterSpec.reference()]
        )
