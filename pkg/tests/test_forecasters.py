from datetime import date, datetime, time, timedelta

import numpy as np
import pytest

from nlf.forecasters import (
    DEFAULT_QUANTILE_LEVELS,
    EmptyRange,
    Forecast,
    ForecasterKind,
    ForecasterSpec,
    InsufficientHistory,
    candidate_forecast,
    day_ahead_schedule,
    empirical_quantiles,
    history_window,
    issue_time_for,
    make_forecast,
    reference_forecast,
)
from nlf.timeseries import NetLoadSeries, PenetrationLevel, Resolution


def hourly_series(values, start=datetime(2023, 1, 1)):
    return NetLoadSeries(Resolution.HOUR1, PenetrationLevel.P20, start, np.asarray(values, float))


def constant_series(c, days, resolution=Resolution.HOUR1):
    n = days * resolution.steps_per_day
    return NetLoadSeries(
        resolution, PenetrationLevel.P20, datetime(2023, 1, 1), np.full(n, float(c))
    )


class TestReference:
    def test_constant_history_yields_constant_ensemble(self):
        series = constant_series(7.25, 40)
        forecast = reference_forecast(series, datetime(2023, 2, 9, 12, 0))
        assert forecast.is_ensemble
        assert forecast.members.shape == (30,)
        assert (forecast.members == 7.25).all()
        assert forecast.issue_time == datetime(2023, 2, 8, 23, 0)

    def test_short_history_raises(self):
        series = constant_series(1.0, 10)
        with pytest.raises(InsufficientHistory):
            reference_forecast(series, datetime(2023, 1, 10, 12, 0))

    def test_members_match_calendar_walk_oracle(self, small_series):
        target = datetime(2023, 6, 15, 12, 0)
        forecast = reference_forecast(small_series, target)
        # independent oracle: walk calendar dates 2023-05-16..2023-06-14 at 12:00
        expected = [
            small_series.value_at(datetime.combine(date(2023, 6, 15) - timedelta(days=k), time(12, 0)))
            for k in range(1, 31)
        ]
        assert forecast.members.tolist() == expected
        assert sorted(expected) == sorted(
            small_series.value_at(datetime.combine(d, time(12, 0)))
            for d in (date(2023, 5, 16) + timedelta(days=i) for i in range(30))
        )

    def test_members_are_sub_multiset_of_series(self, small_series):
        forecast = reference_forecast(small_series, datetime(2023, 5, 1, 8, 15))
        pool = list(small_series.values)
        for member in forecast.members:
            pool.remove(member)  # raises ValueError if not present

    def test_skips_missing_days_and_extends_window(self):
        values = np.full(40 * 24, 5.0)
        # knock out 12:00 on three days inside the window
        for day in (33, 30, 25):
            values[day * 24 + 12] = np.nan
        series = hourly_series(values)
        forecast = reference_forecast(series, datetime(2023, 2, 9, 12, 0))
        assert forecast.members.shape == (30,)
        assert (forecast.members == 5.0).all()

    def test_last_slot_excludes_issue_time_observation(self):
        # target at the day's last grid point: the same-time value on D-1 is
        # exactly the issue time, so the window starts one day earlier.
        values = np.arange(40 * 24, dtype=float)
        series = hourly_series(values)
        target = datetime(2023, 2, 9, 23, 0)
        forecast = reference_forecast(series, target)
        walked = [
            series.value_at(datetime.combine(target.date() - timedelta(days=k), time(23, 0)))
            for k in range(2, 32)
        ]
        assert forecast.members.tolist() == walked


class TestCandidate:
    def test_constant_history_degenerate_quantiles(self):
        series = constant_series(4.5, 20)
        forecast = candidate_forecast(series, datetime(2023, 1, 20, 6, 0), ForecasterSpec.candidate())
        assert not forecast.is_ensemble
        assert forecast.quantile_values.shape == (19,)
        assert (forecast.quantile_values == 4.5).all()
        assert forecast.quantile_levels.tolist() == pytest.approx(list(DEFAULT_QUANTILE_LEVELS))

    def test_blend_zero_matches_sort_based_oracle(self, small_series):
        spec = ForecasterSpec.candidate(blend_weight=0.0)
        target = datetime(2023, 5, 20, 17, 45)
        forecast = candidate_forecast(small_series, target, spec)
        window = history_window(small_series, target, 14, cutoff=issue_time_for(target, small_series))
        oracle = np.quantile(window, np.asarray(DEFAULT_QUANTILE_LEVELS))
        assert forecast.quantile_values == pytest.approx(oracle, rel=1e-12, abs=1e-12)

    def test_ascending_window_median_is_type7_interpolation(self):
        # Jan k carries value k-1, so the 14-day window before Jan 16 is {1..14}
        values = np.repeat(np.arange(17, dtype=float), 24)
        series = hourly_series(values)
        spec = ForecasterSpec.candidate(blend_weight=0.0)
        forecast = candidate_forecast(series, datetime(2023, 1, 16, 12, 0), spec)
        median_idx = list(DEFAULT_QUANTILE_LEVELS).index(0.5)
        assert forecast.quantile_values[median_idx] == 7.5

    def test_blend_shifts_by_half_gap_to_yesterday(self):
        values = np.repeat(np.arange(17, dtype=float), 24)
        series = hourly_series(values)
        blended = candidate_forecast(series, datetime(2023, 1, 16, 12, 0), ForecasterSpec.candidate())
        plain = candidate_forecast(
            series, datetime(2023, 1, 16, 12, 0), ForecasterSpec.candidate(blend_weight=0.0)
        )
        # yesterday = 14, window median = 7.5, so shift = 0.5 * 6.5
        assert blended.quantile_values == pytest.approx(plain.quantile_values + 3.25)

    def test_quantile_monotonicity(self, small_series):
        spec = ForecasterSpec.candidate()
        for hour in (0, 7, 13, 23):
            forecast = candidate_forecast(small_series, datetime(2023, 4, 2, hour, 0), spec)
            assert (np.diff(forecast.quantile_values) >= 0).all()


class TestEmpiricalQuantiles:
    def test_matches_numpy_default(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            values = rng.normal(0, 10, int(rng.integers(1, 60)))
            levels = np.sort(rng.uniform(0.01, 0.99, 9))
            assert empirical_quantiles(values, levels) == pytest.approx(
                np.quantile(values, levels), rel=1e-12, abs=1e-12
            )


class TestDeterminismAndLookahead:
    def test_identical_inputs_identical_forecasts(self, small_series):
        target = datetime(2023, 3, 3, 9, 30)
        for spec in (ForecasterSpec.reference(), ForecasterSpec.candidate()):
            a = make_forecast(small_series, target, spec)
            b = make_forecast(small_series, target, spec)
            if a.is_ensemble:
                assert np.array_equal(a.members, b.members)
            else:
                assert np.array_equal(a.quantile_values, b.quantile_values)

    def test_mutation_at_or_after_issue_time_changes_nothing(self, small_series):
        day = date(2023, 5, 10)
        issue = datetime(2023, 5, 9, 23, 45)
        issue_idx = small_series.grid_offset(issue)
        specs = (ForecasterSpec.reference(), ForecasterSpec.candidate())
        targets = [datetime.combine(day, time()) + k * timedelta(minutes=15) for k in range(0, 96, 5)]
        baseline = [make_forecast(small_series, t, s) for t in targets for s in specs]
        rng = np.random.default_rng(99)
        for _ in range(20):
            values = np.array(small_series.values)
            idx = int(rng.integers(issue_idx, len(values)))
            values[idx] += rng.normal(0, 50)
            mutated = NetLoadSeries(
                small_series.resolution, small_series.penetration, small_series.start, values
            )
            for original, (target, spec) in zip(
                baseline, ((t, s) for t in targets for s in specs)
            ):
                redone = make_forecast(mutated, target, spec)
                if original.is_ensemble:
                    assert np.array_equal(original.members, redone.members)
                else:
                    assert np.array_equal(original.quantile_values, redone.quantile_values)


class TestSchedule:
    def test_one_day_schedule_shares_issue_time(self):
        series = constant_series(2.0, 40, resolution=Resolution.MIN15)
        result = day_ahead_schedule(
            series, ForecasterSpec.reference(), (date(2023, 2, 5), date(2023, 2, 5))
        )
        assert len(result.forecasts) == 96
        assert not result.gaps
        assert {f.issue_time for f in result.forecasts} == {datetime(2023, 2, 4, 23, 45)}
        assert [f.target_time for f in result.forecasts] == sorted(
            f.target_time for f in result.forecasts
        )

    def test_warmup_targets_become_gaps(self):
        series = constant_series(2.0, 40)
        result = day_ahead_schedule(
            series, ForecasterSpec.reference(), (date(2023, 1, 5), date(2023, 1, 6))
        )
        assert not result.forecasts
        assert len(result.gaps) == 48

    def test_hourly_year_first_forecastable_is_jan31(self):
        series = constant_series(1.0, 365)
        result = day_ahead_schedule(
            series, ForecasterSpec.reference(), (date(2023, 1, 1), date(2023, 3, 1))
        )
        first = min(f.target_time for f in result.forecasts)
        assert first == datetime(2023, 1, 31, 0, 0)
        # Jan 31's last hour needs one extra day of history (issue-time
        # exclusion), so Feb 1 is the first complete day.
        gap_dates = {g.date() for g in result.gaps}
        assert date(2023, 1, 31) in gap_dates
        assert max(result.gaps) == datetime(2023, 1, 31, 23, 0)
        assert date(2023, 2, 1) not in gap_dates

    def test_empty_range_rejected(self):
        series = constant_series(1.0, 40)
        with pytest.raises(EmptyRange):
            day_ahead_schedule(series, ForecasterSpec.reference(), (date(2023, 2, 2), date(2023, 2, 1)))


class TestForecastInvariants:
    def test_quantile_values_rearranged_non_decreasing(self):
        forecast = Forecast(
            model_id="m",
            issue_time=datetime(2023, 1, 1, 23),
            target_time=datetime(2023, 1, 2, 5),
            quantile_levels=np.array([0.25, 0.5, 0.75]),
            quantile_values=np.array([3.0, 1.0, 2.0]),
        )
        assert forecast.quantile_values.tolist() == [1.0, 2.0, 3.0]

    def test_issue_must_precede_target(self):
        with pytest.raises(ValueError):
            Forecast(
                model_id="m",
                issue_time=datetime(2023, 1, 2),
                target_time=datetime(2023, 1, 2),
                members=np.array([1.0]),
            )

    def test_level_validation(self):
        with pytest.raises(ValueError):
            Forecast(
                model_id="m",
                issue_time=datetime(2023, 1, 1),
                target_time=datetime(2023, 1, 2),
                quantile_levels=np.array([0.5, 0.5]),
                quantile_values=np.array([1.0, 2.0]),
            )

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ForecasterSpec(model_id="x", kind=ForecasterKind.REFERENCE_30DAY, window_days=0)
        with pytest.raises(ValueError):
            ForecasterSpec.candidate(quantile_levels=(0.1, 0.9, 0.5))

    def test_json_export_shape(self):
        series = constant_series(3.0, 40)
        ref = reference_forecast(series, datetime(2023, 2, 5, 4, 0))
        doc = ref.to_json_dict()
        assert doc["model_id"] == "reference"
        assert doc["issue_time"] == "2023-02-04T23:00"
        assert doc["target_time"] == "2023-02-05T04:00"
        assert len(doc["ensemble"]) == 30
        cand = candidate_forecast(series, datetime(2023, 2, 5, 4, 0), ForecasterSpec.candidate())
        doc = cand.to_json_dict()
        assert len(doc["quantile_levels"]) == len(doc["quantile_values"]) == 19
