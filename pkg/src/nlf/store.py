"""Score store: files written by the scoring stage, reloaded for serving.

Layout of a store directory:

    store_manifest.json         run metadata, per-scenario files and digests
    <scenario>.scores.jsonl     one ScoreRecord per line
    <scenario>.daily.json       per-date CRPSS of each model vs the reference
    <scenario>.pointwise.json   per-timepoint CRPSS (reference-guard applied)

The store is immutable after load. Loading spot-verifies a 1% sample of
the daily and pointwise entries against recomputation from the raw score
records.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NlfError
from .pipeline import ScenarioScores
from .scoring import BoxStats, box_stats, crpss, heatmap_aggregate
from .timeseries import PenetrationLevel, Resolution, format_timestamp, parse_timestamp

MANIFEST_NAME = "store_manifest.json"
SPOT_CHECK_STRIDE = 100  # verify every 100th derived entry at load


class StoreInvalid(NlfError):
    """A score store directory failed validation at load."""


class InvalidFilter(NlfError):
    """A query filter is malformed or self-contradictory."""


class UnknownPenetration(NlfError):
    """A penetration level outside the declared scenario labels."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dump_json(doc: object) -> str:
    return json.dumps(doc, indent=1) + "\n"


def write_store(out_dir: Path, scenarios: list[ScenarioScores], source: dict | None = None,
                reference_id: str = "reference") -> dict:
    """Write score files plus manifest; returns the manifest document."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_scenarios = []
    models: set[str] = set()
    for scenario in scenarios:
        sid = scenario.scenario_id
        if not scenario.records:
            raise ValueError(f"scenario {sid} has no score records")
        pen = scenario.records[0].penetration
        res = scenario.records[0].resolution
        models.update(r.model_id for r in scenario.records)

        scores_path = out_dir / f"{sid}.scores.jsonl"
        with scores_path.open("w") as handle:
            for record in scenario.records:
                handle.write(json.dumps({
                    "model_id": record.model_id,
                    "target_time": format_timestamp(record.target_time),
                    "penetration": record.penetration.percent,
                    "resolution": record.resolution.label,
                    "crps": record.crps,
                }) + "\n")

        daily_path = out_dir / f"{sid}.daily.json"
        daily_path.write_text(_dump_json([
            {
                "model_id": d.model_id,
                "date": d.date.isoformat(),
                "penetration": d.penetration.percent,
                "resolution": d.resolution.label,
                "crpss": d.crpss,
            }
            for d in scenario.daily
        ]))

        pointwise_path = out_dir / f"{sid}.pointwise.json"
        pointwise_docs = []
        for model_id in sorted(scenario.pointwise):
            for ts, skill in scenario.pointwise[model_id]:
                pointwise_docs.append({
                    "model_id": model_id,
                    "target_time": format_timestamp(ts),
                    "penetration": pen.percent,
                    "resolution": res.label,
                    "crpss": skill,
                })
        pointwise_path.write_text(_dump_json(pointwise_docs))

        manifest_scenarios.append({
            "scenario_id": sid,
            "penetration": pen.percent,
            "resolution": res.label,
            "files": {
                "scores": scores_path.name,
                "daily": daily_path.name,
                "pointwise": pointwise_path.name,
            },
            "counts": {
                "records": len(scenario.records),
                "daily": len(scenario.daily),
                "pointwise": len(pointwise_docs),
            },
            "sha256": {
                "scores": _sha256(scores_path),
                "daily": _sha256(daily_path),
                "pointwise": _sha256(pointwise_path),
            },
            "scored_date_span": [
                scenario.scored_dates[0].isoformat(),
                scenario.scored_dates[-1].isoformat(),
            ] if scenario.scored_dates else None,
            "diagnostics": {
                "gaps": dict(sorted(scenario.gap_counts.items())),
                "reference_guard_dropped": scenario.guard_dropped,
            },
        })

    manifest = {
        "tool_version": __version__,
        "reference_model": reference_id,
        "models": sorted(models),
        "source": source or {},
        "scenarios": manifest_scenarios,
    }
    (out_dir / MANIFEST_NAME).write_text(_dump_json(manifest))
    return manifest


GroupKey = tuple[str, PenetrationLevel, Resolution]


@dataclass
class _DailyGroup:
    dates: np.ndarray      # datetime64[D]
    crpss: np.ndarray      # float64, file order


@dataclass
class _PointwiseGroup:
    times: np.ndarray      # datetime64[m]
    months: np.ndarray     # int16
    hours: np.ndarray      # int16
    crpss: np.ndarray      # float64


@dataclass
class ScoreStore:
    """Immutable, pre-indexed view of one score store directory."""

    manifest: dict
    models: list[str]
    reference_model: str
    penetrations: list[PenetrationLevel]
    resolutions: list[Resolution]
    date_span: tuple[date, date] | None
    record_counts: dict[str, int]
    daily: dict[GroupKey, _DailyGroup] = field(default_factory=dict)
    pointwise: dict[GroupKey, _PointwiseGroup] = field(default_factory=dict)

    @property
    def skill_models(self) -> list[str]:
        return [m for m in self.models if m != self.reference_model]

    @classmethod
    def load(cls, store_dir: Path | str) -> "ScoreStore":
        store_dir = Path(store_dir)
        manifest_path = store_dir / MANIFEST_NAME
        if not manifest_path.exists():
            raise StoreInvalid(f"missing {MANIFEST_NAME} in {store_dir}")
        try:
            manifest = json.loads(manifest_path.read_text())
        except json.JSONDecodeError as exc:
            raise StoreInvalid(f"unreadable manifest: {exc}") from exc

        reference_id = manifest.get("reference_model", "reference")
        penetrations: set[PenetrationLevel] = set()
        resolutions: set[Resolution] = set()
        record_counts: dict[str, int] = {}
        daily: dict[GroupKey, _DailyGroup] = {}
        pointwise: dict[GroupKey, _PointwiseGroup] = {}
        span_lo: date | None = None
        span_hi: date | None = None

        for entry in manifest.get("scenarios", []):
            sid = entry["scenario_id"]
            try:
                pen = PenetrationLevel(entry["penetration"])
            except ValueError as exc:
                raise StoreInvalid(f"{sid}: bad penetration {entry['penetration']}") from exc
            try:
                res = Resolution.from_label(entry["resolution"])
            except ValueError as exc:
                raise StoreInvalid(f"{sid}: bad resolution {entry['resolution']}") from exc
            penetrations.add(pen)
            resolutions.add(res)

            for kind in ("scores", "daily", "pointwise"):
                path = store_dir / entry["files"][kind]
                if not path.exists():
                    raise StoreInvalid(f"{sid}: missing file {path.name}")
                digest = _sha256(path)
                if digest != entry["sha256"][kind]:
                    raise StoreInvalid(f"{sid}: digest mismatch for {path.name}")

            # records: model -> target_time string -> crps, for verification
            records: dict[str, dict[str, float]] = {}
            scores_path = store_dir / entry["files"]["scores"]
            n_records = 0
            with scores_path.open() as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    doc = json.loads(line)
                    records.setdefault(doc["model_id"], {})[doc["target_time"]] = doc["crps"]
                    n_records += 1
            if n_records != entry["counts"]["records"]:
                raise StoreInvalid(f"{sid}: manifest says {entry['counts']['records']} records, "
                                   f"file has {n_records}")
            record_counts[sid] = n_records

            daily_docs = json.loads((store_dir / entry["files"]["daily"]).read_text())
            pointwise_docs = json.loads((store_dir / entry["files"]["pointwise"]).read_text())
            _spot_verify(sid, records, daily_docs, pointwise_docs, reference_id)

            by_model_daily: dict[str, list[dict]] = {}
            for doc in daily_docs:
                by_model_daily.setdefault(doc["model_id"], []).append(doc)
            for model_id, docs in by_model_daily.items():
                entry_dates = [date.fromisoformat(doc["date"]) for doc in docs]
                daily[(model_id, pen, res)] = _DailyGroup(
                    dates=np.array([doc["date"] for doc in docs], dtype="datetime64[D]"),
                    crpss=np.array([doc["crpss"] for doc in docs], dtype=np.float64),
                )
                lo, hi = min(entry_dates), max(entry_dates)
                span_lo = lo if span_lo is None or lo < span_lo else span_lo
                span_hi = hi if span_hi is None or hi > span_hi else span_hi

            by_model_pw: dict[str, list[dict]] = {}
            for doc in pointwise_docs:
                by_model_pw.setdefault(doc["model_id"], []).append(doc)
            for model_id, docs in by_model_pw.items():
                stamps = [parse_timestamp(doc["target_time"]) for doc in docs]
                pointwise[(model_id, pen, res)] = _PointwiseGroup(
                    times=np.array([np.datetime64(ts, "m") for ts in stamps]),
                    months=np.array([ts.month for ts in stamps], dtype=np.int16),
                    hours=np.array([ts.hour for ts in stamps], dtype=np.int16),
                    crpss=np.array([doc["crpss"] for doc in docs], dtype=np.float64),
                )

        return cls(
            manifest=manifest,
            models=sorted(manifest.get("models", [])),
            reference_model=reference_id,
            penetrations=sorted(penetrations),
            resolutions=[r for r in Resolution if r in resolutions],
            date_span=(span_lo, span_hi) if span_lo is not None else None,
            record_counts=record_counts,
            daily=daily,
            pointwise=pointwise,
        )


def _spot_verify(sid: str, records: dict[str, dict[str, float]],
                 daily_docs: list[dict], pointwise_docs: list[dict],
                 reference_id: str) -> None:
    """Recompute a deterministic 1% sample of derived entries from records."""
    reference = records.get(reference_id, {})
    for doc in daily_docs[::SPOT_CHECK_STRIDE]:
        model = records.get(doc["model_id"], {})
        day_prefix = doc["date"]
        model_day = [v for t, v in model.items() if t.startswith(day_prefix)]
        ref_day = [v for t, v in reference.items() if t.startswith(day_prefix)]
        if not model_day or len(model_day) != len(ref_day):
            raise StoreInvalid(f"{sid}: daily entry {doc['date']} not derivable from records")
        expected = crpss(math.fsum(model_day) / len(model_day), math.fsum(ref_day) / len(ref_day))
        if not math.isclose(expected, doc["crpss"], rel_tol=1e-9, abs_tol=1e-12):
            raise StoreInvalid(
                f"{sid}: daily crpss for {doc['date']} is {doc['crpss']}, recomputed {expected}"
            )
    for doc in pointwise_docs[::SPOT_CHECK_STRIDE]:
        model_crps = records.get(doc["model_id"], {}).get(doc["target_time"])
        ref_crps = reference.get(doc["target_time"])
        if model_crps is None or ref_crps is None:
            raise StoreInvalid(f"{sid}: pointwise entry {doc['target_time']} lacks records")
        expected = crpss(model_crps, ref_crps)
        if not math.isclose(expected, doc["crpss"], rel_tol=1e-9, abs_tol=1e-12):
            raise StoreInvalid(
                f"{sid}: pointwise crpss at {doc['target_time']} is {doc['crpss']}, "
                f"recomputed {expected}"
            )


@dataclass(frozen=True)
class QueryFilter:
    """Validated filter shared by the comparison and patterns queries."""

    model_id: str
    penetration: PenetrationLevel | None  # None means ALL (comparison mode)
    resolution: Resolution | None = None
    start_date: date | None = None
    end_date: date | None = None
    months: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if (self.start_date is not None and self.end_date is not None
                and self.start_date > self.end_date):
            raise InvalidFilter(f"start {self.start_date} after end {self.end_date}")
        if self.months is not None:
            if not self.months:
                raise InvalidFilter("months filter must be non-empty")
            if any(m < 1 or m > 12 for m in self.months):
                raise InvalidFilter("months must lie in 1..12")


def resolve_model(store: ScoreStore, model_id: str | None) -> str:
    """Default to the store's only skill-bearing model when unambiguous."""
    if model_id is not None:
        if model_id not in store.models:
            raise InvalidFilter(f"unknown model {model_id!r}")
        if model_id == store.reference_model:
            raise InvalidFilter("skill queries compare a model against the reference; "
                                "pass a non-reference model")
        return model_id
    candidates = store.skill_models
    if len(candidates) != 1:
        raise InvalidFilter(f"model is ambiguous, choose one of {candidates}")
    return candidates[0]


def _penetration_list(store: ScoreStore, query: QueryFilter) -> list[PenetrationLevel]:
    if query.penetration is None:
        return list(store.penetrations)
    return [query.penetration]


def _date_mask(dates: np.ndarray, start: date | None, end: date | None) -> np.ndarray:
    mask = np.ones(dates.shape, dtype=bool)
    if start is not None:
        mask &= dates >= np.datetime64(start, "D")
    if end is not None:
        mask &= dates <= np.datetime64(end, "D")
    return mask


def comparison_groups(store: ScoreStore, query: QueryFilter) -> list[dict]:
    """BoxStats plus raw daily points per (penetration, resolution) group."""
    resolutions = [query.resolution] if query.resolution is not None else list(store.resolutions)
    groups = []
    for pen in _penetration_list(store, query):
        for res in resolutions:
            group = store.daily.get((query.model_id, pen, res))
            if group is None:
                dates = np.empty(0, dtype="datetime64[D]")
                values = np.empty(0)
            else:
                mask = _date_mask(group.dates, query.start_date, query.end_date)
                dates = group.dates[mask]
                values = group.crpss[mask]
            box: BoxStats | None = box_stats(values) if values.size else None
            groups.append({
                "penetration": pen.percent,
                "resolution": res.label,
                "model_id": query.model_id,
                "n": int(values.size),
                "box": None if box is None else {
                    "median": box.median,
                    "q1": box.q1,
                    "q3": box.q3,
                    "whisker_lo": box.whisker_lo,
                    "whisker_hi": box.whisker_hi,
                    "outliers": list(box.outliers),
                    "n": box.n,
                },
                "points": [
                    {"date": str(d), "crpss": float(v)} for d, v in zip(dates, values)
                ],
            })
    return groups


def patterns_grids(store: ScoreStore, query: QueryFilter) -> dict:
    """Heatmap cell grids per penetration, with the global color-scale range."""
    resolutions = [query.resolution] if query.resolution is not None else list(store.resolutions)
    grids = []
    means: list[float] = []
    for pen in _penetration_list(store, query):
        points: list[tuple[datetime, float]] = []
        for res in resolutions:
            group = store.pointwise.get((query.model_id, pen, res))
            if group is None:
                continue
            day_dates = group.times.astype("datetime64[D]")
            mask = _date_mask(day_dates, query.start_date, query.end_date)
            for ts, skill in zip(group.times[mask], group.crpss[mask]):
                points.append((ts.astype(datetime), float(skill)))
        points.sort(key=lambda item: item[0])
        cells = heatmap_aggregate(points, months=query.months)
        months_present = sorted({c.month for c in cells})
        grids.append({
            "penetration": pen.percent,
            "months": months_present,
            "cells": [
                {"month": c.month, "hour": c.hour, "mean_crpss": c.mean_crpss, "n": c.n}
                for c in cells
            ],
        })
        means.extend(c.mean_crpss for c in cells if c.mean_crpss is not None)
    return {
        "grids": grids,
        "min_mean_crpss": min(means) if means else None,
        "max_mean_crpss": max(means) if means else None,
    }
