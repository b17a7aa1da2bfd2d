"""Command-line pipeline: synthesize scenarios, score backtests, serve.

Stages hand off through files (CSV suite + manifest, then a score store
directory) so each one is independently testable and reproducible. All
error paths exit nonzero with a single ``error: ...`` line on stderr;
bad flags exit 2, runtime failures exit 1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import socket
import sys
from datetime import date
from pathlib import Path

import click

from . import __version__
from .errors import NlfError
from .forecasters import CANDIDATE_MODEL_ID, REFERENCE_MODEL_ID, ForecasterSpec
from .pipeline import backtest_scenario
from .store import ScoreStore, StoreInvalid, write_store
from .synthdata import MIN_DAYS, generate_suite
from .timeseries import PenetrationLevel, Resolution, parse_series, series_to_csv

SUITE_MANIFEST_NAME = "manifest.json"

log = logging.getLogger("nlf")


def _setup_logging() -> str:
    level_name = os.environ.get("NLF_LOG", "info").lower()
    if level_name not in {"error", "info", "debug"}:
        level_name = "info"
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}[level_name],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return level_name


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _parse_date_flag(value: str, flag: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"{flag} must be YYYY-MM-DD, got {value!r}")


@click.group(name="nlf")
@click.version_option(version=__version__, prog_name="nlf")
def cli() -> None:
    """Net-load forecast comparison pipeline."""


@cli.command("synth")
@click.option("--seed", type=int, default=42, show_default=True, help="RNG seed for the suite.")
@click.option("--start", "start_str", default="2023-01-01", show_default=True,
              help="First calendar date (YYYY-MM-DD).")
@click.option("--days", type=int, default=365, show_default=True, help="Number of days.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path),
              help="Output directory for the scenario CSVs and manifest.")
def cmd_synth(seed: int, start_str: str, days: int, out_dir: Path) -> None:
    """Generate the 3x2 synthetic scenario suite (penetrations x resolutions)."""
    _setup_logging()
    start = _parse_date_flag(start_str, "--start")
    if days < MIN_DAYS:
        raise click.BadParameter(
            f"--days must be at least {MIN_DAYS} (30-day warm-up plus scored days), got {days}"
        )
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        suite = generate_suite(seed, start, days)
        entries = []
        for series in suite:
            path = out_dir / f"{series.scenario_id}.csv"
            path.write_text(series_to_csv(series))
            entries.append({
                "scenario_id": series.scenario_id,
                "penetration": series.penetration.percent,
                "resolution": series.resolution.label,
                "path": path.name,
                "sha256": _sha256_file(path),
            })
            log.info("wrote %s (%d rows)", path, len(series))
        manifest = {
            "tool_version": __version__,
            "seed": seed,
            "start": start.isoformat(),
            "days": days,
            "scenarios": entries,
        }
        (out_dir / SUITE_MANIFEST_NAME).write_text(json.dumps(manifest, indent=1) + "\n")
    except OSError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {len(suite)} scenario CSVs and {SUITE_MANIFEST_NAME} to {out_dir}")


def _load_suite_manifest(data_dir: Path) -> dict:
    manifest_path = data_dir / SUITE_MANIFEST_NAME
    if not manifest_path.exists():
        raise click.ClickException(f"no {SUITE_MANIFEST_NAME} in {data_dir}; run synth first")
    try:
        return json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"unreadable {SUITE_MANIFEST_NAME}: {exc}")


def _model_specs(models: list[str]) -> list[ForecasterSpec]:
    specs = []
    for model_id in models:
        if model_id == REFERENCE_MODEL_ID:
            specs.append(ForecasterSpec.reference())
        elif model_id == CANDIDATE_MODEL_ID:
            specs.append(ForecasterSpec.candidate())
        else:
            raise click.BadParameter(
                f"unknown model {model_id!r}; available: {REFERENCE_MODEL_ID}, {CANDIDATE_MODEL_ID}"
            )
    return specs


@cli.command("score")
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory with the synth suite (CSVs + manifest.json).")
@click.option("--models", "models_str", default=f"{REFERENCE_MODEL_ID},{CANDIDATE_MODEL_ID}",
              show_default=True, help="Comma-separated model list; must include the reference.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path),
              help="Output directory for the score store.")
def cmd_score(data_dir: Path, models_str: str, out_dir: Path) -> None:
    """Day-ahead backtest of every model on every scenario; write the score store."""
    _setup_logging()
    models = [m.strip() for m in models_str.split(",") if m.strip()]
    if REFERENCE_MODEL_ID not in models:
        raise click.BadParameter(f"--models must include {REFERENCE_MODEL_ID!r}, got {models_str!r}")
    if len(set(models)) != len(models):
        raise click.BadParameter(f"--models has duplicates: {models_str!r}")
    specs = _model_specs(models)
    suite_manifest = _load_suite_manifest(data_dir)

    results = []
    summary_rows = []
    try:
        for entry in suite_manifest["scenarios"]:
            series = parse_series(
                (data_dir / entry["path"]).read_text(),
                Resolution.from_label(entry["resolution"]),
                PenetrationLevel(entry["penetration"]),
                scenario_id=entry["scenario_id"],
            )
            scores = backtest_scenario(series, specs, reference_id=REFERENCE_MODEL_ID)
            if not scores.scored_dates:
                raise click.ClickException(
                    f"scenario {entry['scenario_id']}: no scoreable dates "
                    "(insufficient history for every day)"
                )
            results.append(scores)
            for model_id in models:
                if model_id == REFERENCE_MODEL_ID:
                    continue
                skills = sorted(d.crpss for d in scores.daily if d.model_id == model_id)
                median = skills[len(skills) // 2] if len(skills) % 2 else (
                    (skills[len(skills) // 2 - 1] + skills[len(skills) // 2]) / 2.0
                )
                summary_rows.append((entry["scenario_id"], model_id, median))
            log.info("scored %s: %d days, %d records", entry["scenario_id"],
                     len(scores.scored_dates), len(scores.records))
        write_store(out_dir, results, source={
            "seed": suite_manifest.get("seed"),
            "start": suite_manifest.get("start"),
            "days": suite_manifest.get("days"),
        }, reference_id=REFERENCE_MODEL_ID)
    except OSError as exc:
        raise click.ClickException(str(exc))
    except NlfError as exc:
        raise click.ClickException(str(exc))

    click.echo(f"{'scenario':<12} {'model':<12} median_daily_crpss")
    for scenario_id, model_id, median in summary_rows:
        click.echo(f"{scenario_id:<12} {model_id:<12} {median:.4f}")


@cli.command("serve")
@click.option("--scores", "scores_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Score store directory written by `nlf score`.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory of the built UI bundle to serve at '/' "
                   "(defaults to ./frontend/dist when present).")
def cmd_serve(scores_dir: Path, port: int, host: str, ui_dir: Path | None) -> None:
    """Validate and load a score store, then serve the HTTP API."""
    level = _setup_logging()
    import uvicorn

    from .service import create_app

    try:
        store = ScoreStore.load(scores_dir)
    except StoreInvalid as exc:
        raise click.ClickException(f"score store failed validation: {exc}")

    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None

    # Fail fast with a clear message instead of a uvicorn traceback.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}")
    finally:
        probe.close()

    app = create_app(store, ui_dir=ui_dir)
    log.info("serving %s on %s:%d (ui=%s)", scores_dir, host, port, ui_dir or "none")
    uvicorn.run(app, host=host, port=port,
                log_level={"error": "error", "info": "info", "debug": "debug"}[level],
                access_log=True)


def main() -> None:
    """Entry point with uniform `error:` reporting and exit codes."""
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as exc:  # --help and friends
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("error: aborted", err=True)
        sys.exit(130)
    sys.exit(0)


if __name__ == "__main__":
    main()
