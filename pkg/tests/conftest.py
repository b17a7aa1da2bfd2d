import os
from datetime import date
from pathlib import Path

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, settings

from nlf.cli import cli
from nlf.store import ScoreStore
from nlf.synthdata import ScenarioConfig, generate
from nlf.timeseries import PenetrationLevel, Resolution

settings.register_profile(
    "ci", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

GOLDEN_DIR = Path(__file__).parent / "golden"


def check_golden(name: str, body: bytes) -> None:
    """Compare bytes against a frozen golden file.

    Set NLF_UPDATE_GOLDEN=1 to (re)write the files instead.
    """
    path = GOLDEN_DIR / name
    if os.environ.get("NLF_UPDATE_GOLDEN") == "1":
        GOLDEN_DIR.mkdir(exist_ok=True)
        path.write_bytes(body)
        return
    assert path.exists(), f"golden file {name} missing; run with NLF_UPDATE_GOLDEN=1"
    assert body == path.read_bytes(), f"response does not match golden file {name}"


@pytest.fixture(scope="session")
def small_series():
    """200-day 15-min series, long enough for mid-June forecast targets."""
    return generate(
        ScenarioConfig(PenetrationLevel.P20, Resolution.MIN15, date(2023, 1, 1), 200, 7)
    )


@pytest.fixture(scope="session")
def small_run(tmp_path_factory):
    """A 40-day seed-42 pipeline run shared by store/service/CLI tests."""
    root = tmp_path_factory.mktemp("small_run")
    data_dir = root / "data"
    scores_dir = root / "scores"
    runner = CliRunner()
    result = runner.invoke(
        cli,
        ["synth", "--seed", "42", "--start", "2023-01-01", "--days", "40",
         "--out", str(data_dir)],
        catch_exceptions=False,
    )
    assert result.exit_code == 0, result.output
    result = runner.invoke(
        cli,
        ["score", "--data", str(data_dir), "--out", str(scores_dir)],
        catch_exceptions=False,
    )
    assert result.exit_code == 0, result.output
    return {"data": data_dir, "scores": scores_dir, "score_output": result.output}


@pytest.fixture(scope="session")
def small_store(small_run) -> ScoreStore:
    return ScoreStore.load(small_run["scores"])
