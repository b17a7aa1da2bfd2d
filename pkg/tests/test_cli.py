import hashlib
import json
import socket
import subprocess
import sys
from pathlib import Path

from click.testing import CliRunner

from nlf.cli import SUITE_MANIFEST_NAME, cli


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_cli(args):
    return CliRunner().invoke(cli, args, catch_exceptions=False)


class TestSynth:
    def test_file_inventory_and_manifest(self, small_run):
        data = small_run["data"]
        csvs = sorted(p.name for p in data.glob("*.csv"))
        assert csvs == [
            "p20_15min.csv", "p20_1h.csv", "p30_15min.csv",
            "p30_1h.csv", "p50_15min.csv", "p50_1h.csv",
        ]
        manifest = json.loads((data / SUITE_MANIFEST_NAME).read_text())
        assert manifest["seed"] == 42 and manifest["days"] == 40
        for entry in manifest["scenarios"]:
            assert sha256(data / entry["path"]) == entry["sha256"]

    def test_rerun_is_byte_identical(self, small_run, tmp_path):
        out = tmp_path / "again"
        result = run_cli(["synth", "--seed", "42", "--start", "2023-01-01",
                          "--days", "40", "--out", str(out)])
        assert result.exit_code == 0
        for path in sorted(small_run["data"].glob("*.csv")):
            assert sha256(out / path.name) == sha256(path)

    def test_too_few_days_exits_2_naming_minimum(self, tmp_path):
        result = CliRunner().invoke(
            cli, ["synth", "--days", "10", "--out", str(tmp_path / "x")]
        )
        assert result.exit_code == 2
        assert "32" in result.output

    def test_bad_start_date(self, tmp_path):
        result = CliRunner().invoke(
            cli, ["synth", "--start", "01/01/2023", "--out", str(tmp_path / "x")]
        )
        assert result.exit_code == 2


class TestScore:
    def test_summary_table_on_stdout(self, small_run):
        lines = small_run["score_output"].strip().splitlines()
        assert lines[0].split() == ["scenario", "model", "median_daily_crpss"]
        body = [line.split() for line in lines[1:]]
        assert [row[0] for row in body] == [
            "p20_15min", "p20_1h", "p30_15min", "p30_1h", "p50_15min", "p50_1h",
        ]
        assert all(row[1] == "candidate" for row in body)
        for row in body:
            float(row[2])  # parseable medians

    def test_missing_reference_model_exits_2(self, small_run, tmp_path):
        result = CliRunner().invoke(
            cli, ["score", "--data", str(small_run["data"]),
                  "--models", "candidate", "--out", str(tmp_path / "s")]
        )
        assert result.exit_code == 2
        assert "reference" in result.output

    def test_unknown_model_exits_2(self, small_run, tmp_path):
        result = CliRunner().invoke(
            cli, ["score", "--data", str(small_run["data"]),
                  "--models", "reference,lstm", "--out", str(tmp_path / "s")]
        )
        assert result.exit_code == 2

    def test_missing_suite_manifest_exits_1(self, tmp_path):
        (tmp_path / "empty").mkdir()
        result = CliRunner().invoke(
            cli, ["score", "--data", str(tmp_path / "empty"), "--out", str(tmp_path / "s")]
        )
        assert result.exit_code == 1

    def test_daily_skill_files_cover_complete_days_only(self, small_run):
        docs = json.loads((small_run["scores"] / "p20_1h.daily.json").read_text())
        dates = sorted(d["date"] for d in docs)
        assert dates[0] == "2023-02-01"
        assert dates[-1] == "2023-02-09"

    def test_rescore_is_byte_identical(self, small_run, tmp_path):
        out = tmp_path / "scores2"
        result = run_cli(["score", "--data", str(small_run["data"]), "--out", str(out)])
        assert result.exit_code == 0
        for path in sorted(small_run["scores"].glob("*")):
            if path.name == "store_manifest.json":
                continue  # echoes absolute-independent content; compared below
            assert sha256(out / path.name) == sha256(path), path.name
        a = json.loads((small_run["scores"] / "store_manifest.json").read_text())
        b = json.loads((out / "store_manifest.json").read_text())
        assert a == b


class TestServe:
    def test_port_in_use_exits_1(self, small_run):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            result = CliRunner().invoke(
                cli, ["serve", "--scores", str(small_run["scores"]), "--port", str(port)]
            )
            assert result.exit_code == 1
            assert "bind" in result.output
        finally:
            blocker.close()

    def test_invalid_store_exits_1(self, tmp_path):
        (tmp_path / "bad").mkdir()
        result = CliRunner().invoke(
            cli, ["serve", "--scores", str(tmp_path / "bad"), "--port", "18999"]
        )
        assert result.exit_code == 1
        assert "validation" in result.output


class TestEntryPoint:
    def test_error_prefix_and_exit_codes(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "nlf.cli", "synth", "--days", "7", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
        assert proc.stderr.startswith("error:")
        assert proc.stderr.count("\n") == 1

    def test_unknown_option_exits_2_with_prefix(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "nlf.cli", "synth", "--bogus"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
        assert proc.stderr.startswith("error:")

    def test_help_exits_0(self):
        proc = subprocess.run(
            [sys.executable, "-m", "nlf.cli", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "synth" in proc.stdout and "score" in proc.stdout and "serve" in proc.stdout

    def test_runtime_failure_exits_1_with_prefix(self, tmp_path):
        (tmp_path / "empty").mkdir()
        proc = subprocess.run(
            [sys.executable, "-m", "nlf.cli", "score", "--data", str(tmp_path / "empty"),
             "--out", str(tmp_path / "s")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("error:")
