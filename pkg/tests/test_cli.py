from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from app import cli
from app.cli import main
from app.errors import NoSignChange
from app.models import SchottkyData
from app.words.intervals import partition


def _run_json(capsys: pytest.CaptureFixture[str], argv: list[str]) -> dict:
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_dimension_to_stdout(capsys: pytest.CaptureFixture[str], delta: float) -> None:
    payload = _run_json(capsys, ["dimension", "-M", "12", "--stdout"])
    assert payload["delta"] == pytest.approx(delta, abs=1e-9)
    low, high = payload["bracket"]
    assert low <= payload["delta"] <= high


def test_usage_errors_exit_64(capsys: pytest.CaptureFixture[str]) -> None:
    assert main([]) == 64
    assert main(["dimension", "--no-such-flag"]) == 64
    assert main(["no-such-command"]) == 64
    assert "usage" in capsys.readouterr().err


def test_help_exits_cleanly(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["--help"]) == 0
    assert "gap-experiment" in capsys.readouterr().out


def test_validate_reports_bad_group(tmp_path: Path, bad_group_payload: dict,
                                   capsys: pytest.CaptureFixture[str],
                                   caplog: pytest.LogCaptureFixture) -> None:
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad_group_payload))
    with caplog.at_level(logging.ERROR):
        assert main(["validate", "--group", str(path), "--stdout"]) == 2
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is False
    assert "unit determinant" in caplog.text


def test_validate_rejects_overlapping_disks(tmp_path: Path) -> None:
    path = tmp_path / "overlap.json"
    path.write_text(json.dumps({"centers": [-3, -1, 1, 1.5], "radii": [0.5] * 4}))
    assert main(["validate", "--group", str(path), "--stdout"]) == 2


def test_validate_reference_group(capsys: pytest.CaptureFixture[str]) -> None:
    assert _run_json(capsys, ["validate", "--stdout"])["passed"] is True


def test_missing_group_file_is_bad_input(tmp_path: Path) -> None:
    assert main(["dimension", "--group", str(tmp_path / "absent.json"), "--stdout"]) == 2


def test_cover_sample_is_deterministic(tmp_path: Path) -> None:
    for name in ("a", "b"):
        assert main(["cover-sample", "--n", "6", "--seed", "11", "--out", str(tmp_path / name)]) == 0
    first = (tmp_path / "a" / "cover.json").read_text()
    assert first == (tmp_path / "b" / "cover.json").read_text()
    assert json.loads(first)["n"] == 6


def test_partition_count(capsys: pytest.CaptureFixture[str], group: SchottkyData) -> None:
    payload = _run_json(capsys, ["partition", "--tau", "0.1", "--stdout"])
    assert payload["count"] == len(partition(0.1, group)) == len(payload["words"])


def test_partition_files(tmp_path: Path) -> None:
    assert main(["partition", "--tau", "0.2", "--mirror", "--out", str(tmp_path)]) == 0
    header = (tmp_path / "partition.csv").read_text().splitlines()[0]
    assert header == "word,length,upsilon"
    assert json.loads((tmp_path / "partition.json").read_text())["mirror"] is True


def test_trace_stats_exhaustive(capsys: pytest.CaptureFixture[str]) -> None:
    payload = _run_json(capsys, ["trace-stats", "--word", "1", "--n", "3",
                                 "--mode", "exhaustive", "--stdout"])
    assert payload["estimate"]["mean"] == pytest.approx(0.0, abs=1e-12)
    assert payload["estimate"]["trials"] == 36


def test_refined_zeta_needs_tau() -> None:
    assert main(["zeta-eval", "--kind", "refined", "--s-re", "0.5", "--stdout"]) == 2


def test_negative_tau_is_bad_input() -> None:
    assert main(["partition", "--tau", "-1", "--stdout"]) == 2


def test_numerical_failure_exits_3(monkeypatch: pytest.MonkeyPatch) -> None:
    def fail(*args, **kwargs):
        raise NoSignChange("pressure has no sign change")

    monkeypatch.setattr(cli, "hausdorff_dimension", fail)
    assert main(["dimension", "--stdout"]) == 3


@pytest.mark.slow
def test_gap_experiment_is_reproducible(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["gap-experiment", "--degrees", "2", "--trials", "2", "-M", "8", "--nodes", "64",
            "--audit-trials", "0", "--identity-debug", "--jobs", "1", "--seed", "3", "--stdout"]
    first = _run_json(capsys, argv)
    second = _run_json(capsys, argv)
    assert first["config_hash"] == second["config_hash"]
    assert first["summaries"] == second["summaries"]
