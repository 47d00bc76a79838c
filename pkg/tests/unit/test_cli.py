"""Unit tests for the command-line entry point."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any

import pytest

from app.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main

if TYPE_CHECKING:
    from pathlib import Path


def write_config(path: Path, **values: Any) -> Path:
    path.write_text(json.dumps(values), encoding="utf-8")
    return path


@pytest.fixture
def run_config(tmp_path: Path, dataset_dir: Path) -> Path:
    """A two-fold naive Bayes run on the fixture dataset with 1 s frames."""
    return write_config(
        tmp_path / "gnb.json",
        method="gnb",
        dataset_dir=str(dataset_dir),
        manifest=str(dataset_dir / "manifest.json"),
        frame_len=250,
        k=2,
        output_dir=str(tmp_path / "out"),
    )


class TestParsing:
    """Tests for argument handling."""

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that --version exits cleanly."""
        assert main(["--version"]) == EXIT_OK
        assert "szbench" in capsys.readouterr().out

    def test_missing_subcommand(self) -> None:
        """Test that a bare invocation is a usage error."""
        assert main([]) == EXIT_USAGE

    def test_unknown_subcommand(self) -> None:
        """Test that unknown commands are usage errors."""
        assert main(["train"]) == EXIT_USAGE


class TestIngest:
    """Tests for the ingest command."""

    def test_summary(self, dataset_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test per-class counts and the written cache."""
        code = main(
            [
                "ingest",
                str(dataset_dir),
                "--manifest",
                str(dataset_dir / "manifest.json"),
                "--frame-len",
                "250",
            ]
        )

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "subjects: SZ=2 HC=2" in out
        assert "frames: SZ=8 HC=8 total=16" in out
        assert (dataset_dir / "frames.szbc").is_file()

    def test_scan_without_manifest(self, dataset_dir: Path, tmp_path: Path) -> None:
        """Test labels inferred from file names and a custom cache path."""
        cache = tmp_path / "cache.szbc"

        code = main(["ingest", str(dataset_dir), "--frame-len", "500", "--out", str(cache)])

        assert code == EXIT_OK
        assert cache.is_file()

    def test_empty_manifest(self, dataset_dir: Path) -> None:
        """Test that a manifest without files is a usage error."""
        manifest = write_config(dataset_dir / "empty.json", version=1, entries=[])
        assert main(["ingest", str(dataset_dir), "--manifest", str(manifest)]) == EXIT_USAGE

    def test_directory_without_recordings(self, tmp_path: Path) -> None:
        """Test that an empty dataset directory is a usage error."""
        assert main(["ingest", str(tmp_path)]) == EXIT_USAGE

    def test_bad_frame_length(self, dataset_dir: Path) -> None:
        """Test that a non-positive frame length is rejected."""
        assert main(["ingest", str(dataset_dir), "--frame-len", "0"]) == EXIT_USAGE

    def test_recordings_too_short(self, dataset_dir: Path) -> None:
        """Test that frames longer than every recording fail at runtime."""
        code = main(
            [
                "ingest",
                str(dataset_dir),
                "--manifest",
                str(dataset_dir / "manifest.json"),
                "--frame-len",
                "6250",
            ]
        )
        assert code == EXIT_FAILURE


class TestRun:
    """Tests for the run command."""

    def test_writes_results(
        self, run_config: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test the printed table and the result files."""
        assert main(["run", "--config", str(run_config)]) == EXIT_OK

        run_dir = tmp_path / "out" / "gnb_zscore"
        assert "gnb_zscore" in capsys.readouterr().out
        results = json.loads((run_dir / "results.json").read_text())
        assert results["method"] == "gnb"
        assert results["manifest"]["k"] == 2
        assert (run_dir / "roc_gnb_zscore.csv").is_file()
        assert (run_dir / "roc_gnb_zscore.svg").is_file()

    def test_flags_override_file(self, run_config: Path, tmp_path: Path) -> None:
        """Test --seed and --out."""
        out = tmp_path / "elsewhere"

        code = main(["run", "--config", str(run_config), "--seed", "5", "--out", str(out)])

        assert code == EXIT_OK
        results = json.loads((out / "gnb_zscore" / "results.json").read_text())
        assert results["manifest"]["seed"] == 5

    def test_missing_config(self, tmp_path: Path) -> None:
        """Test that a missing config file is a usage error."""
        assert main(["run", "--config", str(tmp_path / "none.json")]) == EXIT_USAGE

    def test_invalid_config(self, tmp_path: Path) -> None:
        """Test that an unknown method is a usage error."""
        config = write_config(tmp_path / "bad.json", method="resnet")
        assert main(["run", "--config", str(config)]) == EXIT_USAGE

    def test_too_many_folds(
        self, run_config: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test that a class smaller than k fails at runtime."""
        data = json.loads(run_config.read_text())
        config = write_config(tmp_path / "k20.json", **{**data, "k": 20})

        assert main(["run", "--config", str(config)]) == EXIT_FAILURE
        assert "need at least k=20" in capsys.readouterr().err


class TestGrid:
    """Tests for the grid command."""

    def test_partial_failure(self, run_config: Path, tmp_path: Path) -> None:
        """Test that one failed run gives exit 1 but the others still report."""
        data = json.loads(run_config.read_text())
        grid = write_config(
            tmp_path / "grid.json",
            defaults=data,
            runs=[{"method": "gnb"}, {"method": "knn", "k": 20}],
        )
        out = tmp_path / "grid_out"

        code = main(["grid", "--config", str(grid), "--out", str(out)])

        assert code == EXIT_FAILURE
        summary = json.loads((out / "grid_results.json").read_text())
        assert [row["method"] for row in summary["rows"]] == ["gnb"]
        assert summary["failed"][0]["run"] == "knn_zscore"
        assert (out / "grid_accuracy.svg").is_file()


class TestReport:
    """Tests for the report command."""

    def test_tabulates_run_directory(self, run_config: Path, tmp_path: Path) -> None:
        """Test re-rendering tables from a results directory."""
        assert main(["run", "--config", str(run_config)]) == EXIT_OK
        table_dir = tmp_path / "table"

        code = main(["report", str(tmp_path / "out"), "--out", str(table_dir), "--published"])

        assert code == EXIT_OK
        text = (table_dir / "results_table.txt").read_text()
        assert "Published Acc" in text
        rows = json.loads((table_dir / "results_table.json").read_text())["rows"]
        assert rows[0]["method"] == "gnb"

    def test_no_results(self, tmp_path: Path) -> None:
        """Test that a directory without results is a usage error."""
        assert main(["report", str(tmp_path)]) == EXIT_USAGE

    def test_broken_results(self, tmp_path: Path) -> None:
        """Test that an unreadable results file is a runtime failure."""
        broken = tmp_path / "results.json"
        broken.write_text("{", encoding="utf-8")
        assert main(["report", str(broken)]) == EXIT_FAILURE
