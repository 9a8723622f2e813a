"""Tests for the csbm command line: dispatch, output formats and exit codes."""

from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from csbm_lab import __version__
from csbm_lab.cli import build_parser, builtin_registry, main
from csbm_lab.constants import SWEEP_CSV_HEADER

DENSE = ["--n", "10", "--alphas", "4.2", "--betas", "0.05"]


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CSBM_THREADS", raising=False)


def _run(argv: list[str]) -> tuple[int, str, str]:
    stdout, stderr = io.StringIO(), io.StringIO()
    code = main(argv, stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def _last_error(stderr: str) -> dict:
    return json.loads(stderr.strip().splitlines()[-1])


class TestParser:
    def test_subcommands_sorted(self):
        names = [command.name for command in builtin_registry().list_all()]
        assert names == ["bounds", "decode", "divergence", "pnk", "rate", "sample", "sweep"]

    def test_global_flags(self):
        parser = build_parser(builtin_registry())
        args = parser.parse_args(["-vv", "--journal", "divergence", "--format", "csv"])
        assert args.verbose == 2
        assert args.journal
        assert args.format == "csv"
        assert args.command == "divergence"

    def test_help_exits_zero(self, capsys):
        assert _run(["--help"])[0] == 0
        assert "divergence" in capsys.readouterr().out

    def test_version(self, capsys):
        assert _run(["--version"])[0] == 0
        assert __version__ in capsys.readouterr().out


class TestUsageErrors:
    def test_unknown_subcommand(self):
        code, _, stderr = _run(["frobnicate"])
        assert code == 1
        assert _last_error(stderr)["error"] == "UsageError"

    def test_missing_subcommand(self):
        assert _run([])[0] == 1

    def test_bad_format_choice(self):
        assert _run(["divergence", *DENSE, "--format", "xml"])[0] == 1


class TestDivergence:
    def test_json(self):
        code, stdout, _ = _run(["divergence", "--n", "100", "--alphas", "9", "--betas", "1"])
        assert code == 0
        data = json.loads(stdout)
        assert data["d_plus"] == pytest.approx(4.0)
        assert set(data) == {"d_plus", "hellinger_sq", "n_normalized"}

    def test_params_file(self, tmp_path):
        (tmp_path / "params.json").write_text(
            json.dumps({"n": 100, "alphas": [9], "betas": [1]}), encoding="utf-8"
        )
        code, stdout, _ = _run(["divergence", "--params", "params.json"])
        assert code == 0
        assert json.loads(stdout)["d_plus"] == pytest.approx(4.0)

    def test_csv(self):
        code, stdout, _ = _run(["divergence", *DENSE, "--format", "csv"])
        assert code == 0
        assert stdout.splitlines()[0] == "d_plus,hellinger_sq,n_normalized"

    def test_table(self):
        code, stdout, _ = _run(["divergence", *DENSE, "--format", "table"])
        assert code == 0
        assert "d_plus" in stdout

    def test_missing_params(self):
        code, stdout, stderr = _run(["divergence", "--n", "10"])
        assert code == 1
        assert stdout == ""
        error = _last_error(stderr)
        assert error["error"] == "ParamsError"
        assert error["tag"] == "malformed"

    def test_bad_number_list(self):
        code, _, stderr = _run(["divergence", "--n", "10", "--alphas", "x", "--betas", "1"])
        assert code == 1
        assert _last_error(stderr)["tag"] == "malformed"

    def test_invalid_params_carry_fault_tag(self):
        code, _, stderr = _run(["divergence", "--n", "10", "--alphas", "5", "--betas", "0.05"])
        assert code == 1
        assert _last_error(stderr)["tag"] == "within_mass"


class TestSampleAndDecode:
    def test_sample_is_deterministic(self):
        first = _run(["sample", *DENSE, "--seed", "3"])
        second = _run(["sample", *DENSE, "--seed", "3"])
        assert first[0] == 0
        assert first[1] == second[1]
        assert first[1].splitlines()[0] == "10 1"

    def test_sample_to_file(self, tmp_path):
        code, stdout, _ = _run(["sample", *DENSE, "--output", "g.txt"])
        assert code == 0
        assert stdout == ""
        assert (tmp_path / "g.txt").read_text(encoding="utf-8").startswith("10 1\n")

    def test_sample_with_partition_file(self, tmp_path):
        (tmp_path / "p.txt").write_text("ABABABABAB\n", encoding="utf-8")
        assert _run(["sample", *DENSE, "--partition", "p.txt"])[0] == 0

    def test_decode_exact(self):
        _run(["sample", *DENSE, "--seed", "1", "--output", "g.txt"])
        code, stdout, _ = _run(["decode", *DENSE, "--graph", "g.txt"])
        assert code == 0
        data = json.loads(stdout)
        assert data["explored"] == 126
        assert data["labels"][0] == "A"
        assert isinstance(data["tie"], bool)

    def test_decode_local(self):
        _run(["sample", *DENSE, "--seed", "1", "--output", "g.txt"])
        code, stdout, _ = _run(["decode", *DENSE, "--graph", "g.txt", "--decoder", "local"])
        assert code == 0
        data = json.loads(stdout)
        assert data["tie"] is None
        assert data["explored"] is None
        assert len(data["labels"]) == 10

    def test_decode_size_mismatch(self):
        _run(["sample", *DENSE, "--output", "g.txt"])
        code, _, stderr = _run(
            ["decode", "--n", "12", "--alphas", "4.2", "--betas", "0.05", "--graph", "g.txt"]
        )
        assert code == 1
        assert _last_error(stderr)["error"] == "PartitionError"

    def test_decode_respects_exact_cap_setting(self, tmp_path):
        _run(["sample", *DENSE, "--output", "g.txt"])
        settings_dir = tmp_path / ".csbm"
        settings_dir.mkdir()
        (settings_dir / "config.toml").write_text("[lab]\nexact_cap = 8\n", encoding="utf-8")
        code, _, stderr = _run(["decode", *DENSE, "--graph", "g.txt"])
        assert code == 1
        assert _last_error(stderr)["error"] == "DecoderCapError"

    def test_missing_graph_file_is_runtime_failure(self):
        code, _, stderr = _run(["decode", *DENSE, "--graph", "absent.txt"])
        assert code == 2
        assert _last_error(stderr)["error"] == "FileNotFoundError"

    def test_malformed_graph(self, tmp_path):
        (tmp_path / "g.txt").write_text("10 1\n0 0 1\n", encoding="utf-8")
        code, _, stderr = _run(["decode", *DENSE, "--graph", "g.txt"])
        assert code == 1
        assert _last_error(stderr)["message"].startswith("line 2: ")


class TestAnalysisCommands:
    def test_rate(self):
        code, stdout, _ = _run(["rate", "--n", "100", "--alphas", "9", "--betas", "1", "--a", "0"])
        assert code == 0
        data = json.loads(stdout)
        assert data["rate"] > 0
        assert data["infinite"] is False

    def test_bounds_csv(self):
        code, stdout, _ = _run(["bounds", *DENSE, "--format", "csv"])
        assert code == 0
        lines = stdout.splitlines()
        assert lines[0].startswith("formula_id,")
        assert [line.split(",")[0] for line in lines[1:]] == [
            "pnk", "pnk", "ml_union", "ml_union_stirling", "converse_cramer",
        ]

    def test_bounds_json(self):
        code, stdout, _ = _run(["bounds", *DENSE, "--max-k", "1"])
        assert code == 0
        assert [row["formula_id"] for row in json.loads(stdout)].count("pnk") == 1

    def test_overflowed_bounds_are_strict_json(self):
        def reject(token):
            raise ValueError(f"non-standard JSON constant {token}")

        argv = ["bounds", "--n", "100000", "--alphas", "1", "--betas", "1.0001", "--max-k", "1"]
        code, stdout, _ = _run(argv)
        assert code == 0
        rows = {row["formula_id"]: row for row in json.loads(stdout, parse_constant=reject)}
        for formula in ("ml_union", "ml_union_stirling"):
            assert rows[formula]["value"] is None
            assert rows[formula]["vacuous"] is True
            assert rows[formula]["log_value"] > 700

    def test_pnk(self):
        code, stdout, _ = _run(["pnk", *DENSE, "--k", "1", "--trials", "2000", "--seed", "4"])
        assert code == 0
        data = json.loads(stdout)
        assert data["N"] == 8
        assert 0.0 <= data["estimate"] <= 1.0
        assert data["exact_tail"] is not None
        assert data["theoretical"] >= data["exact_tail"]

    def test_pnk_exact_tail_at_large_n(self):
        argv = ["pnk", "--n", "1000", "--alphas", "9", "--betas", "1", "--k", "250"]
        code, stdout, _ = _run([*argv, "--trials", "200"])
        assert code == 0
        data = json.loads(stdout)
        assert data["N"] == 125_000
        assert data["exact_tail"] is not None
        assert data["estimate"] == 0.0

    def test_pnk_k_out_of_range(self):
        code, _, stderr = _run(["pnk", *DENSE, "--k", "3"])
        assert code == 1
        assert _last_error(stderr)["error"] == "BoundInputError"


class TestSweepCommand:
    @pytest.fixture
    def config_path(self, tmp_path) -> Path:
        path = tmp_path / "sweep.json"
        path.write_text(
            json.dumps(
                {
                    "base_alphas": [1.0],
                    "base_betas": [0.05],
                    "scale_grid": [1.0, 4.2],
                    "n_list": [10],
                    "trials": 8,
                    "seed": 5,
                }
            ),
            encoding="utf-8",
        )
        return path

    def test_csv_default(self, config_path):
        code, stdout, _ = _run(["sweep", "--config", str(config_path)])
        assert code == 0
        lines = stdout.splitlines()
        assert lines[0] == ",".join(SWEEP_CSV_HEADER)
        assert len(lines) == 3

    def test_thread_count_does_not_change_output(self, config_path, monkeypatch):
        monkeypatch.setenv("CSBM_THREADS", "1")
        single = _run(["sweep", "--config", str(config_path)])[1]
        monkeypatch.setenv("CSBM_THREADS", "8")
        parallel = _run(["sweep", "--config", str(config_path)])[1]
        assert single == parallel

    def test_overrides(self, config_path):
        code, stdout, _ = _run(
            ["sweep", "--config", str(config_path), "--trials", "2", "--format", "json"]
        )
        assert code == 0
        assert all(row["trials"] == 2 for row in json.loads(stdout))

    def test_invalid_config(self, tmp_path):
        (tmp_path / "bad.json").write_text('{"trials": 0}', encoding="utf-8")
        code, _, stderr = _run(["sweep", "--config", "bad.json"])
        assert code == 1
        assert _last_error(stderr)["error"] == "SweepConfigError"


class TestJournal:
    def test_journal_records_command_and_result(self, tmp_path):
        code, _, _ = _run(["--journal", "divergence", *DENSE])
        assert code == 0
        logs = list((tmp_path / ".csbm").glob("journal_*.log"))
        assert len(logs) == 1
        content = logs[0].read_text(encoding="utf-8")
        assert "[COMMAND] --journal divergence" in content
        assert "[RESULT]" in content
        assert "[SYSTEM] Journal stopped" in content

    def test_no_journal_by_default(self, tmp_path):
        _run(["divergence", *DENSE])
        assert not (tmp_path / ".csbm").exists()

    def test_errors_are_journaled(self, tmp_path):
        _run(["--journal", "divergence", "--n", "10"])
        content = next((tmp_path / ".csbm").glob("journal_*.log")).read_text(encoding="utf-8")
        assert "[ERROR]" in content
