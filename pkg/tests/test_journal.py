"""Tests for the experiment journal."""

from __future__ import annotations

import logging
import re
from pathlib import Path
from unittest.mock import patch

from csbm_lab.journal import ExperimentJournal, JournalEntry, read_journal

TIMESTAMP = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{3}$")


def _kinds(path: str) -> list[tuple[str, str]]:
    return [(e.entry_type, e.content) for e in read_journal(path)]


class TestInit:
    def test_initially_inactive(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        assert journal.active is False
        assert journal.file_path is None
        assert journal.entry_count == 0


class TestStart:
    def test_filename_pattern(self, tmp_path: Path):
        path = ExperimentJournal(tmp_path / "j").start()
        assert re.search(r"journal_\d{8}_\d{6}\.log$", path)
        assert Path(path).parent == tmp_path / "j"

    def test_start_and_stop_entries(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        path = journal.start()
        journal.stop()
        assert _kinds(path) == [("SYSTEM", "Journal started"), ("SYSTEM", "Journal stopped")]


class TestLog:
    def test_entry_format(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        path = journal.start()
        journal.log("COMMAND", "divergence --n 10")
        journal.stop()
        entries = read_journal(path)
        assert entries[1].entry_type == "COMMAND"
        assert entries[1].content == "divergence --n 10"
        assert TIMESTAMP.match(entries[1].timestamp)
        assert journal.entry_count == 3

    def test_multiline_content_stays_on_one_line(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        path = journal.start()
        journal.log("ERROR", "first\nsecond")
        journal.stop()
        assert _kinds(path)[1] == ("ERROR", "first second")

    def test_inactive_is_noop(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        journal.log("COMMAND", "ignored")
        assert list(tmp_path.iterdir()) == []

    def test_after_stop_is_noop(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        path = journal.start()
        journal.stop()
        journal.log("COMMAND", "late")
        assert "late" not in Path(path).read_text(encoding="utf-8")

    def test_stop_twice(self, tmp_path: Path):
        journal = ExperimentJournal(tmp_path)
        journal.start()
        journal.stop()
        journal.stop()
        assert journal.active is False

    def test_write_failure_disables(self, tmp_path: Path, caplog):
        journal = ExperimentJournal(tmp_path)
        journal.start()
        with (
            patch.object(journal, "_append", side_effect=OSError("disk full")),
            caplog.at_level(logging.WARNING, logger="csbm_lab.journal"),
        ):
            journal.log("RESULT", "{}")
        assert journal.active is False
        assert "disabling journal" in caplog.text


class TestReadJournal:
    def test_skips_foreign_lines(self, tmp_path: Path):
        path = tmp_path / "journal.log"
        path.write_text(
            "garbage\n[2026-01-01T00:00:00.000] [RESULT] {}\n", encoding="utf-8"
        )
        assert read_journal(path) == [JournalEntry("2026-01-01T00:00:00.000", "RESULT", "{}")]
