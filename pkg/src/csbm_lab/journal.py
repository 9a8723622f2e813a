"""Experiment journal: a timestamped record of commands, sweep cells and results."""

from __future__ import annotations

import contextlib
import logging
import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import TextIO

from csbm_lab.constants import DEFAULT_JOURNAL_DIR

logger = logging.getLogger(__name__)

# SYSTEM, COMMAND, CELL, RESULT, ERROR
_ENTRY_LINE = re.compile(r"^\[(?P<timestamp>[^\]]+)\] \[(?P<entry_type>[A-Z]+)\] (?P<content>.*)$")


@dataclass(frozen=True)
class JournalEntry:
    timestamp: str
    entry_type: str
    content: str

    def render(self) -> str:
        flat = " ".join(self.content.splitlines())
        return f"[{self.timestamp}] [{self.entry_type}] {flat}\n"


def read_journal(path: str | Path) -> list[JournalEntry]:
    """Parse a journal file; lines that are not entries are skipped."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        match = _ENTRY_LINE.match(line)
        if match:
            entries.append(JournalEntry(**match.groupdict()))
    return entries


def _now() -> str:
    return datetime.now().isoformat(timespec="milliseconds")


class ExperimentJournal:
    """One journal_YYYYMMDD_HHMMSS.log per run, flushed after every entry."""

    def __init__(self, directory: str | Path = DEFAULT_JOURNAL_DIR) -> None:
        self._directory = Path(directory)
        self._handle: TextIO | None = None
        self._path: Path | None = None
        self._entries = 0

    @property
    def active(self) -> bool:
        return self._handle is not None

    @property
    def file_path(self) -> str | None:
        return None if self._path is None else str(self._path)

    @property
    def entry_count(self) -> int:
        return self._entries

    def start(self) -> str:
        """Open a fresh journal file and return its path. Raises OSError on failure."""
        self._directory.mkdir(parents=True, exist_ok=True)
        self._path = self._directory / f"journal_{datetime.now():%Y%m%d_%H%M%S}.log"
        self._handle = self._path.open("a", encoding="utf-8")
        self._entries = 0
        self._append(JournalEntry(_now(), "SYSTEM", "Journal started"))
        return str(self._path)

    def stop(self) -> None:
        if self._handle is None:
            return
        self._append(JournalEntry(_now(), "SYSTEM", "Journal stopped"))
        self._close()

    def log(self, entry_type: str, content: str) -> None:
        """Append one entry. No-op when inactive; a failed write closes the journal."""
        if self._handle is None:
            return
        try:
            self._append(JournalEntry(_now(), entry_type, content))
        except (OSError, ValueError) as e:
            logger.warning("Journal write failed, disabling journal: %s", e)
            self._close()

    def _append(self, entry: JournalEntry) -> None:
        assert self._handle is not None
        self._handle.write(entry.render())
        self._handle.flush()
        self._entries += 1

    def _close(self) -> None:
        handle, self._handle = self._handle, None
        if handle is not None:
            with contextlib.suppress(OSError):
                handle.close()
