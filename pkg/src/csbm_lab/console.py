from __future__ import annotations

import json
import logging
import math
import sys
from collections.abc import Sequence
from typing import Any, TextIO

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from csbm_lab.constants import APP_NAME
from csbm_lab.exceptions import CsbmError, ParamsError

def _cell(value: Any) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6g}"
    if value is None:
        return ""
    return str(value)


class LabConsole:
    """Rich rendering for humans on stderr, raw bytes for data on stdout."""

    def __init__(self, stdout: TextIO | None = None, stderr: TextIO | None = None) -> None:
        self._stdout = stdout if stdout is not None else sys.stdout
        self._stderr = stderr if stderr is not None else sys.stderr
        self._err = Console(file=self._stderr, highlight=False)
        self._out = Console(file=self._stdout, highlight=False)
        self._journal: Any = None

    def set_journal(self, journal: Any) -> None:
        self._journal = journal

    def _record(self, entry_type: str, content: str) -> None:
        if self._journal is not None and self._journal.active:
            self._journal.log(entry_type, content)

    def install_logging(self, level: int) -> None:
        """Route the csbm_lab loggers through a RichHandler on stderr."""
        handler = RichHandler(console=self._err, show_path=False, show_time=False)
        root = logging.getLogger(APP_NAME)
        root.handlers[:] = [handler]
        root.setLevel(level)
        root.propagate = False

    def write_data(self, text: str) -> None:
        """Write machine-readable output verbatim to stdout."""
        self._stdout.write(text)
        self._stdout.flush()

    def write_error_json(self, error: BaseException) -> None:
        """One-line JSON error record on stderr."""
        tag = error.fault.value if isinstance(error, ParamsError) else None
        name = type(error).__name__ if isinstance(error, CsbmError | OSError) else "RuntimeError"
        record = {"error": name, "tag": tag, "message": str(error)}
        self._stderr.write(json.dumps(record) + "\n")
        self._stderr.flush()
        self._record("ERROR", record["message"])

    def show_table(self, rows: Sequence[dict[str, Any]], title: str | None = None) -> None:
        """Render rows (one dict each) as a rich table on stdout."""
        columns: list[str] = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_cell(row.get(column)) for column in columns))
        self._out.print(table)
