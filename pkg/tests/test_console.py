"""Tests for console output: data, JSON errors, tables and logging."""

from __future__ import annotations

import io
import json
import logging
import math
from unittest.mock import MagicMock

from csbm_lab.console import LabConsole
from csbm_lab.exceptions import ParamsError, ParamsFault, PartitionError


def _console() -> tuple[LabConsole, io.StringIO, io.StringIO]:
    stdout, stderr = io.StringIO(), io.StringIO()
    return LabConsole(stdout, stderr), stdout, stderr


class TestWriteData:
    def test_verbatim(self):
        console, stdout, stderr = _console()
        console.write_data("4 1\n0 1 1\n")
        assert stdout.getvalue() == "4 1\n0 1 1\n"
        assert stderr.getvalue() == ""


class TestWriteErrorJson:
    def test_params_error_carries_tag(self):
        console, stdout, stderr = _console()
        console.write_error_json(ParamsError(ParamsFault.ODD_N, "n must be even, got 7"))
        record = json.loads(stderr.getvalue())
        assert record == {"error": "ParamsError", "tag": "odd_n", "message": "n must be even, got 7"}
        assert stdout.getvalue() == ""

    def test_other_lab_error_has_no_tag(self):
        console, _, stderr = _console()
        console.write_error_json(PartitionError("unbalanced"))
        record = json.loads(stderr.getvalue())
        assert record["error"] == "PartitionError"
        assert record["tag"] is None

    def test_os_error_keeps_its_name(self):
        console, _, stderr = _console()
        console.write_error_json(FileNotFoundError("g.txt"))
        assert json.loads(stderr.getvalue())["error"] == "FileNotFoundError"

    def test_unexpected_error_is_runtime(self):
        console, _, stderr = _console()
        console.write_error_json(ValueError("surprise"))
        record = json.loads(stderr.getvalue())
        assert record["error"] == "RuntimeError"
        assert record["message"] == "surprise"

    def test_single_line(self):
        console, _, stderr = _console()
        console.write_error_json(PartitionError("a\nb"))
        assert stderr.getvalue().count("\n") == 1

    def test_recorded_in_active_journal(self):
        console, _, _ = _console()
        journal = MagicMock(active=True)
        console.set_journal(journal)
        console.write_error_json(PartitionError("unbalanced"))
        journal.log.assert_called_once_with("ERROR", "unbalanced")

    def test_inactive_journal_untouched(self):
        console, _, _ = _console()
        journal = MagicMock(active=False)
        console.set_journal(journal)
        console.write_error_json(PartitionError("unbalanced"))
        journal.log.assert_not_called()


class TestShowTable:
    def test_union_of_columns(self):
        console, stdout, _ = _console()
        console.show_table([{"formula_id": "pnk", "value": 0.5}, {"formula_id": "x", "flag": "f"}])
        text = stdout.getvalue()
        for column in ("formula_id", "value", "flag"):
            assert column in text

    def test_cell_formatting(self):
        console, stdout, _ = _console()
        console.show_table([{"a": math.inf, "b": None, "c": 1 / 3}])
        text = stdout.getvalue()
        assert "inf" in text
        assert "0.333333" in text


class TestLogging:
    def test_install_logging(self):
        console, stdout, stderr = _console()
        console.install_logging(logging.INFO)
        logging.getLogger("csbm_lab.sweep").info("cell done")
        logging.getLogger("csbm_lab.sweep").debug("hidden detail")
        assert "cell done" in stderr.getvalue()
        assert "hidden detail" not in stderr.getvalue()
        assert stdout.getvalue() == ""
        assert logging.getLogger("csbm_lab").propagate is False
