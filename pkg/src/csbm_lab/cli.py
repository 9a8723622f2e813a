"""Command-line entry point: `csbm <subcommand> [options]`."""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from collections.abc import Sequence
from typing import NoReturn, TextIO

from csbm_lab import __version__
from csbm_lab.command_registry import CommandRegistry
from csbm_lab.commands import builtin_subcommands
from csbm_lab.console import LabConsole
from csbm_lab.constants import CLI_NAME, DEFAULT_JOURNAL_DIR, DEFAULT_SETTINGS_PATH
from csbm_lab.exceptions import CsbmError, UsageError, ValidationError
from csbm_lab.journal import ExperimentJournal
from csbm_lab.settings import LabSettings, load_settings
from csbm_lab.types import CommandContext

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class _LabArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _log_level(verbosity: int, settings: LabSettings) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    if settings.log_level:
        level = logging.getLevelName(settings.log_level.upper())
        if isinstance(level, int):
            return level
        logger.warning("Ignoring unknown log_level %r", settings.log_level)
    return logging.WARNING


def builtin_registry() -> CommandRegistry:
    registry = CommandRegistry()
    for command in builtin_subcommands():
        registry.register(command)
    return registry


def build_parser(registry: CommandRegistry) -> argparse.ArgumentParser:
    parser = _LabArgumentParser(
        prog=CLI_NAME, description="Exact-recovery laboratory for the colored two-community SBM"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--journal", action="store_true", help="record an experiment journal")
    parser.add_argument("--settings", default=DEFAULT_SETTINGS_PATH, help="lab settings TOML")

    output = _LabArgumentParser(add_help=False)
    output.add_argument("--format", choices=("json", "csv", "table"))
    output.add_argument("--output", help="write data to this file instead of stdout")

    subparsers = parser.add_subparsers(
        dest="command", required=True, parser_class=_LabArgumentParser
    )
    registry.mount(subparsers, parents=[output])
    return parser


class LabApp:
    """Wires settings, console and journal around one parsed invocation."""

    def __init__(self, stdout: TextIO | None = None, stderr: TextIO | None = None) -> None:
        self._console = LabConsole(stdout, stderr)
        self._parser = build_parser(builtin_registry())
        self._journal = ExperimentJournal(DEFAULT_JOURNAL_DIR)

    def run(self, argv: Sequence[str]) -> int:
        """Parse argv and dispatch. Returns 0 on success, 1 on bad input, 2 on runtime failure."""
        try:
            args = self._parser.parse_args(list(argv))
        except UsageError as e:
            self._console.write_error_json(e)
            return EXIT_VALIDATION
        except SystemExit as e:
            # --help and --version
            return EXIT_OK if not e.code else EXIT_VALIDATION

        settings = load_settings(args.settings)
        self._console.install_logging(_log_level(args.verbose, settings))

        if args.journal or settings.journal:
            try:
                path = self._journal.start()
                self._console.set_journal(self._journal)
                logger.info("Journal started: %s", path)
            except OSError as e:
                logger.warning("Failed to start journal: %s", e)

        ctx = CommandContext(
            args=args,
            console=self._console,
            settings=settings,
            journal=self._journal if self._journal.active else None,
        )
        self._journal.log("COMMAND", shlex.join(argv))
        try:
            return args.handler(ctx)
        except ValidationError as e:
            self._console.write_error_json(e)
            return EXIT_VALIDATION
        except (CsbmError, OSError) as e:
            self._console.write_error_json(e)
            return EXIT_RUNTIME
        except Exception as e:
            logger.debug("Unexpected failure in %s", args.command, exc_info=True)
            self._console.write_error_json(e)
            return EXIT_RUNTIME
        finally:
            self._journal.stop()


def main(
    argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None
) -> int:
    return LabApp(stdout, stderr).run(sys.argv[1:] if argv is None else argv)
