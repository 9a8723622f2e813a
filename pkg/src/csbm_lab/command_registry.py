from __future__ import annotations

import argparse
from collections.abc import Sequence

from csbm_lab.types import Subcommand


class CommandRegistry:
    """Subcommands by name; mounts them on an argparse parser with their handlers bound."""

    def __init__(self) -> None:
        self._commands: dict[str, Subcommand] = {}

    def register(self, command: Subcommand) -> None:
        if command.name in self._commands:
            raise ValueError(f"Subcommand {command.name!r} is already registered")
        self._commands[command.name] = command

    def list_all(self) -> list[Subcommand]:
        return sorted(self._commands.values(), key=lambda c: c.name)

    def mount(
        self,
        subparsers: argparse._SubParsersAction,
        parents: Sequence[argparse.ArgumentParser] = (),
    ) -> None:
        """Add one sub-parser per command; parsed args carry `handler`."""
        for command in self.list_all():
            sub = subparsers.add_parser(
                command.name,
                help=command.description,
                description=command.description,
                parents=list(parents),
            )
            if command.configure is not None:
                command.configure(sub)
            sub.set_defaults(handler=command.handler)
