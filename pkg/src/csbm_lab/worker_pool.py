from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Runs independent tasks on a thread pool and returns results in submission order."""

    def __init__(self, threads: int = 1) -> None:
        if threads < 1:
            raise ValueError(f"threads must be at least 1, got {threads}")
        self._threads = threads

    @property
    def threads(self) -> int:
        return self._threads

    def map_ordered(self, task: Callable[[T], R], items: Sequence[T]) -> list[R]:
        """Apply task to every item.

        The first failure is logged and re-raised after the remaining tasks settle.
        """
        if self._threads == 1 or len(items) <= 1:
            return [self._run(task, item) for item in items]
        with ThreadPoolExecutor(max_workers=self._threads) as executor:
            futures = [executor.submit(self._run, task, item) for item in items]
            return [future.result() for future in futures]

    @staticmethod
    def _run(task: Callable[[T], R], item: T) -> R:
        try:
            return task(item)
        except Exception as e:
            logger.error("Worker task failed for %r: %s", item, e)
            raise
