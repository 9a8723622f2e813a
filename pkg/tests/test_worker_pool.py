"""Tests for the ordered worker pool."""

from __future__ import annotations

import logging
import threading
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csbm_lab.worker_pool import WorkerPool


def _slow_square(x: int) -> int:
    # later items finish first
    time.sleep(0.001 * (5 - x % 5))
    return x * x


class TestWorkerPool:
    def test_rejects_zero_threads(self):
        with pytest.raises(ValueError):
            WorkerPool(0)

    def test_default_is_single_thread(self):
        assert WorkerPool().threads == 1

    @pytest.mark.parametrize("threads", [1, 4])
    def test_results_in_submission_order(self, threads):
        assert WorkerPool(threads).map_ordered(_slow_square, list(range(20))) == [
            x * x for x in range(20)
        ]

    def test_uses_several_threads(self):
        seen: set[int] = set()
        barrier = threading.Barrier(2, timeout=5)

        def task(_: int) -> None:
            seen.add(threading.get_ident())
            barrier.wait()

        WorkerPool(2).map_ordered(task, [0, 1])
        assert len(seen) == 2

    def test_empty_input(self):
        assert WorkerPool(4).map_ordered(_slow_square, []) == []

    @pytest.mark.parametrize("threads", [1, 3])
    def test_failure_is_logged_and_raised(self, threads, caplog):
        def task(x: int) -> int:
            if x == 2:
                raise RuntimeError("boom")
            return x

        with caplog.at_level(logging.ERROR, logger="csbm_lab.worker_pool"):
            with pytest.raises(RuntimeError, match="boom"):
                WorkerPool(threads).map_ordered(task, [0, 1, 2, 3])
        assert "Worker task failed for 2" in caplog.text


@pytest.mark.property
class TestOrderProperty:
    @given(items=st.lists(st.integers(-100, 100), max_size=30), threads=st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_matches_sequential_map(self, items, threads):
        assert WorkerPool(threads).map_ordered(lambda x: x - 1, items) == [x - 1 for x in items]
