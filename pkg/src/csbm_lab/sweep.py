"""Phase-transition sweeps over (n, alpha scale) cells."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from csbm_lab.constants import DEFAULT_EXACT_CAP, DEFAULT_MAX_ROUNDS, SWEEP_CSV_HEADER
from csbm_lab.decoder import (
    best_swap,
    local_refine,
    ml_decode_exact,
    partitions_equal_up_to_swap,
    score_partition,
    vertex_failure_events,
)
from csbm_lab.exceptions import ParamsError, SweepConfigError
from csbm_lab.model import ModelParams, divergence_sum, make_params
from csbm_lab.sampler import random_partition, sample_graph
from csbm_lab.worker_pool import WorkerPool

logger = logging.getLogger(__name__)

_SEED_LIMIT = 2**64


class DecoderMode(Enum):
    EXACT = "exact"
    LOCAL = "local"
    VERTEX_TEST = "vertex-test"


@dataclass(frozen=True)
class SweepConfig:
    base_alphas: tuple[float, ...]
    base_betas: tuple[float, ...]
    scale_grid: tuple[float, ...]
    n_list: tuple[int, ...]
    trials: int
    seed: int
    decoder: DecoderMode = DecoderMode.EXACT
    max_rounds: int = DEFAULT_MAX_ROUNDS
    exact_cap: int = DEFAULT_EXACT_CAP

    def cells(self) -> list[tuple[int, int, float]]:
        """(n, scale index, scale) in output order: n outer, scale inner."""
        return [(n, i, s) for n in self.n_list for i, s in enumerate(self.scale_grid)]

    def cell_params(self, n: int, scale: float) -> ModelParams:
        return make_params(n, [a * scale for a in self.base_alphas], self.base_betas)


def _positive_numbers(value: Any) -> bool:
    return (
        isinstance(value, list)
        and bool(value)
        and all(
            isinstance(v, int | float) and not isinstance(v, bool) and math.isfinite(v) and v > 0
            for v in value
        )
    )


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def sweep_config_from_dict(
    data: Any,
    *,
    seed: int | None = None,
    trials: int | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> SweepConfig:
    """Validate a JSON sweep description; every failing field is reported at once."""
    if not isinstance(data, dict):
        raise SweepConfigError(["config: must be a JSON object"])
    if seed is not None:
        data = {**data, "seed": seed}
    if trials is not None:
        data = {**data, "trials": trials}

    problems: list[str] = []
    for key in ("base_alphas", "base_betas", "scale_grid"):
        if not _positive_numbers(data.get(key)):
            problems.append(f"{key}: must be a non-empty list of positive numbers")
    n_list = data.get("n_list")
    if not (isinstance(n_list, list) and n_list and all(_is_int(n) for n in n_list)):
        problems.append("n_list: must be a non-empty list of integers")
        n_list = None
    if not (_is_int(data.get("trials")) and data["trials"] >= 1):
        problems.append("trials: must be an integer >= 1")
    if not (_is_int(data.get("seed")) and 0 <= data["seed"] < _SEED_LIMIT):
        problems.append("seed: must be an integer in 0..2^64-1")
    try:
        decoder = DecoderMode(data.get("decoder", DecoderMode.EXACT.value))
    except ValueError:
        choices = ", ".join(mode.value for mode in DecoderMode)
        problems.append(f"decoder: must be one of {choices}")
        decoder = DecoderMode.EXACT
    if decoder is DecoderMode.EXACT and n_list is not None:
        too_big = [n for n in n_list if n > exact_cap]
        if too_big:
            problems.append(f"n_list: exact decoder is capped at n={exact_cap}, got {too_big}")
    if problems:
        raise SweepConfigError(problems)

    config = SweepConfig(
        base_alphas=tuple(float(a) for a in data["base_alphas"]),
        base_betas=tuple(float(b) for b in data["base_betas"]),
        scale_grid=tuple(float(s) for s in data["scale_grid"]),
        n_list=tuple(n_list),
        trials=data["trials"],
        seed=data["seed"],
        decoder=decoder,
        max_rounds=max_rounds,
        exact_cap=exact_cap,
    )
    for n, _, scale in config.cells():
        try:
            config.cell_params(n, scale)
        except ParamsError as e:
            problems.append(f"cell n={n} scale={scale:g}: {e}")
    if problems:
        raise SweepConfigError(problems)
    return config


def load_sweep_config(path: str | Path, **overrides: Any) -> SweepConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SweepConfigError([f"config: not valid JSON ({e})"]) from e
    return sweep_config_from_dict(data, **overrides)


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    failure_event: bool
    score_gap: float


@dataclass(frozen=True)
class SweepRow:
    n: int
    scale: float
    divergence: float
    success_rate: float
    failure_event_rate: float
    mean_score_gap: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            [[getattr(row, column) for column in SWEEP_CSV_HEADER] for row in self.rows],
            columns=list(SWEEP_CSV_HEADER),
        )
        return frame.astype({"n": "int64", "trials": "int64", "seed": "uint64"})

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, lineterminator="\n")

    def to_records(self) -> list[dict[str, Any]]:
        return [{column: getattr(row, column) for column in SWEEP_CSV_HEADER} for row in self.rows]


def run_trial(config: SweepConfig, n: int, scale_index: int, trial: int) -> TrialOutcome:
    """One planted instance; seeds derive from (seed, n, scale index, trial) only."""
    params = config.cell_params(n, config.scale_grid[scale_index])
    weights = params.weights
    sequence = np.random.SeedSequence([config.seed, n, scale_index, trial])
    partition_seed, init_seed = sequence.spawn(2)
    graph_seed = int(sequence.generate_state(1, dtype=np.uint64)[0])

    planted = random_partition(n, partition_seed)
    graph = sample_graph(params, planted, graph_seed)
    report = vertex_failure_events(graph, weights, planted)
    failure_event = report.f_a and report.f_b

    if config.decoder is DecoderMode.EXACT:
        result = ml_decode_exact(graph, weights, cap=config.exact_cap)
        success = partitions_equal_up_to_swap(result.best, planted) and not result.tie
        gap = result.best_score - score_partition(graph, weights, planted)
    elif config.decoder is DecoderMode.LOCAL:
        init = random_partition(n, init_seed)
        refined = local_refine(graph, weights, init, config.max_rounds)
        success = partitions_equal_up_to_swap(refined, planted)
        gap = score_partition(graph, weights, refined) - score_partition(graph, weights, planted)
    else:
        success = not (report.f_a or report.f_b)
        gap = max(0.0, best_swap(graph, weights, planted)[0])
    return TrialOutcome(success=success, failure_event=failure_event, score_gap=gap)


def run_sweep(
    config: SweepConfig, pool: WorkerPool | None = None, journal: Any = None
) -> SweepResult:
    """Run every (n, scale) cell; rows come back in cell order regardless of threading."""
    pool = pool or WorkerPool()
    rows: list[SweepRow] = []
    for n, scale_index, scale in config.cells():
        outcomes = pool.map_ordered(
            partial(run_trial, config, n, scale_index), list(range(config.trials))
        )
        params = config.cell_params(n, scale)
        row = SweepRow(
            n=n,
            scale=scale,
            divergence=divergence_sum(params.alphas, params.betas),
            success_rate=sum(o.success for o in outcomes) / config.trials,
            failure_event_rate=sum(o.failure_event for o in outcomes) / config.trials,
            mean_score_gap=math.fsum(o.score_gap for o in outcomes) / config.trials,
            trials=config.trials,
            seed=config.seed,
        )
        logger.info(
            "Cell n=%d scale=%g divergence=%.4g success=%.3f", n, scale, row.divergence,
            row.success_rate,
        )
        if journal is not None:
            journal.log("CELL", json.dumps(row.__dict__))
        rows.append(row)
    return SweepResult(rows=tuple(rows))
