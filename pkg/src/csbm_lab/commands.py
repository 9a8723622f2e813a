"""Built-in lab subcommands."""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
from pathlib import Path
from typing import Any

import pandas as pd

from csbm_lab.constants import DEFAULT_BOUNDS_MAX_K
from csbm_lab.decoder import local_refine, ml_decode_exact, score_partition
from csbm_lab.exceptions import OracleCapacityError, ParamsError, ParamsFault, PartitionError
from csbm_lab.graph_io import read_graph, read_params, read_partition, serialize_graph
from csbm_lab.ldp import bounds_table, pair_diff_distribution, pnk_theoretical_bound, rate_function
from csbm_lab.model import ModelParams, divergence_report, make_params
from csbm_lab.oracle import exact_sum_distribution, monte_carlo_pnk
from csbm_lab.sampler import planted_partition, random_partition, sample_graph
from csbm_lab.settings import resolve_threads
from csbm_lab.sweep import load_sweep_config, run_sweep
from csbm_lab.types import CommandContext, Subcommand
from csbm_lab.worker_pool import WorkerPool

logger = logging.getLogger(__name__)

_DEFAULT_PNK_TRIALS = 100_000


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParamsError(ParamsFault.MALFORMED, f"--{name} must be comma-separated numbers") from None


def _add_params_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters")
    group.add_argument("--params", help="JSON file {n, alphas, betas}")
    group.add_argument("--n", type=int, help="vertex count")
    group.add_argument("--alphas", help="comma-separated alpha values, e.g. 9,1")
    group.add_argument("--betas", help="comma-separated beta values, e.g. 1,3")


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    if args.params:
        return read_params(args.params)
    if args.n is None or args.alphas is None or args.betas is None:
        raise ParamsError(
            ParamsFault.MALFORMED, "Give --params FILE or all of --n, --alphas and --betas"
        )
    return make_params(args.n, _float_list(args.alphas, "alphas"), _float_list(args.betas, "betas"))


def _emit_text(ctx: CommandContext, text: str) -> None:
    if ctx.args.output:
        Path(ctx.args.output).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", ctx.args.output)
    else:
        ctx.console.write_data(text)


def _json_ready(value: Any) -> Any:
    """Non-finite floats become null; log_value and vacuous carry overflowed bounds."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _json_ready(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_json_ready(item) for item in value]
    return value


def _emit(ctx: CommandContext, payload: Any, default_format: str = "json") -> None:
    """Write a dict or a list of row dicts as json, csv or a rich table."""
    fmt = ctx.args.format or default_format
    rows = payload if isinstance(payload, list) else [payload]
    if fmt == "table" and not ctx.args.output:
        ctx.console.show_table(rows, title=ctx.args.command)
    elif fmt == "csv":
        buffer = io.StringIO()
        pd.DataFrame(rows).to_csv(buffer, index=False, lineterminator="\n")
        _emit_text(ctx, buffer.getvalue())
    else:
        _emit_text(ctx, json.dumps(_json_ready(payload), indent=2, allow_nan=False) + "\n")
    if ctx.journal is not None:
        ctx.journal.log("RESULT", json.dumps(_json_ready(payload), allow_nan=False))


def _configure_sample(parser: argparse.ArgumentParser) -> None:
    _add_params_args(parser)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--partition", help="planted partition file (default: first half A)")


def _handle_sample(ctx: CommandContext) -> int:
    params = _params_from_args(ctx.args)
    if ctx.args.partition:
        planted = read_partition(ctx.args.partition)
    else:
        planted = planted_partition(params.n)
    graph = sample_graph(params, planted, ctx.args.seed)
    _emit_text(ctx, serialize_graph(graph))
    return 0


def _configure_decode(parser: argparse.ArgumentParser) -> None:
    _add_params_args(parser)
    parser.add_argument("--graph", required=True, help="graph file")
    parser.add_argument("--decoder", choices=("exact", "local"), default="exact")
    parser.add_argument("--init", help="initial partition file for the local decoder")
    parser.add_argument("--max-rounds", type=int, dest="max_rounds")
    parser.add_argument("--seed", type=int, default=0, help="seed for a random local start")


def _handle_decode(ctx: CommandContext) -> int:
    args = ctx.args
    params = _params_from_args(args)
    graph = read_graph(args.graph)
    if graph.n != params.n:
        raise PartitionError(f"Graph has {graph.n} vertices but params expect {params.n}")
    if args.decoder == "exact":
        result = ml_decode_exact(graph, params.weights, cap=ctx.settings.exact_cap)
        _emit(ctx, result.to_dict())
        return 0
    init = read_partition(args.init) if args.init else random_partition(graph.n, args.seed)
    rounds = args.max_rounds if args.max_rounds is not None else ctx.settings.max_rounds
    refined = local_refine(graph, params.weights, init, rounds)
    _emit(
        ctx,
        {
            "labels": refined.labels,
            "score": score_partition(graph, params.weights, refined),
            "tie": None,
            "explored": None,
        },
    )
    return 0


def _handle_divergence(ctx: CommandContext) -> int:
    _emit(ctx, divergence_report(_params_from_args(ctx.args)).to_dict())
    return 0


def _configure_rate(parser: argparse.ArgumentParser) -> None:
    _add_params_args(parser)
    parser.add_argument("--a", type=float, default=0.0, help="evaluation point")


def _handle_rate(ctx: CommandContext) -> int:
    params = _params_from_args(ctx.args)
    _emit(ctx, rate_function(pair_diff_distribution(params), ctx.args.a).to_dict())
    return 0


def _configure_bounds(parser: argparse.ArgumentParser) -> None:
    _add_params_args(parser)
    parser.add_argument("--max-k", type=int, default=DEFAULT_BOUNDS_MAX_K, dest="max_k")
    parser.add_argument(
        "--k-margin", type=float, default=1.0, dest="k_margin",
        help="margin K of the converse Chebyshev row",
    )


def _handle_bounds(ctx: CommandContext) -> int:
    params = _params_from_args(ctx.args)
    reports = bounds_table(params, ctx.args.max_k, ctx.args.k_margin)
    _emit(ctx, [report.to_row() for report in reports])
    return 0


def _configure_pnk(parser: argparse.ArgumentParser) -> None:
    _add_params_args(parser)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--trials", type=int, default=_DEFAULT_PNK_TRIALS)
    parser.add_argument("--seed", type=int, default=0)


def _handle_pnk(ctx: CommandContext) -> int:
    args = ctx.args
    params = _params_from_args(args)
    theoretical = pnk_theoretical_bound(params, args.k)
    estimate, std_error = monte_carlo_pnk(params, args.k, args.trials, args.seed)
    try:
        exact = exact_sum_distribution(pair_diff_distribution(params), theoretical.inputs["N"])
        exact_tail: float | None = exact.tail(0.0)
    except OracleCapacityError as e:
        logger.warning("Exact tail unavailable: %s", e)
        exact_tail = None
    _emit(
        ctx,
        {
            "k": args.k,
            "N": theoretical.inputs["N"],
            "theoretical": theoretical.value,
            "vacuous": theoretical.vacuous,
            "estimate": estimate,
            "std_error": std_error,
            "exact_tail": exact_tail,
        },
    )
    return 0


def _configure_sweep(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="sweep configuration JSON")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--trials", type=int, help="override the per-cell trial count")


def _handle_sweep(ctx: CommandContext) -> int:
    args = ctx.args
    config = load_sweep_config(
        args.config,
        seed=args.seed,
        trials=args.trials,
        exact_cap=ctx.settings.exact_cap,
        max_rounds=ctx.settings.max_rounds,
    )
    pool = WorkerPool(resolve_threads(ctx.settings))
    logger.info("Sweeping %d cells on %d threads", len(config.cells()), pool.threads)
    result = run_sweep(config, pool=pool, journal=ctx.journal)
    if (args.format or "csv") == "csv":
        _emit_text(ctx, result.to_csv())
    else:
        _emit(ctx, result.to_records())
    return 0


def builtin_subcommands() -> list[Subcommand]:
    return [
        Subcommand("sample", "Sample a colored SBM graph", _handle_sample, _configure_sample),
        Subcommand("decode", "Decode a graph file", _handle_decode, _configure_decode),
        Subcommand(
            "divergence", "Divergence and Hellinger report", _handle_divergence, _add_params_args
        ),
        Subcommand("rate", "Rate function of the pair-difference law", _handle_rate,
                   _configure_rate),
        Subcommand("bounds", "Tabulate the failure bounds", _handle_bounds, _configure_bounds),
        Subcommand("pnk", "Monte Carlo P_n^(k) next to its bound", _handle_pnk, _configure_pnk),
        Subcommand("sweep", "Run a phase-transition sweep", _handle_sweep, _configure_sweep),
    ]
