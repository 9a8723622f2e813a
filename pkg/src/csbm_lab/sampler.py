"""Seeded colored-SBM sampling and edge-count statistics."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import numpy as np

from csbm_lab.constants import SAMPLER_BLOCK_PAIRS
from csbm_lab.exceptions import PartitionError
from csbm_lab.model import ModelParams
from csbm_lab.types import ColoredGraph, Partition

logger = logging.getLogger(__name__)

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX_1 = _U64(0xBF58476D1CE4E5B9)
_MIX_2 = _U64(0x94D049BB133111EB)
_UNIT = 2.0**-53


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> _U64(30))) * _MIX_1
        z = (z ^ (z >> _U64(27))) * _MIX_2
        return z ^ (z >> _U64(31))


def pair_uniforms(seed: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) draws keyed on (seed, u, v); independent of evaluation order."""
    base = _splitmix64(np.array([seed % 2**64], dtype=np.uint64))[0]
    key = (u.astype(np.uint64) << _U64(32)) | v.astype(np.uint64)
    z = _splitmix64(key ^ base)
    return (z >> _U64(11)).astype(np.float64) * _UNIT


def _row_blocks(n: int) -> Iterable[tuple[int, int]]:
    start = 0
    while start < n - 1:
        pairs = 0
        stop = start
        while stop < n - 1 and (pairs == 0 or pairs + (n - 1 - stop) <= SAMPLER_BLOCK_PAIRS):
            pairs += n - 1 - stop
            stop += 1
        yield start, stop
        start = stop


def _block_pairs(n: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.arange(start, stop, dtype=np.int64)
    lengths = n - 1 - rows
    u = np.repeat(rows, lengths)
    offsets = np.arange(u.size, dtype=np.int64) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    v = u + 1 + offsets
    return u, v


def sample_graph(params: ModelParams, partition: Partition, seed: int) -> ColoredGraph:
    """Draw one categorical outcome per vertex pair under the planted partition."""
    if partition.n != params.n:
        raise PartitionError(
            f"Partition has {partition.n} vertices but params expect {params.n}"
        )
    side = partition.side_mask
    cum_within = np.cumsum(params.p)
    cum_cross = np.cumsum(params.q)
    sources: list[np.ndarray] = []
    targets: list[np.ndarray] = []
    colors: list[np.ndarray] = []
    for start, stop in _row_blocks(params.n):
        u, v = _block_pairs(params.n, start, stop)
        draws = pair_uniforms(seed, u, v)
        same = side[u] == side[v]
        outcome = np.where(
            same,
            np.searchsorted(cum_within, draws, side="right"),
            np.searchsorted(cum_cross, draws, side="right"),
        )
        hit = outcome < params.m
        sources.append(u[hit])
        targets.append(v[hit])
        colors.append(outcome[hit] + 1)
    if sources:
        table = np.column_stack(
            [np.concatenate(sources), np.concatenate(targets), np.concatenate(colors)]
        )
        edges = tuple((int(a), int(b), int(c)) for a, b, c in table)
    else:
        edges = ()
    logger.debug("Sampled n=%d seed=%d edges=%d", params.n, seed, len(edges))
    return ColoredGraph(n=params.n, m=params.m, edges=edges)


def _check_sizes(graph: ColoredGraph, partition: Partition) -> None:
    if graph.n != partition.n:
        raise PartitionError(
            f"Partition has {partition.n} vertices but graph has {graph.n}"
        )


def count_colored_edges(graph: ColoredGraph, v: int, members: Iterable[int]) -> np.ndarray:
    """Per-color counts of edges between v and members minus {v}."""
    if not 0 <= v < graph.n:
        raise PartitionError(f"Vertex {v} out of range for n={graph.n}")
    in_set = np.zeros(graph.n, dtype=bool)
    for s in members:
        if not 0 <= s < graph.n:
            raise PartitionError(f"Vertex {s} out of range for n={graph.n}")
        in_set[s] = True
    in_set[v] = False
    src, dst = graph.sources, graph.targets
    hit = ((src == v) & in_set[dst]) | ((dst == v) & in_set[src])
    return np.bincount(graph.colors[hit] - 1, minlength=graph.m).astype(np.int64)


def inner_and_cross_counts(
    graph: ColoredGraph, partition: Partition
) -> tuple[np.ndarray, np.ndarray]:
    """Return (l, x): per-color within-community and cross-community edge counts."""
    _check_sizes(graph, partition)
    side = partition.side_mask
    same = side[graph.sources] == side[graph.targets]
    colors = graph.colors - 1
    inner = np.bincount(colors[same], minlength=graph.m).astype(np.int64)
    cross = np.bincount(colors[~same], minlength=graph.m).astype(np.int64)
    return inner, cross


def color_totals(graph: ColoredGraph) -> np.ndarray:
    return np.bincount(graph.colors - 1, minlength=graph.m).astype(np.int64)


def vertex_edge_profile(
    graph: ColoredGraph, partition: Partition
) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex per-color counts (n, m) toward the own community and the other one."""
    _check_sizes(graph, partition)
    side = partition.side_mask
    src, dst, colors = graph.sources, graph.targets, graph.colors - 1
    same = side[src] == side[dst]
    inside = np.zeros((graph.n, graph.m), dtype=np.int64)
    cross = np.zeros((graph.n, graph.m), dtype=np.int64)
    np.add.at(inside, (src[same], colors[same]), 1)
    np.add.at(inside, (dst[same], colors[same]), 1)
    np.add.at(cross, (src[~same], colors[~same]), 1)
    np.add.at(cross, (dst[~same], colors[~same]), 1)
    return inside, cross


def planted_partition(n: int) -> Partition:
    """Vertices 0..n/2-1 in A, the rest in B."""
    return Partition.from_community(n, range(n // 2))


def random_partition(n: int, seed: int | np.random.SeedSequence) -> Partition:
    """Seeded uniformly random balanced partition in canonical form."""
    rng = np.random.default_rng(seed)
    members = rng.permutation(n)[: n // 2]
    return Partition.from_community(n, (int(v) for v in members)).canonical()
