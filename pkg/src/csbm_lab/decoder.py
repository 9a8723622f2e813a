"""Maximum-likelihood decoding, swap refinement and per-vertex failure tests."""

from __future__ import annotations

import logging
import math
from itertools import combinations, islice

import numpy as np

from csbm_lab.constants import DEFAULT_EXACT_CAP, DEFAULT_MAX_ROUNDS, SCORE_TOLERANCE
from csbm_lab.exceptions import DecoderCapError, PartitionError
from csbm_lab.model import ModelParams
from csbm_lab.sampler import inner_and_cross_counts, vertex_edge_profile
from csbm_lab.types import (
    COMMUNITY_A,
    COMMUNITY_B,
    ColoredGraph,
    DecodeResult,
    FailureReport,
    Partition,
    SplitWitness,
    Weights,
)

logger = logging.getLogger(__name__)

_EXACT_CHUNK = 1 << 16


def _check_weights(graph: ColoredGraph, weights: Weights) -> None:
    if len(weights) != graph.m:
        raise PartitionError(f"Graph has {graph.m} colors but {len(weights)} weights given")


def score_partition(graph: ColoredGraph, weights: Weights, partition: Partition) -> float:
    """Weighted count of within-community edges: sum_i l_i w_i."""
    _check_weights(graph, weights)
    inner, _ = inner_and_cross_counts(graph, partition)
    return float(np.dot(inner, weights.array))


def _candidate_count(n: int) -> int:
    return math.comb(n, n // 2) // 2


def _canonical_candidates(n: int):
    """A-communities (minus vertex 0) in lexicographic order of their label strings."""
    return combinations(range(1, n), n // 2 - 1)


def _chunk_inner_counts(members: np.ndarray, n: int, adjacency: np.ndarray) -> np.ndarray:
    """Per-color within-community counts for a chunk of candidate A-sets, shape (rows, m)."""
    rows = members.shape[0]
    side = np.zeros((rows, n), dtype=np.float64)
    side[:, 0] = 1.0
    side[np.arange(rows)[:, None], members] = 1.0
    other = 1.0 - side
    counts = np.empty((rows, adjacency.shape[0]), dtype=np.float64)
    for c, adj in enumerate(adjacency):
        counts[:, c] = (
            np.einsum("ij,ij->i", side @ adj, side) + np.einsum("ij,ij->i", other @ adj, other)
        ) / 2.0
    return np.rint(counts)


def ml_decode_exact(
    graph: ColoredGraph, weights: Weights, cap: int = DEFAULT_EXACT_CAP
) -> DecodeResult:
    """Exhaustive ML over all canonical balanced bipartitions.

    Ties (another partition within SCORE_TOLERANCE of the maximum) are flagged;
    the reported best is the smallest label string among the tied maximizers.
    """
    n = graph.n
    if n > cap:
        raise DecoderCapError(
            f"Exhaustive decoding is capped at n={cap}, got n={n}; use local refinement"
        )
    if n % 2 or n < 2:
        raise PartitionError(f"Balanced partitions need an even vertex count, got n={n}")
    _check_weights(graph, weights)

    adjacency = graph.color_adjacency()
    w = weights.array
    candidates = _canonical_candidates(n)
    scores: list[np.ndarray] = []
    while True:
        chunk = list(islice(candidates, _EXACT_CHUNK))
        if not chunk:
            break
        members = np.asarray(chunk, dtype=np.int64).reshape(len(chunk), n // 2 - 1)
        scores.append(_chunk_inner_counts(members, n, adjacency) @ w)
    all_scores = np.concatenate(scores)

    top = all_scores.max()
    near = all_scores >= top - SCORE_TOLERANCE
    first = int(np.argmax(near))
    members = next(islice(_canonical_candidates(n), first, None))
    best = Partition.from_community(n, (0, *members))
    tie = int(near.sum()) > 1
    logger.debug("Exact decode n=%d explored=%d tie=%s", n, all_scores.size, tie)
    return DecodeResult(
        best=best,
        best_score=score_partition(graph, weights, best),
        tie=tie,
        explored=_candidate_count(n),
    )


def _side_gains(graph: ColoredGraph, weights: Weights, partition: Partition):
    adjacency = graph.weighted_adjacency(weights)
    side = partition.side_mask.astype(np.float64)
    toward_a = adjacency @ side
    toward_b = adjacency @ (1.0 - side)
    # g = cross weight minus in weight for every vertex
    gain = np.where(partition.side_mask, toward_b - toward_a, toward_a - toward_b)
    return adjacency, gain


def best_swap(
    graph: ColoredGraph, weights: Weights, partition: Partition
) -> tuple[float, int, int]:
    """Best single exchange (v_a in A, v_b in B) and the score change it causes.

    Ties go to the first pair in row-major order over sorted A and sorted B.
    """
    _check_weights(graph, weights)
    if graph.n != partition.n:
        raise PartitionError(f"Partition has {partition.n} vertices but graph has {graph.n}")
    adjacency, gain = _side_gains(graph, weights, partition)
    members_a = np.flatnonzero(partition.side_mask)
    members_b = np.flatnonzero(~partition.side_mask)
    between = adjacency[members_a][:, members_b].toarray()
    table = gain[members_a][:, None] + gain[members_b][None, :] - 2.0 * between
    flat = int(np.argmax(table))
    i, j = divmod(flat, members_b.size)
    return float(table[i, j]), int(members_a[i]), int(members_b[j])


def _swap(partition: Partition, v_a: int, v_b: int) -> Partition:
    chars = list(partition.labels)
    chars[v_a], chars[v_b] = COMMUNITY_B, COMMUNITY_A
    return Partition("".join(chars))


def local_refine(
    graph: ColoredGraph,
    weights: Weights,
    init: Partition,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> Partition:
    """Apply best-improving swaps until none improves the score or max_rounds is hit.

    The orientation of `init` is preserved.
    """
    current = init
    for round_no in range(max_rounds):
        gain, v_a, v_b = best_swap(graph, weights, current)
        if gain <= SCORE_TOLERANCE:
            logger.debug("Local refinement converged after %d swaps", round_no)
            return current
        current = _swap(current, v_a, v_b)
    logger.info("Local refinement stopped at max_rounds=%d", max_rounds)
    return current


def vertex_failure_events(
    graph: ColoredGraph, weights: Weights, planted: Partition
) -> FailureReport:
    """Vertices whose cross-community weight strictly beats their in-community weight."""
    _check_weights(graph, weights)
    inside, cross = vertex_edge_profile(graph, planted)
    excess = (cross - inside) @ weights.array
    failing = excess > SCORE_TOLERANCE
    mask = planted.side_mask
    return FailureReport(
        f_a_vertices=frozenset(int(v) for v in np.flatnonzero(failing & mask)),
        f_b_vertices=frozenset(int(v) for v in np.flatnonzero(failing & ~mask)),
    )


def partitions_equal_up_to_swap(first: Partition, second: Partition) -> bool:
    if first.n != second.n:
        raise PartitionError(f"Cannot compare partitions of size {first.n} and {second.n}")
    return first.canonical() == second.canonical()


def log_likelihood(graph: ColoredGraph, params: ModelParams, partition: Partition) -> float:
    """ln Pr(G | A, B) under the colored SBM."""
    if graph.m != params.m or graph.n != params.n:
        raise PartitionError("Graph shape does not match params")
    inner, cross = inner_and_cross_counts(graph, partition)
    half = params.n // 2
    within_pairs = 2 * math.comb(half, 2)
    cross_pairs = half * half
    return math.fsum(
        [
            *(int(count) * math.log(p) for count, p in zip(inner, params.p)),
            (within_pairs - int(inner.sum())) * math.log1p(-params.p_star),
            *(int(x) * math.log(q) for x, q in zip(cross, params.q)),
            (cross_pairs - int(cross.sum())) * math.log1p(-params.q_star),
        ]
    )


def failure_swap(
    graph: ColoredGraph, weights: Weights, planted: Partition, report: FailureReport
) -> tuple[Partition, float]:
    """Exchange one failing A vertex with one failing B vertex.

    Among failing pairs the largest score change wins. With a single color and
    alpha > beta the change is never negative.
    """
    if not (report.f_a and report.f_b):
        raise PartitionError("A failure swap needs failing vertices on both sides")
    adjacency, gain = _side_gains(graph, weights, planted)
    best: tuple[float, int, int] | None = None
    for v_a in sorted(report.f_a_vertices):
        for v_b in sorted(report.f_b_vertices):
            change = float(gain[v_a] + gain[v_b] - 2.0 * adjacency[v_a, v_b])
            if best is None or change > best[0]:
                best = (change, v_a, v_b)
    assert best is not None
    change, v_a, v_b = best
    return _swap(planted, v_a, v_b), change


def _pair_weight(adjacency, left: np.ndarray, right: np.ndarray) -> float:
    return float(left @ (adjacency @ right))


def splitting_witness(
    graph: ColoredGraph, weights: Weights, planted: Partition, rival: Partition
) -> SplitWitness:
    """Split a rival partition into the swapped sets A_w, B_w and both sides of the inequality.

    The rival is oriented so at least n/4 of A stays in A-hat. Then
    score(rival) - score(planted) = swapped_weight - kept_weight.
    """
    if planted.n != rival.n:
        raise PartitionError(f"Cannot compare partitions of size {planted.n} and {rival.n}")
    _check_weights(graph, weights)
    in_a = planted.side_mask
    if np.count_nonzero(in_a & rival.side_mask) * 4 < planted.n:
        rival = rival.complement()
    rival_a = rival.side_mask
    moved_a = in_a & ~rival_a
    moved_b = ~in_a & rival_a
    stay_a = in_a & rival_a
    stay_b = ~in_a & ~rival_a
    adjacency = graph.weighted_adjacency(weights)
    moved_a_f, moved_b_f, stay_a_f, stay_b_f = (
        mask.astype(np.float64) for mask in (moved_a, moved_b, stay_a, stay_b)
    )
    swapped = _pair_weight(adjacency, moved_a_f, stay_b_f) + _pair_weight(
        adjacency, moved_b_f, stay_a_f
    )
    kept = _pair_weight(adjacency, moved_a_f, stay_a_f) + _pair_weight(
        adjacency, moved_b_f, stay_b_f
    )
    return SplitWitness(
        k=int(moved_a.sum()),
        a_w=tuple(int(v) for v in np.flatnonzero(moved_a)),
        b_w=tuple(int(v) for v in np.flatnonzero(moved_b)),
        swapped_weight=swapped,
        kept_weight=kept,
    )
