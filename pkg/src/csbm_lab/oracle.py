"""Brute-force ground truth for the decoder and the bounds.

Nothing here shares a code path with decoder.py or ldp/rate.py.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import signal

from csbm_lab.constants import (
    ATOM_MERGE_TOLERANCE,
    DEFAULT_EXACT_CAP,
    MONTE_CARLO_CHUNK,
    ORACLE_ATOM_CAP,
    SCORE_TOLERANCE,
    TAIL_TOLERANCE,
)
from csbm_lab.exceptions import (
    BoundInputError,
    DecoderCapError,
    LawError,
    OracleCapacityError,
    PartitionError,
)
from csbm_lab.ldp.law import pair_diff_distribution
from csbm_lab.model import ModelParams
from csbm_lab.types import ColoredGraph, DecodeResult, FiniteLaw, Partition, Weights

logger = logging.getLogger(__name__)

# Raw outer products beyond this many atoms are refused before merging.
_RAW_ATOM_FACTOR = 64
_LATTICE_TOLERANCE = 1e-9
_FFT_DUST = 1e-15


@dataclass(frozen=True)
class ExactLaw:
    """Law of a sum of i.i.d. finite-support variables, atoms strictly increasing."""

    values: tuple[float, ...]
    probs: tuple[float, ...]
    summands: int = 1

    def __post_init__(self) -> None:
        if len(self.values) != len(self.probs) or not self.values:
            raise LawError("ExactLaw needs matching, non-empty values and probabilities")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-10:
            raise LawError(f"ExactLaw probabilities sum to {total!r}")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise LawError("ExactLaw values must be strictly increasing")

    @classmethod
    def from_law(cls, law: FiniteLaw) -> ExactLaw:
        values, probs = _fuse(law.value_array, law.prob_array)
        return cls(tuple(values.tolist()), tuple(probs.tolist()))

    @cached_property
    def _values(self) -> np.ndarray:
        return np.asarray(self.values)

    @cached_property
    def _probs(self) -> np.ndarray:
        return np.asarray(self.probs)

    def tail(self, t: float) -> float:
        """P(S >= t), counting atoms within TAIL_TOLERANCE below t."""
        if t == -math.inf:
            return 1.0
        if t == math.inf:
            return 0.0
        return min(1.0, math.fsum(self._probs[self._values >= t - TAIL_TOLERANCE]))

    def interval_probability(self, low: float, high: float) -> float:
        """P(low < S < high)."""
        inside = (self._values > low) & (self._values < high)
        return math.fsum(self._probs[inside])

    def mean(self) -> float:
        return math.fsum(self._values * self._probs)


def _fuse(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort, then collapse runs whose neighbours sit within the relative merge tolerance."""
    order = np.argsort(values, kind="mergesort")
    values = values[order]
    probs = probs[order]
    breaks = np.diff(values) > ATOM_MERGE_TOLERANCE * np.maximum(1.0, np.abs(values[1:]))
    ends = np.append(np.flatnonzero(breaks), values.size - 1)
    starts = np.insert(ends[:-1] + 1, 0, 0)
    running = np.concatenate([[0.0], np.cumsum(probs)])
    return values[starts], running[ends + 1] - running[starts]


def _lattice_step(law: ExactLaw) -> float | None:
    """Spacing h when every atom sits on values[0] + j*h, else None."""
    if len(law.values) < 2:
        return None
    offsets = law._values - law._values[0]
    step = float(np.min(np.diff(law._values)))
    ratios = offsets / step
    if np.all(np.abs(ratios - np.rint(ratios)) <= _LATTICE_TOLERANCE):
        return step
    return None


def _lattice_points(law: ExactLaw, step: float) -> int:
    return int(np.rint((law._values[-1] - law._values[0]) / step)) + 1


def _convolve_on_lattice(left: ExactLaw, right: ExactLaw, step: float) -> ExactLaw:
    def dense(law: ExactLaw) -> np.ndarray:
        grid = np.zeros(_lattice_points(law, step))
        grid[np.rint((law._values - law._values[0]) / step).astype(np.int64)] = law._probs
        return grid

    probs = signal.fftconvolve(dense(left), dense(right))
    values = left._values[0] + right._values[0] + step * np.arange(probs.size)
    # fft round-off leaves tiny negatives and dust on unreachable points
    keep = probs > _FFT_DUST * probs.max()
    probs = probs[keep] / probs[keep].sum()
    return ExactLaw(
        tuple(values[keep].tolist()), tuple(probs.tolist()), left.summands + right.summands
    )


def convolve_laws(left: ExactLaw, right: ExactLaw) -> ExactLaw:
    """Law of the sum of two independent variables."""
    step, right_step = _lattice_step(left), _lattice_step(right)
    if (
        step is not None
        and right_step is not None
        and math.isclose(step, right_step, rel_tol=1e-12)
        and _lattice_points(left, step) + _lattice_points(right, step) <= ORACLE_ATOM_CAP
    ):
        return _convolve_on_lattice(left, right, step)
    raw = len(left.values) * len(right.values)
    if raw > _RAW_ATOM_FACTOR * ORACLE_ATOM_CAP:
        raise OracleCapacityError(
            f"Convolution would form {raw} raw atoms; use Monte Carlo instead"
        )
    values = np.add.outer(left._values, right._values).ravel()
    probs = np.multiply.outer(left._probs, right._probs).ravel()
    values, probs = _fuse(values, probs)
    if values.size > ORACLE_ATOM_CAP:
        raise OracleCapacityError(
            f"Exact law has {values.size} atoms, above the cap of {ORACLE_ATOM_CAP}; "
            "use Monte Carlo instead"
        )
    probs = probs / probs.sum()
    return ExactLaw(
        tuple(values.tolist()), tuple(probs.tolist()), left.summands + right.summands
    )


def exact_sum_distribution(law: FiniteLaw, summands: int) -> ExactLaw:
    """Exact law of the sum of `summands` i.i.d. copies of `law`."""
    if summands < 1:
        raise BoundInputError(f"Number of summands must be at least 1, got {summands}")
    base = ExactLaw.from_law(law)
    if summands * len(base.values) > ORACLE_ATOM_CAP:
        raise OracleCapacityError(
            f"{summands} summands over {len(base.values)} atoms exceed the cap of "
            f"{ORACLE_ATOM_CAP}; use Monte Carlo instead"
        )
    # square and multiply: O(log summands) convolutions
    total: ExactLaw | None = None
    power = base
    remaining = summands
    while True:
        if remaining & 1:
            total = power if total is None else convolve_laws(total, power)
        remaining >>= 1
        if not remaining:
            break
        power = convolve_laws(power, power)
    assert total is not None
    logger.debug("Exact sum of %d terms has %d atoms", summands, len(total.values))
    return total


def enumerate_balanced_partitions(n: int, cap: int = DEFAULT_EXACT_CAP) -> Iterator[Partition]:
    """Every balanced bipartition with vertex 0 in A, once each, in bitmask order."""
    if n % 2 or n < 2:
        raise PartitionError(f"Balanced partitions need an even vertex count, got n={n}")
    if n > cap:
        raise DecoderCapError(f"Enumeration is capped at n={cap}, got n={n}")
    wanted = n // 2 - 1
    for mask in range(1 << (n - 1)):
        if mask.bit_count() != wanted:
            continue
        labels = ["A"] + ["A" if mask >> i & 1 else "B" for i in range(n - 1)]
        yield Partition("".join(labels))


def brute_force_ml(
    graph: ColoredGraph, weights: Weights, cap: int = DEFAULT_EXACT_CAP
) -> DecodeResult:
    """Exhaustive ML by looping over edges for every balanced bipartition."""
    w = list(weights.w)
    if len(w) != graph.m:
        raise PartitionError(f"Graph has {graph.m} colors but {len(w)} weights given")
    scored: list[tuple[float, str]] = []
    for partition in enumerate_balanced_partitions(graph.n, cap):
        labels = partition.labels
        total = 0.0
        for u, v, c in graph.edges:
            if labels[u] == labels[v]:
                total += w[c - 1]
        scored.append((total, labels))
    top = max(score for score, _ in scored)
    near = [(labels, score) for score, labels in scored if score >= top - SCORE_TOLERANCE]
    best_labels, best_score = min(near)
    return DecodeResult(
        best=Partition(best_labels),
        best_score=best_score,
        tie=len(near) > 1,
        explored=len(scored),
    )


def monte_carlo_pnk(
    params: ModelParams, k: int, trials: int, seed: int
) -> tuple[float, float]:
    """Estimate P(sum of 2k(n/2 - k) pair differences >= 0) with its standard error."""
    if not 1 <= k <= params.n // 4:
        raise BoundInputError(f"k must lie in 1..{params.n // 4}, got {k}")
    if trials < 1:
        raise BoundInputError(f"trials must be positive, got {trials}")
    law = pair_diff_distribution(params)
    values = law.value_array
    probs = law.prob_array / law.prob_array.sum()
    summands = 2 * k * (params.n // 2 - k)
    chunks = math.ceil(trials / MONTE_CARLO_CHUNK)
    hits = 0
    for index, child in enumerate(np.random.SeedSequence(seed).spawn(chunks)):
        size = min(MONTE_CARLO_CHUNK, trials - index * MONTE_CARLO_CHUNK)
        counts = np.random.default_rng(child).multinomial(summands, probs, size=size)
        hits += int(np.count_nonzero(counts @ values >= -TAIL_TOLERANCE))
    estimate = hits / trials
    return estimate, math.sqrt(estimate * (1.0 - estimate) / trials)
