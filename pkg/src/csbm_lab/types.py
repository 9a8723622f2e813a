from __future__ import annotations

import argparse
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np
import scipy.sparse as sp

from csbm_lab.constants import PROBABILITY_SUM_TOLERANCE, SCORE_TOLERANCE
from csbm_lab.exceptions import GraphFormatError, LawError, PartitionError

COMMUNITY_A = "A"
COMMUNITY_B = "B"


class BoundKind(Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class Weights:
    """Decoder weights w_i = ln(alpha_i / beta_i)."""

    w: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.w)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.w, dtype=np.float64)


@dataclass(frozen=True)
class Partition:
    """Balanced two-community labeling over {A, B}, one character per vertex."""

    labels: str

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0 or n % 2:
            raise PartitionError(f"Partition needs a positive even size, got {n}")
        stray = set(self.labels) - {COMMUNITY_A, COMMUNITY_B}
        if stray:
            raise PartitionError(f"Partition labels must be A or B, found {sorted(stray)}")
        count_a = self.labels.count(COMMUNITY_A)
        if count_a != n // 2:
            raise PartitionError(
                f"Partition is unbalanced: {count_a} A labels, {n - count_a} B labels"
            )

    @classmethod
    def from_community(cls, n: int, members: Iterable[int]) -> Partition:
        """Build a partition whose A community is `members`."""
        chars = [COMMUNITY_B] * n
        for v in members:
            if not 0 <= v < n:
                raise PartitionError(f"Vertex {v} out of range for n={n}")
            chars[v] = COMMUNITY_A
        return cls("".join(chars))

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def side_mask(self) -> np.ndarray:
        """Boolean vector, True where the vertex is in community A."""
        return np.frombuffer(self.labels.encode("ascii"), dtype=np.uint8) == ord(COMMUNITY_A)

    @property
    def community_a(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(self.side_mask))

    @property
    def community_b(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(~self.side_mask))

    def complement(self) -> Partition:
        swap = {COMMUNITY_A: COMMUNITY_B, COMMUNITY_B: COMMUNITY_A}
        return Partition("".join(swap[c] for c in self.labels))

    def canonical(self) -> Partition:
        """Return the labeling with vertex 0 in A."""
        return self if self.labels[0] == COMMUNITY_A else self.complement()

    def __str__(self) -> str:
        return self.labels


@dataclass(frozen=True)
class ColoredGraph:
    """Simple undirected graph whose edges carry a color in 1..m.

    `edges` is sorted by (u, v) with u < v and holds at most one color per pair.
    """

    n: int
    m: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphFormatError(f"Graph needs at least one vertex, got n={self.n}")
        if self.m < 1:
            raise GraphFormatError(f"Graph needs at least one color, got m={self.m}")
        if not self.edges:
            return
        src, dst, col = self._arrays
        if np.any(src == dst):
            raise GraphFormatError("Self-loops are not allowed")
        if np.any(src > dst):
            raise GraphFormatError("Edges must be stored with u < v")
        if src.min() < 0 or dst.max() >= self.n:
            raise GraphFormatError(f"Edge endpoint out of range for n={self.n}")
        if col.min() < 1 or col.max() > self.m:
            raise GraphFormatError(f"Edge color out of range 1..{self.m}")
        keys = src * self.n + dst
        steps = np.diff(keys)
        if np.any(steps == 0):
            raise GraphFormatError("Duplicate vertex pair")
        if np.any(steps < 0):
            raise GraphFormatError("Edges must be sorted by (u, v)")

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable[tuple[int, int, int]]) -> ColoredGraph:
        """Normalize (u, v) order, sort, and build the graph."""
        normalized = sorted((min(u, v), max(u, v), c) for u, v, c in edges)
        return cls(n=n, m=m, edges=tuple(normalized))

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        table = np.asarray(self.edges, dtype=np.int64)
        return table[:, 0], table[:, 1], table[:, 2]

    @property
    def sources(self) -> np.ndarray:
        return self._arrays[0]

    @property
    def targets(self) -> np.ndarray:
        return self._arrays[1]

    @property
    def colors(self) -> np.ndarray:
        return self._arrays[2]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def weighted_adjacency(self, weights: Weights) -> sp.csr_matrix:
        """Symmetric sparse matrix with entry w_c for every c-colored edge."""
        if len(weights) != self.m:
            raise PartitionError(f"Expected {self.m} weights, got {len(weights)}")
        values = weights.array[self.colors - 1]
        rows = np.concatenate([self.sources, self.targets])
        cols = np.concatenate([self.targets, self.sources])
        data = np.concatenate([values, values])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def color_adjacency(self) -> np.ndarray:
        """Dense (m, n, n) 0/1 array; slice c-1 is the adjacency of color c."""
        stack = np.zeros((self.m, self.n, self.n), dtype=np.float64)
        stack[self.colors - 1, self.sources, self.targets] = 1.0
        stack[self.colors - 1, self.targets, self.sources] = 1.0
        return stack


@dataclass(frozen=True)
class FiniteLaw:
    """Finite-support distribution stored as parallel value/probability tuples."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.probs):
            raise LawError(
                f"Law has {len(self.values)} values but {len(self.probs)} probabilities"
            )
        if not self.values:
            raise LawError("Law needs at least one atom")
        if not all(math.isfinite(v) for v in self.values):
            raise LawError("Law values must be finite")
        if any(p < 0 or not math.isfinite(p) for p in self.probs):
            raise LawError("Law probabilities must be finite and non-negative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise LawError(f"Law probabilities sum to {total!r}, not 1")

    @cached_property
    def value_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    @cached_property
    def prob_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)

    @property
    def atom_count(self) -> int:
        return len(self.values)

    @property
    def support_min(self) -> float:
        return min(v for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def support_max(self) -> float:
        return max(v for v, p in zip(self.values, self.probs) if p > 0)

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(p * (v - mu) ** 2 for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class PairDiffDistribution(FiniteLaw):
    """Law of Z - W: one cross-pair weight minus one within-pair weight."""

    raw_atom_count: int = 0


@dataclass(frozen=True)
class MgfEvaluation:
    value: float
    c_theta: float
    d_theta: float


@dataclass(frozen=True)
class DivergenceReport:
    d_plus: float
    hellinger_sq: float
    n_normalized: float

    def to_dict(self) -> dict[str, float]:
        return {
            "d_plus": self.d_plus,
            "hellinger_sq": self.hellinger_sq,
            "n_normalized": self.n_normalized,
        }


@dataclass(frozen=True)
class DecodeResult:
    best: Partition
    best_score: float
    tie: bool
    explored: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "labels": self.best.labels,
            "score": self.best_score,
            "tie": self.tie,
            "explored": self.explored,
        }


@dataclass(frozen=True)
class FailureReport:
    """Per-vertex failure witnesses of the planted partition."""

    f_a_vertices: frozenset[int] = frozenset()
    f_b_vertices: frozenset[int] = frozenset()

    @property
    def f_a(self) -> bool:
        return bool(self.f_a_vertices)

    @property
    def f_b(self) -> bool:
        return bool(self.f_b_vertices)


@dataclass(frozen=True)
class SplitWitness:
    """Swapped sets A_w and B_w with both sides of the splitting inequality."""

    k: int
    a_w: tuple[int, ...]
    b_w: tuple[int, ...]
    swapped_weight: float
    kept_weight: float

    @property
    def holds(self) -> bool:
        return self.swapped_weight >= self.kept_weight - SCORE_TOLERANCE


@dataclass(frozen=True)
class RateResult:
    a: float
    rate: float
    theta_star: float
    iterations: int
    infinite: bool = False
    boundary: bool = False
    clamped: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "a": self.a,
            "rate": None if self.infinite else self.rate,
            "theta_star": self.theta_star if math.isfinite(self.theta_star) else None,
            "iterations": self.iterations,
            "infinite": self.infinite,
            "boundary": self.boundary,
            "clamped": self.clamped,
        }


@dataclass(frozen=True)
class BoundReport:
    """A probability bound; upper bounds are vacuous at >= 1, lower bounds at <= 0."""

    formula_id: str
    kind: BoundKind
    value: float
    inputs: dict[str, Any] = field(default_factory=dict)
    flag: str | None = None

    @property
    def vacuous(self) -> bool:
        if self.kind is BoundKind.UPPER:
            return self.value >= 1.0
        return self.value <= 0.0

    def to_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {"formula_id": self.formula_id}
        row.update(self.inputs)
        row["value"] = self.value
        row["vacuous"] = self.vacuous
        if self.flag is not None:
            row["flag"] = self.flag
        return row


@dataclass
class CommandContext:
    args: argparse.Namespace
    console: Any = None
    settings: Any = None
    journal: Any = None


@dataclass(frozen=True)
class Subcommand:
    name: str
    description: str
    handler: Callable[[CommandContext], int]
    configure: Callable[[argparse.ArgumentParser], None] | None = None
