"""Text formats for graphs, partitions and params."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from csbm_lab.exceptions import GraphFormatError, ParamsError, ParamsFault, PartitionError
from csbm_lab.model import ModelParams, params_from_dict, params_to_dict
from csbm_lab.types import ColoredGraph, Partition

logger = logging.getLogger(__name__)


def _parse_ints(line: str, count: int, lineno: int, what: str) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphFormatError(f"Expected {what}, got {line.strip()!r}", line=lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphFormatError(f"Non-integer field in {line.strip()!r}", line=lineno) from None


def parse_graph(text: str) -> ColoredGraph:
    """Parse "n m" followed by one "u v c" line per edge.

    Blank lines are skipped. Edges may come in any order and with u > v; the
    result is normalized. Self-loops, duplicate pairs and out-of-range values
    are rejected with the offending line number.
    """
    lines = [(i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise GraphFormatError("Missing header line 'n m'")

    header_no, header = lines[0]
    n, m = _parse_ints(header, 2, header_no, "header 'n m'")
    if n < 1:
        raise GraphFormatError(f"Vertex count must be positive, got {n}", line=header_no)
    if m < 1:
        raise GraphFormatError(f"Color count must be positive, got {m}", line=header_no)

    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, int]] = []
    for lineno, line in lines[1:]:
        u, v, c = _parse_ints(line, 3, lineno, "edge 'u v c'")
        if u == v:
            raise GraphFormatError(f"Self-loop at vertex {u}", line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"Vertex out of range 0..{n - 1}", line=lineno)
        if not 1 <= c <= m:
            raise GraphFormatError(f"Color {c} out of range 1..{m}", line=lineno)
        pair = (min(u, v), max(u, v))
        if pair in seen:
            raise GraphFormatError(f"Duplicate pair {pair[0]} {pair[1]}", line=lineno)
        seen.add(pair)
        edges.append((pair[0], pair[1], c))

    return ColoredGraph.from_edges(n, m, edges)


def serialize_graph(graph: ColoredGraph) -> str:
    out = [f"{graph.n} {graph.m}"]
    out.extend(f"{u} {v} {c}" for u, v, c in graph.edges)
    return "\n".join(out) + "\n"


def parse_partition(text: str) -> Partition:
    """Parse one line of n characters over {A, B}."""
    stripped = text.strip()
    if not stripped:
        raise PartitionError("Partition file is empty")
    return Partition(stripped)


def serialize_partition(partition: Partition) -> str:
    return partition.labels + "\n"


def read_graph(path: str | Path) -> ColoredGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(path: str | Path, graph: ColoredGraph) -> None:
    Path(path).write_text(serialize_graph(graph), encoding="utf-8")
    logger.info("Wrote graph with %d edges to %s", graph.num_edges, path)


def read_partition(path: str | Path) -> Partition:
    return parse_partition(Path(path).read_text(encoding="utf-8"))


def read_params(path: str | Path) -> ModelParams:
    """Load params from a JSON file {"n": ..., "alphas": [...], "betas": [...]}."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParamsError(ParamsFault.MALFORMED, f"Params file {path} is not JSON: {e}") from e
    return params_from_dict(data)


def dump_params(params: ModelParams) -> str:
    return json.dumps(params_to_dict(params), sort_keys=True)
