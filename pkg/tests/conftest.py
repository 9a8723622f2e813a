from __future__ import annotations

import logging

import pytest

from csbm_lab.model import make_params
from csbm_lab.types import ColoredGraph, Partition, Weights


@pytest.fixture(autouse=True)
def _restore_lab_logger():
    """The CLI reroutes the package logger; undo that after every test."""
    lab_logger = logging.getLogger("csbm_lab")
    handlers = list(lab_logger.handlers)
    level = lab_logger.level
    propagate = lab_logger.propagate
    yield
    lab_logger.handlers[:] = handlers
    lab_logger.setLevel(level)
    lab_logger.propagate = propagate


@pytest.fixture
def strong_params():
    """Single color, divergence 4."""
    return make_params(100, [9.0], [1.0])


@pytest.fixture
def two_color_params():
    """Mixed-sign weights: ln 4 and ln 0.5."""
    return make_params(8, [2.0, 0.5], [0.5, 1.0])


@pytest.fixture
def dense_small_params():
    """n=10 with the largest clean alpha the edge-mass rule allows."""
    return make_params(10, [4.2], [0.05])


@pytest.fixture
def hand_graph():
    """Six vertices, two colors; under AAABBB inner counts are (3, 1), cross (2, 1)."""
    return ColoredGraph.from_edges(
        6,
        2,
        [(0, 1, 1), (1, 2, 1), (0, 3, 2), (2, 5, 1), (3, 4, 1), (4, 5, 2), (1, 4, 1)],
    )


@pytest.fixture
def hand_planted():
    return Partition("AAABBB")


@pytest.fixture
def two_cliques():
    """Two disjoint 4-cliques of color 1 on vertices 0..3 and 4..7."""
    edges = [(u, v, 1) for block in (range(4), range(4, 8)) for u in block for v in block if u < v]
    return ColoredGraph.from_edges(8, 1, edges)


@pytest.fixture
def unit_weight():
    return Weights((1.0,))
