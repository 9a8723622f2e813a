__version__ = "0.1.0"

from csbm_lab.model import ModelParams, divergence_sum, hellinger_sq, make_params  # noqa: E402
from csbm_lab.types import (  # noqa: E402
    BoundReport,
    ColoredGraph,
    DecodeResult,
    PairDiffDistribution,
    Partition,
    RateResult,
    Weights,
)

__all__ = [
    "BoundReport",
    "ColoredGraph",
    "DecodeResult",
    "ModelParams",
    "PairDiffDistribution",
    "Partition",
    "RateResult",
    "Weights",
    "__version__",
    "divergence_sum",
    "hellinger_sq",
    "make_params",
]
