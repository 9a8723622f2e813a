"""Model parameters, decoder weights and divergence functionals."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from csbm_lab.exceptions import ParamsError, ParamsFault
from csbm_lab.types import DivergenceReport, Weights

logger = logging.getLogger(__name__)


def _as_rates(values: Sequence[float], name: str) -> tuple[float, ...]:
    rates = tuple(float(v) for v in values)
    for v in rates:
        if not math.isfinite(v):
            raise ParamsError(ParamsFault.NON_FINITE_RATE, f"{name} must be finite, got {v!r}")
        if v <= 0:
            raise ParamsError(ParamsFault.NON_POSITIVE_RATE, f"{name} must be positive, got {v!r}")
    return rates


def _check_pair(alphas: Sequence[float], betas: Sequence[float]) -> None:
    if not alphas or not betas:
        raise ParamsError(ParamsFault.NO_COLORS, "At least one color is required")
    if len(alphas) != len(betas):
        raise ParamsError(
            ParamsFault.LENGTH_MISMATCH,
            f"alphas has {len(alphas)} entries but betas has {len(betas)}",
        )


@dataclass(frozen=True)
class ModelParams:
    """Colored two-community SBM: p_i = alpha_i ln n / n within, q_i = beta_i ln n / n across.

    Validated on construction; use make_params to build from raw values.
    """

    n: int
    alphas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n % 2:
            raise ParamsError(ParamsFault.ODD_N, f"n must be even, got {self.n}")
        if self.n < 4:
            raise ParamsError(ParamsFault.TOO_FEW_VERTICES, f"n must be at least 4, got {self.n}")
        _check_pair(self.alphas, self.betas)
        _as_rates(self.alphas, "alpha")
        _as_rates(self.betas, "beta")
        if self.p_star >= 1.0:
            raise ParamsError(
                ParamsFault.WITHIN_MASS,
                f"Within-community edge mass sum(p) = {self.p_star:.6g} must be below 1",
            )
        if self.q_star >= 1.0:
            raise ParamsError(
                ParamsFault.CROSS_MASS,
                f"Cross-community edge mass sum(q) = {self.q_star:.6g} must be below 1",
            )
        if all(a == b for a, b in zip(self.alphas, self.betas)):
            raise ParamsError(
                ParamsFault.INDISTINGUISHABLE,
                "alphas and betas are identical; communities cannot be told apart",
            )

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def scale(self) -> float:
        """The ln(n)/n factor shared by every edge probability."""
        return math.log(self.n) / self.n

    @cached_property
    def p(self) -> tuple[float, ...]:
        return tuple(a * self.scale for a in self.alphas)

    @cached_property
    def q(self) -> tuple[float, ...]:
        return tuple(b * self.scale for b in self.betas)

    @property
    def p_star(self) -> float:
        return math.fsum(self.p)

    @property
    def q_star(self) -> float:
        return math.fsum(self.q)

    @property
    def alpha_star(self) -> float:
        return math.fsum(self.alphas)

    @property
    def beta_star(self) -> float:
        return math.fsum(self.betas)

    @cached_property
    def weights(self) -> Weights:
        return Weights(tuple(math.log(a / b) for a, b in zip(self.alphas, self.betas)))

    def within_categorical(self) -> np.ndarray:
        """Outcome probabilities (p_1..p_m, 1 - p*) for a within-community pair."""
        return np.array([*self.p, 1.0 - self.p_star], dtype=np.float64)

    def cross_categorical(self) -> np.ndarray:
        """Outcome probabilities (q_1..q_m, 1 - q*) for a cross-community pair."""
        return np.array([*self.q, 1.0 - self.q_star], dtype=np.float64)


def make_params(n: int, alphas: Sequence[float], betas: Sequence[float]) -> ModelParams:
    """Validate raw values and build ModelParams."""
    if isinstance(n, bool) or int(n) != n:
        raise ParamsError(ParamsFault.MALFORMED, f"n must be an integer, got {n!r}")
    _check_pair(alphas, betas)
    params = ModelParams(
        n=int(n),
        alphas=_as_rates(alphas, "alpha"),
        betas=_as_rates(betas, "beta"),
    )
    logger.debug("Built params n=%d m=%d p*=%.6g q*=%.6g", params.n, params.m,
                 params.p_star, params.q_star)
    return params


def divergence_sum(alphas: Sequence[float], betas: Sequence[float]) -> float:
    """Return sum_i (sqrt(alpha_i) - sqrt(beta_i))^2."""
    _check_pair(alphas, betas)
    a = _as_rates(alphas, "alpha")
    b = _as_rates(betas, "beta")
    return math.fsum((math.sqrt(x) - math.sqrt(y)) ** 2 for x, y in zip(a, b))


def hellinger_sq(params: ModelParams) -> float:
    """Squared Hellinger distance between the m+1 outcome laws p and q.

    The no-edge term is evaluated as ((q* - p*) / (sqrt(1-p*) + sqrt(1-q*)))^2, which
    avoids cancellation when both masses are small.
    """
    colored = math.fsum((math.sqrt(p) - math.sqrt(q)) ** 2 for p, q in zip(params.p, params.q))
    no_edge = (
        (params.q_star - params.p_star)
        / (math.sqrt(1.0 - params.p_star) + math.sqrt(1.0 - params.q_star))
    ) ** 2
    return colored + no_edge


def hellinger_distance(params: ModelParams) -> float:
    return math.sqrt(hellinger_sq(params))


def divergence_report(params: ModelParams) -> DivergenceReport:
    h2 = hellinger_sq(params)
    return DivergenceReport(
        d_plus=divergence_sum(params.alphas, params.betas),
        hellinger_sq=h2,
        n_normalized=h2 / params.scale,
    )


def params_to_dict(params: ModelParams) -> dict[str, Any]:
    return {"n": params.n, "alphas": list(params.alphas), "betas": list(params.betas)}


def params_from_dict(data: Any) -> ModelParams:
    """Build params from {"n": ..., "alphas": [...], "betas": [...]}."""
    if not isinstance(data, dict):
        raise ParamsError(ParamsFault.MALFORMED, "Params must be a JSON object")
    missing = [key for key in ("n", "alphas", "betas") if key not in data]
    if missing:
        raise ParamsError(ParamsFault.MALFORMED, f"Params missing fields: {', '.join(missing)}")
    alphas, betas = data["alphas"], data["betas"]
    if not isinstance(alphas, list) or not isinstance(betas, list):
        raise ParamsError(ParamsFault.MALFORMED, "alphas and betas must be lists")
    try:
        return make_params(data["n"], alphas, betas)
    except (TypeError, ValueError) as e:
        raise ParamsError(ParamsFault.MALFORMED, f"Params are not numeric: {e}") from e
