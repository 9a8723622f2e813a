"""Closed-form probability bounds for ML success and failure."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from csbm_lab.constants import DEFAULT_BOUNDS_MAX_K, DELTA_BOUND_MIN_N
from csbm_lab.exceptions import BoundInputError, ParamsError
from csbm_lab.ldp.law import cross_weight_law, pair_diff_distribution, theta_half_exponent
from csbm_lab.ldp.rate import cramer_lower_bound
from csbm_lab.model import ModelParams, make_params
from csbm_lab.types import BoundKind, BoundReport

logger = logging.getLogger(__name__)


def _exp(log_value: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.exp(log_value))


def swap_pair_count(n: int, k: int) -> int:
    """Pairs whose community relation changes when k vertices swap each way: 2k(n/2 - k)."""
    return 2 * k * (n // 2 - k)


def pnk_theoretical_bound(params: ModelParams, k: int) -> BoundReport:
    """2 exp(-2k(n/2 - k) * e) with e = -ln E[exp((Z - W)/2)]."""
    if not 1 <= k <= params.n // 4:
        raise BoundInputError(f"k must lie in 1..{params.n // 4}, got {k}")
    terms = swap_pair_count(params.n, k)
    exponent = theta_half_exponent(params)
    return BoundReport(
        "pnk",
        BoundKind.UPPER,
        2.0 * _exp(-terms * exponent),
        {"n": params.n, "k": k, "N": terms, "exponent": exponent},
    )


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _union(params: ModelParams, log_choose: np.ndarray, ks: np.ndarray) -> float:
    exponent = theta_half_exponent(params)
    terms = 2 * ks * (params.n // 2 - ks)
    return float(logsumexp(2.0 * log_choose + math.log(2.0) - terms * exponent))


def ml_failure_union_bound(params: ModelParams) -> BoundReport:
    """sum_{k=1}^{n/4} C(n/2, k)^2 * pnk bound, accumulated in log space."""
    ks = np.arange(1, params.n // 4 + 1, dtype=np.float64)
    log_value = _union(params, _log_binom(params.n // 2, ks), ks)
    return BoundReport(
        "ml_union",
        BoundKind.UPPER,
        _exp(log_value),
        {"n": params.n, "terms": int(ks.size), "log_value": log_value},
    )


def ml_failure_stirling_bound(params: ModelParams) -> BoundReport:
    """Union bound with C(n/2, k) <= (n e / 2k)^k."""
    ks = np.arange(1, params.n // 4 + 1, dtype=np.float64)
    log_choose = ks * (np.log(params.n / (2.0 * ks)) + 1.0)
    log_value = _union(params, log_choose, ks)
    return BoundReport(
        "ml_union_stirling",
        BoundKind.UPPER,
        _exp(log_value),
        {"n": params.n, "terms": int(ks.size), "log_value": log_value},
    )


def union_bound_onset(
    alphas: Sequence[float], betas: Sequence[float], n_grid: Sequence[int]
) -> int | None:
    """Smallest grid n from which the union bound stays below 1, or None."""
    onset: int | None = None
    for n in sorted(n_grid):
        try:
            params = make_params(n, alphas, betas)
        except ParamsError as e:
            logger.warning("Skipping n=%d in onset search: %s", n, e)
            onset = None
            continue
        if ml_failure_union_bound(params).value < 1.0:
            if onset is None:
                onset = n
        else:
            onset = None
    return onset


def delta_complement_bound(n: int, alphas: Sequence[float]) -> BoundReport:
    """Upper bound on 1 - Pr(Delta), the chance some vertex of H is over-connected inside H.

    exp[ln(n / ln^3 n) - (ln n / ln ln n) ln(ln^3 n / (e ln ln n sum alpha))]
    """
    if n < DELTA_BOUND_MIN_N:
        raise BoundInputError(f"Delta bound needs n >= {DELTA_BOUND_MIN_N}, got {n}")
    alpha_star = math.fsum(alphas)
    if not alpha_star > 0:
        raise BoundInputError("Delta bound needs a positive total alpha")
    log_n = math.log(n)
    log_log_n = math.log(log_n)
    log_value = math.log(n / log_n**3) - (log_n / log_log_n) * math.log(
        log_n**3 / (math.e * log_log_n * alpha_star)
    )
    return BoundReport(
        "delta_complement",
        BoundKind.UPPER,
        _exp(log_value),
        {"n": n, "alpha_star": alpha_star, "log_value": log_value},
    )


def chebyshev_tail(mean: float, variance: float, t: float) -> BoundReport:
    """Lower bound max(0, 1 - variance / t^2) on P(S >= mean - t)."""
    if variance < 0:
        raise BoundInputError(f"variance must be non-negative, got {variance}")
    if not t > 0:
        raise BoundInputError(f"t must be positive, got {t}")
    return BoundReport(
        "chebyshev",
        BoundKind.LOWER,
        max(0.0, 1.0 - variance / (t * t)),
        {"mean": mean, "variance": variance, "t": t},
    )


def vertex_set_size(n: int) -> int:
    """|H| = floor(n / ln^3 n)."""
    if n < 2:
        raise BoundInputError(f"n must be at least 2, got {n}")
    return math.floor(n / math.log(n) ** 3)


def converse_threshold(params: ModelParams) -> float:
    """M ln n / ln ln n with M the largest decoder weight."""
    log_n = math.log(params.n)
    return max(params.weights.w) * log_n / math.log(log_n)


def converse_chebyshev_bound(params: ModelParams, k_margin: float) -> BoundReport:
    """P(sum of |H| cross weights >= (n / ln^3 n) E[Z] - K) by Chebyshev."""
    h = vertex_set_size(params.n)
    if h < 1:
        raise BoundInputError(f"n={params.n} leaves the vertex set H empty")
    law = cross_weight_law(params)
    exact_size = params.n / math.log(params.n) ** 3
    t = k_margin - (exact_size - h) * law.mean()
    report = chebyshev_tail(h * law.mean(), h * law.variance(), t)
    return BoundReport(
        "converse_chebyshev",
        BoundKind.LOWER,
        report.value,
        {"n": params.n, "K": k_margin, "h": h, **report.inputs},
    )


def converse_cramer_bound(params: ModelParams, epsilon: float | None = None) -> BoundReport:
    """Cramer lower bound on the sum of l = n/2 - |H| pair differences reaching the threshold.

    The window (a - eps, a + eps) starts at threshold / l, so it sits inside the event.
    """
    if epsilon is None:
        epsilon = math.log(params.n) ** (2.0 / 3.0) / params.n
    terms = params.n // 2 - vertex_set_size(params.n)
    if terms < 1:
        raise BoundInputError(f"n={params.n} leaves no pair differences outside H")
    a = converse_threshold(params) / terms + epsilon
    report = cramer_lower_bound(pair_diff_distribution(params), terms, a, epsilon)
    return BoundReport(
        "converse_cramer",
        BoundKind.LOWER,
        report.value,
        {"n": params.n, **report.inputs},
        flag=report.flag,
    )


def f_h_amplification(n: int, vertex_probability: float) -> float:
    """1 - (1 - p)^|H|: chance at least one vertex of H fails."""
    if not 0.0 <= vertex_probability <= 1.0:
        raise BoundInputError(f"probability must lie in [0, 1], got {vertex_probability}")
    if vertex_probability == 1.0:
        return 1.0
    return -math.expm1(vertex_set_size(n) * math.log1p(-vertex_probability))


def converse_condition_level(n: int) -> float:
    """Per-vertex failure level ln^3 n ln 10 / n that makes Pr(F_H) reach 9/10."""
    return math.log(n) ** 3 * math.log(10.0) / n


def bounds_table(
    params: ModelParams, max_k: int = DEFAULT_BOUNDS_MAX_K, k_margin: float = 1.0
) -> list[BoundReport]:
    """Per-k pnk rows followed by the union, Stirling, Delta and converse rows."""
    rows = [pnk_theoretical_bound(params, k) for k in range(1, min(max_k, params.n // 4) + 1)]
    rows.append(ml_failure_union_bound(params))
    rows.append(ml_failure_stirling_bound(params))
    optional = (
        lambda: delta_complement_bound(params.n, params.alphas),
        lambda: converse_chebyshev_bound(params, k_margin),
        lambda: converse_cramer_bound(params),
    )
    for build in optional:
        try:
            rows.append(build())
        except BoundInputError as e:
            logger.info("Skipping bound row: %s", e)
    return rows
