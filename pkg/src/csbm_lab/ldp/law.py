"""The pair-difference law Z - W and its moment generating function.

For t = ln(n)/n the MGF factorizes exactly as

    E[exp(theta (Z - W))] = (1 + a t)(1 + b t) = 1 + C t + D t^2

with a = sum beta_i (e^{theta w_i} - 1) and b = sum alpha_i (e^{-theta w_i} - 1).
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.special import logsumexp, softmax

from csbm_lab.constants import ATOM_MERGE_TOLERANCE
from csbm_lab.exceptions import NumericalRangeError
from csbm_lab.model import ModelParams
from csbm_lab.types import FiniteLaw, MgfEvaluation, PairDiffDistribution

logger = logging.getLogger(__name__)

# expm1 form loses precision once the MGF falls below this.
_LOG1P_FLOOR = -0.5


def merge_atoms(
    values: np.ndarray, probs: np.ndarray, tolerance: float = ATOM_MERGE_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Sort atoms and fuse neighbours closer than tolerance * max(1, |value|)."""
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    if values.size == 0:
        return values, probs
    gaps = np.diff(values)
    scale = np.maximum(1.0, np.abs(values[1:]))
    starts = np.concatenate([[0], np.flatnonzero(gaps > tolerance * scale) + 1])
    return values[starts], np.add.reduceat(probs, starts)


def pair_diff_atoms(params: ModelParams) -> list[tuple[float, float]]:
    """Unmerged (value, probability) atoms of Z - W: 1 + 2m + m(m-1) entries."""
    w = params.weights.w
    p, q = params.p, params.q
    p_star, q_star = params.p_star, params.q_star
    zero_mass = math.fsum(pk * qk for pk, qk in zip(p, q)) + (1.0 - p_star) * (1.0 - q_star)
    atoms = [(0.0, zero_mass)]
    atoms.extend((w[i], (1.0 - p_star) * q[i]) for i in range(params.m))
    atoms.extend((-w[i], p[i] * (1.0 - q_star)) for i in range(params.m))
    atoms.extend(
        (w[j] - w[i], p[i] * q[j])
        for i in range(params.m)
        for j in range(params.m)
        if i != j
    )
    return atoms


def pair_diff_distribution(params: ModelParams) -> PairDiffDistribution:
    atoms = pair_diff_atoms(params)
    values, probs = merge_atoms(
        np.array([v for v, _ in atoms]), np.array([p for _, p in atoms])
    )
    return PairDiffDistribution(
        values=tuple(float(v) for v in values),
        probs=tuple(float(p) for p in probs),
        raw_atom_count=len(atoms),
    )


def _edge_weight_law(weights: tuple[float, ...], probs: tuple[float, ...]) -> FiniteLaw:
    values = np.array([0.0, *weights])
    masses = np.array([1.0 - math.fsum(probs), *probs])
    values, masses = merge_atoms(values, masses)
    return FiniteLaw(tuple(float(v) for v in values), tuple(float(p) for p in masses))


def cross_weight_law(params: ModelParams) -> FiniteLaw:
    """Law of Z: the decoder weight carried by a cross-community pair."""
    return _edge_weight_law(params.weights.w, params.q)


def within_weight_law(params: ModelParams) -> FiniteLaw:
    """Law of W: the decoder weight carried by a within-community pair."""
    return _edge_weight_law(params.weights.w, params.p)


def law_log_mgf(law: FiniteLaw, theta: float) -> float:
    """ln E[exp(theta X)] by direct summation over the atoms."""
    if not math.isfinite(theta):
        raise NumericalRangeError(f"theta must be finite, got {theta!r}")
    exponents = theta * law.value_array
    probs = law.prob_array
    with np.errstate(over="ignore"):
        shifted = math.fsum(probs * np.expm1(exponents))
    if math.isfinite(shifted) and shifted > _LOG1P_FLOOR:
        value = math.log1p(shifted)
    else:
        value = float(logsumexp(exponents, b=probs))
    if not math.isfinite(value):
        raise NumericalRangeError(f"log-MGF is not finite at theta={theta!r}")
    return value


def tilted_moments(law: FiniteLaw, theta: float) -> tuple[float, float]:
    """Mean and variance of the law reweighted by exp(theta x)."""
    keep = law.prob_array > 0
    values = law.value_array[keep]
    weights = softmax(theta * values + np.log(law.prob_array[keep]))
    mean = math.fsum(weights * values)
    variance = math.fsum(weights * (values - mean) ** 2)
    return mean, variance


def _ab_terms(params: ModelParams, theta: float) -> tuple[np.ndarray, np.ndarray]:
    w = params.weights.array
    alphas = np.asarray(params.alphas)
    betas = np.asarray(params.betas)
    with np.errstate(over="raise"):
        try:
            return betas * np.exp(theta * w), alphas * np.exp(-theta * w)
        except FloatingPointError as e:
            raise NumericalRangeError(f"MGF coefficients overflow at theta={theta!r}") from e


def mgf_coefficients(params: ModelParams, theta: float) -> tuple[float, float]:
    """Closed forms (C(theta), D(theta)); C(0.5) = -sum (sqrt(alpha) - sqrt(beta))^2."""
    w = params.weights.array
    alphas = np.asarray(params.alphas)
    betas = np.asarray(params.betas)
    with np.errstate(over="raise"):
        try:
            a = math.fsum(betas * np.expm1(theta * w))
            b = math.fsum(alphas * np.expm1(-theta * w))
        except FloatingPointError as e:
            raise NumericalRangeError(f"MGF coefficients overflow at theta={theta!r}") from e
    return a + b, a * b


def mgf_coefficient_derivatives(
    params: ModelParams, theta: float
) -> tuple[float, float, float, float]:
    """(C', C'', D', D'') with respect to theta."""
    w = params.weights.array
    up, down = _ab_terms(params, theta)
    a = math.fsum(up) - params.beta_star
    b = math.fsum(down) - params.alpha_star
    a1 = math.fsum(up * w)
    b1 = -math.fsum(down * w)
    a2 = math.fsum(up * w * w)
    b2 = math.fsum(down * w * w)
    return a1 + b1, a2 + b2, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2


def log_mgf(params: ModelParams, theta: float) -> MgfEvaluation:
    """Direct-sum log-MGF of Z - W alongside the closed-form C and D."""
    value = law_log_mgf(pair_diff_distribution(params), theta)
    c_theta, d_theta = mgf_coefficients(params, theta)
    return MgfEvaluation(value=value, c_theta=c_theta, d_theta=d_theta)


def closed_form_log_mgf(params: ModelParams, theta: float) -> float:
    """ln(1 + C t + D t^2) with t = ln(n)/n."""
    c_theta, d_theta = mgf_coefficients(params, theta)
    t = params.scale
    return math.log1p(c_theta * t + d_theta * t * t)


def log_mgf_derivatives(params: ModelParams, theta: float) -> tuple[float, float]:
    """Analytic first and second theta-derivatives of the log-MGF."""
    t = params.scale
    c_theta, d_theta = mgf_coefficients(params, theta)
    c1, c2, d1, d2 = mgf_coefficient_derivatives(params, theta)
    mgf = 1.0 + c_theta * t + d_theta * t * t
    first = c1 * t + d1 * t * t
    second = c2 * t + d2 * t * t
    return first / mgf, (second * mgf - first * first) / (mgf * mgf)


def theta_half_exponent(params: ModelParams) -> float:
    """Per-pair decay exponent -ln E[exp((Z - W)/2)]."""
    return -closed_form_log_mgf(params, 0.5)
