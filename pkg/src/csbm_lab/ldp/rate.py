"""Legendre-transform rate function and the Cramer tail bounds built on it."""

from __future__ import annotations

import logging
import math

from scipy.optimize import bisect, minimize_scalar

from csbm_lab.constants import THETA_BRACKET, THETA_POLISH_XATOL, THETA_XTOL
from csbm_lab.exceptions import BoundInputError
from csbm_lab.ldp.law import law_log_mgf, tilted_moments
from csbm_lab.types import BoundKind, BoundReport, FiniteLaw, RateResult

logger = logging.getLogger(__name__)

_HULL_TOLERANCE = 1e-12


def _atom_prob(law: FiniteLaw, value: float) -> float:
    return math.fsum(p for v, p in zip(law.values, law.probs) if v == value)


def _on(value: float, edge: float) -> bool:
    return abs(value - edge) <= _HULL_TOLERANCE * max(1.0, abs(edge))


def rate_function(law: FiniteLaw, a: float) -> RateResult:
    """I(a) = sup_theta (theta a - ln E[exp(theta X)]).

    Outside the support hull the rate is infinite; on its edges it equals
    -ln P(X = edge) with theta at +-inf. Inside, the stationary point of the
    concave objective is bracketed in [-THETA_BRACKET, THETA_BRACKET].
    """
    if not math.isfinite(a):
        raise BoundInputError(f"Rate evaluation point must be finite, got {a!r}")
    low, high = law.support_min, law.support_max
    if _on(a, high):
        return RateResult(
            a=a, rate=-math.log(_atom_prob(law, high)), theta_star=math.inf,
            iterations=0, boundary=True,
        )
    if _on(a, low):
        return RateResult(
            a=a, rate=-math.log(_atom_prob(law, low)), theta_star=-math.inf,
            iterations=0, boundary=True,
        )
    if a > high or a < low:
        return RateResult(a=a, rate=math.inf, theta_star=math.nan, iterations=0, infinite=True)

    def objective(theta: float) -> float:
        return theta * a - law_log_mgf(law, theta)

    def slope(theta: float) -> float:
        return a - tilted_moments(law, theta)[0]

    clamped = False
    iterations = 0
    if slope(-THETA_BRACKET) <= 0.0:
        theta, clamped = -THETA_BRACKET, True
    elif slope(THETA_BRACKET) >= 0.0:
        theta, clamped = THETA_BRACKET, True
    else:
        theta, info = bisect(
            slope, -THETA_BRACKET, THETA_BRACKET, xtol=THETA_XTOL, full_output=True
        )
        iterations = info.iterations
        width = max(1e-6, abs(theta) * 1e-6)
        polished = minimize_scalar(
            lambda x: -objective(x),
            bounds=(theta - width, theta + width),
            method="bounded",
            options={"xatol": THETA_POLISH_XATOL},
        )
        iterations += int(polished.nfev)
        if polished.success and -polished.fun > objective(theta):
            theta = float(polished.x)
    if clamped:
        logger.warning("Rate maximizer for a=%g sits on the theta bracket", a)
    return RateResult(
        a=a,
        rate=max(objective(theta), 0.0),
        theta_star=float(theta),
        iterations=iterations,
        clamped=clamped,
    )


def _check_terms(terms: int) -> None:
    if isinstance(terms, bool) or int(terms) != terms or terms < 1:
        raise BoundInputError(f"Number of summands must be a positive integer, got {terms!r}")


def cramer_upper_bound(law: FiniteLaw, terms: int, threshold: float) -> BoundReport:
    """2 exp(-N inf_{x >= threshold} I(x)) bounding P(mean of N draws >= threshold)."""
    _check_terms(terms)
    inputs = {"N": int(terms), "threshold": threshold}
    if threshold <= law.mean():
        inputs["rate"] = 0.0
        return BoundReport("cramer_upper", BoundKind.UPPER, 2.0, inputs)
    result = rate_function(law, threshold)
    inputs["rate"] = result.rate
    if result.infinite:
        return BoundReport("cramer_upper", BoundKind.UPPER, 0.0, inputs, flag="outside_hull")
    value = 2.0 * math.exp(-terms * result.rate)
    return BoundReport("cramer_upper", BoundKind.UPPER, value, inputs)


def cramer_lower_bound(law: FiniteLaw, terms: int, a: float, epsilon: float) -> BoundReport:
    """Lower bound on P(|mean of N draws - a| < epsilon) through the tilted law.

    exp(-N (I(a) + epsilon |eta|)) * max(0, 1 - (sigma^2 / N + (mu - a)^2) / epsilon^2)
    where eta is the rate maximizer and (mu, sigma^2) the tilted mean and variance.
    """
    _check_terms(terms)
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise BoundInputError(f"epsilon must be positive, got {epsilon!r}")
    inputs = {"N": int(terms), "a": a, "epsilon": epsilon}
    if a - epsilon < law.support_min or a + epsilon > law.support_max:
        return BoundReport("cramer_lower", BoundKind.LOWER, 0.0, inputs, flag="outside_hull")
    result = rate_function(law, a)
    eta = result.theta_star
    mu, sigma_sq = tilted_moments(law, eta)
    spread = (sigma_sq / terms + (mu - a) ** 2) / epsilon**2
    inputs.update({"rate": result.rate, "eta": eta, "sigma_sq": sigma_sq})
    value = math.exp(-terms * (result.rate + epsilon * abs(eta))) * max(0.0, 1.0 - spread)
    return BoundReport("cramer_lower", BoundKind.LOWER, value, inputs)
