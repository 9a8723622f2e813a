"""Tests for the rate function and the Cramer bounds."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csbm_lab.exceptions import BoundInputError
from csbm_lab.ldp import (
    cramer_lower_bound,
    cramer_upper_bound,
    law_log_mgf,
    pair_diff_distribution,
    rate_function,
    theta_half_exponent,
)
from csbm_lab.model import make_params
from csbm_lab.oracle import exact_sum_distribution
from csbm_lab.types import BoundKind, FiniteLaw

LAW_PARAMS = [
    (40, (9.0,), (1.0,)),
    (40, (2.0, 0.5), (0.5, 1.5)),
    (100, (6.0, 1.0), (1.0, 4.0)),
]


def _law(index: int) -> FiniteLaw:
    n, alphas, betas = LAW_PARAMS[index]
    return pair_diff_distribution(make_params(n, alphas, betas))


class TestRateFunction:
    def test_zero_at_mean(self, strong_params):
        law = pair_diff_distribution(strong_params)
        result = rate_function(law, law.mean())
        assert 0.0 <= result.rate <= 1e-10
        assert result.theta_star == pytest.approx(0.0, abs=1e-6)

    def test_positive_away_from_mean(self, strong_params):
        law = pair_diff_distribution(strong_params)
        assert rate_function(law, 0.0).rate > 0

    def test_increasing_above_mean(self, two_color_params):
        law = pair_diff_distribution(two_color_params)
        points = np.linspace(law.mean(), law.support_max, 8)[1:-1]
        rates = [rate_function(law, float(a)).rate for a in points]
        assert rates == sorted(rates)

    def test_outside_hull_is_infinite(self, strong_params):
        law = pair_diff_distribution(strong_params)
        result = rate_function(law, law.support_max + 1.0)
        assert result.infinite
        assert result.to_dict()["rate"] is None
        assert result.to_dict()["theta_star"] is None

    def test_hull_edge(self, strong_params):
        law = pair_diff_distribution(strong_params)
        top = rate_function(law, law.support_max)
        assert top.boundary
        assert top.theta_star == math.inf
        assert top.rate == pytest.approx(-math.log(law.probs[-1]))
        bottom = rate_function(law, law.support_min)
        assert bottom.theta_star == -math.inf
        assert bottom.rate == pytest.approx(-math.log(law.probs[0]))

    def test_point_mass_law(self):
        law = FiniteLaw((0.0,), (1.0,))
        assert rate_function(law, 0.0).rate == 0.0
        assert rate_function(law, 0.5).infinite

    def test_non_finite_point(self, strong_params):
        with pytest.raises(BoundInputError):
            rate_function(pair_diff_distribution(strong_params), math.nan)

    def test_clamped_maximizer_warns(self, caplog):
        law = FiniteLaw((0.0, 1.0), (1.0 - 1e-300, 1e-300))
        with caplog.at_level(logging.WARNING, logger="csbm_lab.ldp.rate"):
            result = rate_function(law, 0.999999)
        assert result.clamped
        assert "bracket" in caplog.text

    def test_reports_iterations(self, strong_params):
        law = pair_diff_distribution(strong_params)
        assert rate_function(law, 0.5).iterations > 0


@pytest.mark.property
class TestFenchelInequality:
    @given(
        index=st.integers(0, len(LAW_PARAMS) - 1),
        frac=st.floats(0.02, 0.98),
        theta=st.floats(-3.0, 3.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_rate_dominates_every_linear_minorant(self, index, frac, theta):
        law = _law(index)
        a = law.support_min + frac * (law.support_max - law.support_min)
        result = rate_function(law, a)
        assert result.rate >= theta * a - law_log_mgf(law, theta) - 1e-9


class TestCramerUpper:
    def test_trivial_below_mean(self, strong_params):
        law = pair_diff_distribution(strong_params)
        report = cramer_upper_bound(law, 10, law.mean() - 0.1)
        assert report.value == 2.0
        assert report.vacuous
        assert report.kind is BoundKind.UPPER

    def test_outside_hull(self, strong_params):
        law = pair_diff_distribution(strong_params)
        report = cramer_upper_bound(law, 10, law.support_max + 0.1)
        assert report.value == 0.0
        assert report.flag == "outside_hull"

    def test_formula(self, strong_params):
        law = pair_diff_distribution(strong_params)
        report = cramer_upper_bound(law, 12, 0.5)
        assert report.value == pytest.approx(2 * math.exp(-12 * rate_function(law, 0.5).rate))
        assert report.inputs["N"] == 12

    @pytest.mark.parametrize("terms", [0, -3, 2.5, True])
    def test_bad_terms(self, strong_params, terms):
        with pytest.raises(BoundInputError):
            cramer_upper_bound(pair_diff_distribution(strong_params), terms, 0.0)


class TestCramerLower:
    def test_kind_and_range(self, strong_params):
        law = pair_diff_distribution(strong_params)
        report = cramer_lower_bound(law, 20, 0.3, 0.2)
        assert report.kind is BoundKind.LOWER
        assert 0.0 <= report.value <= 1.0

    def test_window_outside_hull(self, strong_params):
        law = pair_diff_distribution(strong_params)
        report = cramer_lower_bound(law, 20, law.support_max - 0.01, 0.1)
        assert report.value == 0.0
        assert report.flag == "outside_hull"
        assert report.vacuous

    @pytest.mark.parametrize("epsilon", [0.0, -0.1, math.inf])
    def test_bad_epsilon(self, strong_params, epsilon):
        with pytest.raises(BoundInputError):
            cramer_lower_bound(pair_diff_distribution(strong_params), 10, 0.0, epsilon)


@pytest.mark.property
class TestBoundDominance:
    """Cramer bounds never cross the exact law of the sum."""

    @given(
        index=st.integers(0, len(LAW_PARAMS) - 1),
        terms=st.integers(1, 40),
        frac=st.floats(0.0, 0.98),
    )
    @settings(max_examples=60, deadline=None)
    def test_upper_bound_dominates_exact_tail(self, index, terms, frac):
        law = _law(index)
        threshold = law.mean() + frac * (law.support_max - law.mean())
        exact = exact_sum_distribution(law, terms)
        bound = cramer_upper_bound(law, terms, threshold)
        assert bound.value >= exact.tail(terms * threshold) - 1e-10

    @given(
        index=st.integers(0, len(LAW_PARAMS) - 1),
        terms=st.integers(1, 40),
        frac=st.floats(-0.9, 0.9),
        width=st.floats(0.02, 1.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_lower_bound_is_dominated(self, index, terms, frac, width):
        law = _law(index)
        half_range = (law.support_max - law.support_min) / 2
        a = law.mean() + frac * half_range
        epsilon = width * half_range
        exact = exact_sum_distribution(law, terms)
        bound = cramer_lower_bound(law, terms, a, epsilon)
        window = exact.interval_probability(terms * (a - epsilon), terms * (a + epsilon))
        assert bound.value <= window + 1e-10


class TestHalfPoint:
    def test_maximizer_at_half_for_mirrored_rates(self):
        params = make_params(100, [3.0, 1.0], [1.0, 3.0])
        result = rate_function(pair_diff_distribution(params), 0.0)
        assert result.theta_star == pytest.approx(0.5, abs=1e-6)

    def test_rate_at_zero_dominates_half_point_exponent(self):
        params = make_params(100, [9.0], [1.0])
        rate = rate_function(pair_diff_distribution(params), 0.0).rate
        assert rate >= theta_half_exponent(params) - 1e-12
