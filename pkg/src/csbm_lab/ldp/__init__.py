"""Large-deviation machinery: the pair-difference law, its rate function and the bounds."""

from csbm_lab.ldp.bounds import (
    bounds_table,
    chebyshev_tail,
    converse_chebyshev_bound,
    converse_condition_level,
    converse_cramer_bound,
    converse_threshold,
    delta_complement_bound,
    f_h_amplification,
    ml_failure_stirling_bound,
    ml_failure_union_bound,
    pnk_theoretical_bound,
    swap_pair_count,
    union_bound_onset,
    vertex_set_size,
)
from csbm_lab.ldp.law import (
    closed_form_log_mgf,
    cross_weight_law,
    law_log_mgf,
    log_mgf,
    log_mgf_derivatives,
    mgf_coefficient_derivatives,
    mgf_coefficients,
    pair_diff_atoms,
    pair_diff_distribution,
    theta_half_exponent,
    tilted_moments,
    within_weight_law,
)
from csbm_lab.ldp.rate import cramer_lower_bound, cramer_upper_bound, rate_function

__all__ = [
    "bounds_table",
    "chebyshev_tail",
    "closed_form_log_mgf",
    "converse_chebyshev_bound",
    "converse_condition_level",
    "converse_cramer_bound",
    "converse_threshold",
    "cramer_lower_bound",
    "cramer_upper_bound",
    "cross_weight_law",
    "delta_complement_bound",
    "f_h_amplification",
    "law_log_mgf",
    "log_mgf",
    "log_mgf_derivatives",
    "mgf_coefficient_derivatives",
    "mgf_coefficients",
    "ml_failure_stirling_bound",
    "ml_failure_union_bound",
    "pair_diff_atoms",
    "pair_diff_distribution",
    "pnk_theoretical_bound",
    "rate_function",
    "swap_pair_count",
    "theta_half_exponent",
    "tilted_moments",
    "union_bound_onset",
    "vertex_set_size",
    "within_weight_law",
]
