"""Universal decoding for finite metric families via the generalized minimum error test."""

from ._util import (
    DEFAULT_CAP, OFF_SUPPORT, CheckReport, EnumerationCapError, VerificationError, to_fraction,
)
from .channels import DMC, FiniteStateChannel, bsc, channel_sample, gilbert_elliott, identity_channel
from .families import (
    build_degenerate_fsm, build_dmc_family, build_fsm_family, degenerate_fsm_family, fsm_count_bound,
    markov_order_limit,
)
from .metrics import (
    ChannelLikelihood, ConstantMetric, FiniteStateMetric, MarkovWindowMetric, MetricFamily, TableMetric,
    hamming_metric, markov_as_fsm, markov_state_count, metric_eval,
)
from .pairwise import (
    ProbTable, canonical_metric, inverse_expectation, normality_statistic, pairwise_error_exact,
    pairwise_error_mc, pem_table,
)
from .priors import ExplicitTable, IIDPrior, UniformOverSet, prior_chi, prior_mass, uniform_prior
from .ratefn import (
    RateCertificate, RateFunction, asymptotic_condition_check, canonical_rate_function,
    certify_rate_function, certify_tightness, check_order_preservation, check_upper_bound_property,
    expectation_bound, likelihood_ratio_rate_function, omega,
)
from .sequences import Alphabet, all_sequences, rank, unrank
from .simulator import (
    Codebook, avg_error_exact, avg_error_mc, codebook_size, decode, dominance_check, draw_codebook,
    exponent_compare, family_end_to_end_check, sandwich_check, union_clip_bound,
)
from .universal import (
    GmetTable, RedundancyReport, approx_conditions_check, gmet_table, gmet_value, merged_family_bound,
    redundancy, theorem1_check, tie_class, u1_table, u1_value, u2_table, u2_tightness_check, u2_value,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CAP", "OFF_SUPPORT", "CheckReport", "EnumerationCapError", "VerificationError",
    "to_fraction", "DMC", "FiniteStateChannel", "bsc", "channel_sample", "gilbert_elliott",
    "identity_channel", "build_degenerate_fsm", "build_dmc_family", "build_fsm_family",
    "degenerate_fsm_family", "fsm_count_bound", "markov_order_limit", "ChannelLikelihood",
    "ConstantMetric", "FiniteStateMetric", "MarkovWindowMetric", "MetricFamily", "TableMetric",
    "hamming_metric", "markov_as_fsm", "markov_state_count", "metric_eval", "ProbTable",
    "canonical_metric", "inverse_expectation", "normality_statistic", "pairwise_error_exact",
    "pairwise_error_mc", "pem_table", "ExplicitTable", "IIDPrior", "UniformOverSet", "prior_chi",
    "prior_mass", "uniform_prior", "RateCertificate", "RateFunction", "asymptotic_condition_check",
    "canonical_rate_function", "certify_rate_function", "certify_tightness",
    "check_order_preservation", "check_upper_bound_property", "expectation_bound",
    "likelihood_ratio_rate_function", "omega", "Alphabet", "all_sequences", "rank", "unrank",
    "Codebook", "avg_error_exact", "avg_error_mc", "codebook_size", "decode", "dominance_check",
    "draw_codebook", "exponent_compare", "family_end_to_end_check", "sandwich_check",
    "union_clip_bound", "GmetTable", "RedundancyReport", "approx_conditions_check", "gmet_table",
    "gmet_value", "merged_family_bound", "redundancy", "theorem1_check", "tie_class", "u1_table",
    "u1_value", "u2_table", "u2_tightness_check", "u2_value",
]
