"""Universal compression with side information from a correlated source."""

from .correlation import CorrelatedPair, f_t_exact, mean_square_distance, sample_pair, sample_theta2
from .mi_oracle import MIResult, mi_conditional, mi_gap_identity_check, mi_side_information, mi_unconditional
from .netcomp import BitHopReport, Network, fig5_network, gain_bh
from .redundancy import (
    RedundancyQuery,
    Strategy,
    gain,
    gain_limit,
    maximin_redundancy,
    memory_threshold,
    one_to_one_lower_bound,
    side_info_redundancy,
)
from .source_models import ParamVector, SourceClass, SourceKind, entropy, jeffreys_sample, mle, sample_string

__version__ = "0.1.0"

__all__ = [
    "BitHopReport",
    "CorrelatedPair",
    "MIResult",
    "Network",
    "ParamVector",
    "RedundancyQuery",
    "SourceClass",
    "SourceKind",
    "Strategy",
    "entropy",
    "f_t_exact",
    "fig5_network",
    "gain",
    "gain_bh",
    "gain_limit",
    "jeffreys_sample",
    "maximin_redundancy",
    "mean_square_distance",
    "memory_threshold",
    "mi_conditional",
    "mi_gap_identity_check",
    "mi_side_information",
    "mi_unconditional",
    "mle",
    "one_to_one_lower_bound",
    "sample_pair",
    "sample_string",
    "sample_theta2",
    "side_info_redundancy",
]
