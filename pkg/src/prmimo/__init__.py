"""Capacity-oriented radiation pattern design for reconfigurable MIMO.

Generates geometric multi-path channels, designs a nonnegative transmit
pattern sampling matrix (sequential correlation modification followed by
closed-form power allocation), and evaluates channel capacity against
physical-channel and ideal-channel baselines via seeded Monte Carlo
campaigns.
"""

from .cfpa import (
    PowerAllocation,
    allocate_power,
    cfpa_weights,
    design_pattern,
    finalize_pattern,
    power_factors,
    power_scaling,
)
from .channel import (
    ArrayGeometry,
    ClusterProfile,
    PathSet,
    assemble_physical,
    condition_profile,
    sample_cluster_paths,
    steering_matrices,
    steering_matrix,
    steering_vector,
)
from .errors import (
    CampaignError,
    DegenerateChannelError,
    InvalidInputError,
    NumericalFailureError,
    PrMimoError,
)
from .montecarlo import (
    CapacityCurve,
    Scenario,
    draw_paths,
    ideal_capacity,
    run_campaign,
    run_trial,
    trial_rng,
)
from .numerics import EigenPair, eig_sym, logdet_capacity_kernel, singular_values
from .pattern import (
    PatternMatrix,
    SubchannelGram,
    assemble_pattern_channel,
    capacity,
    correlation_indicator,
    modified_subchannels,
    subchannel_gram,
)
from .sof import (
    SofState,
    b_vector,
    quadratic_matrix,
    receiver_correlation,
    run_sof,
    solve_modification_vector,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "CampaignError",
    "CapacityCurve",
    "ClusterProfile",
    "DegenerateChannelError",
    "EigenPair",
    "InvalidInputError",
    "NumericalFailureError",
    "PathSet",
    "PatternMatrix",
    "PowerAllocation",
    "PrMimoError",
    "Scenario",
    "SofState",
    "SubchannelGram",
    "allocate_power",
    "assemble_pattern_channel",
    "assemble_physical",
    "b_vector",
    "capacity",
    "cfpa_weights",
    "condition_profile",
    "correlation_indicator",
    "design_pattern",
    "draw_paths",
    "eig_sym",
    "finalize_pattern",
    "ideal_capacity",
    "logdet_capacity_kernel",
    "modified_subchannels",
    "power_factors",
    "power_scaling",
    "quadratic_matrix",
    "receiver_correlation",
    "run_campaign",
    "run_sof",
    "run_trial",
    "sample_cluster_paths",
    "singular_values",
    "solve_modification_vector",
    "steering_matrices",
    "steering_matrix",
    "steering_vector",
    "subchannel_gram",
    "trial_rng",
]
