"""Achievable rates, cut-set bounds, capacity scaling and
diversity-multiplexing tradeoff for the MIMO two-way relay channel."""

__version__ = "0.1.0"

from .af import (
    BeamformerSolution,
    Direction,
    RateRegion,
    RegionSample,
    af_rate_region,
    af_sinr,
    rate_profile_solve,
    relay_power,
    solve_min_power,
)
from .bounds import CutSetBound, broadcast_bound, cutset_region, mac_bound, waterfill
from .channel import (
    ChannelSet,
    DirectChannelSet,
    NetworkDims,
    PowerConfig,
    PowerConstraint,
    draw_channels,
    draw_direct_channels,
    dump_channel_set,
    load_channel_set,
)
from .dcm import asymptotic_constants, dcm_gains, dcm_normalization, dcm_rates, dcm_weights
from .dmt import (
    DmtDims,
    Duplex,
    LQuantities,
    OutageCurve,
    Strategy,
    cf_rates_full,
    cf_rates_half,
    compression_noise_full,
    compression_noise_half,
    dmt_lower_half,
    dmt_upper_full,
    dmt_upper_half,
    fit_outage_exponent,
    l_quantities,
    outage_curve,
)
from .harness import (
    ExperimentConfig,
    ResultTable,
    config_from_dict,
    load_config,
    read_table,
    run_dmt,
    run_experiment,
    run_rate_region,
    run_scaling,
    write_table,
)
from .linalg import (
    hermitian_eigvals,
    hermitian_logdet2,
    least_singular_direction,
    solve_hermitian,
)

__all__ = [
    "__version__",
    "BeamformerSolution",
    "ChannelSet",
    "CutSetBound",
    "Direction",
    "DirectChannelSet",
    "DmtDims",
    "Duplex",
    "ExperimentConfig",
    "LQuantities",
    "NetworkDims",
    "OutageCurve",
    "PowerConfig",
    "PowerConstraint",
    "RateRegion",
    "RegionSample",
    "ResultTable",
    "Strategy",
    "af_rate_region",
    "af_sinr",
    "asymptotic_constants",
    "broadcast_bound",
    "cf_rates_full",
    "cf_rates_half",
    "compression_noise_full",
    "compression_noise_half",
    "config_from_dict",
    "cutset_region",
    "dcm_gains",
    "dcm_normalization",
    "dcm_rates",
    "dcm_weights",
    "dmt_lower_half",
    "dmt_upper_full",
    "dmt_upper_half",
    "draw_channels",
    "draw_direct_channels",
    "dump_channel_set",
    "fit_outage_exponent",
    "hermitian_eigvals",
    "hermitian_logdet2",
    "l_quantities",
    "least_singular_direction",
    "load_channel_set",
    "load_config",
    "mac_bound",
    "outage_curve",
    "rate_profile_solve",
    "read_table",
    "relay_power",
    "run_dmt",
    "run_experiment",
    "run_rate_region",
    "run_scaling",
    "solve_hermitian",
    "solve_min_power",
    "waterfill",
    "write_table",
]
