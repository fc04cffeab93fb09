"""Equal-rate bounds and functional-decode-forward simulation for the AWGN MWRC."""

from .rates import (
    ChannelConfig,
    PowerMode,
    RateBundle,
    epsilon_gap,
    fdf_pairwise_rate,
    rate_bundle,
    rate_cdf,
    rate_cf,
    rate_fdf,
    upper_bound,
    upper_bound_prime,
)
from .regimes import RegimeReport, classify, p_star
from .schedule import Schedule, build_schedule, omitted_pair, power_ledger
from .protocol import MessageTuple, SimTranscript, run_window

__version__ = "0.1.0"
