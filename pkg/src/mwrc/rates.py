"""Closed-form equal-rate bounds for the symmetric L-user AWGN multiway relay channel.

All noise variances are fixed to one, so ``user_power`` is the SNR seen at the
relay and ``relay_power`` the SNR seen at every user.  Rates are in bits per
channel use.

Three relaying strategies are covered:

* complete-decode-forward (CDF): relay decodes every message,
* compress-forward (CF): relay quantises and forwards,
* functional-decode-forward (FDF): relay decodes pairwise lattice sums.

Amplify-forward is deliberately absent; it is dominated by compress-forward.
The returned values are suprema: a strategy achieves every equal rate strictly
below the number reported here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


class PowerMode(str, enum.Enum):
    INDEPENDENT = "independent"
    EQUAL = "equal"  # relay power == user power
    SCALING = "scaling"  # relay power == L * user power


def log2_1p(x: float) -> float:
    """log2(1 + x), accurate for small x."""
    return math.log1p(x) / LN2


@dataclass(frozen=True)
class ChannelConfig:
    """Network parameters of a symmetric MWRC operating point.

    Use :meth:`equal`, :meth:`scaling` or :meth:`independent` rather than the
    raw constructor; the raw constructor validates but does not derive the
    relay power.
    """

    num_users: int
    user_power: float
    relay_power: float
    power_mode: PowerMode = PowerMode.INDEPENDENT

    def __post_init__(self) -> None:
        L = self.num_users
        if isinstance(L, bool) or not isinstance(L, (int, np.integer)):
            raise TypeError(f"num_users must be an integer, got {L!r}")
        if L < 2:
            raise ValueError("L must be >= 2")
        for name in ("user_power", "relay_power"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        mode = PowerMode(self.power_mode)
        object.__setattr__(self, "power_mode", mode)
        object.__setattr__(self, "num_users", int(L))
        if mode is PowerMode.EQUAL and self.relay_power != self.user_power:
            raise ValueError("equal power mode requires relay_power == user_power")
        if mode is PowerMode.SCALING and self.relay_power != L * self.user_power:
            raise ValueError("scaling power mode requires relay_power == L * user_power")

    @classmethod
    def equal(cls, num_users: int, power: float) -> ChannelConfig:
        return cls(num_users, power, power, PowerMode.EQUAL)

    @classmethod
    def scaling(cls, num_users: int, power: float) -> ChannelConfig:
        return cls(num_users, power, num_users * power, PowerMode.SCALING)

    @classmethod
    def independent(cls, num_users: int, power: float, relay_power: float) -> ChannelConfig:
        return cls(num_users, power, relay_power, PowerMode.INDEPENDENT)

    @classmethod
    def from_mode(
        cls, num_users: int, power: float, mode: PowerMode | str, relay_power: float | None = None
    ) -> ChannelConfig:
        mode = PowerMode(mode)
        if mode is PowerMode.EQUAL:
            return cls.equal(num_users, power)
        if mode is PowerMode.SCALING:
            return cls.scaling(num_users, power)
        if relay_power is None:
            raise ValueError("independent mode needs an explicit relay power")
        return cls.independent(num_users, power, relay_power)


@dataclass(frozen=True)
class RateBundle:
    r_ub: float
    r_ub_prime: float
    r_cdf: float
    r_cf: float
    r_fdf: float

    def as_row(self) -> tuple[float, float, float, float, float]:
        return (self.r_ub, self.r_ub_prime, self.r_cdf, self.r_cf, self.r_fdf)


def uplink_cut_term(num_users_in_cut: int, P: float) -> float:
    """Cut-set term for a cut isolating ``num_users_in_cut`` users from relay + rest.

    The users in the cut beamform coherently, hence the squared cardinality.
    """
    k = num_users_in_cut
    return log2_1p(k * k * P) / (2 * k)


def downlink_term(cfg: ChannelConfig) -> float:
    """Relay broadcast limit: L-1 messages through one point-to-point link."""
    return log2_1p(cfg.relay_power) / (2 * (cfg.num_users - 1))


def upper_bound(cfg: ChannelConfig) -> float:
    """Cut-set upper bound on the equal-rate capacity."""
    L, P = cfg.num_users, cfg.user_power
    uplink = min(uplink_cut_term(k, P) for k in range(1, L))
    return min(uplink, downlink_term(cfg))


def upper_bound_prime(cfg: ChannelConfig) -> float:
    """The downlink cut alone.  Never smaller than :func:`upper_bound`."""
    return downlink_term(cfg)


def rate_cdf(cfg: ChannelConfig) -> float:
    L, P = cfg.num_users, cfg.user_power
    uplink = log2_1p(L * P) / (2 * L)
    return min(uplink, downlink_term(cfg))


def rate_cf(cfg: ChannelConfig) -> float:
    L, P, P0 = cfg.num_users, cfg.user_power, cfg.relay_power
    snr = (L - 1) * P * P0 / (1 + (L - 1) * P + P0)
    return log2_1p(snr) / (2 * (L - 1))


def fdf_pairwise_rate(active_power: float) -> float:
    """Rate at which a receiver decodes the modulo-lattice sum of two codewords.

    Both senders transmit at ``active_power`` over unit-variance noise.
    Clamped at zero: below ``active_power = 1/2`` no positive rate is possible.
    """
    if not active_power > 0:
        raise ValueError("active_power must be positive")
    return max(0.5 * math.log2(0.5 + active_power), 0.0)


def fdf_uplink_term(cfg: ChannelConfig) -> float:
    """Per-message uplink rate of FDF.

    Each pair transmits at L*P/2 during its block (keeping average power P
    under the rotated schedule) and each message spans L-1 blocks.
    """
    L = cfg.num_users
    return fdf_pairwise_rate(L * cfg.user_power / 2) / (L - 1)


def rate_fdf(cfg: ChannelConfig) -> float:
    # clamp first, then min with the downlink
    return min(fdf_uplink_term(cfg), downlink_term(cfg))


def epsilon_gap(P: float) -> float:
    """Worst-case gap (bits) between the two-user FDF rate and capacity at P0 = P."""
    if not P > 0:
        raise ValueError("P must be positive")
    return min(0.5, 1.0 / (2 * (2 * P + 1) * LN2))


def rate_bundle(cfg: ChannelConfig) -> RateBundle:
    return RateBundle(
        r_ub=upper_bound(cfg),
        r_ub_prime=upper_bound_prime(cfg),
        r_cdf=rate_cdf(cfg),
        r_cf=rate_cf(cfg),
        r_fdf=rate_fdf(cfg),
    )


def db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def rate_grid(num_users: int, P, P0) -> np.ndarray:
    """Vectorised :func:`rate_bundle` over arrays of user/relay powers.

    Returns an array of shape ``(5, n)`` with rows UB, UB', CDF, CF, FDF.
    """
    L = int(num_users)
    if L < 2:
        raise ValueError("L must be >= 2")
    P = np.atleast_1d(np.asarray(P, dtype=float))
    P0 = np.broadcast_to(np.asarray(P0, dtype=float), P.shape)
    if np.any(~(P > 0)) or np.any(~(P0 > 0)) or not np.all(np.isfinite(P) & np.isfinite(P0)):
        raise ValueError("powers must be positive and finite")

    down = np.log1p(P0) / LN2 / (2 * (L - 1))
    cuts = np.stack([np.log1p(k * k * P) / LN2 / (2 * k) for k in range(1, L)])
    ub = np.minimum(cuts.min(axis=0), down)
    cdf = np.minimum(np.log1p(L * P) / LN2 / (2 * L), down)
    cf = np.log1p((L - 1) * P * P0 / (1 + (L - 1) * P + P0)) / LN2 / (2 * (L - 1))
    fdf_up = np.maximum(0.5 * np.log2(0.5 + L * P / 2), 0.0) / (L - 1)
    fdf = np.minimum(fdf_up, down)
    return np.stack([ub, down, cdf, cf, fdf])
