"""Capacity regimes, gap certificates and crossover points.

Everything here is derived from the closed forms in :mod:`mwrc.rates`: when
the relay-to-user link is the bottleneck and some strategy reaches it, the
capacity is pinned; otherwise the module reports how far each strategy can be
from the bound.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .rates import (
    LN2,
    ChannelConfig,
    PowerMode,
    epsilon_gap,
    log2_1p,
    rate_cdf,
    rate_cf,
    rate_fdf,
    rate_grid,
    upper_bound_prime,
)


class Strategy(str, enum.Enum):
    CDF = "CDF"
    CF = "CF"
    FDF = "FDF"


class Certificate(str, enum.Enum):
    """Why the capacity is known at an operating point."""

    DOWNLINK_ACHIEVED = "downlink-achieved"  # P0 below the general achievability threshold
    EQUAL_POWER_LOW_SNR = "equal-power-low-snr"  # P0 = P, L >= 3, P <= 1: CDF
    EQUAL_POWER_HIGH_SNR = "equal-power-high-snr"  # P0 = P, L >= 3, P > 1: FDF
    NONE = "none"


@dataclass(frozen=True)
class GapBound:
    strategy: Strategy
    bits: float
    source: str


@dataclass(frozen=True)
class RegimeReport:
    capacity_known: bool
    capacity_value: float | None
    achievers: frozenset[Strategy]
    certificate: Certificate
    gap_bounds: tuple[GapBound, ...] = ()


def fdf_threshold(cfg: ChannelConfig) -> float:
    """Largest relay power at which FDF's uplink still supports the downlink rate."""
    return (cfg.num_users * cfg.user_power - 1) / 2


def cdf_threshold(cfg: ChannelConfig) -> float:
    """Largest relay power at which CDF's uplink still supports the downlink rate."""
    L = cfg.num_users
    return (1 + L * cfg.user_power) ** ((L - 1) / L) - 1


def classify(cfg: ChannelConfig) -> RegimeReport:
    L, P, P0 = cfg.num_users, cfg.user_power, cfg.relay_power
    achievers = set()
    if P0 <= fdf_threshold(cfg):
        achievers.add(Strategy.FDF)
    if P0 <= cdf_threshold(cfg):
        achievers.add(Strategy.CDF)
    known = bool(achievers)

    if known and cfg.power_mode is PowerMode.EQUAL and L >= 3:
        cert = Certificate.EQUAL_POWER_LOW_SNR if P <= 1 else Certificate.EQUAL_POWER_HIGH_SNR
    elif known:
        cert = Certificate.DOWNLINK_ACHIEVED
    else:
        cert = Certificate.NONE

    return RegimeReport(
        capacity_known=known,
        capacity_value=upper_bound_prime(cfg) if known else None,
        achievers=frozenset(achievers),
        certificate=cert,
        gap_bounds=tuple(_gap_bounds(cfg)),
    )


def _gap_bounds(cfg: ChannelConfig) -> list[GapBound]:
    L, P = cfg.num_users, cfg.user_power
    out = []
    if cfg.power_mode is PowerMode.EQUAL:
        if L == 2:
            out.append(GapBound(Strategy.FDF, epsilon_gap(P), "fdf-two-user-concavity"))
        out.append(GapBound(Strategy.CF, cf_gap(cfg).gap, "cf-exact-rewrite"))
    elif cfg.power_mode is PowerMode.SCALING:
        out.append(GapBound(Strategy.FDF, 1.0 / (2 * (L - 1) * LN2), "fdf-log-concavity"))
        out.append(GapBound(Strategy.CF, cf_gap(cfg).gap, "cf-exact-rewrite"))
    return out


# -- boundary between the CDF and FDF capacity regions at P0 = P ------------


def alpha(L: int, P: float) -> float:
    return ((1 + L * P) / (1 + P)) ** (L - 1)


def beta(P: float) -> float:
    return 1 + P


def _crossing_sign(L: int, P: float) -> int:
    """Exact sign of alpha(L, P) - beta(P) at a float P.

    alpha - beta has the sign of (1 + L P)^(L-1) - (1 + P)^L; evaluated in
    rationals because near the root the two sides agree to more digits than
    a double holds once P* reaches ~1e6 (L = 8).
    """
    x = Fraction(P)
    g = (1 + L * x) ** (L - 1) - (1 + x) ** L
    return (g > 0) - (g < 0)


@dataclass(frozen=True)
class BoundaryAnalysis:
    num_users: int
    p_star: float
    alpha_fn: Callable[[float], float] = field(repr=False)
    beta_fn: Callable[[float], float] = field(repr=False)


def p_star(L: int, tol: float = 1e-10) -> float:
    """Positive crossing of alpha(L, P) and beta(P).

    For equal powers, CDF meets the cut-set bound exactly on (0, p_star].
    No closed form exists for general L: the root is bracketed (upper end
    grown by decades from 1e6) and bisected until the bracket is narrower than
    ``tol`` or the endpoints are adjacent floats.
    """
    if L < 3:
        raise ValueError("p_star is only defined for L >= 3")
    lo, hi = 1e-6, 1e6
    if _crossing_sign(L, lo) <= 0:
        raise RuntimeError("alpha does not dominate beta near zero")
    while _crossing_sign(L, hi) >= 0:
        lo, hi = hi, hi * 10
        if hi > 1e300:
            raise RuntimeError("failed to bracket p_star")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _crossing_sign(L, mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo if _crossing_sign(L, lo) == 0 else 0.5 * (lo + hi)


def boundary_analysis(L: int) -> BoundaryAnalysis:
    return BoundaryAnalysis(
        num_users=L,
        p_star=p_star(L),
        alpha_fn=lambda P: alpha(L, P),
        beta_fn=beta,
    )


# -- gaps ---------------------------------------------------------------------


def fdf_gap_scaling(cfg: ChannelConfig) -> float:
    """R_UB' - R_FDF with P0 = L*P.  Always below 1/(2(L-1) ln 2)."""
    if cfg.power_mode is not PowerMode.SCALING:
        raise ValueError("fdf_gap_scaling requires scaling power mode")
    return upper_bound_prime(cfg) - rate_fdf(cfg)


@dataclass(frozen=True)
class CdfGapDiagnostics:
    suboptimal: bool
    gap_lower_bound: float


def cdf_gap_diagnostics(cfg: ChannelConfig) -> CdfGapDiagnostics:
    """Where CDF strictly loses to capacity at P0 = P, and by at least how much."""
    L, P = cfg.num_users, cfg.user_power
    if cfg.power_mode is not PowerMode.EQUAL or L < 3:
        raise ValueError("cdf_gap_diagnostics requires equal power mode and L >= 3")
    threshold = L ** (L - 1) - 1
    lower = (math.log2(1 + P) - (L - 1) * math.log2(L)) / (2 * L * (L - 1))
    return CdfGapDiagnostics(suboptimal=P >= threshold, gap_lower_bound=max(0.0, lower))


def cdf_log_gap_ratio(cfg: ChannelConfig) -> float:
    """(R_UB' - R_CDF) / log2(P); tends to 1/(2L(L-1)) as P grows.

    Makes the logarithmic growth of CDF's loss measurable, in both the equal
    and scaling power modes.
    """
    if cfg.power_mode is PowerMode.INDEPENDENT:
        raise ValueError("cdf_log_gap_ratio requires equal or scaling power mode")
    if not cfg.user_power > 1:
        raise ValueError("ratio only meaningful for P > 1")
    return (upper_bound_prime(cfg) - rate_cdf(cfg)) / math.log2(cfg.user_power)


@dataclass(frozen=True)
class CfGap:
    gap: float
    asymptote: float


def cf_gap(cfg: ChannelConfig) -> CfGap:
    """R_UB' - R_CF through its exact closed-form rewrite, plus its P -> inf limit."""
    L, P = cfg.num_users, cfg.user_power
    c = 1.0 / (2 * (L - 1))
    if cfg.power_mode is PowerMode.EQUAL:
        gap = c * log2_1p(1.0 / ((L - 1) + 1.0 / P))
        asym = c * log2_1p(1.0 / (L - 1))
    elif cfg.power_mode is PowerMode.SCALING:
        # (1 + (2L-1)P) / (1 + (L-1)P) = 1 + L*P / (1 + (L-1)P)
        gap = c * log2_1p(L * P / (1 + (L - 1) * P))
        asym = c * log2_1p(L / (L - 1))
    else:
        raise ValueError("cf_gap has no closed form in independent power mode")
    return CfGap(gap=gap, asymptote=asym)


def fdf_cf_crossover(L: int) -> float:
    """Relay SNR above which FDF beats CF when P0 = L*P."""
    if L < 2:
        raise ValueError("L must be >= 2")
    return (L - 1 + math.sqrt((L - 1) ** 2 + 4 * L)) / (2 * L)


# -- CF vs best decode-forward scan ------------------------------------------


@dataclass(frozen=True)
class ConjectureScan:
    counterexamples: list[tuple[int, float]]
    min_margin: float
    argmin: tuple[int, float]
    points: int


def conjecture_scan(L_range: Iterable[int], P_grid: Sequence[float]) -> ConjectureScan:
    """Check R_CF < max(R_CDF, R_FDF) at every (L, P) with P0 = L*P.

    Counterexamples are returned, not raised; results are ordered by (L, P).
    """
    P = np.sort(np.asarray(P_grid, dtype=float))
    if P.size == 0:
        raise ValueError("empty power grid")
    found: list[tuple[int, float]] = []
    best = (math.inf, (0, math.nan))
    n = 0
    for L in sorted(set(int(x) for x in L_range)):
        g = rate_grid(L, P, L * P)
        margin = np.maximum(g[2], g[4]) - g[3]
        n += P.size
        bad = np.flatnonzero(margin <= 0)
        found.extend((L, float(P[i])) for i in bad)
        i = int(np.argmin(margin))
        if margin[i] < best[0]:
            best = (float(margin[i]), (L, float(P[i])))
    if n == 0:
        raise ValueError("empty user range")
    return ConjectureScan(counterexamples=found, min_margin=best[0], argmin=best[1], points=n)


def strategy_rates(cfg: ChannelConfig) -> dict[Strategy, float]:
    return {Strategy.CDF: rate_cdf(cfg), Strategy.CF: rate_cf(cfg), Strategy.FDF: rate_fdf(cfg)}
