"""Rate statistics: stability ratio, Jain fairness, blockage rate gain and MC-vs-SA comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def jain_index(rates) -> float:
    """``(sum R)^2 / (N sum R^2)``; ``nan`` when every rate is zero."""
    r = np.asarray(rates, dtype=float).ravel()
    if r.size == 0:
        raise ValueError("jain_index needs at least one rate")
    if np.any(r < 0):
        raise ValueError("rates must be >= 0")
    sq = float(np.sum(r * r))
    if sq == 0.0:
        return math.nan
    return float(np.sum(r)) ** 2 / (r.size * sq)


@dataclass(frozen=True)
class StabilityReport:
    mean_rate: float
    std_rate: float
    r_var: float
    defined: bool


def stability(samples) -> StabilityReport:
    """Population standard deviation over mean of the rate samples."""
    x = np.asarray(samples, dtype=float).ravel()
    x = x[~np.isnan(x)]
    if x.size == 0:
        raise ValueError("stability needs a nonempty trace")
    mean = float(np.mean(x))
    std = float(np.std(x))
    if mean <= 0.0:
        return StabilityReport(mean, std, math.nan, False)
    return StabilityReport(mean, std, std / mean, True)


@dataclass(frozen=True)
class RateGainReport:
    gain: float
    r_wb: float
    r_ob: float
    r: float
    R: float
    t_b: float
    t_rt: float
    empirical_gain: float | None = None


def theoretical_rate_gain(r: float, R: float, t_b: float, t_rt: float) -> RateGainReport:
    """Average rate with a backup beam over the rate without one, across a sweep window.

    A blockage of length ``t_b`` hits a window of length ``t_rt``; with a
    backup the UE gets ``r`` instead of nothing during the blockage.
    """
    if t_b >= t_rt:
        raise ValueError("t_b must be shorter than t_rt")
    if t_b < 0 or r < 0 or R <= 0:
        raise ValueError("need t_b >= 0, r >= 0, R > 0")
    r_wb = (R * (t_rt - t_b) + r * t_b) / t_rt
    r_ob = R * (t_rt - t_b) / t_rt
    gain = 1.0 + (r / R) * t_b / (t_rt - t_b)
    return RateGainReport(gain, r_wb, r_ob, r, R, t_b, t_rt)


@dataclass(frozen=True)
class ComparisonReport:
    seeds: tuple[int, ...]
    rate_delta: np.ndarray     # MC - SA per seed
    r_var_delta: np.ndarray    # MC - SA per seed
    mean_rate_mc: float
    mean_rate_sa: float
    r_var_mc: float
    r_var_sa: float

    @property
    def rate_gap(self) -> float:
        """Relative mean-rate advantage of MC over SA."""
        if self.mean_rate_sa == 0:
            return math.inf if self.mean_rate_mc > 0 else 0.0
        return (self.mean_rate_mc - self.mean_rate_sa) / self.mean_rate_sa

    @property
    def rate_sign(self) -> dict[str, int]:
        d = self.rate_delta
        return {"positive": int(np.sum(d > 0)), "zero": int(np.sum(d == 0)), "negative": int(np.sum(d < 0))}

    @property
    def r_var_sign(self) -> dict[str, int]:
        d = self.r_var_delta[~np.isnan(self.r_var_delta)]
        return {"positive": int(np.sum(d > 0)), "zero": int(np.sum(d == 0)), "negative": int(np.sum(d < 0))}


def compare_mc_sa(aggregate_mc, aggregate_sa) -> ComparisonReport:
    """Paired per-seed comparison of two aggregates that differ only in mode."""
    if tuple(aggregate_mc.seeds) != tuple(aggregate_sa.seeds):
        raise ValueError("aggregates were run on different seed sets")
    rate = np.array([a.mean_rate - b.mean_rate for a, b in zip(aggregate_mc.runs, aggregate_sa.runs)])
    rvar = np.array([a.r_var - b.r_var for a, b in zip(aggregate_mc.runs, aggregate_sa.runs)])
    return ComparisonReport(tuple(aggregate_mc.seeds), rate, rvar,
                            aggregate_mc.pooled_mean_rate, aggregate_sa.pooled_mean_rate,
                            aggregate_mc.pooled_r_var, aggregate_sa.pooled_r_var)


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error of the finite values (``nan`` when none)."""
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return math.nan, math.nan
    if x.size == 1:
        return float(x[0]), 0.0
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size))
