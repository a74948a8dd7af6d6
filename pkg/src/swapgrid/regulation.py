"""Frequency-regulation market model.

Idle charged batteries can back a regulation capacity bid: chargers modulate
around a setpoint to track the grid operator's normalized AGC signal.  A bid
is only worth making if the tracked (fulfilled) mileage stays above a fraction
theta of the requested mileage, which pins down the minimum fraction eta_z of
the bid capacity that must be kept as energy headroom in each period.  The
headroom available comes from charged stock net of batteries tied up in
transit, whose short-run fluctuation is modeled as a scaled Bernoulli (a
truckload is either on the road or not).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import HOURS_PER_DAY, Decision, DemandProfile, SystemParams
from .geometry import one_way_travel_time
from .normal import inv_norm_cdf

__all__ = [
    "requested_mileage",
    "fulfilled_mileage",
    "min_capacity_fraction",
    "AgcTrace",
    "RegulationMarket",
    "in_transit_moments",
    "in_transit_moments_grid",
    "capacity_bid_centralized",
    "capacity_bid_decentralized",
    "average_capacity_centralized",
    "average_capacity_decentralized",
]

# Floor used in place of eta when a period's signal is flat (zero requested
# mileage).  Such periods are flagged and earn no income.
ETA_FLOOR = 1e-6


def requested_mileage(signal) -> float:
    """Total movement of a normalized AGC signal within one period."""
    signal = np.asarray(signal, dtype=float)
    if signal.size < 2:
        raise ValueError("mileage needs at least 2 signal samples")
    return float(np.sum(np.abs(np.diff(signal))))


def fulfilled_mileage(signal, eta: float) -> float:
    """Movement a resource with headroom fraction eta can track.

    The response saturates at +-eta, so each step contributes the overlap
    of the signal's move with the [-eta, eta] band.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    signal = np.asarray(signal, dtype=float)
    if signal.size < 2:
        raise ValueError("mileage needs at least 2 signal samples")
    return float(np.sum(np.abs(np.diff(np.clip(signal, -eta, eta)))))


def min_capacity_fraction(signal, theta: float, tol: float = 1e-6) -> float:
    """Smallest eta in [0, 1] whose fulfilled mileage reaches theta of the
    requested mileage.  Fulfilled mileage is nondecreasing in eta, so a
    bisection suffices.  A flat signal returns 0."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta!r}")
    target = theta * requested_mileage(signal)
    if target <= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fulfilled_mileage(signal, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class AgcTrace:
    """Normalized AGC signal samples grouped by period of day."""

    periods: tuple

    def __post_init__(self):
        clean = []
        for z, samples in enumerate(self.periods):
            arr = np.asarray(samples, dtype=float)
            if arr.size < 2:
                raise ValueError(f"period {z} needs at least 2 signal samples")
            if np.any(np.abs(arr) > 1.0 + 1e-9):
                raise ValueError(f"period {z} has signal samples outside [-1, 1]")
            clean.append(np.clip(arr, -1.0, 1.0))
        object.__setattr__(self, "periods", tuple(clean))

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    def eta_profile(self, theta: float, tol: float = 1e-6) -> np.ndarray:
        return np.array(
            [min_capacity_fraction(sig, theta, tol) for sig in self.periods])

    @classmethod
    def from_csv(cls, path) -> "AgcTrace":
        """Read a timestamp,signal CSV and group samples by hour of day."""
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return cls._from_rows(csv.reader(fh), str(path))

    @classmethod
    def _from_rows(cls, rows, label: str) -> "AgcTrace":
        buckets = [[] for _ in range(HOURS_PER_DAY)]
        header = next(rows, None)
        if header is None or [c.strip() for c in header[:2]] != ["timestamp", "signal"]:
            raise ValueError(f"{label}: expected header 'timestamp,signal'")
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            try:
                stamp, value = row[0].strip(), float(row[1])
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{label}:{lineno}: malformed row {row!r}") from exc
            try:
                hour = int(stamp.split("T")[1][:2])
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{label}:{lineno}: bad timestamp {stamp!r}") from exc
            if not 0 <= hour < HOURS_PER_DAY:
                raise ValueError(f"{label}:{lineno}: hour out of range in {stamp!r}")
            buckets[hour].append(value)
        empty = [z for z, b in enumerate(buckets) if not b]
        if empty:
            raise ValueError(f"{label}: no samples for hours {empty}")
        return cls(periods=tuple(np.array(b) for b in buckets))


def _read_prices(path) -> np.ndarray:
    prices = np.full(HOURS_PER_DAY, np.nan)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or [c.strip() for c in header[:2]] != ["period", "price_usd_per_mw"]:
            raise ValueError(f"{path}: expected header 'period,price_usd_per_mw'")
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            try:
                period, price = int(row[0]), float(row[1])
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
            if not 0 <= period < HOURS_PER_DAY:
                raise ValueError(f"{path}:{lineno}: period out of range")
            if price < 0.0:
                raise ValueError(f"{path}:{lineno}: price must be nonnegative")
            prices[period] = price
    missing = np.flatnonzero(np.isnan(prices))
    if missing.size:
        raise ValueError(f"{path}: missing prices for periods {missing.tolist()}")
    return prices


@dataclass(frozen=True, eq=False)
class RegulationMarket:
    """Per-period capacity fractions and clearing prices for one day.

    eta[z] is the minimum headroom fraction for period z, prices[z] the
    capacity price in $/MW over that hour.  Periods with a flat signal
    (eta == 0) are degenerate: they support no performance measurement and
    earn nothing.
    """

    eta: np.ndarray
    prices: np.ndarray
    theta: float

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        prices = np.asarray(self.prices, dtype=float)
        if eta.shape != prices.shape or eta.ndim != 1:
            raise ValueError("eta and prices must be matching 1-d arrays")
        if np.any(eta < 0.0) or np.any(eta > 1.0):
            raise ValueError("eta values must lie in [0, 1]")
        if np.any(prices < 0.0):
            raise ValueError("prices must be nonnegative")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "prices", prices)

    @property
    def n_periods(self) -> int:
        return self.eta.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        return self.eta <= 0.0

    @property
    def eta_floored(self) -> np.ndarray:
        return np.maximum(self.eta, ETA_FLOOR)

    @classmethod
    def from_csv(cls, agc_path, prices_path, theta: float) -> "RegulationMarket":
        trace = AgcTrace.from_csv(agc_path)
        return cls(eta=trace.eta_profile(theta),
                   prices=_read_prices(prices_path), theta=theta)

    @classmethod
    def bundled(cls, theta: float) -> "RegulationMarket":
        """Market built from the packaged sample day."""
        data = resources.files("swapgrid") / "data"
        with resources.as_file(data / "agc_sample_day.csv") as agc_path, \
                resources.as_file(data / "prices_sample_day.csv") as prices_path:
            return cls.from_csv(agc_path, prices_path, theta)


def in_transit_moments_grid(rho_c, q, params: SystemParams, mu_bar):
    """Vectorized in-transit moments; see in_transit_moments.

    Broadcasts arrays of designs against mu_bar and returns (mean, var,
    load) without feasibility checks, for grid evaluation.
    """
    rho_c = np.asarray(rho_c, dtype=float)
    q = np.asarray(q, dtype=float)
    mu_bar = np.asarray(mu_bar, dtype=float)
    travel = one_way_travel_time(rho_c, params.truck_speed_kmh)
    mean = travel * mu_bar
    load = params.rho_s * q
    if params.bernoulli_consistent_variance:
        var = mean * (load - mean)
    else:
        var = mean * (q - mean)
    return mean, np.maximum(var, 0.0), load


def in_transit_moments(decision: Decision, params: SystemParams, mu_bar):
    """Mean and variance of the charged-battery density in transit.

    A truckload of q batteries is on the road toward any given swapping
    station with probability travel_time * demand / (rho_s * q), making the
    in-transit density a scaled Bernoulli.  The variance follows the design
    model's form by default; the bernoulli_consistent_variance switch uses
    the two-point distribution's own variance instead.
    """
    mean, var, load = in_transit_moments_grid(
        decision.rho_c, decision.q, params, mu_bar)
    if np.any(mean > load * (1.0 + 1e-12)):
        raise ValueError(
            "in-transit demand exceeds one truckload per station; "
            "increase q or rho_c")
    if np.ndim(mean) == 0:
        return float(mean), float(var)
    return mean, var


def capacity_bid_centralized(decision: Decision, primary: float, reorder: float,
                             params: SystemParams, profile: DemandProfile,
                             market: RegulationMarket) -> np.ndarray:
    """Largest capacity density (kW/km^2) biddable in each period.

    Charged stock powers the bid: batteries at charging stations (rate
    lambda_c) plus station shelves and one truckload cycling per station
    (rate lambda_s), net of stock in transit at the regulation service
    level.  Dividing by eta_z converts energy headroom into capacity.
    """
    mu_z = profile.mu_bar_period
    if market.n_periods != mu_z.shape[0]:
        raise ValueError("market and profile period counts differ")
    mean, var = in_transit_moments(decision, params, mu_z)
    z_val = inv_norm_cdf(1.0 - params.eps_reg)
    headroom = (params.lambda_c_kw * primary
                + params.lambda_s_kw * (reorder + params.rho_s * decision.q)
                - (params.lambda_c_kw + params.lambda_s_kw)
                * (mean + z_val * np.sqrt(var)))
    return np.maximum(headroom, 0.0) / market.eta_floored


def capacity_bid_decentralized(spare: float, params: SystemParams,
                               market: RegulationMarket) -> np.ndarray:
    """Capacity density (kW/km^2) backed by on-site spare batteries."""
    if spare < 0.0:
        raise ValueError(f"spare must be nonnegative, got {spare!r}")
    return params.lambda_s_kw * spare / market.eta_floored


def average_capacity_centralized(decision: Decision, primary: float,
                                 reorder: float, params: SystemParams,
                                 profile: DemandProfile) -> float:
    """Scenario- and period-averaged charged-stock capacity (kW/km^2).

    This is the headline capacity metric: expected powered headroom with
    mean in-transit stock removed, no safety margin and no eta scaling.
    """
    travel = one_way_travel_time(decision.rho_c, params.truck_speed_kmh)
    per_cell = (params.lambda_c_kw * primary
                + params.lambda_s_kw * (reorder + params.rho_s * decision.q)
                - (params.lambda_c_kw + params.lambda_s_kw) * travel * profile.mu_bar)
    weighted = float(np.mean(np.sum(profile.kappa * per_cell, axis=1)))
    return max(weighted, 0.0)


def average_capacity_decentralized(spare: float, params: SystemParams) -> float:
    return max(params.lambda_s_kw * spare, 0.0)
