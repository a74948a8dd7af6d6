"""Cost model: daily cost densities and their decomposition.

All component functions return $/day/km^2 over a 24-period (hourly) demand
profile.  Battery and station holding costs are hourly amortized rates, so
a day costs 24 times the rate; electricity and transport follow directly
from the daily demand; regulation income, when a market is given, enters
the decomposition as a negative term.

The *_grid functions are vectorized over candidate designs and are the
single source of truth the optimizer evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    HOURS_PER_DAY,
    CostBreakdown,
    Decision,
    DemandProfile,
    SystemParams,
)
from .geometry import one_way_travel_time
from .inventory import primary_stock_level, reorder_level, spare_stock_level
from .normal import inv_norm_cdf
from .regulation import RegulationMarket, in_transit_moments_grid

__all__ = [
    "daily_demand_density",
    "electricity_density",
    "transport_density",
    "income_density",
    "battery_density_centralized",
    "battery_density_decentralized",
    "cost_grid_centralized",
    "cost_centralized",
    "cost_decentralized",
    "income_slope_decentralized",
    "RegionCell",
    "regional_total_cost",
]


def _require_daily(profile: DemandProfile) -> None:
    if profile.n_periods != HOURS_PER_DAY:
        raise ValueError(
            f"daily cost model needs {HOURS_PER_DAY} hourly periods, "
            f"got {profile.n_periods}")


def daily_demand_density(profile: DemandProfile) -> float:
    """Swaps per day per km^2."""
    _require_daily(profile)
    return float(np.sum(profile.kappa * profile.mu_bar))


def electricity_density(params: SystemParams, profile: DemandProfile) -> float:
    """Energy cost of recharging the day's demand, scenario-priced."""
    _require_daily(profile)
    prices = np.asarray(params.c_energy, dtype=float)
    if prices.shape[0] != profile.n_scenarios:
        raise ValueError("c_energy must list one price per demand scenario")
    swaps = np.sum(profile.kappa * profile.mu_bar, axis=0)
    return float(np.sum(prices * swaps) * params.energy_per_charge_kwh)


def transport_density(rho_c, q, params: SystemParams, profile: DemandProfile):
    """Trucking cost: one round trip per q swaps at the average haul."""
    _require_daily(profile)
    rho_c = np.asarray(rho_c, dtype=float)
    q = np.asarray(q, dtype=float)
    trips = daily_demand_density(profile) / q
    cost = trips * 2.0 * one_way_travel_time(rho_c, params.truck_speed_kmh) \
        * params.truck_speed_kmh * params.c_transport_km
    if cost.ndim == 0:
        return float(cost)
    return cost


def income_density(bids, market: RegulationMarket) -> float:
    """Daily regulation income for per-period capacity bids in kW/km^2.

    Degenerate (flat-signal) periods earn nothing regardless of the bid.
    """
    bids = np.asarray(bids, dtype=float)
    if bids.shape[-1] != market.n_periods:
        raise ValueError("bids must cover every market period")
    payable = np.where(market.degenerate, 0.0, bids)
    out = np.sum(payable * market.prices, axis=-1) / 1000.0
    if out.ndim == 0:
        return float(out)
    return out


def battery_density_centralized(decision: Decision, primary: float,
                                reorder: float, params: SystemParams) -> float:
    """Total batteries per km^2 the centralized fleet owns: charging-station
    stock, station shelves, and one truckload cycling per station."""
    return primary + reorder + decision.q * params.rho_s


def battery_density_decentralized(spare: float) -> float:
    """On-site charging owns exactly the spare stock."""
    if spare < 0.0:
        raise ValueError(f"spare must be nonnegative, got {spare!r}")
    return float(spare)


def _centralized_components(rho_c, q, params: SystemParams,
                            profile: DemandProfile,
                            market: Optional[RegulationMarket]):
    """Vectorized component arrays for centralized designs.

    Returns (electricity, stations, batteries, transport, income,
    infeasible) where income is already negated and infeasible marks
    designs whose in-transit stock model breaks down under regulation
    (more than one truckload per station in flight at some hour).
    """
    _require_daily(profile)
    rho_c = np.asarray(rho_c, dtype=float)
    q = np.asarray(q, dtype=float)
    shape = np.broadcast_shapes(rho_c.shape, q.shape)
    rho_c, q = np.broadcast_to(rho_c, shape), np.broadcast_to(q, shape)

    mu = profile.mu_bar_overall
    primary = np.asarray(primary_stock_level(
        rho_c, q, params, mu, profile.sigma2_bar_overall))
    reorder = np.asarray(reorder_level(
        rho_c, params, mu, profile.sigma_bar_overall))
    fleet = primary + reorder + q * params.rho_s

    electricity = np.full(shape, electricity_density(params, profile))
    stations = HOURS_PER_DAY * params.c_charging_station * rho_c
    rate = params.c_battery_reg if market is not None else params.c_battery
    batteries = HOURS_PER_DAY * rate * fleet
    transport = transport_density(rho_c, q, params, profile)

    income = np.zeros(shape)
    infeasible = np.zeros(shape, dtype=bool)
    if market is not None:
        mu_z = profile.mu_bar_period
        if market.n_periods != mu_z.shape[0]:
            raise ValueError("market and profile period counts differ")
        mean, var, load = in_transit_moments_grid(
            rho_c[..., None], q[..., None], params, mu_z)
        infeasible = np.any(mean > load * (1.0 + 1e-12), axis=-1)
        z_val = inv_norm_cdf(1.0 - params.eps_reg)
        headroom = (params.lambda_c_kw * primary[..., None]
                    + params.lambda_s_kw * (reorder[..., None] + load)
                    - (params.lambda_c_kw + params.lambda_s_kw)
                    * (mean + z_val * np.sqrt(var)))
        bids = np.maximum(headroom, 0.0) / market.eta_floored
        income = np.where(infeasible, 0.0, -income_density(bids, market))
    return electricity, stations, batteries, transport, income, infeasible


def cost_grid_centralized(rho_c, q, params: SystemParams, profile: DemandProfile,
                          market: Optional[RegulationMarket] = None):
    """Total daily cost density over arrays of candidate designs.

    Returns (total, infeasible); infeasible designs keep their cost value
    but should be excluded by the caller (the optimizer assigns +inf).
    """
    elec, stations, batteries, transport, income, infeasible = \
        _centralized_components(rho_c, q, params, profile, market)
    total = elec + stations + batteries + transport + income
    return total, infeasible


def cost_centralized(decision: Decision, params: SystemParams,
                     profile: DemandProfile,
                     market: Optional[RegulationMarket] = None) -> CostBreakdown:
    """Cost decomposition for one centralized design."""
    decision.validate(params)
    elec, stations, batteries, transport, income, infeasible = \
        _centralized_components(
            np.float64(decision.rho_c), np.float64(decision.q),
            params, profile, market)
    if bool(infeasible):
        raise ValueError(
            "in-transit demand exceeds one truckload per station; "
            "increase q or rho_c")
    return CostBreakdown(
        electricity=float(elec),
        station_depreciation=float(stations),
        battery_depreciation=float(batteries),
        transport=float(transport),
        regulation_income=float(income),
    )


def cost_decentralized(params: SystemParams, profile: DemandProfile,
                       eps_bs: float,
                       market: Optional[RegulationMarket] = None,
                       spare_override: Optional[float] = None) -> CostBreakdown:
    """Cost decomposition for on-site charging.

    The spare stock defaults to the minimum level meeting the calibrated
    service target eps_bs; spare_override may raise it (never below the
    minimum, never above the resolved spare-stock cap).  No trucking;
    stations carry the on-site-charger premium.
    """
    _require_daily(profile)
    floor = spare_stock_level(params, profile.mu_bar_overall,
                              profile.sigma_bar_overall, eps_bs)
    spare = floor
    if spare_override is not None:
        cap = params.r_b_cap if params.r_b_cap is not None else 2.0 * floor
        if spare_override < floor - 1e-12:
            raise ValueError(
                f"spare_override {spare_override!r} is below the minimum "
                f"spare stock {floor!r}; service level violated")
        if spare_override > cap + 1e-12:
            raise ValueError(
                f"spare_override {spare_override!r} exceeds the spare-stock "
                f"cap {cap!r}")
        spare = float(spare_override)
    rate = params.c_battery_reg if market is not None else params.c_battery
    income = 0.0
    if market is not None:
        bids = params.lambda_s_kw * spare / market.eta_floored
        income = -income_density(bids, market)
    return CostBreakdown(
        electricity=electricity_density(params, profile),
        station_depreciation=HOURS_PER_DAY * params.c_onsite_station * params.rho_s,
        battery_depreciation=HOURS_PER_DAY * rate * spare,
        transport=0.0,
        regulation_income=income,
    )


def income_slope_decentralized(params: SystemParams,
                               market: RegulationMarket) -> float:
    """Daily income per unit of spare-stock density ($/day per battery/km^2)."""
    weights = np.where(market.degenerate, 0.0,
                       market.prices / market.eta_floored)
    return float(params.lambda_s_kw * np.sum(weights) / 1000.0)


@dataclass(frozen=True)
class RegionCell:
    """One homogeneous cell of a heterogeneous planning region."""

    decision: Decision
    params: SystemParams
    profile: DemandProfile
    area_km2: float
    market: Optional[RegulationMarket] = None

    def __post_init__(self):
        if self.area_km2 < 0.0:
            raise ValueError(f"area_km2 must be nonnegative, got {self.area_km2!r}")


def regional_total_cost(cells) -> float:
    """Total daily cost of a region tiled by homogeneous cells ($/day).

    Each cell is costed independently; minimizing per cell minimizes the
    region, so there is no coupling to resolve here.
    """
    total = 0.0
    for cell in cells:
        breakdown = cost_centralized(cell.decision, cell.params,
                                     cell.profile, cell.market)
        total += breakdown.total * cell.area_km2
    return total
