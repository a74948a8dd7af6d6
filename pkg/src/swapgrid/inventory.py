"""Stock sizing for charging and swapping stations.

Centralized charging works on a re-order cycle: a swapping station orders a
truckload of q charged batteries when its shelf hits the re-order point,
the truck hauls the depleted ones back, and they re-enter the charged pool
after the replenishment lead time delta = 2 * travel + charge.  The charged
stock a charging station must hold is driven by the stationary battery
deficit of the stations it serves: batteries committed to orders but not
yet recharged.  The deficit's mean is linear in demand; its variance has
two regimes depending on whether a truckload is large or small relative to
lead-time demand, with a breakpoint re-order quantity where the regimes
meet.

The *_level functions are vectorized over (rho_c, q) so design grids can be
evaluated in one shot; the Decision-taking wrappers are the scalar API.
Quantities follow density units (per km^2, demand per km^2 per hour).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import Decision, DemandProfile, StockPlan, SystemParams
from .geometry import one_way_travel_time
from .normal import inv_norm_cdf

__all__ = [
    "lead_time",
    "variance_breakpoint",
    "deficit_variance_station",
    "deficit_variance",
    "primary_stock_level",
    "reorder_level",
    "spare_stock_level",
    "primary_stock",
    "reorder_point",
    "spare_stock",
    "stock_plan",
]


def _maybe_scalar(arr):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return float(arr)
    return arr


def lead_time(rho_c, params: SystemParams):
    """Replenishment lead time: truck round trip plus a full recharge."""
    return _maybe_scalar(
        2.0 * one_way_travel_time(rho_c, params.truck_speed_kmh)
        + params.charge_time_central)


def variance_breakpoint(delta, mu_st, sigma2_st):
    """Re-order quantity where the two deficit-variance branches meet.

    Arguments are per-station: lead time delta, demand rate mu_st, and
    variance rate sigma2_st.  Returns the smaller positive root of

        q^2 - 6*delta*mu_st*q + 6*delta*sigma2_st - 1 + 6*(delta*mu_st)^2 = 0

    and inf when no positive root exists (the small-q branch then applies
    for every feasible q).
    """
    delta = np.asarray(delta, dtype=float)
    mu_st = np.asarray(mu_st, dtype=float)
    sigma2_st = np.asarray(sigma2_st, dtype=float)
    lead_demand = delta * mu_st
    disc = 3.0 * lead_demand**2 - 6.0 * delta * sigma2_st + 1.0
    root = 3.0 * lead_demand - np.sqrt(np.maximum(disc, 0.0))
    return _maybe_scalar(
        np.where((mu_st > 0.0) & (disc >= 0.0) & (root > 0.0), root, np.inf))


def deficit_variance_station(q, delta, mu_st, sigma2_st, nu=None):
    """Stationary battery-deficit variance for one swapping station.

    Small truckloads (q <= nu) leave the deficit dominated by demand noise
    over the lead time plus the uniform order-cycle phase; large truckloads
    make whole outstanding orders the dominant term.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0.0):
        raise ValueError("q must be nonnegative")
    delta = np.asarray(delta, dtype=float)
    mu_st = np.asarray(mu_st, dtype=float)
    sigma2_st = np.asarray(sigma2_st, dtype=float)
    if nu is None:
        nu = variance_breakpoint(delta, mu_st, sigma2_st)
    nu = np.asarray(nu, dtype=float)
    small = delta * sigma2_st + (q**2 - 1.0) / 6.0
    large = q * delta * mu_st - (delta * mu_st) ** 2
    return _maybe_scalar(np.where(q <= nu, small, large))


def deficit_variance(q, rho_c, params: SystemParams, mu_bar, sigma2_bar, nu=None):
    """Deficit variance per charging station, in battery^2 units.

    Each charging station serves rho_s / rho_c swapping stations; their
    deficits are independent, so the per-station variance scales up by
    that count.  mu_bar and sigma2_bar are densities; per-station rates
    are recovered through rho_s.
    """
    rho_c = np.asarray(rho_c, dtype=float)
    delta = lead_time(rho_c, params)
    mu_st = np.asarray(mu_bar, dtype=float) / params.rho_s
    sigma2_st = np.asarray(sigma2_bar, dtype=float) / params.rho_s
    per_station = deficit_variance_station(q, delta, mu_st, sigma2_st, nu=nu)
    return _maybe_scalar(per_station * params.rho_s / rho_c)


def primary_stock_level(rho_c, q, params: SystemParams, mu_bar, sigma2_bar):
    """Charged-battery density held at charging stations.

    Covers mean demand over travel plus recharge time, one truckload per
    served swapping station, and a safety term at the charge service level
    against the deficit's stationary noise.
    """
    rho_c = np.asarray(rho_c, dtype=float)
    q = np.asarray(q, dtype=float)
    travel = one_way_travel_time(rho_c, params.truck_speed_kmh)
    var_cs = deficit_variance(q, rho_c, params, mu_bar, sigma2_bar)
    z_val = inv_norm_cdf(1.0 - params.eps_charge)
    level = ((travel + params.charge_time_central) * mu_bar
             + q * params.rho_s
             + z_val * np.sqrt(var_cs) * rho_c)
    return _maybe_scalar(np.maximum(level, 0.0))


def reorder_level(rho_c, params: SystemParams, mu_bar, sigma_bar):
    """Swapping-station re-order point density.

    Protects against demand during the truck's one-way trip at the swap
    service level; the -rho_s term credits the battery being swapped in.
    """
    rho_c = np.asarray(rho_c, dtype=float)
    travel = one_way_travel_time(rho_c, params.truck_speed_kmh)
    z_val = inv_norm_cdf(1.0 - params.eps_swap)
    level = (travel * mu_bar - params.rho_s
             + z_val * np.sqrt(travel * params.rho_s) * sigma_bar)
    return _maybe_scalar(np.maximum(level, 0.0))


def spare_stock_level(params: SystemParams, mu_bar, sigma_bar, eps: float):
    """On-site stock density for decentralized charging at stockout target
    eps; the station's own recharge slot plays the role of the lead time."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    t_c = params.charge_time_onsite
    z_val = inv_norm_cdf(1.0 - eps)
    level = (t_c * mu_bar - params.rho_s
             + z_val * np.sqrt(t_c * params.rho_s) * sigma_bar)
    return _maybe_scalar(np.maximum(level, 0.0))


def primary_stock(decision: Decision, params: SystemParams,
                  profile: DemandProfile) -> float:
    """Charged-battery density at charging stations, sized at the day's
    overall demand rates."""
    return float(primary_stock_level(
        decision.rho_c, decision.q, params,
        profile.mu_bar_overall, profile.sigma2_bar_overall))


def reorder_point(decision: Decision, params: SystemParams,
                  profile: DemandProfile) -> float:
    return float(reorder_level(
        decision.rho_c, params, profile.mu_bar_overall, profile.sigma_bar_overall))


def spare_stock(params: SystemParams, profile: DemandProfile,
                eps: Optional[float] = None) -> float:
    if eps is None:
        eps = params.eps_swap
    return float(spare_stock_level(
        params, profile.mu_bar_overall, profile.sigma_bar_overall, eps))


def stock_plan(decision: Decision, params: SystemParams, profile: DemandProfile,
               spare_eps: Optional[float] = None,
               include_spare: bool = False) -> StockPlan:
    """Assemble the stock levels a decision implies.

    include_spare adds the decentralized on-site stock sized at spare_eps,
    for reporting both architectures side by side.
    """
    decision.validate(params)
    delta = lead_time(decision.rho_c, params)
    nu = variance_breakpoint(
        delta,
        profile.mu_bar_overall / params.rho_s,
        profile.sigma2_bar_overall / params.rho_s,
    )
    spare = spare_eps_val = None
    if include_spare:
        spare_eps_val = params.eps_swap if spare_eps is None else spare_eps
        spare = spare_stock(params, profile, spare_eps_val)
    return StockPlan(
        primary=primary_stock(decision, params, profile),
        reorder=reorder_point(decision, params, profile),
        breakpoint=float(nu),
        spare=spare,
        spare_eps=spare_eps_val,
    )
