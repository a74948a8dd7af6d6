"""Design optimization for the centralized architecture.

The objective (daily cost density as a function of charging-station density
rho_c and re-order quantity q) is cheap to evaluate and low-dimensional but
not smooth: the deficit-variance model has a kink at the breakpoint
quantity, income clamps at zero, and regulation adds a feasibility boundary.
So the search is deliberately plain: a dense vectorized grid to localize the
basin, alternating one-dimensional golden-section passes to refine, and an
explicit polish step on the known kink locations.  The best evaluated point
is tracked throughout, so the result can never be worse than the grid
optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import CostBreakdown, Decision, DemandProfile, SystemParams
from .econ import (
    cost_centralized,
    cost_grid_centralized,
    income_slope_decentralized,
)
from .inventory import lead_time, spare_stock_level, variance_breakpoint
from .regulation import RegulationMarket

__all__ = [
    "SearchSpec",
    "OptimizationResult",
    "optimize_centralized",
    "choose_decentralized_stock",
    "SurfaceResult",
    "sensitivity_surface",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchSpec:
    """Grid resolution and refinement tolerances for the design search."""

    rho_points: int = 32
    q_points: int = 32
    rho_min: float = 1e-5
    refine_rel_tol: float = 1e-4
    max_refine_rounds: int = 12
    golden_iters: int = 48

    def __post_init__(self):
        if self.rho_points < 4 or self.q_points < 4:
            raise ValueError("grids need at least 4 points per axis")
        if not self.rho_min > 0.0:
            raise ValueError("rho_min must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal design, its cost decomposition, and the integer-q variant."""

    decision: Decision
    cost: float
    breakdown: CostBreakdown
    rounded_decision: Decision
    rounded_cost: float
    rounding_gap: float
    evaluations: int
    grid_best_cost: float


def _golden_min(f: Callable[[float], float], lo: float, hi: float,
                iters: int):
    """Golden-section minimization on [lo, hi]; tolerates +inf values."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def optimize_centralized(params: SystemParams, profile: DemandProfile,
                         market: Optional[RegulationMarket] = None,
                         spec: SearchSpec = SearchSpec()) -> OptimizationResult:
    """Minimize daily cost density over charging-station density and
    re-order quantity.

    With a market the objective includes regulation income and excludes
    designs whose in-transit model breaks down (over a truckload in flight
    per station at some hour).
    """
    evaluations = 0

    def batch(rho, q):
        nonlocal evaluations
        total, infeasible = cost_grid_centralized(rho, q, params, profile, market)
        total = np.where(infeasible, np.inf, total)
        evaluations += int(np.size(total))
        return total

    def point(rho, q) -> float:
        if not (spec.rho_min <= rho <= params.rho_s and
                1.0 <= q <= params.reorder_cap):
            return math.inf
        return float(batch(np.float64(rho), np.float64(q)))

    rho_axis = np.geomspace(spec.rho_min, params.rho_s, spec.rho_points)
    q_axis = np.linspace(1.0, params.reorder_cap, spec.q_points)
    rho_mesh, q_mesh = np.meshgrid(rho_axis, q_axis, indexing="ij")
    grid_cost = batch(rho_mesh, q_mesh)
    flat_best = int(np.argmin(grid_cost))
    i, j = np.unravel_index(flat_best, grid_cost.shape)
    grid_best = float(grid_cost[i, j])
    if not math.isfinite(grid_best):
        raise ValueError("no feasible design on the search grid")

    best_rho, best_q, best_cost = float(rho_mesh[i, j]), float(q_mesh[i, j]), grid_best

    # Brackets one grid step around the incumbent; log spacing for rho.
    rho_lo = float(rho_axis[max(i - 1, 0)])
    rho_hi = float(rho_axis[min(i + 1, len(rho_axis) - 1)])
    q_lo = float(q_axis[max(j - 1, 0)])
    q_hi = float(q_axis[min(j + 1, len(q_axis) - 1)])

    for _ in range(spec.max_refine_rounds):
        previous = best_cost
        log_x, cost_rho = _golden_min(
            lambda t: point(math.exp(t), best_q),
            math.log(rho_lo), math.log(rho_hi), spec.golden_iters)
        if cost_rho < best_cost:
            best_rho, best_cost = math.exp(log_x), cost_rho
        q_x, cost_q = _golden_min(
            lambda v: point(best_rho, v), q_lo, q_hi, spec.golden_iters)
        if cost_q < best_cost:
            best_q, best_cost = q_x, cost_q
        if previous - best_cost <= spec.refine_rel_tol * max(abs(previous), 1.0):
            break

    # Kink-aware polish: the deficit-variance branch point and the box edges
    # are the places a smooth line search can straddle.
    mu_st = profile.mu_bar_overall / params.rho_s
    sigma2_st = profile.sigma2_bar_overall / params.rho_s
    nu = variance_breakpoint(lead_time(best_rho, params), mu_st, sigma2_st)
    candidates = [1.0, params.reorder_cap]
    if math.isfinite(nu):
        candidates.append(float(nu))
    for cand in candidates:
        if 1.0 <= cand <= params.reorder_cap:
            cost_cand = point(best_rho, cand)
            if cost_cand < best_cost:
                best_q, best_cost = cand, cost_cand

    decision = Decision(rho_c=best_rho, q=best_q)
    breakdown = cost_centralized(decision, params, profile, market)

    rounded_q, rounded_cost = None, math.inf
    for cand in {math.floor(best_q), math.ceil(best_q)}:
        cand = float(min(max(cand, 1.0), params.reorder_cap))
        cost_cand = point(best_rho, cand)
        if cost_cand < rounded_cost:
            rounded_q, rounded_cost = cand, cost_cand
    rounded = Decision(rho_c=best_rho, q=rounded_q)

    return OptimizationResult(
        decision=decision,
        cost=best_cost,
        breakdown=breakdown,
        rounded_decision=rounded,
        rounded_cost=rounded_cost,
        rounding_gap=rounded_cost - best_cost,
        evaluations=evaluations,
        grid_best_cost=grid_best,
    )


def choose_decentralized_stock(params: SystemParams, profile: DemandProfile,
                               market: Optional[RegulationMarket] = None,
                               eps: Optional[float] = None):
    """Pick the on-site spare-stock density.

    Without a market the service floor is optimal (stock only costs money).
    With one, cost is linear in stock, so the optimum sits at an endpoint:
    the floor, or the cap when daily income per battery beats its holding
    cost.  The cap defaults to twice the floor unless configured.

    Returns (spare, floor, cap).
    """
    if eps is None:
        eps = params.eps_swap
    floor = float(spare_stock_level(
        params, profile.mu_bar_overall, profile.sigma_bar_overall, eps))
    cap = params.r_b_cap if params.r_b_cap is not None else 2.0 * floor
    if cap < floor:
        raise ValueError(
            f"spare-stock cap {cap} is below the service floor {floor}")
    spare = floor
    if market is not None:
        holding = 24.0 * params.c_battery_reg
        if income_slope_decentralized(params, market) > holding:
            spare = cap
    return spare, floor, cap


@dataclass(frozen=True, eq=False)
class SurfaceResult:
    """Cost over a design grid, for sensitivity plots and flatness checks."""

    rho_values: np.ndarray
    q_values: np.ndarray
    cost: np.ndarray          # shape (len(rho_values), len(q_values))
    infeasible: np.ndarray


def sensitivity_surface(params: SystemParams, profile: DemandProfile,
                        market: Optional[RegulationMarket] = None,
                        rho_values=None, q_values=None) -> SurfaceResult:
    """Evaluate the cost objective over an explicit design grid.

    q_values may exceed the re-order cap; the surface is a diagnostic view
    of the objective, not the constrained search region.
    """
    if rho_values is None:
        rho_values = np.geomspace(1e-4, params.rho_s, 64)
    if q_values is None:
        q_values = np.linspace(1.0, params.reorder_cap, 64)
    rho_values = np.asarray(rho_values, dtype=float)
    q_values = np.asarray(q_values, dtype=float)
    rho_mesh, q_mesh = np.meshgrid(rho_values, q_values, indexing="ij")
    cost, infeasible = cost_grid_centralized(
        rho_mesh, q_mesh, params, profile, market)
    return SurfaceResult(rho_values=rho_values, q_values=q_values,
                         cost=cost, infeasible=infeasible)
