"""Scenario pipeline: four configurations, calibration, and sweeps.

The decentralized architecture has no analytically chosen service level of
its own; its target stockout probability is calibrated so that on-site
charging is held to the same effective standard the centralized design
achieves, then its stock follows from the spare-stock formula.  The
calibration needs a centralized solution first, so the pipeline order is
fixed: solve centralized, calibrate, then solve decentralized.

Sweeps rerun that pipeline along one study axis at a time (demand scale,
charger power, battery cost) and collect the three headline metrics per
configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import (
    ALL_CONFIGURATIONS,
    Configuration,
    Decision,
    DemandProfile,
    MetricsReport,
    StockPlan,
    SystemParams,
)
from .econ import (
    battery_density_centralized,
    battery_density_decentralized,
    cost_centralized,
    cost_decentralized,
)
from .geometry import one_way_travel_time
from .inventory import lead_time
from .optimizer import SearchSpec, choose_decentralized_stock, optimize_centralized
from .regulation import (
    RegulationMarket,
    average_capacity_centralized,
    average_capacity_decentralized,
)

__all__ = [
    "CalibrationResult",
    "calibrate_eps_bs",
    "calibrated_eps_bs",
    "run_configuration",
    "run_all_configurations",
    "SweepSpec",
    "SweepPoint",
    "sweep",
    "sweep_rows",
    "scale_demand",
    "scale_power",
    "scale_battery_cost",
    "normalize_radar",
]

# Calibrated probabilities are clamped into this open interval before they
# feed an inverse-normal quantile.
_EPS_LO, _EPS_HI = 1e-6, 1.0 - 1e-6

_MIN_CALIB_SAMPLES = 100_000


@dataclass(frozen=True)
class CalibrationResult:
    estimate: float
    se: float
    samples: int
    seed: int

    @property
    def clamped(self) -> float:
        return min(max(self.estimate, _EPS_LO), _EPS_HI)


def calibrate_eps_bs(decision: Decision, stocks: StockPlan,
                     params: SystemParams, profile: DemandProfile,
                     mc_samples: int = 200_000,
                     seed: int = 0) -> CalibrationResult:
    """Effective charge-availability shortfall of a centralized design.

    Estimates the expected excess demand (in truckloads) that the
    centralized stocks would leave uncovered over a replenishment flight:
    demand over the full flight window beyond the per-station share of the
    charging-station stock, plus lead-window demand beyond the re-order
    stock.  The two window counts come from one simulated demand path
    (the lead window is the head of the flight window), per-unit-area,
    normal and truncated at zero.
    """
    if mc_samples < _MIN_CALIB_SAMPLES:
        raise ValueError(
            f"mc_samples must be at least {_MIN_CALIB_SAMPLES}, "
            f"got {mc_samples}")
    decision.validate(params)
    travel = one_way_travel_time(decision.rho_c, params.truck_speed_kmh)
    window = lead_time(decision.rho_c, params)      # 2 T^T + T^C
    if window <= 0.0:
        raise ValueError("degenerate flight window")
    mu = profile.mu_bar_overall
    sig = profile.sigma_bar_overall

    rng = np.random.default_rng(seed)
    n_lead = np.maximum(
        travel * mu + np.sqrt(travel) * sig * rng.standard_normal(mc_samples),
        0.0)
    rest = window - travel
    n_flight = np.maximum(
        n_lead + rest * mu + np.sqrt(rest) * sig * rng.standard_normal(mc_samples),
        0.0)
    scaled_primary = (decision.rho_c / params.rho_s) * stocks.primary
    excess = np.maximum(
        np.maximum(n_flight - scaled_primary, 0.0) + n_lead - stocks.reorder,
        0.0) / decision.q
    estimate = float(np.clip(np.mean(excess), 0.0, 1.0))
    se = float(np.std(excess, ddof=1) / np.sqrt(mc_samples))
    return CalibrationResult(estimate=estimate, se=se,
                             samples=mc_samples, seed=seed)


def calibrated_eps_bs(params: SystemParams, profile: DemandProfile,
                      search: Optional[SearchSpec] = None,
                      mc_samples: int = 200_000, seed: int = 0):
    """Solve the regulation-off centralized design and calibrate against it.

    The reference design is deliberately the regulation-off optimum: the
    service standard should not move with market prices.  Returns
    (calibration, optimization result).
    """
    base = optimize_centralized(params, profile, market=None,
                                spec=search or SearchSpec())
    stocks = _plan_for(base.decision, params, profile)
    calib = calibrate_eps_bs(base.decision, stocks, params, profile,
                             mc_samples=mc_samples, seed=seed)
    return calib, base


def _plan_for(decision: Decision, params: SystemParams,
              profile: DemandProfile) -> StockPlan:
    from .inventory import stock_plan
    return stock_plan(decision, params, profile)


def _centralized_report(config: Configuration, params: SystemParams,
                        profile: DemandProfile,
                        market: Optional[RegulationMarket],
                        search: SearchSpec) -> MetricsReport:
    result = optimize_centralized(
        params, profile, market=market if config.regulation else None,
        spec=search)
    stocks = _plan_for(result.decision, params, profile)
    capacity = 0.0
    if config.regulation:
        capacity = average_capacity_centralized(
            result.decision, stocks.primary, stocks.reorder, params, profile)
    return MetricsReport(
        configuration=config,
        cost_density=result.breakdown.total,
        battery_density=battery_density_centralized(
            result.decision, stocks.primary, stocks.reorder, params),
        avg_reg_capacity=capacity,
        decomposition=result.breakdown,
        decision=result.decision,
        stocks=stocks,
    )


def _decentralized_report(config: Configuration, params: SystemParams,
                          profile: DemandProfile,
                          market: Optional[RegulationMarket],
                          eps_bs: float) -> MetricsReport:
    use_market = market if config.regulation else None
    spare, floor, cap = choose_decentralized_stock(
        params, profile, market=use_market, eps=eps_bs)
    breakdown = cost_decentralized(params, profile, eps_bs,
                                   market=use_market, spare_override=spare)
    capacity = average_capacity_decentralized(spare, params) \
        if config.regulation else 0.0
    return MetricsReport(
        configuration=config,
        cost_density=breakdown.total,
        battery_density=battery_density_decentralized(spare),
        avg_reg_capacity=capacity,
        decomposition=breakdown,
        decision=None,
        stocks=StockPlan(primary=0.0, reorder=0.0, breakpoint=float("inf"),
                         spare=spare, spare_eps=eps_bs),
    )


def run_configuration(config: Configuration, params: SystemParams,
                      profile: DemandProfile,
                      market: Optional[RegulationMarket] = None,
                      search: Optional[SearchSpec] = None,
                      mc_samples: int = 200_000,
                      seed: int = 0) -> MetricsReport:
    """Metrics for one configuration at one parameter point.

    Decentralized configurations trigger the full pipeline (centralized
    solve, calibration) internally; use run_all_configurations to share
    that work across the four.
    """
    if config.regulation and market is None:
        raise ValueError(f"{config.label} needs a regulation market")
    search = search or SearchSpec()
    if config.architecture == "centralized":
        return _centralized_report(config, params, profile, market, search)
    calib, _ = calibrated_eps_bs(params, profile, search=search,
                                 mc_samples=mc_samples, seed=seed)
    return _decentralized_report(config, params, profile, market,
                                 calib.clamped)


def run_all_configurations(params: SystemParams, profile: DemandProfile,
                           market: Optional[RegulationMarket] = None,
                           configurations=ALL_CONFIGURATIONS,
                           search: Optional[SearchSpec] = None,
                           mc_samples: int = 200_000,
                           seed: int = 0):
    """Reports for the requested configurations, sharing one calibration."""
    search = search or SearchSpec()
    needs_dec = any(c.architecture == "decentralized" for c in configurations)
    eps_bs = None
    if needs_dec:
        calib, _ = calibrated_eps_bs(params, profile, search=search,
                                     mc_samples=mc_samples, seed=seed)
        eps_bs = calib.clamped
    reports = []
    for config in configurations:
        if config.regulation and market is None:
            raise ValueError(f"{config.label} needs a regulation market")
        if config.architecture == "centralized":
            reports.append(_centralized_report(
                config, params, profile, market, search))
        else:
            reports.append(_decentralized_report(
                config, params, profile, market, eps_bs))
    return tuple(reports)


# --------------------------------------------------------------------------
# Sweep axes.  Each transform returns a fresh (params, profile) pair.
# --------------------------------------------------------------------------

def scale_demand(params: SystemParams, profile: DemandProfile, s: float):
    """Urban growth: station density and per-station demand both scale by s,
    so per-area demand scales by s^2."""
    if not s > 0.0:
        raise ValueError(f"demand scale must be positive, got {s!r}")
    return replace(params, rho_s=params.rho_s * s), profile.scaled(s * s)


def scale_power(params: SystemParams, profile: DemandProfile, m: float):
    """Charger-power axis: both charger ratings scale by m.

    The battery's energy per charge is pinned first so faster chargers
    shorten charge times instead of implying bigger batteries.
    """
    if not m > 0.0:
        raise ValueError(f"power multiplier must be positive, got {m!r}")
    pinned = replace(params, battery_kwh=params.energy_per_charge_kwh)
    return replace(pinned,
                   lambda_c_kw=params.lambda_c_kw * m,
                   lambda_s_kw=params.lambda_s_kw * m), profile


def scale_battery_cost(params: SystemParams, profile: DemandProfile, m: float):
    """Battery-cost axis: both holding rates scale together."""
    if not m > 0.0:
        raise ValueError(f"cost multiplier must be positive, got {m!r}")
    return replace(params,
                   c_battery=params.c_battery * m,
                   c_battery_reg=params.c_battery_reg * m), profile


_AXES = {
    "demand": scale_demand,
    "power": scale_power,
    "battery_cost": scale_battery_cost,
}


@dataclass(frozen=True)
class SweepSpec:
    """One study axis and where to sample it."""

    axis: str
    points: tuple
    configurations: tuple = ALL_CONFIGURATIONS

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(
                f"axis must be one of {sorted(_AXES)}, got {self.axis!r}")
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("a sweep needs at least 2 points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("sweep points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        for config in self.configurations:
            if not isinstance(config, Configuration):
                raise TypeError(f"not a configuration: {config!r}")


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: float
    reports: tuple


def sweep(spec: SweepSpec, params: SystemParams, profile: DemandProfile,
          market: Optional[RegulationMarket] = None,
          search: Optional[SearchSpec] = None,
          mc_samples: int = 200_000, seed: int = 0):
    """Run the pipeline at every point of one axis."""
    transform = _AXES[spec.axis]
    out = []
    for value in spec.points:
        pt_params, pt_profile = transform(params, profile, value)
        reports = run_all_configurations(
            pt_params, pt_profile, market=market,
            configurations=spec.configurations, search=search,
            mc_samples=mc_samples, seed=seed)
        out.append(SweepPoint(axis=spec.axis, value=value, reports=reports))
    return tuple(out)


_METRICS = ("cost_density", "battery_density", "avg_reg_capacity")


def sweep_rows(points) -> list:
    """Flatten sweep output to one dict per (point, config, metric)."""
    rows = []
    for point in points:
        for report in point.reports:
            d = report.decomposition
            for metric in _METRICS:
                rows.append({
                    "axis": point.axis,
                    "value": point.value,
                    "configuration": report.configuration.label,
                    "metric": metric,
                    "metric_value": getattr(report, metric),
                    "electricity": d.electricity,
                    "station_depreciation": d.station_depreciation,
                    "battery_depreciation": d.battery_depreciation,
                    "transport": d.transport,
                    "regulation_income": d.regulation_income,
                })
    return rows


def normalize_radar(reports) -> np.ndarray:
    """Min-max normalize the three metrics across configurations.

    Cost and battery density are inverted (lower raw value scores closer
    to 1); regulation capacity is direct.  A metric that is identical
    across configurations maps to all ones.
    """
    reports = tuple(reports)
    raw = np.array([[getattr(rep, m) for m in _METRICS] for rep in reports])
    out = np.ones_like(raw)
    for j, invert in enumerate((True, True, False)):
        col = raw[:, j]
        span = col.max() - col.min()
        if span <= 0.0:
            continue
        scaled = (col - col.min()) / span
        out[:, j] = 1.0 - scaled if invert else scaled
    return out
