"""Continuous-approximation planning for urban battery-swapping networks.

The package sizes a two-echelon swap/charge system on a service region:
how dense the charging stations should be, how many batteries move per
re-order, what stock each echelon holds, and how much frequency-regulation
capacity the idle inventory can sell, for centralized and decentralized
charging with regulation on or off.  A discrete-event simulator provides
the empirical check on every closed-form level.
"""

from .core import (
    ALL_CONFIGURATIONS,
    Configuration,
    CostBreakdown,
    Decision,
    DemandProfile,
    MetricsReport,
    StockPlan,
    SystemParams,
    baseline_params,
    baseline_profile,
    dump_params,
    load_params,
    load_params_file,
    params_fingerprint,
)
from .geometry import (
    avg_one_way_distance,
    one_way_transport_cost,
    one_way_travel_time,
)
from .normal import inv_norm_cdf, norm_cdf
from .inventory import (
    deficit_variance,
    deficit_variance_station,
    lead_time,
    primary_stock,
    primary_stock_level,
    reorder_level,
    reorder_point,
    spare_stock,
    spare_stock_level,
    stock_plan,
    variance_breakpoint,
)
from .regulation import (
    AgcTrace,
    RegulationMarket,
    capacity_bid_centralized,
    capacity_bid_decentralized,
    fulfilled_mileage,
    in_transit_moments,
    min_capacity_fraction,
    requested_mileage,
)
from .econ import (
    RegionCell,
    battery_density_centralized,
    battery_density_decentralized,
    cost_centralized,
    cost_decentralized,
    regional_total_cost,
)
from .optimizer import (
    OptimizationResult,
    SearchSpec,
    SurfaceResult,
    choose_decentralized_stock,
    optimize_centralized,
    sensitivity_surface,
)
from .scenarios import (
    CalibrationResult,
    SweepSpec,
    calibrate_eps_bs,
    calibrated_eps_bs,
    normalize_radar,
    run_all_configurations,
    run_configuration,
    scale_battery_cost,
    scale_demand,
    scale_power,
    sweep,
    sweep_rows,
)
from .simkit import (
    InTransitReport,
    SimConfig,
    SimStats,
    horizon_for_cycles,
    measure_in_transit,
    simulate_centralized,
    simulate_decentralized,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CONFIGURATIONS",
    "AgcTrace",
    "CalibrationResult",
    "Configuration",
    "CostBreakdown",
    "Decision",
    "DemandProfile",
    "InTransitReport",
    "MetricsReport",
    "OptimizationResult",
    "RegionCell",
    "RegulationMarket",
    "SearchSpec",
    "SimConfig",
    "SimStats",
    "StockPlan",
    "SurfaceResult",
    "SweepSpec",
    "SystemParams",
    "baseline_params",
    "baseline_profile",
    "battery_density_centralized",
    "battery_density_decentralized",
    "calibrate_eps_bs",
    "calibrated_eps_bs",
    "capacity_bid_centralized",
    "capacity_bid_decentralized",
    "choose_decentralized_stock",
    "cost_centralized",
    "cost_decentralized",
    "deficit_variance",
    "deficit_variance_station",
    "primary_stock_level",
    "reorder_level",
    "spare_stock_level",
    "avg_one_way_distance",
    "dump_params",
    "fulfilled_mileage",
    "inv_norm_cdf",
    "norm_cdf",
    "one_way_transport_cost",
    "one_way_travel_time",
    "horizon_for_cycles",
    "in_transit_moments",
    "lead_time",
    "load_params",
    "load_params_file",
    "measure_in_transit",
    "min_capacity_fraction",
    "normalize_radar",
    "optimize_centralized",
    "params_fingerprint",
    "primary_stock",
    "regional_total_cost",
    "reorder_point",
    "requested_mileage",
    "run_all_configurations",
    "run_configuration",
    "scale_battery_cost",
    "scale_demand",
    "scale_power",
    "sensitivity_surface",
    "simulate_centralized",
    "simulate_decentralized",
    "spare_stock",
    "stock_plan",
    "sweep",
    "sweep_rows",
    "variance_breakpoint",
    "__version__",
]
