"""Core types and configuration handling for the swap-network model.

The model plans a battery-swap service over a homogeneous region: swapping
stations at a fixed density face stochastic hourly demand, and either a
sparser grid of charging stations replenishes them by truck (centralized
charging) or each station recharges on site (decentralized charging).
Charged batteries sitting idle can sell frequency-regulation capacity.

Parameters deliberately separate infrastructure facts (SystemParams) from
the demand and price environment (DemandProfile plus the regulation market
in :mod:`swapgrid.regulation`).
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "SystemParams",
    "DemandProfile",
    "Decision",
    "StockPlan",
    "Configuration",
    "ALL_CONFIGURATIONS",
    "CostBreakdown",
    "MetricsReport",
    "load_params",
    "load_params_file",
    "dump_params",
    "baseline_params",
    "baseline_profile",
    "params_fingerprint",
]

HOURS_PER_DAY = 24


@dataclass(frozen=True)
class SystemParams:
    """Infrastructure, cost, and service-level parameters.

    Cost rates are hourly amortized values in $/h (stations, batteries) or
    $/km (transport); electricity prices are $/kWh per price scenario.
    Densities are per km^2.
    """

    rho_s: float = 0.04                 # swapping-station density
    truck_speed_kmh: float = 30.0
    reorder_cap: float = 30.0           # largest allowed re-order quantity
    charge_time_h: float = 0.78         # full charge at a central charger
    lambda_c_kw: float = 41.0           # central charger power per battery
    lambda_s_kw: float = 7.0            # on-site charger power per battery
    battery_kwh: Optional[float] = None  # energy per full charge; default derived
    c_charging_station: float = 11.10
    c_swap_station: float = 4.46        # recorded; not part of either objective
    c_onsite_station: float = 4.64
    c_transport_km: float = 1.13
    c_battery: float = 0.10
    c_battery_reg: float = 0.27
    c_energy: tuple = (0.068, 0.223)    # $/kWh per scenario (off-peak, peak)
    eps_swap: float = 0.03
    eps_charge: float = 0.03
    eps_reg: float = 0.03
    theta: float = 0.75
    r_b_cap: Optional[float] = None     # None: resolved to 2x minimum spare stock
    bernoulli_consistent_variance: bool = False

    def __post_init__(self):
        self.validate()

    @property
    def energy_per_charge_kwh(self) -> float:
        if self.battery_kwh is not None:
            return self.battery_kwh
        return self.lambda_c_kw * self.charge_time_h

    @property
    def charge_time_central(self) -> float:
        """Hours to recharge one battery at a charging station."""
        return self.energy_per_charge_kwh / self.lambda_c_kw

    @property
    def charge_time_onsite(self) -> float:
        """Hours to recharge one battery at a swapping station's own charger."""
        return self.energy_per_charge_kwh / self.lambda_s_kw

    def validate(self) -> None:
        positive = {
            "rho_s": self.rho_s,
            "truck_speed_kmh": self.truck_speed_kmh,
            "charge_time_h": self.charge_time_h,
            "lambda_c_kw": self.lambda_c_kw,
            "lambda_s_kw": self.lambda_s_kw,
        }
        for key, value in positive.items():
            if not value > 0.0:
                raise ValueError(f"{key} must be positive, got {value!r}")
        if self.battery_kwh is not None and not self.battery_kwh > 0.0:
            raise ValueError(f"battery_kwh must be positive, got {self.battery_kwh!r}")
        if not self.reorder_cap >= 1.0:
            raise ValueError(f"reorder_cap must be >= 1, got {self.reorder_cap!r}")
        nonneg = {
            "c_charging_station": self.c_charging_station,
            "c_swap_station": self.c_swap_station,
            "c_onsite_station": self.c_onsite_station,
            "c_transport_km": self.c_transport_km,
            "c_battery": self.c_battery,
            "c_battery_reg": self.c_battery_reg,
        }
        for key, value in nonneg.items():
            if value < 0.0:
                raise ValueError(f"{key} must be nonnegative, got {value!r}")
        if not self.c_battery > 0.0:
            raise ValueError(f"c_battery must be positive, got {self.c_battery!r}")
        if self.c_battery_reg < self.c_battery:
            raise ValueError(
                "c_battery_reg must be at least c_battery "
                f"({self.c_battery_reg!r} < {self.c_battery!r})")
        if self.lambda_c_kw < self.lambda_s_kw:
            raise ValueError(
                "lambda_c_kw must be at least lambda_s_kw "
                f"({self.lambda_c_kw!r} < {self.lambda_s_kw!r})")
        if len(self.c_energy) < 1 or any(v < 0.0 for v in self.c_energy):
            raise ValueError("c_energy must list one nonnegative price per scenario")
        for key, value in (("eps_swap", self.eps_swap),
                           ("eps_charge", self.eps_charge),
                           ("eps_reg", self.eps_reg)):
            if not 0.0 < value < 1.0:
                raise ValueError(f"{key} must lie in (0, 1), got {value!r}")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta!r}")
        if self.r_b_cap is not None and not self.r_b_cap > 0.0:
            raise ValueError(f"r_b_cap must be positive when given, got {self.r_b_cap!r}")


@dataclass(frozen=True, eq=False)
class DemandProfile:
    """Demand densities and price-scenario weights by period of day.

    kappa[z, n] is the fraction of period z spent in scenario n (rows sum
    to one), mu_bar[z, n] the mean swap-demand density (demands per hour
    per km^2), and sigma2_bar[z] the demand-density variance rate.
    """

    kappa: np.ndarray
    mu_bar: np.ndarray
    sigma2_bar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kappa", np.asarray(self.kappa, dtype=float))
        object.__setattr__(self, "mu_bar", np.asarray(self.mu_bar, dtype=float))
        object.__setattr__(self, "sigma2_bar", np.asarray(self.sigma2_bar, dtype=float))
        self.validate()

    @property
    def n_periods(self) -> int:
        return self.kappa.shape[0]

    @property
    def n_scenarios(self) -> int:
        return self.kappa.shape[1]

    @property
    def mu_bar_period(self) -> np.ndarray:
        """Scenario-weighted mean demand density per period."""
        return np.sum(self.kappa * self.mu_bar, axis=1)

    @property
    def mu_bar_overall(self) -> float:
        return float(np.mean(self.mu_bar_period))

    @property
    def sigma2_bar_overall(self) -> float:
        return float(np.mean(self.sigma2_bar))

    @property
    def sigma_bar_overall(self) -> float:
        return float(np.sqrt(self.sigma2_bar_overall))

    def validate(self) -> None:
        if self.kappa.ndim != 2 or self.kappa.shape[0] < 1:
            raise ValueError("kappa must be a (periods, scenarios) matrix")
        if self.mu_bar.shape != self.kappa.shape:
            raise ValueError("mu_bar must match kappa's shape")
        if self.sigma2_bar.shape != (self.kappa.shape[0],):
            raise ValueError("sigma2_bar must have one entry per period")
        if np.any(self.kappa < 0.0):
            raise ValueError("kappa entries must be nonnegative")
        if not np.allclose(self.kappa.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("kappa rows must sum to 1")
        if np.any(self.mu_bar < 0.0) or np.any(self.sigma2_bar < 0.0):
            raise ValueError("demand densities must be nonnegative")

    def scaled(self, density_factor: float) -> "DemandProfile":
        """Profile with all demand densities multiplied by density_factor."""
        if density_factor < 0.0:
            raise ValueError("density_factor must be nonnegative")
        return DemandProfile(
            kappa=self.kappa.copy(),
            mu_bar=self.mu_bar * density_factor,
            sigma2_bar=self.sigma2_bar * density_factor,
        )

    def equals(self, other: "DemandProfile") -> bool:
        return (
            np.array_equal(self.kappa, other.kappa)
            and np.array_equal(self.mu_bar, other.mu_bar)
            and np.array_equal(self.sigma2_bar, other.sigma2_bar)
        )


@dataclass(frozen=True)
class Decision:
    """Centralized design decision: charging-station density and re-order
    quantity.  The re-order quantity is continuous during optimization."""

    rho_c: float
    q: float

    def validate(self, params: SystemParams) -> None:
        if not 0.0 < self.rho_c <= params.rho_s:
            raise ValueError(
                f"rho_c must lie in (0, rho_s={params.rho_s}], got {self.rho_c!r}")
        if not 1.0 <= self.q <= params.reorder_cap:
            raise ValueError(
                f"q must lie in [1, reorder_cap={params.reorder_cap}], got {self.q!r}")


@dataclass(frozen=True)
class StockPlan:
    """Stock levels per unit area implied by a decision and service levels.

    primary: charged batteries held at charging stations.
    reorder: swap-station re-order point.
    breakpoint: re-order quantity where the deficit-variance model switches
    branches (inf when the degenerate branch never applies).
    spare / spare_eps: decentralized on-site stock and its calibrated
    stockout target (None for purely centralized plans).
    """

    primary: float
    reorder: float
    breakpoint: float
    spare: Optional[float] = None
    spare_eps: Optional[float] = None

    def __post_init__(self):
        if self.primary < 0.0 or self.reorder < 0.0:
            raise ValueError("stock levels must be nonnegative")
        if self.spare is not None and self.spare < 0.0:
            raise ValueError("spare stock must be nonnegative")


@dataclass(frozen=True)
class Configuration:
    """One of the four operating configurations."""

    architecture: str   # "centralized" or "decentralized"
    regulation: bool

    def __post_init__(self):
        if self.architecture not in ("centralized", "decentralized"):
            raise ValueError(f"unknown architecture {self.architecture!r}")

    @property
    def label(self) -> str:
        suffix = "+reg" if self.regulation else ""
        return f"{self.architecture}{suffix}"

    @classmethod
    def parse(cls, architecture: str, regulation: str) -> "Configuration":
        reg = {"on": True, "off": False}.get(regulation.lower())
        if reg is None:
            raise ValueError(f"regulation must be 'on' or 'off', got {regulation!r}")
        return cls(architecture=architecture.lower(), regulation=reg)


ALL_CONFIGURATIONS = (
    Configuration("centralized", False),
    Configuration("centralized", True),
    Configuration("decentralized", False),
    Configuration("decentralized", True),
)


@dataclass(frozen=True)
class CostBreakdown:
    """Cost-density decomposition in $/day/km^2.

    regulation_income enters as a negative contribution (money earned), so
    ``total`` is the plain sum of the five terms.  Configurations without a
    term carry an explicit zero there (transport under on-site charging,
    income with regulation off).
    """

    electricity: float
    station_depreciation: float
    battery_depreciation: float
    transport: float
    regulation_income: float = 0.0

    def __post_init__(self):
        if self.regulation_income > 0.0:
            raise ValueError("regulation_income is a negative contribution")

    @property
    def total(self) -> float:
        return (self.electricity + self.station_depreciation
                + self.battery_depreciation + self.transport
                + self.regulation_income)


@dataclass(frozen=True)
class MetricsReport:
    """Headline metrics for one configuration."""

    configuration: Configuration
    cost_density: float          # $/day/km^2
    battery_density: float       # batteries/km^2
    avg_reg_capacity: float      # regulation capacity, kW/km^2
    decomposition: CostBreakdown
    decision: Optional[Decision] = None
    stocks: Optional[StockPlan] = None

    def __post_init__(self):
        if self.battery_density < 0.0:
            raise ValueError("battery_density must be nonnegative")
        if self.avg_reg_capacity < 0.0:
            raise ValueError("avg_reg_capacity must be nonnegative")
        if abs(self.decomposition.total - self.cost_density) > 1e-9 * max(
                1.0, abs(self.cost_density)):
            raise ValueError("decomposition must sum to cost_density")


# --------------------------------------------------------------------------
# Configuration file handling.  Flat key-value format with sections; every
# key has a documented default matching the baseline case study, so an empty
# file loads the baseline.
# --------------------------------------------------------------------------

_DEFAULTS = {
    "stations": {"rho_s": "0.04", "truck_speed": "30.0", "reorder_cap": "30"},
    "charging": {"charge_time": "0.78", "lambda_c": "41.0", "lambda_s": "7.0"},
    "costs": {
        "charging_station": "11.10",
        "swap_station": "4.46",
        "onsite_station": "4.64",
        "transport_km": "1.13",
        "battery": "0.10",
        "battery_regulation": "0.27",
    },
    "electricity": {
        "offpeak": "0.068",
        "peak": "0.223",
        "peak_hours": "8,9,15,16,17,18,19",
    },
    "service": {
        "eps_swap": "0.03",
        "eps_charge": "0.03",
        "eps_regulation": "0.03",
        "theta": "0.75",
    },
    "demand": {
        "base_mean": "5.68",
        "base_std": "3.71",
        "busy_mean": "14.51",
        "busy_std": "3.90",
        "busy_start_hour": "9",
    },
    "model": {"bernoulli_consistent_variance": "false"},
}


def _get_float(cfg, section, key, lo=None, hi=None, lo_open=True, hi_open=True):
    if cfg.has_option(section, key):
        raw = cfg.get(section, key)
    else:
        # optional keys (e.g. service.r_b_cap) have no entry in _DEFAULTS
        raw = _DEFAULTS[section][key]
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"{section}.{key} must be a number, got {raw!r}") from exc
    if lo is not None and (value <= lo if lo_open else value < lo):
        op = ">" if lo_open else ">="
        raise ValueError(f"{section}.{key} must be {op} {lo}, got {value}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        op = "<" if hi_open else "<="
        raise ValueError(f"{section}.{key} must be {op} {hi}, got {value}")
    return value


def _get_hours(cfg, section, key) -> tuple:
    raw = cfg.get(section, key, fallback=_DEFAULTS[section][key])
    if not raw.strip():
        return ()
    try:
        hours = tuple(int(tok) for tok in raw.split(","))
    except ValueError as exc:
        raise ValueError(f"{section}.{key} must be comma-separated hours") from exc
    if any(h < 0 or h >= HOURS_PER_DAY for h in hours):
        raise ValueError(f"{section}.{key} hours must lie in [0, 23]")
    return hours


def _get_series(cfg, section, key) -> Optional[np.ndarray]:
    raw = cfg.get(section, key, fallback=None)
    if raw is None:
        return None
    try:
        values = np.array([float(tok) for tok in raw.split(",")], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{section}.{key} must be comma-separated numbers") from exc
    if values.size != HOURS_PER_DAY:
        raise ValueError(
            f"{section}.{key} must list {HOURS_PER_DAY} values, got {values.size}")
    return values


def load_params(text: str):
    """Parse configuration text into (SystemParams, DemandProfile).

    Missing keys take the documented baseline defaults.  Validation errors
    name the offending key.
    """
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cfg.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed configuration: {exc}") from exc

    rho_s = _get_float(cfg, "stations", "rho_s", lo=0.0)
    battery_kwh = None
    if cfg.has_option("charging", "battery_kwh"):
        battery_kwh = _get_float(cfg, "charging", "battery_kwh", lo=0.0)
    r_b_cap = None
    if cfg.has_option("service", "r_b_cap"):
        r_b_cap = _get_float(cfg, "service", "r_b_cap", lo=0.0)
    consistent_raw = cfg.get("model", "bernoulli_consistent_variance",
                             fallback=_DEFAULTS["model"]["bernoulli_consistent_variance"])
    if consistent_raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
        raise ValueError(
            f"model.bernoulli_consistent_variance must be boolean, got {consistent_raw!r}")
    consistent = consistent_raw.lower() in ("true", "1", "yes")

    params = SystemParams(
        rho_s=rho_s,
        truck_speed_kmh=_get_float(cfg, "stations", "truck_speed", lo=0.0),
        reorder_cap=_get_float(cfg, "stations", "reorder_cap", lo=1.0, lo_open=False),
        charge_time_h=_get_float(cfg, "charging", "charge_time", lo=0.0),
        lambda_c_kw=_get_float(cfg, "charging", "lambda_c", lo=0.0),
        lambda_s_kw=_get_float(cfg, "charging", "lambda_s", lo=0.0),
        battery_kwh=battery_kwh,
        c_charging_station=_get_float(cfg, "costs", "charging_station", lo=0.0, lo_open=False),
        c_swap_station=_get_float(cfg, "costs", "swap_station", lo=0.0, lo_open=False),
        c_onsite_station=_get_float(cfg, "costs", "onsite_station", lo=0.0, lo_open=False),
        c_transport_km=_get_float(cfg, "costs", "transport_km", lo=0.0, lo_open=False),
        c_battery=_get_float(cfg, "costs", "battery", lo=0.0, lo_open=False),
        c_battery_reg=_get_float(cfg, "costs", "battery_regulation", lo=0.0, lo_open=False),
        c_energy=(
            _get_float(cfg, "electricity", "offpeak", lo=0.0, lo_open=False),
            _get_float(cfg, "electricity", "peak", lo=0.0, lo_open=False),
        ),
        eps_swap=_get_float(cfg, "service", "eps_swap", lo=0.0, hi=1.0),
        eps_charge=_get_float(cfg, "service", "eps_charge", lo=0.0, hi=1.0),
        eps_reg=_get_float(cfg, "service", "eps_regulation", lo=0.0, hi=1.0),
        theta=_get_float(cfg, "service", "theta", lo=0.0, hi=1.0, hi_open=False),
        r_b_cap=r_b_cap,
        bernoulli_consistent_variance=consistent,
    )

    peak_hours = _get_hours(cfg, "electricity", "peak_hours")
    station_mean = _get_series(cfg, "demand", "period_means")
    station_std = _get_series(cfg, "demand", "period_stds")
    if (station_mean is None) != (station_std is None):
        raise ValueError("demand.period_means and demand.period_stds must be given together")
    if station_mean is None:
        base_mean = _get_float(cfg, "demand", "base_mean", lo=0.0, lo_open=False)
        base_std = _get_float(cfg, "demand", "base_std", lo=0.0, lo_open=False)
        busy_mean = _get_float(cfg, "demand", "busy_mean", lo=0.0, lo_open=False)
        busy_std = _get_float(cfg, "demand", "busy_std", lo=0.0, lo_open=False)
        switch = int(_get_float(cfg, "demand", "busy_start_hour",
                                lo=0.0, hi=float(HOURS_PER_DAY), lo_open=False))
        station_mean = np.where(np.arange(HOURS_PER_DAY) < switch, base_mean, busy_mean)
        station_std = np.where(np.arange(HOURS_PER_DAY) < switch, base_std, busy_std)
    if np.any(station_mean < 0.0) or np.any(station_std < 0.0):
        raise ValueError("demand means and stds must be nonnegative")

    profile = _profile_from_station_stats(rho_s, station_mean, station_std, peak_hours)
    return params, profile


def _profile_from_station_stats(rho_s, station_mean, station_std, peak_hours):
    z = HOURS_PER_DAY
    kappa = np.zeros((z, 2))
    kappa[:, 0] = 1.0
    for h in peak_hours:
        kappa[h] = (0.0, 1.0)
    mu_z = rho_s * np.asarray(station_mean, dtype=float)
    mu_bar = np.repeat(mu_z[:, None], 2, axis=1)
    sigma2_bar = rho_s * np.asarray(station_std, dtype=float) ** 2
    return DemandProfile(kappa=kappa, mu_bar=mu_bar, sigma2_bar=sigma2_bar)


def load_params_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_params(fh.read())


def baseline_params() -> SystemParams:
    """Parameters of the bundled urban case study."""
    return load_params("")[0]


def baseline_profile() -> DemandProfile:
    """Hourly demand profile of the bundled case study (two demand regimes,
    off-peak/peak electricity pricing)."""
    return load_params("")[1]


def dump_params(params: SystemParams, profile: DemandProfile) -> str:
    """Serialize parameters and profile to canonical configuration text.

    Only two-scenario profiles built from per-station statistics can be
    serialized, which covers every profile this package constructs.
    """
    if profile.n_scenarios != 2:
        raise ValueError("only two-scenario profiles serialize to config text")
    peak_hours = [z for z in range(profile.n_periods) if profile.kappa[z, 1] == 1.0]
    station_mean = profile.mu_bar_period / params.rho_s
    station_std = np.sqrt(profile.sigma2_bar / params.rho_s)

    cfg = configparser.ConfigParser()
    cfg["stations"] = {
        "rho_s": repr(params.rho_s),
        "truck_speed": repr(params.truck_speed_kmh),
        "reorder_cap": repr(params.reorder_cap),
    }
    charging = {
        "charge_time": repr(params.charge_time_h),
        "lambda_c": repr(params.lambda_c_kw),
        "lambda_s": repr(params.lambda_s_kw),
    }
    if params.battery_kwh is not None:
        charging["battery_kwh"] = repr(params.battery_kwh)
    cfg["charging"] = charging
    cfg["costs"] = {
        "charging_station": repr(params.c_charging_station),
        "swap_station": repr(params.c_swap_station),
        "onsite_station": repr(params.c_onsite_station),
        "transport_km": repr(params.c_transport_km),
        "battery": repr(params.c_battery),
        "battery_regulation": repr(params.c_battery_reg),
    }
    cfg["electricity"] = {
        "offpeak": repr(params.c_energy[0]),
        "peak": repr(params.c_energy[1]),
        "peak_hours": ",".join(str(h) for h in peak_hours),
    }
    service = {
        "eps_swap": repr(params.eps_swap),
        "eps_charge": repr(params.eps_charge),
        "eps_regulation": repr(params.eps_reg),
        "theta": repr(params.theta),
    }
    if params.r_b_cap is not None:
        service["r_b_cap"] = repr(params.r_b_cap)
    cfg["service"] = service
    cfg["demand"] = {
        "period_means": ",".join(repr(float(v)) for v in station_mean),
        "period_stds": ",".join(repr(float(v)) for v in station_std),
    }
    cfg["model"] = {
        "bernoulli_consistent_variance":
            "true" if params.bernoulli_consistent_variance else "false",
    }
    out = io.StringIO()
    cfg.write(out)
    return out.getvalue()


def params_fingerprint(params: SystemParams, profile: DemandProfile) -> str:
    """Stable hex digest of the full parameter set, for run manifests."""
    return hashlib.sha256(dump_params(params, profile).encode("utf-8")).hexdigest()
