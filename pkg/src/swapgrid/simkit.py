"""Discrete-event Monte-Carlo check of the closed-form stock model.

The planner's formulas are stationary sizing rules, so the simulator runs
the operational processes they abstract: stations trigger a re-order each
time another truckload of demand accumulates, trucks haul charged batteries
one way for T^T hours, depleted ones ride back, and recharging takes T^C.
Demand follows the same normal (Brownian) approximation the formulas are
derived under: inter-trigger times are inverse-Gaussian first-passage
draws, lead-window demand is normal truncated at zero.  A compound-Poisson
demand path is available behind a switch for robustness runs.

Accounting choices worth knowing about:

* The reported deficit is the inventory-position deficit of a charging
  station, Q times the number of orders somewhere in their
  trigger-to-recharged window plus Q per station (the truckload cycling at
  the stations).  Its stationary variance is exactly the piecewise
  deficit-variance formula; its mean is (2T^T + T^C)mu + Q per station,
  a one-way-travel term T^T mu below the closed-form mean, which treats
  the return leg as instantaneous.  Validation against the closed form
  therefore uses geometries where T^T mu is small against one MC standard
  error.
* Charge stockout is the fraction of time the hub's committed shelf
  (primary stock minus truckloads in flight) is negative.  Committing the
  full truckload at the trigger instant is earlier than any physical
  dispatch could need it, so the measured fraction is conservative.
* A station keeps at most one order outstanding; the next trigger never
  precedes the previous delivery.

Inter-trigger times and lead-window demands are drawn from their exact
marginals rather than one shared path; every reported statistic depends
on only one of the two, so their joint law never enters.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .core import Decision, DemandProfile, StockPlan, SystemParams
from .geometry import one_way_travel_time

__all__ = [
    "SimConfig",
    "SimStats",
    "InTransitReport",
    "simulate_centralized",
    "simulate_decentralized",
    "measure_in_transit",
    "horizon_for_cycles",
]

_DEMAND_MODELS = ("normal", "compound_poisson")


@dataclass(frozen=True)
class SimConfig:
    """Run-length, geometry, and reproducibility knobs.

    area_km2 sets how many stations get simulated; None means one charging
    district (area 1/rho_c centralized, 1/rho_s decentralized).  Warmup
    defaults to ten days; statistics use the post-warmup window only.
    """

    horizon_h: float
    warmup_h: float = 240.0
    seed: int = 0
    area_km2: Optional[float] = None
    batches: int = 32
    demand_model: str = "normal"

    def __post_init__(self):
        if not self.warmup_h >= 0.0:
            raise ValueError(f"warmup_h must be >= 0, got {self.warmup_h!r}")
        if not self.horizon_h > self.warmup_h:
            raise ValueError(
                f"horizon_h must exceed warmup_h, got {self.horizon_h!r} "
                f"<= {self.warmup_h!r}")
        if self.area_km2 is not None and not self.area_km2 > 0.0:
            raise ValueError(f"area_km2 must be positive, got {self.area_km2!r}")
        if self.batches < 4:
            raise ValueError("batches must be at least 4 for batch-means errors")
        if self.demand_model not in _DEMAND_MODELS:
            raise ValueError(
                f"demand_model must be one of {_DEMAND_MODELS}, "
                f"got {self.demand_model!r}")


@dataclass(frozen=True)
class SimStats:
    """Point estimates with standard errors from one replication.

    Fields not produced by a given simulation mode stay None.  Deficit
    statistics are per charging station (hub 0 when several are tiled);
    in-transit statistics are per km^2 in the two-point truckload units;
    stockouts are probabilities.
    """

    horizon_h: float
    warmup_h: float
    n_stations: int
    n_hubs: int
    cycles: int
    swap_stockout: Optional[float] = None
    swap_stockout_se: Optional[float] = None
    lost_sales_rate: Optional[float] = None
    charge_stockout: Optional[float] = None
    charge_stockout_se: Optional[float] = None
    deficit_mean: Optional[float] = None
    deficit_mean_se: Optional[float] = None
    deficit_var: Optional[float] = None
    deficit_var_se: Optional[float] = None
    in_transit_mean: Optional[float] = None
    in_transit_mean_se: Optional[float] = None
    in_transit_var: Optional[float] = None
    in_transit_var_se: Optional[float] = None
    avg_capacity_kw: Optional[float] = None
    avg_capacity_se: Optional[float] = None
    onsite_stockout: Optional[float] = None
    onsite_stockout_se: Optional[float] = None
    avg_on_hand: Optional[float] = None
    conservation_ok: bool = True

    def __post_init__(self):
        for name in ("swap_stockout", "charge_stockout", "onsite_stockout"):
            value = getattr(self, name)
            if value is not None and not -1e-12 <= value <= 1.0 + 1e-12:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.deficit_var is not None and self.deficit_var < 0.0:
            raise ValueError("deficit_var must be nonnegative")
        if self.in_transit_var is not None and self.in_transit_var < -1e-12:
            raise ValueError("in_transit_var must be nonnegative")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _draw_inverse_gaussian(rng, mean: float, shape: float) -> float:
    # Michael-Schucany-Haas transform; the sqrt argument is >= 0 exactly,
    # the max() only absorbs float rounding.
    y = rng.standard_normal() ** 2
    x = (mean + mean * mean * y / (2.0 * shape)
         - (mean / (2.0 * shape)) * math.sqrt(max(4.0 * mean * shape * y
                                                  + (mean * y) ** 2, 0.0)))
    if x <= 0.0:
        x = mean * 1e-12
    if rng.random() <= mean / (mean + x):
        return x
    return mean * mean / x


def _cp_rates(mu: float, sigma2: float):
    """Arrival rate and geometric batch parameter matching (mu, sigma2).

    Batches are geometric on {1, 2, ...}; matching both moments needs
    sigma2 >= mu (index of dispersion of a compound Poisson is >= 1).
    """
    if sigma2 < mu:
        raise ValueError(
            "compound-Poisson demand needs sigma2 >= mu per station")
    p = 2.0 * mu / (sigma2 + mu)
    return mu * p, p


def _draw_cp_cycle(rng, nu: float, p: float, quantity: float, window: float):
    """One re-order cycle on a compound-Poisson path.

    Returns (tau, x): the time for cumulative demand to reach `quantity`
    and the demand inside the first `window` hours of the cycle.
    """
    t = 0.0
    total = 0.0
    x = 0.0
    tau = None
    while True:
        t += rng.exponential(1.0 / nu)
        size = rng.geometric(p)
        if tau is None:
            total += size
            if total >= quantity:
                tau = t
        if t <= window:
            x += size
        elif tau is not None:
            return tau, x


def _batch_se(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if values.size < 2:
        return float("inf")
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def horizon_for_cycles(decision: Decision, params: SystemParams,
                       profile: DemandProfile, cycles: int,
                       warmup_h: float = 240.0) -> float:
    """Horizon long enough for roughly `cycles` post-warmup re-orders in
    one charging district."""
    mu_st = profile.mu_bar_overall / params.rho_s
    if mu_st <= 0.0:
        raise ValueError("cannot target cycles with zero demand")
    travel = one_way_travel_time(decision.rho_c, params.truck_speed_kmh)
    gap = max(decision.q / mu_st, travel)
    n_st = max(1, round(params.rho_s / decision.rho_c))
    return warmup_h + cycles * gap / n_st


def simulate_centralized(decision: Decision, stocks: StockPlan,
                         params: SystemParams, profile: DemandProfile,
                         simcfg: SimConfig) -> SimStats:
    """Event-driven replication of the centralized (r, Q) operation."""
    decision.validate(params)
    rho_c, q = decision.rho_c, decision.q
    area = simcfg.area_km2 if simcfg.area_km2 is not None else 1.0 / rho_c
    n_hubs = int(round(rho_c * area))
    n_per_hub = int(round(params.rho_s / rho_c))
    if n_hubs < 1 or n_per_hub < 1:
        raise ValueError("declared area holds no stations; enlarge area_km2")
    n_st = n_hubs * n_per_hub

    mu_st = profile.mu_bar_overall / params.rho_s
    sig2_st = profile.sigma2_bar_overall / params.rho_s
    r_st = stocks.reorder / params.rho_s
    hub_stock = stocks.primary / rho_c
    travel = one_way_travel_time(rho_c, params.truck_speed_kmh)
    flight = 2.0 * travel + params.charge_time_central

    rng = np.random.default_rng(simcfg.seed)
    horizon, warmup = simcfg.horizon_h, simcfg.warmup_h
    n_batches = simcfg.batches
    batch_len = (horizon - warmup) / n_batches

    compound = simcfg.demand_model == "compound_poisson"
    if compound and mu_st > 0.0:
        nu, p_geo = _cp_rates(mu_st, sig2_st)
    ig_mean = q / mu_st if mu_st > 0.0 else math.inf
    ig_shape = q * q / sig2_st if sig2_st > 0.0 else math.inf
    lead_mean = travel * mu_st
    lead_sd = math.sqrt(travel * sig2_st)
    swap_thr = r_st + 1.0

    # state
    active = [0] * n_hubs          # orders in their trigger->recharged window
    dispatched = [0] * n_hubs
    completed = [0] * n_hubs
    outbound = 0
    violations = 0

    tw = np.zeros(n_batches)
    d_sum = np.zeros(n_batches)
    d2_sum = np.zeros(n_batches)
    cs_sum = np.zeros(n_batches)
    o_sum = np.zeros(n_batches)
    cycles = 0
    stockouts = 0
    lost = 0.0

    heap = []
    seq = 0
    if mu_st > 0.0:
        for sid in range(n_st):
            heapq.heappush(heap, (0.0, seq, 0, sid))
            seq += 1

    deficit0 = q * (active[0] + n_per_hub)
    charge_frac = 0.0               # fraction of hubs with a negative shelf
    prev_t = 0.0

    def accumulate(upto: float) -> None:
        a = max(prev_t, warmup)
        b = min(upto, horizon)
        if b <= a:
            return
        idx = min(int((0.5 * (a + b) - warmup) / batch_len), n_batches - 1)
        dt = b - a
        tw[idx] += dt
        d_sum[idx] += deficit0 * dt
        d2_sum[idx] += deficit0 * deficit0 * dt
        cs_sum[idx] += charge_frac * dt
        o_sum[idx] += outbound * dt

    while heap:
        t, _, kind, sid = heapq.heappop(heap)
        if t > horizon:
            break
        accumulate(t)
        prev_t = t
        hub = sid // n_per_hub
        if kind == 0:                       # trigger: order goes out
            active[hub] += 1
            dispatched[hub] += 1
            outbound += 1
            heapq.heappush(heap, (t + travel, seq, 1, sid)); seq += 1
            heapq.heappush(heap, (t + flight, seq, 2, sid)); seq += 1
            if compound:
                tau, x = _draw_cp_cycle(rng, nu, p_geo, q, travel)
            else:
                tau = _draw_inverse_gaussian(rng, ig_mean, ig_shape)
                x = max(lead_mean + lead_sd * rng.standard_normal(), 0.0)
            heapq.heappush(heap, (t + max(tau, travel), seq, 0, sid)); seq += 1
            if t > warmup:
                cycles += 1
                if x >= swap_thr:
                    stockouts += 1
                    lost += x - swap_thr
        elif kind == 1:                     # delivery at the station
            outbound -= 1
        else:                               # batteries recharged at the hub
            active[hub] -= 1
            completed[hub] += 1
        if (active[hub] != dispatched[hub] - completed[hub]
                or active[hub] < 0 or outbound < 0 or outbound > sum(active)):
            violations += 1
        deficit0 = q * (active[0] + n_per_hub)
        charge_frac = sum(
            1 for a_h in active if hub_stock - q * a_h < 0.0) / n_hubs
    accumulate(horizon)

    total_t = float(np.sum(tw))
    stats = dict(
        horizon_h=horizon, warmup_h=warmup, n_stations=n_st, n_hubs=n_hubs,
        cycles=cycles, conservation_ok=violations == 0,
    )
    if total_t > 0.0:
        live = tw > 0.0
        d_mean = float(np.sum(d_sum) / total_t)
        d2_mean = float(np.sum(d2_sum) / total_t)
        d_var = max(d2_mean - d_mean * d_mean, 0.0)
        m_b = d_sum[live] / tw[live]
        v_b = d2_sum[live] / tw[live] - 2.0 * d_mean * m_b + d_mean * d_mean
        p_out = float(np.sum(o_sum) / total_t) / n_st
        p_b = (o_sum[live] / tw[live]) / n_st
        unit = params.rho_s * q          # two-point support in density units
        cap_mean = (params.lambda_c_kw * stocks.primary
                    + params.lambda_s_kw * (stocks.reorder + params.rho_s * q)
                    - (params.lambda_c_kw + params.lambda_s_kw) * unit * p_out)
        stats.update(
            charge_stockout=float(np.sum(cs_sum) / total_t),
            charge_stockout_se=_batch_se(cs_sum[live] / tw[live]),
            deficit_mean=d_mean,
            deficit_mean_se=_batch_se(m_b),
            deficit_var=d_var,
            deficit_var_se=_batch_se(v_b),
            in_transit_mean=unit * p_out,
            in_transit_mean_se=unit * _batch_se(p_b),
            in_transit_var=unit * unit * p_out * (1.0 - p_out),
            in_transit_var_se=unit * unit * abs(1.0 - 2.0 * p_out) * _batch_se(p_b),
            avg_capacity_kw=cap_mean,
            avg_capacity_se=(params.lambda_c_kw + params.lambda_s_kw)
            * unit * _batch_se(p_b),
        )
    if cycles > 0:
        p_hat = stockouts / cycles
        stats.update(
            swap_stockout=p_hat,
            swap_stockout_se=math.sqrt(p_hat * (1.0 - p_hat) / cycles),
            lost_sales_rate=float(lost) / (total_t * n_st) if total_t > 0 else 0.0,
        )
    return SimStats(**stats)


def simulate_decentralized(r_b: float, params: SystemParams,
                           profile: DemandProfile,
                           simcfg: SimConfig) -> SimStats:
    """On-site charging replication.

    Each swap sends the depleted battery straight to the station's own
    charger for T^C hours, so the charged shelf is (r_B per station plus
    one) minus the demand of the trailing T^C window.  Stockout is the
    fraction of time that window demand meets or exceeds the whole shelf.
    """
    if r_b < 0.0:
        raise ValueError(f"r_b must be nonnegative, got {r_b!r}")
    area = simcfg.area_km2 if simcfg.area_km2 is not None else 1.0 / params.rho_s
    n_st = int(round(params.rho_s * area))
    if n_st < 1:
        raise ValueError("declared area holds no stations; enlarge area_km2")

    mu_st = profile.mu_bar_overall / params.rho_s
    sig2_st = profile.sigma2_bar_overall / params.rho_s
    window = params.charge_time_onsite
    thr = r_b / params.rho_s + 1.0

    steps_per_window = 64
    dt = window / steps_per_window
    n_steps = int(math.ceil(simcfg.horizon_h / dt))
    # the rolling window must fill before anything is measured
    warm_steps = max(int(simcfg.warmup_h / dt), steps_per_window)
    if warm_steps >= n_steps:
        raise ValueError("horizon too short for the charge window warmup")

    rng = np.random.default_rng(simcfg.seed)
    compound = simcfg.demand_model == "compound_poisson"
    if compound and mu_st > 0.0:
        nu, p_geo = _cp_rates(mu_st, sig2_st)

    n_batches = simcfg.batches
    post_steps = n_steps - warm_steps
    batch_of = np.minimum(
        (np.arange(post_steps) * n_batches) // post_steps, n_batches - 1)

    hit_sum = np.zeros(n_batches)
    hit_n = np.zeros(n_batches)
    on_hand_sum = 0.0

    chunk = 1 << 16
    carry = np.zeros((n_st, steps_per_window))
    sd = math.sqrt(sig2_st * dt)
    done = 0
    while done < n_steps:
        m = min(chunk, n_steps - done)
        if mu_st <= 0.0:
            inc = np.zeros((n_st, m))
        elif compound:
            counts = rng.poisson(nu * dt, size=(n_st, m))
            extra = rng.negative_binomial(np.maximum(counts, 1), p_geo)
            inc = np.where(counts > 0, counts + extra, 0).astype(float)
        else:
            inc = mu_st * dt + sd * rng.standard_normal((n_st, m))
        path = np.concatenate([carry, inc], axis=1)
        csum = np.cumsum(path, axis=1)
        w = csum[:, steps_per_window:] - csum[:, :-steps_per_window]
        carry = path[:, -steps_per_window:]

        lo = max(warm_steps - done, 0)
        if lo < m:
            w_post = w[:, lo:]
            hits = (w_post >= thr).mean(axis=0)
            idx = batch_of[done + lo - warm_steps:done + m - warm_steps]
            hit_sum += np.bincount(idx, weights=hits, minlength=n_batches)
            hit_n += np.bincount(idx, minlength=n_batches)
            on_hand_sum += float(np.sum(np.maximum(thr - w_post, 0.0)))
        done += m

    total_n = float(np.sum(hit_n))
    p_hat = float(np.sum(hit_sum) / total_n)
    live = hit_n > 0
    return SimStats(
        horizon_h=simcfg.horizon_h, warmup_h=simcfg.warmup_h,
        n_stations=n_st, n_hubs=0,
        cycles=int(total_n) // steps_per_window,
        onsite_stockout=p_hat,
        onsite_stockout_se=_batch_se(hit_sum[live] / hit_n[live]),
        avg_on_hand=on_hand_sum / (total_n * n_st),
    )


@dataclass(frozen=True)
class InTransitReport:
    """Empirical truckload-in-flight moments per period, against both
    candidate variance forms."""

    mean: np.ndarray
    mean_se: np.ndarray
    var: np.ndarray
    var_se: np.ndarray
    q_support_var: np.ndarray
    consistent_var: np.ndarray
    verdicts: tuple

    def overall(self) -> str:
        if all(v in ("consistent", "both") for v in self.verdicts):
            return "consistent"
        if all(v in ("q_support", "both") for v in self.verdicts):
            return "q_support"
        return "mixed"


def measure_in_transit(decision: Decision, params: SystemParams,
                       profile: DemandProfile,
                       simcfg: SimConfig) -> InTransitReport:
    """Sample the per-period in-flight truckload distribution.

    One station's outbound leg is a renewal on-off process: on for T^T
    after each trigger, off until the next.  Each period is simulated
    stationary at its own demand rate for the configured horizon, and the
    measured two-point moments are compared with two candidate variance
    forms: one with jump size Q and one with jump size rho_s*Q, the areal
    truckload the two-point support actually implies.
    """
    decision.validate(params)
    travel = one_way_travel_time(decision.rho_c, params.truck_speed_kmh)
    q = decision.q
    rng = np.random.default_rng(simcfg.seed)
    unit = params.rho_s * q
    sig2_st = profile.sigma2_bar_overall / params.rho_s

    means, mean_ses, vars_, var_ses, verdicts = [], [], [], [], []
    q_vars, cons_vars = [], []
    for mu_z in profile.mu_bar_period:
        mu_st = mu_z / params.rho_s
        t_mu = travel * mu_z
        q_var = t_mu * (q - t_mu)
        cons = t_mu * (params.rho_s * q - t_mu)
        q_vars.append(q_var)
        cons_vars.append(cons)
        if mu_st <= 0.0:
            means.append(0.0); mean_ses.append(0.0)
            vars_.append(0.0); var_ses.append(0.0)
            verdicts.append("both")
            continue
        n_cycles = max(int(simcfg.horizon_h * mu_st / q), 4 * simcfg.batches)
        taus = np.empty(n_cycles)
        ig_mean = q / mu_st
        ig_shape = q * q / max(sig2_st, 1e-30)
        for i in range(n_cycles):
            taus[i] = _draw_inverse_gaussian(rng, ig_mean, ig_shape)
        gaps = np.maximum(taus, travel)
        blocks = np.array_split(gaps, simcfg.batches)
        p_b = np.array([b.size * travel / np.sum(b) for b in blocks])
        p_hat = n_cycles * travel / float(np.sum(gaps))
        se_p = _batch_se(p_b)
        mean = unit * p_hat
        var = unit * unit * p_hat * (1.0 - p_hat)
        se_var = unit * unit * abs(1.0 - 2.0 * p_hat) * se_p
        means.append(mean)
        mean_ses.append(unit * se_p)
        vars_.append(var)
        var_ses.append(se_var)
        ok_q = abs(var - q_var) <= 3.0 * se_var
        ok_cons = abs(var - cons) <= 3.0 * se_var
        verdicts.append("both" if ok_q and ok_cons
                        else "q_support" if ok_q
                        else "consistent" if ok_cons else "neither")
    return InTransitReport(
        mean=np.array(means), mean_se=np.array(mean_ses),
        var=np.array(vars_), var_se=np.array(var_ses),
        q_support_var=np.array(q_vars), consistent_var=np.array(cons_vars),
        verdicts=tuple(verdicts),
    )
