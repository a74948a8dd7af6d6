"""Command-line surface.

Five subcommands: ``eta`` (per-period capacity fractions from an AGC day),
``optimize`` (cost minimization for one architecture), ``sweep`` (one study
axis across configurations, CSV plus line charts), ``simulate`` (discrete
event validation of a given design), and ``report`` (four-configuration
summary with figures).

Every command that writes to an output directory drops a manifest.json
there first, before any result file, so a run can be reproduced from the
directory alone.  Errors leave a single JSON line on stderr and a nonzero
exit code.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import __version__
from .core import (
    ALL_CONFIGURATIONS,
    Configuration,
    Decision,
    baseline_params,
    baseline_profile,
    load_params_file,
    params_fingerprint,
)
from .inventory import stock_plan
from .optimizer import optimize_centralized, sensitivity_surface
from .regulation import AgcTrace, RegulationMarket
from .scenarios import (
    SweepSpec,
    normalize_radar,
    run_configuration,
    run_all_configurations,
    scale_demand,
    sweep,
    sweep_rows,
)
from .simkit import SimConfig, simulate_centralized, simulate_decentralized

__all__ = ["RunManifest", "CliError", "main"]

_CONFIG_BY_LABEL = {c.label: c for c in ALL_CONFIGURATIONS}


class CliError(Exception):
    """Operator-facing failure with a machine-readable category."""

    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run, written before any result."""

    command: str
    argv: tuple
    inputs: dict
    seed: Optional[int]
    out_dir: str
    version: str
    params_fingerprint: str

    def write(self, out_dir: Path) -> Path:
        payload = dataclasses.asdict(self)
        payload["argv"] = list(self.argv)
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


# --------------------------------------------------------------------------
# Shared plumbing.
# --------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_params(args):
    if args.config is None:
        return baseline_params(), baseline_profile()
    try:
        return load_params_file(args.config)
    except FileNotFoundError as exc:
        raise CliError("missing-file", f"parameter file not found: {args.config}") from exc


def _load_market(args, theta: float) -> RegulationMarket:
    """AGC/price pair from flags, or the bundled sample day if neither given."""
    agc, prices = getattr(args, "agc", None), getattr(args, "prices", None)
    if agc is None and prices is None:
        return RegulationMarket.bundled(theta)
    if agc is None or prices is None:
        missing = "--prices" if prices is None else "--agc"
        raise CliError(
            "missing-input",
            f"a regulation market needs both an AGC file and a price file; {missing} is missing")
    for path in (agc, prices):
        if not Path(path).exists():
            raise CliError("missing-file", f"market data file not found: {path}")
    return RegulationMarket.from_csv(agc, prices, theta)


def _prepare_out(args, params, profile, extra_inputs=None,
                 market_used: bool = True) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    inputs = {"config": str(args.config) if args.config else "bundled:baseline.ini"}
    if market_used:
        for name in ("agc", "prices"):
            value = getattr(args, name, None)
            if value is not None:
                inputs[name] = str(value)
            elif hasattr(args, name):
                inputs[name] = f"bundled:{name}_sample_day.csv"
    if extra_inputs:
        inputs.update(extra_inputs)
    manifest = RunManifest(
        command=args.command,
        argv=tuple(args._argv),
        inputs=inputs,
        seed=getattr(args, "seed", None),
        out_dir=str(out),
        version=__version__,
        params_fingerprint=params_fingerprint(params, profile),
    )
    manifest.write(out)
    return out


def _breakdown_cells(decomp):
    return [decomp.electricity, decomp.station_depreciation,
            decomp.battery_depreciation, decomp.transport,
            decomp.regulation_income]


_BREAKDOWN_COLS = ["electricity", "station_depreciation",
                   "battery_depreciation", "transport", "regulation_income"]


def _report_row(rep):
    dec, stocks = rep.decision, rep.stocks
    return ([rep.configuration.label,
             dec.rho_c if dec else None,
             dec.q if dec else None,
             stocks.primary if stocks else None,
             stocks.reorder if stocks else None,
             stocks.spare if stocks and stocks.spare is not None else None,
             rep.cost_density, rep.battery_density, rep.avg_reg_capacity]
            + _breakdown_cells(rep.decomposition))


_REPORT_HEADER = (["configuration", "rho_c", "q", "primary", "reorder",
                   "spare", "cost_density", "battery_density",
                   "avg_reg_capacity"] + _BREAKDOWN_COLS)


# --------------------------------------------------------------------------
# Subcommands.
# --------------------------------------------------------------------------

def cmd_eta(args) -> int:
    if args.agc is None:
        data = resources.files("swapgrid") / "data"
        with resources.as_file(data / "agc_sample_day.csv") as path:
            trace = AgcTrace.from_csv(path)
    else:
        if not Path(args.agc).exists():
            raise CliError("missing-file", f"AGC file not found: {args.agc}")
        trace = AgcTrace.from_csv(args.agc)
    etas = trace.eta_profile(args.theta)
    header = ["period", "eta"]
    rows = [[z, float(eta)] for z, eta in enumerate(etas)]
    if args.out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    else:
        params, profile = baseline_params(), baseline_profile()
        out = _prepare_out(args, params, profile)
        _write_csv(out / "eta.csv", header, rows)
    return 0


def cmd_optimize(args) -> int:
    params, profile = _load_params(args)
    config = Configuration(args.architecture, args.regulation)
    market = _load_market(args, params.theta) if args.regulation else None
    out = _prepare_out(args, params, profile, market_used=args.regulation)
    rep = run_configuration(config, params, profile, market=market,
                            mc_samples=args.mc_samples, seed=args.seed)
    _write_csv(out / "solution.csv", _REPORT_HEADER, [_report_row(rep)])
    print(f"{config.label}: cost density {rep.cost_density:.4f} $/day/km^2 "
          f"-> {out / 'solution.csv'}")
    return 0


def cmd_sweep(args) -> int:
    params, profile = _load_params(args)
    try:
        points = tuple(float(tok) for tok in args.points.split(","))
    except ValueError as exc:
        raise CliError("invalid-input", f"bad --points list: {args.points!r}") from exc
    labels = [tok.strip() for tok in args.configs.split(",")]
    unknown = [lb for lb in labels if lb not in _CONFIG_BY_LABEL]
    if unknown:
        raise CliError(
            "invalid-input",
            f"unknown configurations {unknown}; choose from {sorted(_CONFIG_BY_LABEL)}")
    configs = tuple(_CONFIG_BY_LABEL[lb] for lb in labels)
    market = None
    if any(c.regulation for c in configs):
        market = _load_market(args, params.theta)
    try:
        spec = SweepSpec(axis=args.axis, points=points, configurations=configs)
    except ValueError as exc:
        raise CliError("invalid-input", str(exc)) from exc
    out = _prepare_out(args, params, profile, market_used=market is not None)
    swept = sweep(spec, params, profile, market=market,
                  mc_samples=args.mc_samples, seed=args.seed)
    rows = sweep_rows(swept)
    header = ["axis", "value", "configuration", "metric", "metric_value"] + _BREAKDOWN_COLS
    _write_csv(out / "sweep.csv", header,
               [[r[k] for k in header] for r in rows])
    from .plots import plot_sweep
    for metric in ("cost_density", "battery_density", "avg_reg_capacity"):
        plot_sweep(swept, metric, out / f"sweep_{metric}.svg")
    print(f"{len(rows)} rows -> {out / 'sweep.csv'}")
    return 0


def cmd_simulate(args) -> int:
    params, profile = _load_params(args)
    try:
        simcfg = SimConfig(horizon_h=args.horizon, warmup_h=args.warmup,
                           seed=args.seed, area_km2=args.area,
                           batches=args.batches, demand_model=args.demand_model)
    except ValueError as exc:
        raise CliError("invalid-input", str(exc)) from exc
    if args.architecture == "centralized":
        if args.rho_c is None or args.q is None:
            raise CliError("missing-input",
                           "centralized simulation needs --rho-c and --q")
        try:
            decision = Decision(rho_c=args.rho_c, q=args.q)
            decision.validate(params)
            stocks = stock_plan(decision, params, profile)
        except ValueError as exc:
            raise CliError("invalid-input", str(exc)) from exc
        if args.primary is not None:
            stocks = dataclasses.replace(stocks, primary=args.primary)
        if args.reorder is not None:
            stocks = dataclasses.replace(stocks, reorder=args.reorder)
        out = _prepare_out(args, params, profile)
        stats = simulate_centralized(decision, stocks, params, profile, simcfg)
    else:
        if args.r_b is None:
            raise CliError("missing-input",
                           "decentralized simulation needs --r-b")
        out = _prepare_out(args, params, profile)
        try:
            stats = simulate_decentralized(args.r_b, params, profile, simcfg)
        except ValueError as exc:
            raise CliError("invalid-input", str(exc)) from exc
    rows = [[k, v] for k, v in stats.as_dict().items() if v is not None]
    _write_csv(out / "stats.csv", ["metric", "value"], rows)
    print(f"{stats.cycles} cycles -> {out / 'stats.csv'}")
    return 0


def cmd_report(args) -> int:
    params, profile = _load_params(args)
    if args.scale != 1.0:
        params, profile = scale_demand(params, profile, args.scale)
    market = _load_market(args, params.theta)
    out = _prepare_out(args, params, profile,
                       extra_inputs={"scale": repr(float(args.scale))})
    reports = run_all_configurations(params, profile, market=market,
                                     mc_samples=args.mc_samples, seed=args.seed)
    _write_csv(out / "report.csv", _REPORT_HEADER,
               [_report_row(rep) for rep in reports])
    from .plots import plot_config_bars, plot_eta, plot_radar, plot_surface
    plot_config_bars(reports, out / "bars.svg")
    plot_radar(reports, normalize_radar(reports), out / "radar.svg")
    plot_eta(market, out / "eta.svg")
    base = optimize_centralized(params, profile)
    surface = sensitivity_surface(params, profile)
    plot_surface(surface, out / "surface.svg", best=base.decision)
    print(f"4 configurations -> {out / 'report.csv'} (+4 figures)")
    return 0


# --------------------------------------------------------------------------
# Parser.
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapgrid",
        description="Location-inventory-grid planning for battery swapping networks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, out_required=True):
        p.add_argument("--config", default=None,
                       help="parameter INI file (default: bundled baseline)")
        p.add_argument("--out", required=out_required, default=None,
                       help="output directory")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")

    def add_market(p):
        p.add_argument("--agc", default=None,
                       help="AGC CSV (timestamp,signal); bundled sample day if "
                            "neither market file is given")
        p.add_argument("--prices", default=None,
                       help="price CSV (period,price_usd_per_mw)")

    p = sub.add_parser("eta", help="per-period minimum capacity fractions")
    p.add_argument("--agc", default=None, help="AGC CSV (timestamp,signal)")
    p.add_argument("--theta", type=float, default=0.75,
                   help="mileage performance threshold")
    p.add_argument("--config", default=None, help=argparse.SUPPRESS)
    p.add_argument("--out", default=None, help="output directory (default: stdout)")
    p.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("optimize", help="minimize cost density for one architecture")
    add_common(p)
    add_market(p)
    p.add_argument("--architecture", choices=("centralized", "decentralized"),
                   default="centralized")
    p.add_argument("--regulation", action="store_true",
                   help="sell frequency regulation")
    p.add_argument("--mc-samples", type=int, default=200_000,
                   help="samples for the on-site service calibration")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="study one axis across configurations")
    add_common(p)
    add_market(p)
    p.add_argument("--axis", choices=("demand", "power", "battery_cost"),
                   required=True)
    p.add_argument("--points", required=True,
                   help="comma-separated, strictly increasing values")
    p.add_argument("--configs",
                   default=",".join(c.label for c in ALL_CONFIGURATIONS),
                   help="comma-separated configuration labels")
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="discrete-event validation of a design")
    add_common(p)
    p.add_argument("--architecture", choices=("centralized", "decentralized"),
                   default="centralized")
    p.add_argument("--rho-c", type=float, default=None,
                   help="charging-station density (centralized)")
    p.add_argument("--q", type=float, default=None,
                   help="re-order quantity (centralized)")
    p.add_argument("--primary", type=float, default=None,
                   help="override the charging-station stock level")
    p.add_argument("--reorder", type=float, default=None,
                   help="override the swapping-station re-order point")
    p.add_argument("--r-b", type=float, default=None,
                   help="on-site spare-stock density (decentralized)")
    p.add_argument("--horizon", type=float, default=2000.0,
                   help="simulated hours including warmup")
    p.add_argument("--warmup", type=float, default=240.0)
    p.add_argument("--area", type=float, default=None,
                   help="region area in km^2 (default: one station's share)")
    p.add_argument("--batches", type=int, default=32)
    p.add_argument("--demand-model", choices=("normal", "compound_poisson"),
                   default="normal")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="four-configuration summary with figures")
    add_common(p)
    add_market(p)
    p.add_argument("--scale", type=float, default=1.0,
                   help="demand scale multiplier")
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": exc.category, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(json.dumps({"error": "missing-file", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": "invalid-input", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io-error", "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
