"""Generate the bundled sample market day (AGC trace + capacity prices).

The AGC signal is an Ornstein-Uhlenbeck path per hour, 900 samples at 4 s,
clipped to [-1, 1], with an hourly volatility pattern that makes daytime
hours swingier than night hours.  Prices follow a daytime-peaked shape and
are scaled so that the decentralized income slope lands where regulation
is worth selling but not worth overstocking for:

    24 (c_R - c_B)  <  lambda_S * sum_z p_z / eta_z / 1000  <  24 c_R

Run from the repository root; writes into src/swapgrid/data/.
"""

import pathlib

import numpy as np

from swapgrid.regulation import AgcTrace

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "swapgrid" / "data"
SAMPLES_PER_HOUR = 900
STEP_S = 4
DATE = "2025-06-01"
THETA = 0.75
TARGET_SLOPE = 0.85        # sum_z p_z / eta_z in $/kW units


def generate_agc(seed: int = 20250601) -> list:
    rng = np.random.default_rng(seed)
    # mean-reversion and volatility per hour: calmer at night, busier by day
    hours = np.arange(24)
    vol = 0.28 + 0.22 * np.exp(-((hours - 14.0) / 5.0) ** 2) \
        + 0.10 * np.exp(-((hours - 7.0) / 2.5) ** 2)
    revert = 0.04
    periods = []
    for h in hours:
        x = 0.0
        path = np.empty(SAMPLES_PER_HOUR)
        shocks = rng.standard_normal(SAMPLES_PER_HOUR)
        for w in range(SAMPLES_PER_HOUR):
            x += -revert * x + vol[h] * np.sqrt(revert) * shocks[w]
            path[w] = x
        periods.append(np.clip(path, -1.0, 1.0))
    return periods


def price_shape() -> np.ndarray:
    hours = np.arange(24)
    return 0.6 + 0.8 * np.exp(-((hours - 17.0) / 4.0) ** 2) \
        + 0.5 * np.exp(-((hours - 9.0) / 3.0) ** 2)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    periods = generate_agc()
    trace = AgcTrace(periods=tuple(periods))
    eta = trace.eta_profile(THETA)
    print("eta_z:", np.round(eta, 4))

    shape = price_shape()
    weight = float(np.sum(shape / eta))
    prices = shape * (TARGET_SLOPE * 1000.0 / weight)
    slope = float(np.sum(prices / eta) / 1000.0)
    print("prices $/MW:", np.round(prices, 2))
    print("income slope (sum p/eta /1000):", round(slope, 6))
    assert 24 * 0.17 / 7 < slope < 24 * 0.27 / 7, "slope outside target band"

    agc_path = OUT / "agc_sample_day.csv"
    with open(agc_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("timestamp,signal\n")
        for h, path in enumerate(periods):
            for w, g in enumerate(path):
                sec = w * STEP_S
                stamp = f"{DATE}T{h:02d}:{sec // 60:02d}:{sec % 60:02d}"
                fh.write(f"{stamp},{g:.6f}\n")
    print("wrote", agc_path)

    price_path = OUT / "prices_sample_day.csv"
    with open(price_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("period,price_usd_per_mw\n")
        for z, p in enumerate(prices):
            fh.write(f"{z},{p:.4f}\n")
    print("wrote", price_path)


if __name__ == "__main__":
    main()
