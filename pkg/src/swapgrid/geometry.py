"""District geometry for the continuous approximation.

Charging stations partition the plane into diamond-shaped districts
(squares rotated 45 degrees) under the Manhattan metric, the optimal
single-facility district shape for that metric.  All quantities are
closed forms in the charging-station density and vectorize over numpy
arrays.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "avg_one_way_distance",
    "one_way_travel_time",
    "one_way_transport_cost",
]

_SQRT2 = math.sqrt(2.0)


def _check_positive(value, name: str) -> None:
    if np.any(np.asarray(value) <= 0.0):
        raise ValueError(f"{name} must be positive")


def avg_one_way_distance(rho_c):
    """Mean Manhattan distance (km) from a charging station to a point of
    its diamond district, for district area 1/rho_c."""
    _check_positive(rho_c, "rho_c")
    return _SQRT2 / (3.0 * np.sqrt(rho_c))


def one_way_travel_time(rho_c, truck_speed_kmh):
    """Mean one-way truck travel time (hours) within a district."""
    _check_positive(truck_speed_kmh, "truck_speed_kmh")
    return avg_one_way_distance(rho_c) / truck_speed_kmh


def one_way_transport_cost(rho_c, cost_per_km):
    """Mean transport cost ($) of a one-way trip within a district."""
    if np.any(np.asarray(cost_per_km) < 0.0):
        raise ValueError("cost_per_km must be nonnegative")
    return cost_per_km * avg_one_way_distance(rho_c)
