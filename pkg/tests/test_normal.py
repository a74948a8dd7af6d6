"""Inverse normal CDF against scipy and round-trip identities."""

import math

import numpy as np
import pytest
from scipy import stats

from swapgrid.normal import inv_norm_cdf, norm_cdf


def test_matches_scipy_across_the_open_interval():
    p = np.linspace(1e-9, 1.0 - 1e-9, 20001)
    ours = inv_norm_cdf(p)
    ref = stats.norm.ppf(p)
    assert np.max(np.abs(ours - ref)) < 1e-9


def test_tail_quantiles():
    for p in (1e-12, 1e-300, 1.0 - 1e-12):
        assert inv_norm_cdf(p) == pytest.approx(stats.norm.ppf(p), rel=1e-10)


def test_common_quantiles_frozen():
    assert inv_norm_cdf(0.5) == 0.0
    assert inv_norm_cdf(0.97) == pytest.approx(1.8807936081512504, abs=1e-12)
    assert inv_norm_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-9)


def test_symmetry():
    p = np.linspace(0.001, 0.499, 100)
    np.testing.assert_allclose(inv_norm_cdf(p), -inv_norm_cdf(1.0 - p),
                               rtol=0.0, atol=1e-12)


def test_round_trip_with_cdf():
    x = np.linspace(-6.0, 6.0, 1001)
    np.testing.assert_allclose(inv_norm_cdf(norm_cdf(x)), x, atol=1e-8)


def test_cdf_matches_scipy():
    x = np.linspace(-8.0, 8.0, 2001)
    np.testing.assert_allclose(norm_cdf(x), stats.norm.cdf(x), atol=1e-12)


def test_rejects_out_of_range():
    for bad in (0.0, 1.0, -0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            inv_norm_cdf(bad)
