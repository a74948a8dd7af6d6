"""Two-dimensional cost search, decentralized stock choice, and the
sensitivity surface."""

import numpy as np
import pytest

from swapgrid.core import SystemParams
from swapgrid.econ import cost_centralized, cost_grid_centralized
from swapgrid.optimizer import (
    SearchSpec,
    choose_decentralized_stock,
    optimize_centralized,
    sensitivity_surface,
)
from swapgrid.inventory import spare_stock_level
from swapgrid.regulation import RegulationMarket
from swapgrid.scenarios import scale_demand

from conftest import flat_profile


def brute_force_minimum(params, profile, market=None, n=160):
    rhos = np.geomspace(1e-4, params.rho_s, n)
    qs = np.linspace(1.0, params.reorder_cap, n)
    total, infeasible = cost_grid_centralized(
        rhos[:, None], qs[None, :], params, profile, market)
    return float(np.where(infeasible, np.inf, total).min())


class TestOptimizeCentralized:
    def test_within_tolerance_of_dense_grid(self, params, profile):
        result = optimize_centralized(params, profile)
        reference = brute_force_minimum(params, profile)
        assert result.cost <= reference * 1.001

    def test_never_above_its_own_grid(self, params, profile):
        result = optimize_centralized(params, profile)
        assert result.cost <= result.grid_best_cost + 1e-12

    def test_matches_cost_function_at_reported_point(self, params, profile):
        result = optimize_centralized(params, profile)
        recomputed = cost_centralized(result.decision, params, profile).total
        assert result.cost == pytest.approx(recomputed, rel=1e-12)

    def test_deterministic(self, params, profile):
        a = optimize_centralized(params, profile)
        b = optimize_centralized(params, profile)
        assert a.decision == b.decision and a.cost == b.cost

    def test_zero_demand_pushes_to_lower_corner(self):
        params = SystemParams(rho_s=0.04, c_energy=(0.1,))
        profile = flat_profile(0.04, 0.0, 0.0)
        result = optimize_centralized(params, profile)
        # Only depreciation remains; both variables slide to their minimum.
        assert result.decision.rho_c <= 2e-5
        assert result.decision.q <= 1.0 + 1e-6

    def test_regulation_prefers_weakly_larger_q(self, params, profile, market):
        params5, profile5 = scale_demand(params, profile, 5.0)
        off = optimize_centralized(params5, profile5)
        on = optimize_centralized(params5, profile5, market)
        assert on.decision.q >= off.decision.q - 1e-9

    def test_integer_rounding_reported(self, params, profile):
        result = optimize_centralized(params, profile)
        assert result.rounded_decision.q == round(result.rounded_decision.q)
        assert result.rounded_cost >= result.cost - 1e-12
        assert result.rounding_gap == pytest.approx(
            result.rounded_cost - result.cost)


class TestChooseDecentralizedStock:
    def test_no_market_sits_at_floor(self, params, profile):
        spare, floor, cap = choose_decentralized_stock(params, profile)
        assert spare == floor
        assert floor == pytest.approx(float(spare_stock_level(
            params, profile.mu_bar_overall, profile.sigma_bar_overall,
            params.eps_swap)))
        assert cap == pytest.approx(2.0 * floor)

    def test_weak_prices_sit_at_floor(self, params, profile):
        market = RegulationMarket(eta=np.full(24, 0.9),
                                  prices=np.full(24, 0.01), theta=0.75)
        spare, floor, _ = choose_decentralized_stock(params, profile, market)
        assert spare == floor

    def test_rich_prices_jump_to_cap(self, params, profile):
        market = RegulationMarket(eta=np.full(24, 0.9),
                                  prices=np.full(24, 2000.0), theta=0.75)
        spare, floor, cap = choose_decentralized_stock(params, profile, market)
        assert spare == cap > floor

    def test_explicit_cap_respected(self, profile):
        params = SystemParams(rho_s=0.04, r_b_cap=50.0)
        market = RegulationMarket(eta=np.full(24, 0.9),
                                  prices=np.full(24, 2000.0), theta=0.75)
        spare, _, cap = choose_decentralized_stock(params, profile, market)
        assert cap == 50.0 and spare == 50.0

    def test_cap_below_floor_rejected(self, profile):
        params = SystemParams(rho_s=0.04, r_b_cap=1e-6)
        with pytest.raises(ValueError, match="below the service floor"):
            choose_decentralized_stock(params, profile)


class TestSensitivitySurface:
    def test_optimum_cell_matches_optimizer(self, params, profile):
        result = optimize_centralized(params, profile)
        rho_star, q_star = result.decision.rho_c, result.decision.q
        surface = sensitivity_surface(params, profile,
                                      rho_values=np.array([rho_star]),
                                      q_values=np.array([q_star]))
        assert surface.cost[0, 0] == pytest.approx(result.cost, rel=1e-9)
        assert not surface.infeasible[0, 0]

    def test_shape_and_feasibility_mask(self, params, profile, market):
        rhos = np.geomspace(1e-3, 0.04, 7)
        qs = np.linspace(1.0, 40.0, 9)
        surface = sensitivity_surface(params, profile, market,
                                      rho_values=rhos, q_values=qs)
        assert surface.cost.shape == (7, 9)
        assert surface.infeasible.shape == (7, 9)
        assert surface.infeasible.dtype == bool

    def test_q_beyond_reorder_cap_is_evaluated(self, params, profile):
        # The surface is diagnostic; it may look past the search cap.
        surface = sensitivity_surface(params, profile,
                                      rho_values=np.array([0.01]),
                                      q_values=np.array([45.0]))
        assert np.isfinite(surface.cost[0, 0])


class TestSearchSpec:
    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            SearchSpec(rho_min=0.0)
        with pytest.raises(ValueError):
            SearchSpec(rho_points=1)
