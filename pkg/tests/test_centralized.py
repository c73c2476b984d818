import numpy as np
import pytest

from fbgame.centralized import centralized_optimum, symmetric_optimum
from fbgame.game import GameConfig, coordinate_objective, utilities
from fbgame.pricing import sweep_price


def test_single_user_matches_own_argmax():
    cfg = GameConfig(n_s=1, n_t=2, mc_trials=200, alpha_price=0.4)
    res = centralized_optimum(cfg)
    f = coordinate_objective(0, [0.0], cfg.replace(alpha_price=0.0))
    grid = np.linspace(0, cfg.r_max, 4001)
    vals = [f(x) for x in grid]
    assert abs(res.rates[0] - grid[int(np.argmax(vals))]) < 2 * cfg.br_tolerance
    assert res.sum_utility >= max(vals) - 1e-9


def test_polish_stays_near_symmetric_point():
    cfg = GameConfig()
    res = centralized_optimum(cfg)
    stage, sym_rates, _ = res.method_trace[0]
    assert stage == "symmetric"
    assert np.max(np.abs(res.rates - sym_rates)) < 10 * cfg.br_tolerance


def test_feasible_and_consistent(small_cfg):
    res = centralized_optimum(small_cfg)
    assert np.all((res.rates >= 0) & (res.rates <= small_cfg.r_max))
    assert small_cfg.b_total - small_cfg.beta * res.rates.sum() > 0
    assert res.sum_utility == pytest.approx(utilities(res.rates, small_cfg).sum(), rel=1e-12)


def test_bandwidth_bound_respected():
    cfg = GameConfig(n_s=2, n_t=2, mc_trials=100, b_total=0.05, beta=0.01)
    res = centralized_optimum(cfg)
    assert cfg.b_total - cfg.beta * res.rates.sum() > 0


def test_upper_envelope_of_price_sweep():
    cfg = GameConfig()
    cen = centralized_optimum(cfg)
    res = sweep_price(cfg, 0.01, 0.2, mode="curve")
    best = max(r.sum_rate for r in res.records)
    assert cen.sum_utility >= best * 0.99
    assert cen.sum_utility >= best - 1e-6 * abs(best)


def test_csma_symmetric_point_at_knee():
    cfg = GameConfig(n_s=3, n_t=3, mc_trials=120, protocol="csma")
    x, u = symmetric_optimum(cfg)
    assert 3 * x <= cfg.csma.g0 + 1e-12
    res = centralized_optimum(cfg)
    assert res.sum_utility >= u
