import numpy as np
import pytest

from fbgame.game import GameConfig, run_dynamics, run_nfc
from fbgame.pricing import sweep_price, uplink_occupancy_curve


@pytest.fixture(scope="module")
def paper_curve():
    cfg = GameConfig()
    return cfg, sweep_price(cfg, 0.005, 0.2, mode="curve")


def test_first_record_is_nfc(paper_curve):
    cfg, res = paper_curve
    first = res.records[0]
    nfc = run_nfc(cfg)
    assert first.alpha_price == 0.0
    assert np.array_equal(first.equilibrium.rates, nfc.rates)


def test_records_ordered_and_consistent(paper_curve):
    cfg, res = paper_curve
    alphas = [r.alpha_price for r in res.records]
    assert alphas[-1] == pytest.approx(0.2) and len(alphas) == 41
    assert np.all(np.diff(alphas) > 0)
    for rec in res.records:
        assert abs(rec.uplink_bw - cfg.beta * rec.equilibrium.rates.sum()) < 1e-12
        assert rec.sum_rate == pytest.approx(rec.equilibrium.utilities.sum(), rel=1e-15)


def test_sum_utility_rises_then_falls(paper_curve):
    _, res = paper_curve
    s = np.array([r.sum_rate for r in res.records])
    i = int(np.argmax(s))
    assert 0 < i < len(s) - 1
    assert s[i] > s[0] and s[i] > s[-1]


def test_rates_decrease_with_price(paper_curve):
    cfg, res = paper_curve
    tot = np.array([r.equilibrium.rates.sum() for r in res.records])
    assert np.all(np.diff(tot) <= 2 * cfg.br_tolerance * cfg.n_s)


def test_best_price_beats_nfc(paper_curve):
    _, res = paper_curve
    assert res.stop_reason == "user-worsened"
    assert res.best_record.sum_rate > res.records[0].sum_rate


def test_stop_mode_agrees_with_curve_mode(paper_curve):
    cfg, res = paper_curve
    stop = sweep_price(cfg, 0.005, 0.2, mode="stop")
    assert stop.alpha_best == res.alpha_best
    assert len(stop.records) < len(res.records)
    assert stop.records[-1].alpha_price == pytest.approx(res.alpha_best + 0.005)


def test_warm_start_matches_cold_start(paper_curve):
    cfg, res = paper_curve
    for rec in (res.records[4], res.records[12], res.records[30]):
        cold = run_dynamics(cfg.replace(alpha_price=rec.alpha_price))
        assert np.max(np.abs(cold.rates - rec.equilibrium.rates)) < 2 * cfg.br_tolerance


def test_occupancy_curve(paper_curve):
    _, res = paper_curve
    occ = uplink_occupancy_curve(res)
    assert len(occ) == len(res.records)
    bw = [p.uplink_bw for p in occ]
    assert bw[0] == max(bw)
    assert all(p.rates.shape == (10,) for p in occ)


def test_large_price_tail():
    cfg = GameConfig()
    res = sweep_price(cfg, delta_alpha=1.0, alpha_max=12.0, mode="curve")
    tail = res.records[-3:]
    assert all(r.uplink_bw < 1e-4 for r in tail)
    s = [r.sum_rate for r in tail]
    assert (max(s) - min(s)) / max(s) < 0.01
    occ = uplink_occupancy_curve(res)
    assert occ[0].uplink_bw == max(p.uplink_bw for p in occ)


def test_warnings_for_unconverged(small_cfg):
    res = sweep_price(small_cfg.replace(max_rounds=1), 0.05, 0.1, mode="curve")
    assert res.warnings and all("no convergence" in w for w in res.warnings)


def test_argument_checks(small_cfg):
    with pytest.raises(ValueError):
        sweep_price(small_cfg, delta_alpha=0.0)
    with pytest.raises(ValueError):
        sweep_price(small_cfg, mode="sideways")
    res = sweep_price(small_cfg, delta_alpha=0.5, alpha_max=0.0)
    assert len(res.records) == 1 and res.stop_reason == "range-exhausted"
    with pytest.raises(ValueError):
        uplink_occupancy_curve(type(res)([], 0.0, "range-exhausted"))
