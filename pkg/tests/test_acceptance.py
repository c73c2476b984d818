"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``CRITERION n: PASS|FAIL`` line with the measured
quantities and wall time before asserting.
"""
import time

import mpmath
import numpy as np
import pytest

from fbgame.access import CsmaModel, csma_throughput
from fbgame.centralized import centralized_optimum
from fbgame.channel import draw_channel, mu_nu, quantize_channel
from fbgame.cli import main
from fbgame.experiments import is_unimodal, list_experiments, utility_curve
from fbgame.game import GameConfig, run_dynamics, verify_nash
from fbgame.kernels import user_sweep
from fbgame.precoding import build_precoder, link_metrics
from fbgame.pricing import sweep_price


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}")
        assert ok, detail
    return _report


def test_criterion_01_quantization_statistics(report):
    t0 = time.perf_counter()
    real = draw_channel(1, 10**5, 2024)
    h = real.h[0]
    worst_var = worst_corr = 0.0
    for r in (0.5, 1.0, 2.0, 4.0):
        q = quantize_channel(real, [r])[0]
        var = np.mean(np.abs(q) ** 2)
        corr = np.real(np.vdot(h, q)) / np.sqrt(np.vdot(h, h).real * np.vdot(q, q).real)
        worst_var = max(worst_var, abs(var - 1.0))
        worst_corr = max(worst_corr, abs(corr / np.sqrt(1 - 2.0**-r) - 1.0))
    dt = time.perf_counter() - t0
    ok = worst_var < 0.01 and worst_corr < 0.01 and dt < 5
    report(1, ok, f"max |var-1|={worst_var:.4f}, max rel corr err={worst_corr:.4f}", dt)


def test_criterion_02_mu_nu_identities(report):
    t0 = time.perf_counter()
    err = 0.0
    for d in np.linspace(0, 1, 101):
        mu, nu = mu_nu(d)
        err = max(err, abs(mu - (1 - d)), abs(nu - np.sqrt(d * (1 - d))),
                  abs(mu * mu + nu * nu - (1 - d)))
    dt = time.perf_counter() - t0
    report(2, err < 1e-12, f"max error={err:.2e}", dt)


def test_criterion_03_zero_forcing_nulling(report):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 4):
        for seed in range(100):
            real = draw_channel(n, n, seed)
            m = link_metrics(real.h, build_precoder(real.h, 0.0), 1.0)
            worst = max(worst, float(np.max(m.interference_power / m.signal_power)))
    dt = time.perf_counter() - t0
    report(3, worst < 1e-18 and dt < 1, f"max cross/signal power={worst:.2e}", dt)


def test_criterion_04_sinr_monotone_and_saturating(report):
    t0 = time.perf_counter()
    cfg = GameConfig(mc_trials=2000)
    bank = cfg.bank
    r = np.full(cfg.n_s, 4.0)
    sweep = user_sweep(bank.h, bank.nq, r, 0, cfg.psi_value)
    g = {rk: sweep.gamma(float(rk), cfg.n0)[:, 0] for rk in list(range(17)) + [30, 60]}
    violations = 0
    for rk in range(16):
        d = g[rk + 1] - g[rk]
        se = d.std(ddof=1) / np.sqrt(d.size)
        if d.mean() < -2 * se:
            violations += 1
    sat = abs(g[30].mean() - g[60].mean()) / g[60].mean()
    dt = time.perf_counter() - t0
    ok = violations == 0 and sat < 0.005 and dt < 30
    report(4, ok, f"paired-test violations={violations}, |g30-g60|/g60={sat:.2e}", dt)


def test_criterion_05_utility_curves_unimodal(report):
    t0 = time.perf_counter()
    results = []
    for proto in ("fdma", "csma"):
        cfg = GameConfig(n_s=2, n_t=2, protocol=proto)
        for r2 in (1.0, 3.0, 10.0):
            c = utility_curve(cfg, r2, 200)
            results.append((proto, r2, is_unimodal(c.utility, c.std_error),
                            float(c.r_probe[np.argmax(c.utility)])))
    dt = time.perf_counter() - t0
    ok = all(u for _, _, u, _ in results) and dt < 60
    detail = "; ".join(f"{p} r2={r2:g}: {'unimodal' if u else 'NOT unimodal'} "
                       f"peak r1={x:.2f}" for p, r2, u, x in results)
    report(5, ok, detail, dt)


def test_criterion_06_equilibrium_existence(report):
    t0 = time.perf_counter()
    failures = []
    rounds = []
    for seed in range(1, 21):
        cfg = GameConfig(master_seed=seed)
        rep = run_dynamics(cfg)
        rounds.append(rep.rounds)
        if not (rep.converged and rep.rounds <= 200 and verify_nash(rep, cfg, 129)):
            failures.append(seed)
    dt = time.perf_counter() - t0
    ok = not failures and dt < 300
    report(6, ok, f"20 seeds, failures={failures}, max rounds={max(rounds)}", dt)


def test_criterion_07_price_sweep_shape(report):
    t0 = time.perf_counter()
    res = sweep_price(GameConfig(), delta_alpha=0.005, alpha_max=0.2, mode="curve")
    alphas = np.array([r.alpha_price for r in res.records])
    s = np.array([r.sum_rate for r in res.records])
    i = int(np.argmax(s))
    rises_falls = 0 < i < len(s) - 1 and s[i] > s[0] and s[i] > s[-1]
    peak_ok = 0 < alphas[i] <= 0.05 + 1e-12
    gain = s[i] / s[0] - 1
    tail = s[alphas >= 0.15 - 1e-12]
    tail_spread = (tail.max() - tail.min()) / tail.max()
    dt = time.perf_counter() - t0
    ok = rises_falls and peak_ok and gain >= 0.02 and tail_spread <= 0.01 and dt < 600
    report(7, ok, f"rises-then-falls={rises_falls}, peak alpha={alphas[i]:.3f}, "
                  f"gain over alpha=0={100 * gain:.2f}% (need >=2%), "
                  f"tail spread={100 * tail_spread:.2f}% (need <=1%), "
                  f"alpha_best={res.alpha_best:.3f}", dt)


def _grid_optimum_two_users(cfg, step=0.05):
    """Exhaustive search of the two-user sum utility on a square grid."""
    grid = np.arange(0.0, cfg.r_max + 1e-9, step)
    bank = cfg.bank
    best = -np.inf
    for r1 in grid:
        sweep = user_sweep(bank.h, bank.nq, np.array([r1, 0.0]), 1, cfg.psi_value)
        for r2 in grid:
            b_dl = cfg.b_total - cfg.beta * (r1 + r2)
            u = b_dl * np.log2(1 + sweep.gamma(float(r2), cfg.n0)).mean(axis=0).sum()
            best = max(best, u)
    return best


def test_criterion_08_nfcp_close_to_centralized(report):
    t0 = time.perf_counter()
    gaps = {}
    for proto in ("fdma", "csma"):
        cfg = GameConfig(protocol=proto)
        res = sweep_price(cfg, delta_alpha=0.005, alpha_max=0.2, mode="stop")
        cen = centralized_optimum(cfg)
        gaps[proto] = (cen.sum_utility - res.best_record.sum_rate) / cen.sum_utility
    two = GameConfig(n_s=2, n_t=2)
    grid_best = _grid_optimum_two_users(two)
    cen2 = centralized_optimum(two).sum_utility
    grid_err = abs(cen2 - grid_best) / grid_best
    dt = time.perf_counter() - t0
    ok = all(abs(g) <= 0.03 for g in gaps.values()) and grid_err <= 0.005 and dt < 600
    report(8, ok, f"NFCP gap to centralized: FDMA {100 * gaps['fdma']:.3f}%, "
                  f"CSMA {100 * gaps['csma']:.3f}% (need <=3%); "
                  f"2-user grid mismatch {100 * grid_err:.4f}% (need <=0.5%)", dt)


def _oracle(g, a=0.1, dps=30):
    # one-persistent series summed smallest term first, no rescaling
    with mpmath.workdps(dps):
        g, a = mpmath.mpf(g), mpmath.mpf(a)
        n = int(mpmath.ceil(dps * mpmath.log(10) / (a * g))) + 20
        num = sum((a * mpmath.exp(-a * g * k) for k in range(n, 0, -1)), mpmath.mpf(0)) + (1 + a)
        den = sum((mpmath.exp(-a * g * (k - 1)) for k in range(n, 0, -1)), mpmath.mpf(0))
        return float(g * num / ((1 + a) * mpmath.exp(g * (1 + a)) + a * den))


def test_criterion_09_csma_throughput(report):
    model = CsmaModel(p=1.0, a_ratio=0.1)
    t0 = time.perf_counter()
    scan = np.linspace(0.02, 20, 1000)
    s = np.array([csma_throughput(g, model) for g in scan])
    pts = np.linspace(0.4, 20, 50)
    ours = np.array([csma_throughput(g, model) for g in pts])
    dt = time.perf_counter() - t0
    i = int(np.argmax(s))
    single = 0 < i < len(s) - 1 and np.all(np.diff(s[:i + 1]) > 0) and np.all(np.diff(s[i:]) < 0)
    ref = np.array([_oracle(g) for g in pts])
    err = float(np.max(np.abs(ours - ref) / ref))
    ok = single and err < 1e-9 and dt < 5
    report(9, ok, f"single interior max at G={scan[i]:.3f}: {single}, "
                  f"max rel error vs high-precision series={err:.2e}", dt)


def test_criterion_10_deterministic_csv(report, tmp_path):
    t0 = time.perf_counter()
    differing = []
    for name in list_experiments():
        outs = []
        for rep in range(2):
            out = tmp_path / f"{name}.{rep}.csv"
            code = main(["run", name, "--quick", "--seed", "11", "--out", str(out)])
            assert code in (0, 2)
            outs.append(out.read_bytes())
        if outs[0] != outs[1]:
            differing.append(name)
    full = []
    for rep in range(2):
        out = tmp_path / f"paper.{rep}.csv"
        main(["run", "price-sweep-fdma", "--seed", "3", "--out", str(out)])
        full.append(out.read_bytes())
    if full[0] != full[1]:
        differing.append("price-sweep-fdma (paper scale)")
    dt = time.perf_counter() - t0
    report(10, not differing, f"8 experiments (+1 paper-scale) run twice, "
                              f"differing outputs={differing}", dt)
