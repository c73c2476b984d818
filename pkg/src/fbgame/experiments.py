"""Registered experiments and their CSV tables.

Every experiment maps a :class:`GameConfig` plus a few sweep parameters to
a header and a list of rows. Writing is atomic and number formatting is
fixed (12 significant digits) so equal inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .access import csma_effective_rates, csma_throughput
from .centralized import centralized_optimum
from .game import GameConfig
from .kernels import sinr_bank
from .pricing import sweep_price, uplink_occupancy_curve

#: the small profile used by ``--quick``
QUICK = {"n_s": 4, "n_t": 4, "mc_trials": 100}

PAPER_FDMA = GameConfig()
PAPER_CSMA = GameConfig(protocol="csma")
TWO_USER_FDMA = GameConfig(n_s=2, n_t=2)
TWO_USER_CSMA = GameConfig(n_s=2, n_t=2, protocol="csma")


@dataclass
class Table:
    header: list
    rows: list
    warnings: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Experiment:
    name: str
    base: GameConfig
    plot: str
    run: Callable[..., Table]
    params: dict = field(default_factory=dict)
    fixed_users: bool = False  # user count is part of the scenario


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    cfg: GameConfig
    params: dict
    out: Path


# -- curves -----------------------------------------------------------------

@dataclass(frozen=True)
class UtilityCurve:
    r_probe: np.ndarray
    utility: np.ndarray
    std_error: np.ndarray
    fixed_other_rate: float


def utility_curve(cfg: GameConfig, fixed_other: float, n_points: int = 200,
                  user: int = 0) -> UtilityCurve:
    """Priced utility of ``user`` against its own rate, others fixed.

    Also returns the standard error of each point's Monte Carlo mean.
    """
    r = np.full(cfg.n_s, float(fixed_other))
    r[user] = 0.0
    room = cfg.b_total / cfg.beta - float(r.sum())
    # a rate that exhausts the bandwidth is not feasible, so drop that endpoint
    grid = np.linspace(0.0, min(cfg.r_max, room), n_points, endpoint=room > cfg.r_max)
    bank = cfg.bank
    u = np.empty(n_points)
    se = np.empty(n_points)
    for i, x in enumerate(grid):
        r[user] = x
        b_dl = cfg.b_total - cfg.beta * float(r.sum())
        z = r if cfg.protocol == "fdma" else csma_effective_rates(r, cfg.csma)
        gamma = sinr_bank(bank.h, bank.nq, z, cfg.psi_value, cfg.n0)[:, user]
        per_trial = b_dl * np.log2(1.0 + gamma)
        u[i] = per_trial.mean() - cfg.alpha_price * x
        se[i] = per_trial.std(ddof=1) / np.sqrt(per_trial.size) if per_trial.size > 1 else 0.0
    return UtilityCurve(grid, u, se, float(fixed_other))


def is_unimodal(values, slack=0.0) -> bool:
    """True if ``values`` rise to a single peak and then fall.

    Steps against the trend smaller than ``slack`` (scalar or per point) are
    tolerated.
    """
    v = np.asarray(values, dtype=float)
    s = np.broadcast_to(np.asarray(slack, dtype=float), v.shape)
    i = int(np.argmax(v))
    tol = np.maximum(s[1:], s[:-1])
    step = np.diff(v)
    return bool(np.all(step[:i] >= -tol[:i]) and np.all(step[i:] <= tol[i:]))


def _utility_curves(cfg, fixed_rates=(1.0, 3.0, 10.0), points=200) -> Table:
    rows = []
    for r2 in fixed_rates:
        c = utility_curve(cfg, r2, points)
        rows += [[x, u, c.fixed_other_rate] for x, u in zip(c.r_probe, c.utility)]
    return Table(["r_probe", "utility", "fixed_other_rate"], rows)


def _user_columns(n):
    return [f"r_{i + 1}" for i in range(n)] + [f"u_{i + 1}" for i in range(n)]


def _price_sweep(cfg, delta_alpha=0.005, alpha_max=0.2) -> Table:
    res = sweep_price(cfg, delta_alpha, alpha_max, mode="curve")
    rows = []
    for rec in res.records:
        rep = rec.equilibrium
        rows.append([rec.alpha_price, rec.sum_rate, rec.sum_priced, rec.uplink_bw,
                     int(rep.converged), rep.rounds, *rep.rates, *rep.utilities])
    header = ["alpha", "sum_rate", "sum_priced_utility", "uplink_bw", "converged",
              "rounds", *_user_columns(cfg.n_s)]
    return Table(header, rows, res.warnings,
                 {"alpha_best": res.alpha_best, "stop_reason": res.stop_reason})


def _uplink_occupancy(cfg, delta_alpha=0.005, alpha_max=0.2) -> Table:
    res = sweep_price(cfg, delta_alpha, alpha_max, mode="curve")
    rows = [[p.alpha, p.uplink_bw, *p.rates] for p in uplink_occupancy_curve(res)]
    header = ["alpha", "uplink_bw", *[f"r_{i + 1}" for i in range(cfg.n_s)]]
    return Table(header, rows, res.warnings, {"alpha_best": res.alpha_best})


def _centralized_compare(cfg, delta_alpha=0.005, alpha_max=0.2) -> Table:
    res = sweep_price(cfg, delta_alpha, alpha_max, mode="curve")
    cen = centralized_optimum(cfg)
    rows = [[rec.alpha_price, rec.sum_rate, cen.sum_utility, rec.sum_rate / cen.sum_utility]
            for rec in res.records]
    header = ["alpha", "nfcp_sum_utility", "centralized_sum_utility", "ratio"]
    return Table(header, rows, res.warnings,
                 {"alpha_best": res.alpha_best,
                  "centralized_rates": " ".join(f"{x:.6g}" for x in cen.rates)})


def _csma_curve(cfg, g_max=10.0, points=201) -> Table:
    grid = np.linspace(0.0, g_max, points)
    rows = [[g, csma_throughput(g, cfg.csma)] for g in grid]
    return Table(["g", "throughput"], rows, notes={"g0": cfg.csma.g0})


REGISTRY: dict[str, Experiment] = {e.name: e for e in [
    Experiment("utility-curve-fdma", TWO_USER_FDMA,
               "u_1 vs r_probe, one line per fixed_other_rate (FDMA feedback)",
               _utility_curves, {"points": 200}, fixed_users=True),
    Experiment("utility-curve-csma", TWO_USER_CSMA,
               "u_1 vs r_probe, one line per fixed_other_rate (CSMA feedback)",
               _utility_curves, {"points": 200}, fixed_users=True),
    Experiment("price-sweep-fdma", PAPER_FDMA,
               "sum_rate and sum_priced_utility vs alpha (FDMA)",
               _price_sweep, {"delta_alpha": 0.005, "alpha_max": 0.2}),
    Experiment("price-sweep-csma", PAPER_CSMA,
               "sum_rate vs alpha (CSMA)",
               _price_sweep, {"delta_alpha": 0.005, "alpha_max": 0.2}),
    Experiment("uplink-occupancy", PAPER_FDMA,
               "uplink_bw and per-user rates vs alpha (FDMA)",
               _uplink_occupancy, {"delta_alpha": 0.005, "alpha_max": 0.2}),
    Experiment("centralized-compare-fdma", PAPER_FDMA,
               "nfcp_sum_utility vs alpha against the centralized level (FDMA)",
               _centralized_compare, {"delta_alpha": 0.005, "alpha_max": 0.2}),
    Experiment("centralized-compare-csma", PAPER_CSMA,
               "nfcp_sum_utility vs alpha against the centralized level (CSMA)",
               _centralized_compare, {"delta_alpha": 0.005, "alpha_max": 0.2}),
    Experiment("csma-curve", PAPER_CSMA,
               "throughput S vs offered load g, slotted 1-persistent CSMA",
               _csma_curve, {"g_max": 10.0, "points": 201}),
]}


def list_experiments() -> list[str]:
    """Registered experiment names in their fixed order."""
    return list(REGISTRY)


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.12g" % float(x)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([format_value(x) for x in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(spec: ExperimentSpec) -> Table:
    """Run one registered experiment and write its CSV to ``spec.out``."""
    if spec.name not in REGISTRY:
        raise KeyError(f"unknown experiment {spec.name!r}; known: {', '.join(REGISTRY)}")
    exp = REGISTRY[spec.name]
    table = exp.run(spec.cfg, **{**exp.params, **spec.params})
    write_atomic(spec.out, render_csv(table))
    return table


def psi_diagnostic(cfg: GameConfig, rate: float = 4.0, psis=None) -> Table:
    """Mean SINR and spectral efficiency at a common rate for a grid of psi."""
    if psis is None:
        psis = np.concatenate([[0.0], np.geomspace(0.01, 100.0, 25)])
    bank = cfg.bank
    r = np.full(cfg.n_s, float(rate))
    rows = []
    for psi in psis:
        g = sinr_bank(bank.h, bank.nq, r, float(psi), cfg.n0)
        rows.append([psi, g.mean(), np.log2(1.0 + g).mean()])
    return Table(["psi", "mean_sinr", "mean_log2_1p_sinr"], rows,
                 notes={"default_psi": cfg.psi_value})


__all__ = ["REGISTRY", "QUICK", "Experiment", "ExperimentSpec", "Table", "UtilityCurve",
           "utility_curve", "is_unimodal", "list_experiments", "run_experiment",
           "render_csv", "write_atomic", "psi_diagnostic"]
