"""Centralized benchmark: maximize the unpriced sum utility over all rates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import GameConfig, _maximize_coordinate, utilities
from .search import grid_golden_max

#: coordinate ascent stops once a full round gains less than this
POLISH_GAIN = 1e-6


@dataclass(frozen=True)
class CentralizedResult:
    """Best rate profile found with its sum utility.

    ``method_trace`` holds ``(stage, rates, sum_utility)`` tuples: the
    symmetric line-search result followed by every coordinate-ascent round.
    """

    rates: np.ndarray
    sum_utility: float
    method_trace: list = field(default_factory=list)


def _sum_utility(r, cfg: GameConfig) -> float:
    return float(utilities(r, cfg).sum())


def symmetric_optimum(cfg: GameConfig) -> tuple[float, float]:
    """Best common rate ``r`` for all users and its sum utility."""
    n = cfg.n_s
    hi = cfg.r_max
    room = cfg.b_total / (cfg.beta * n)
    if room <= hi:
        hi = float(np.nextafter(room * (1.0 - 1e-12), 0.0))

    def f(x):
        return _sum_utility(np.full(n, x), cfg)

    if cfg.protocol == "csma":
        live = cfg.csma.g0 / n
        if live < hi:
            best = grid_golden_max(f, 0.0, live, tol=1e-6)
            x_dead = min(hi, live + cfg.br_tolerance)
            f_dead = f(x_dead)
            return (x_dead, f_dead) if f_dead > best.fx else (best.x, best.fx)
    best = grid_golden_max(f, 0.0, hi, tol=1e-6)
    return best.x, best.fx


def centralized_optimum(cfg: GameConfig, max_rounds: int | None = None) -> CentralizedResult:
    """Maximize the sum of unpriced utilities; the price factor is ignored.

    A symmetric line search over a common rate is followed by coordinate
    ascent from that point, one user at a time, until a full round improves
    the sum by less than ``POLISH_GAIN``. The better of the two is returned.
    """
    cfg = cfg.replace(alpha_price=0.0)
    max_rounds = cfg.max_rounds if max_rounds is None else max_rounds
    x_sym, u_sym = symmetric_optimum(cfg)
    r = np.full(cfg.n_s, x_sym)
    trace = [("symmetric", r.copy(), u_sym)]
    best_r, best_u = r.copy(), u_sym

    u_cur = u_sym
    for _ in range(max_rounds):
        u_start = u_cur
        for k in range(cfg.n_s):
            res = _maximize_coordinate(k, r, cfg, social=True)
            # only move when the coordinate step does not lose ground
            if res.fx >= u_cur:
                r[k] = res.x
                u_cur = res.fx
        u_cur = _sum_utility(r, cfg)
        trace.append(("coordinate", r.copy(), u_cur))
        if u_cur > best_u:
            best_r, best_u = r.copy(), u_cur
        if u_cur - u_start < POLISH_GAIN:
            break
    return CentralizedResult(rates=best_r, sum_utility=best_u, method_trace=trace)
