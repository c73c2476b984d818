"""Price-factor sweep for the priced feedback game.

Starting from ``alpha = 0`` the price is raised in steps of ``delta_alpha``
and the game is re-equilibrated at each step, warm-started from the previous
equilibrium. The best price is the last one before any user's equilibrium
utility falls below its value at the previous price.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .game import EquilibriumReport, GameConfig, run_dynamics

log = logging.getLogger(__name__)

SWEEP_MODES = ("stop", "curve")


@dataclass(frozen=True)
class PriceSweepRecord:
    alpha_price: float
    equilibrium: EquilibriumReport
    sum_rate: float       # sum of unpriced utilities
    sum_priced: float
    uplink_bw: float      # beta * sum of equilibrium rates


@dataclass
class PriceSweepResult:
    """Ordered sweep records with the declared best price.

    ``stop_reason`` is ``"user-worsened"`` when the stop rule fired and
    ``"range-exhausted"`` when ``alpha_max`` was reached first.
    """

    records: list
    alpha_best: float
    stop_reason: str
    warnings: list = field(default_factory=list)

    @property
    def best_record(self) -> PriceSweepRecord:
        for rec in self.records:
            if rec.alpha_price == self.alpha_best:
                return rec
        raise LookupError("alpha_best has no record")  # pragma: no cover


class OccupancyPoint(NamedTuple):
    alpha: float
    uplink_bw: float
    rates: np.ndarray


def _record(alpha: float, rep: EquilibriumReport, cfg: GameConfig) -> PriceSweepRecord:
    return PriceSweepRecord(
        alpha_price=alpha, equilibrium=rep,
        sum_rate=float(rep.utilities.sum()),
        sum_priced=float(rep.priced_utilities.sum()),
        uplink_bw=cfg.beta * float(rep.rates.sum()))


def sweep_price(cfg: GameConfig, delta_alpha: float = 0.005, alpha_max: float = 0.2,
                mode: str = "stop", r0=None) -> PriceSweepResult:
    """Raise the price until some user is worse off than at the previous price.

    In ``"curve"`` mode every price up to ``alpha_max`` is recorded anyway;
    ``alpha_best`` is still where the stop rule first fired. Users compare
    unpriced utilities, i.e. the throughput each equilibrium delivers.
    Non-converged equilibria are kept and reported in ``warnings``.
    """
    if delta_alpha <= 0:
        raise ValueError("delta_alpha must be positive")
    if alpha_max < 0:
        raise ValueError("alpha_max must be non-negative")
    if mode not in SWEEP_MODES:
        raise ValueError(f"mode must be one of {SWEEP_MODES}")

    n_steps = int(np.floor(alpha_max / delta_alpha + 1e-9))
    records: list[PriceSweepRecord] = []
    warnings: list[str] = []
    alpha_best = None
    start = r0
    for i in range(n_steps + 1):
        # multiply rather than accumulate so the grid carries no drift
        alpha = round(i * delta_alpha, 12)
        rep = run_dynamics(cfg.replace(alpha_price=alpha), start)
        if not rep.converged:
            warnings.append(f"alpha={alpha:.6g}: no convergence in {rep.rounds} rounds")
        records.append(_record(alpha, rep, cfg))
        start = rep.rates
        if alpha_best is None and i > 0:
            prev = records[-2].equilibrium.utilities
            if np.any(rep.utilities < prev):
                alpha_best = records[-2].alpha_price
                if mode == "stop":
                    break
    if alpha_best is None:
        return PriceSweepResult(records, records[-1].alpha_price, "range-exhausted", warnings)
    return PriceSweepResult(records, alpha_best, "user-worsened", warnings)


def uplink_occupancy_curve(result: PriceSweepResult) -> list[OccupancyPoint]:
    """Uplink bandwidth and per-user rates at every swept price."""
    if not result.records:
        raise ValueError("empty sweep result")
    return [OccupancyPoint(rec.alpha_price, rec.uplink_bw, rec.equilibrium.rates.copy())
            for rec in result.records]
