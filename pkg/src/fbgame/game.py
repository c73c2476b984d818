"""Feedback-rate control game: utilities, best responses and equilibria.

Each mobile station picks its feedback rate ``r_k`` in ``[0, r_max]`` to
maximize the Monte Carlo mean of its downlink throughput minus a linear price
``alpha_price * r_k``. All expectations are taken over one fixed bank of
channel draws (common random numbers), so utilities are deterministic,
continuous functions of the rate profile.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .access import CsmaModel, InfeasibleProfileError, csma_effective_rates, fdma_split
from .channel import CrnBank, crn_bank
from .kernels import sinr_bank, user_sweep
from .precoding import regularization_param
from .search import ScalarMax, grid_golden_max

log = logging.getLogger(__name__)

PROTOCOLS = ("fdma", "csma")
PRECODERS = ("rzf", "zf")


@dataclass(frozen=True)
class GameConfig:
    """Scenario constants of one game.

    ``psi=None`` selects the default regularizer ``n_s * n0``; ``precoder="zf"``
    forces ``psi = 0``. With ``crn_symmetric`` every base channel draw enters
    the bank under all cyclic shifts of the users, making them exchangeable.
    """

    n_t: int = 10
    n_s: int = 10
    b_total: float = 20.0
    beta: float = 0.01
    n0: float = 1.0
    alpha_price: float = 0.0
    protocol: str = "fdma"
    csma: CsmaModel = field(default_factory=CsmaModel)
    r_max: float = 16.0
    mc_trials: int = 500
    master_seed: int = 0
    br_tolerance: float = 1e-3
    max_rounds: int = 200
    psi: Optional[float] = None
    precoder: str = "rzf"
    crn_symmetric: bool = True

    def __post_init__(self):
        if self.n_s < 1 or self.n_t < 1:
            raise ValueError("n_s and n_t must be positive")
        if self.n_s > self.n_t:
            raise ValueError(f"need n_s <= n_t, got n_s={self.n_s}, n_t={self.n_t}")
        if self.b_total <= 0 or self.beta <= 0 or self.n0 <= 0:
            raise ValueError("b_total, beta and n0 must be positive")
        if self.alpha_price < 0:
            raise ValueError("alpha_price must be non-negative")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.precoder not in PRECODERS:
            raise ValueError(f"precoder must be one of {PRECODERS}, got {self.precoder!r}")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if self.mc_trials < 1:
            raise ValueError("mc_trials must be at least 1")
        if self.br_tolerance <= 0:
            raise ValueError("br_tolerance must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.psi is not None and self.psi < 0:
            raise ValueError("psi must be non-negative")
        if self.protocol == "csma" and self.csma.g0 is None:
            object.__setattr__(self, "csma", self.csma.calibrated())

    def replace(self, **changes) -> "GameConfig":
        return replace(self, **changes)

    @property
    def psi_value(self) -> float:
        return regularization_param(self)

    @property
    def bank(self) -> CrnBank:
        return crn_bank(self.n_s, self.n_t, self.mc_trials, self.master_seed, self.crn_symmetric)


@dataclass(frozen=True)
class RateProfile:
    """Validated feedback-rate vector, one entry per mobile station."""

    r: np.ndarray

    @classmethod
    def of(cls, rates, cfg: GameConfig) -> "RateProfile":
        return cls(check_profile(rates, cfg))

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)


@dataclass
class EquilibriumReport:
    """Outcome of best-response dynamics.

    ``trace[0]`` is the starting profile and ``trace[i]`` the profile after
    round ``i``. ``nash_verified`` stays ``None`` until :func:`verify_nash`
    has been run.
    """

    rates: np.ndarray
    utilities: np.ndarray
    priced_utilities: np.ndarray
    rounds: int
    converged: bool
    trace: list = field(default_factory=list)
    nash_verified: Optional[bool] = None
    last_change: float = float("nan")


def check_profile(rates, cfg: GameConfig) -> np.ndarray:
    """Return ``rates`` as a float array after checking bounds and feasibility."""
    r = np.asarray(rates, dtype=float)
    if r.shape != (cfg.n_s,):
        raise ValueError(f"expected {cfg.n_s} rates, got shape {r.shape}")
    if np.any(np.isnan(r)) or np.any(r < 0) or np.any(r > cfg.r_max):
        raise ValueError(f"rates must lie in [0, {cfg.r_max}]")
    if cfg.beta * r.sum() >= cfg.b_total:
        raise InfeasibleProfileError("uplink feedback exhausts the total bandwidth")
    return r


def _effective(r: np.ndarray, cfg: GameConfig) -> np.ndarray:
    if cfg.protocol == "csma":
        return csma_effective_rates(r, cfg.csma)
    return r


def _spectral_eff(gamma: np.ndarray) -> np.ndarray:
    # ordered reduction over the bank, identical on every run
    return np.log2(1.0 + gamma).mean(axis=0)


def utilities(profile, cfg: GameConfig) -> np.ndarray:
    """Unpriced expected utility of every user at ``profile``."""
    r = check_profile(profile, cfg)
    b_dl = fdma_split(cfg.b_total, cfg.beta, r).b_dl
    bank = cfg.bank
    gamma = sinr_bank(bank.h, bank.nq, _effective(r, cfg), cfg.psi_value, cfg.n0)
    return b_dl * _spectral_eff(gamma)


def expected_utility(k: int, profile, cfg: GameConfig) -> float:
    """Mean downlink throughput of user ``k`` over the channel bank."""
    return float(utilities(profile, cfg)[k])


def priced_utility(k: int, profile, cfg: GameConfig) -> float:
    """Expected utility of user ``k`` minus ``alpha_price * r_k``."""
    r = check_profile(profile, cfg)
    return expected_utility(k, r, cfg) - cfg.alpha_price * float(r[k])


def _rate_cap(k: int, r: np.ndarray, cfg: GameConfig) -> float:
    """Largest feasible rate of user ``k`` with the others held at ``r``."""
    others = float(r.sum() - r[k])
    room = cfg.b_total / cfg.beta - others
    if room <= cfg.r_max:
        # the downlink must keep strictly positive bandwidth
        room = float(np.nextafter(room * (1.0 - 1e-12), 0.0))
    return max(0.0, min(cfg.r_max, room))


def coordinate_objective(k: int, rates, cfg: GameConfig, social: bool = False,
                         alpha: float = 0.0) -> Callable[[float], float]:
    """Objective in user ``k``'s rate with every other rate held fixed.

    Returns user ``k``'s utility minus ``alpha * r_k``, or the unpriced sum
    over all users when ``social``. Under FDMA the channel bank is prepared
    once for the fixed users, which makes each evaluation O(n_s) per trial.
    """
    r = np.array(rates, dtype=float)
    others = float(r.sum() - r[k])
    psi, n0 = cfg.psi_value, cfg.n0
    bank = cfg.bank

    if cfg.protocol == "fdma":
        sweep = user_sweep(bank.h, bank.nq, r, k, psi)

        def f(x: float) -> float:
            b_dl = cfg.b_total - cfg.beta * (others + x)
            gamma = sweep.gamma(x, n0)
            if social:
                return float(b_dl * _spectral_eff(gamma).sum())
            return float(b_dl * np.log2(1.0 + gamma[:, k]).mean()) - alpha * x
    else:
        def f(x: float) -> float:
            r[k] = x
            u = utilities(r, cfg)
            return float(u.sum()) if social else float(u[k]) - alpha * x
    return f


def _maximize_coordinate(k: int, rates, cfg: GameConfig, social: bool = False,
                         alpha: float = 0.0) -> ScalarMax:
    r = np.asarray(rates, dtype=float)
    hi = _rate_cap(k, r, cfg)
    f = coordinate_objective(k, r, cfg, social=social, alpha=alpha)
    if cfg.protocol == "csma":
        # Effective rates collapse once the total load passes g0, so search the
        # live segment and compare against the first point past the edge.
        live = cfg.csma.g0 - float(r.sum() - r[k])
        if 0.0 <= live < hi:
            best = grid_golden_max(f, 0.0, live, tol=cfg.br_tolerance)
            x_dead = min(hi, live + cfg.br_tolerance)
            f_dead = f(x_dead)
            if f_dead > best.fx:
                return ScalarMax(x_dead, f_dead, best.n_evals + 1)
            return best
    return grid_golden_max(f, 0.0, hi, tol=cfg.br_tolerance)


def best_response(k: int, others, cfg: GameConfig) -> float:
    """Priced best response of user ``k`` to the rates of the other users.

    ``others`` lists the rates of users ``j != k`` in index order.
    """
    others = np.asarray(others, dtype=float)
    if others.shape != (cfg.n_s - 1,):
        raise ValueError(f"expected {cfg.n_s - 1} rates for the other users")
    r = np.insert(others, k, 0.0)
    check_profile(r, cfg)
    return _maximize_coordinate(k, r, cfg, alpha=cfg.alpha_price).x


def run_dynamics(cfg: GameConfig, r0=None) -> EquilibriumReport:
    """Round-robin best-response dynamics.

    Users update one after another within a round, each seeing the latest
    rates. Iteration stops once no rate moved by ``br_tolerance`` or more
    during a full round, or after ``max_rounds`` rounds.
    """
    r = np.ones(cfg.n_s) if r0 is None else np.array(r0, dtype=float)
    r = np.minimum(r, cfg.r_max)
    check_profile(r, cfg)
    trace = [r.copy()]
    converged = False
    change = float("inf")
    rounds = 0
    for rounds in range(1, cfg.max_rounds + 1):
        prev = r.copy()
        for k in range(cfg.n_s):
            r[k] = _maximize_coordinate(k, r, cfg, alpha=cfg.alpha_price).x
        trace.append(r.copy())
        change = float(np.max(np.abs(r - prev)))
        if change < cfg.br_tolerance:
            converged = True
            break
    if not converged:
        log.warning("best-response dynamics did not converge in %d rounds "
                    "(last change %.3g bits)", cfg.max_rounds, change)
    u = utilities(r, cfg)
    return EquilibriumReport(rates=r, utilities=u, priced_utilities=u - cfg.alpha_price * r,
                             rounds=rounds, converged=converged, trace=trace,
                             last_change=change)


def run_nfc(cfg: GameConfig, r0=None) -> EquilibriumReport:
    """Unpriced game: dynamics with ``alpha_price = 0``."""
    return run_dynamics(cfg.replace(alpha_price=0.0), r0)


def verify_nash(report: EquilibriumReport, cfg: GameConfig, check_grid: int = 129) -> bool:
    """Check that no user gains by deviating to any point of a rate grid.

    The deviation grid spans ``[0, r_max]`` (infeasible points are skipped);
    a deviation counts only if it beats the equilibrium by more than
    ``1e-6 * |u| + 1e-9``. The verdict is also stored on ``report``.
    """
    r = check_profile(report.rates, cfg)
    grid = np.linspace(0.0, cfg.r_max, check_grid)
    ok = True
    for k in range(cfg.n_s):
        f = coordinate_objective(k, r, cfg, alpha=cfg.alpha_price)
        u_eq = f(float(r[k]))
        slack = 1e-6 * abs(u_eq) + 1e-9
        hi = _rate_cap(k, r, cfg)
        for x in grid:
            if x > hi:
                break
            if f(float(x)) > u_eq + slack:
                log.info("user %d gains by deviating to %.4g bits", k, x)
                ok = False
                break
        if not ok:
            break
    report.nash_verified = ok
    return ok


__all__ = [
    "GameConfig", "RateProfile", "EquilibriumReport", "check_profile", "utilities",
    "expected_utility", "priced_utility", "best_response", "run_dynamics", "run_nfc",
    "verify_nash", "coordinate_objective",
]
