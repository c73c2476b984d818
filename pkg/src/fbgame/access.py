"""Uplink feedback access: FDMA bandwidth split and slotted p-persistent CSMA.

The CSMA throughput is the closed-form slotted p-persistent expression

    S(G) = G * sum_k c_k exp(x_k) / ((1 + a) exp(G (1 + a)) + a * sum_{k>=1} exp(y_k))

with ``c_k = p (1-p)**k + a (1 - (1-p)**(k+1))``,
``x_k = G (1-p)**(k+1) + a G (-(k+1) + (1 - (1-p)**(k+2)) / p)`` and
``y_k = G (1-p)**k + a G (-k + (1 - (1-p)**(k+1)) / p)``; ``a`` is the
propagation-to-packet time ratio. Once ``(1-p)**k`` underflows the terms are
exactly geometric with ratio ``exp(-a G)`` and the tail is summed in closed
form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .search import golden_max

#: terms are summed explicitly at most this many times
SERIES_CAP = 100_000
# (1-p)**k below this no longer changes a double-precision term
_TAIL_POW = 1e-18


class InfeasibleProfileError(ValueError):
    """Feedback rates exhaust the total bandwidth."""


class SeriesConvergenceError(ArithmeticError):
    """The CSMA throughput series did not converge within the term cap."""


@dataclass(frozen=True)
class BandwidthSplit:
    b_total: float
    b_ul: float
    b_dl: float


@dataclass(frozen=True)
class CsmaModel:
    """Slotted p-persistent CSMA parameters.

    ``g0`` is the largest offered load before effective rates collapse; when
    ``None`` it is calibrated as the throughput-maximizing load.
    """

    p: float = 1.0
    a_ratio: float = 0.1
    g0: Optional[float] = None
    truncation_eps: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"persistence probability must lie in (0, 1], got {self.p}")
        if self.a_ratio <= 0:
            raise ValueError("a_ratio must be positive")
        if self.g0 is not None and self.g0 <= 0:
            raise ValueError("g0 must be positive")

    def calibrated(self) -> "CsmaModel":
        if self.g0 is not None:
            return self
        return replace(self, g0=calibrate_g0(self.p, self.a_ratio))


def fdma_split(b_total: float, beta: float, rates) -> BandwidthSplit:
    """Uplink bandwidth ``beta * sum(rates)``; the rest goes to the downlink.

    The two parts add up to ``b_total`` exactly. When the uplink is the
    smaller part it is reported as ``b_total - b_dl``, i.e. rounded to the
    resolution of ``b_total``; the larger part is always the exact
    difference (Sterbenz), so the downlink is ``fl(b_total - beta * sum(r))``.
    """
    if b_total <= 0 or beta <= 0:
        raise ValueError("b_total and beta must be positive")
    b_total = float(b_total)
    b_ul = beta * float(np.sum(rates))
    if b_ul >= b_total:
        raise InfeasibleProfileError(
            f"uplink feedback needs {b_ul:.6g} of {b_total:.6g} bandwidth units")
    b_dl = b_total - b_ul
    if b_dl >= 0.5 * b_total:
        b_ul = b_total - b_dl
    return BandwidthSplit(b_total=b_total, b_ul=b_ul, b_dl=b_dl)


def csma_throughput(g: float, model: CsmaModel) -> float:
    """Network throughput ``S`` at offered load ``g``."""
    if g < 0:
        raise ValueError("offered load must be non-negative")
    if g == 0:
        return 0.0
    p, a, eps = model.p, model.a_ratio, model.truncation_eps
    q = 1.0 - p
    # numerator and denominator are both scaled by g * exp(-g (1 + a)), which
    # keeps the geometric tails finite even for tiny loads
    shift = g * (1.0 + a)
    ratio = math.exp(-a * g)
    ag = a * g
    # g / (1 - ratio), written so that it cannot overflow as g -> 0
    tail_gain = 1.0 / (a * (-math.expm1(-ag) / ag if ag > 1e-12 else 1.0 - 0.5 * ag))

    if q == 0.0:
        tail_start = 1
    else:
        tail_start = max(1, math.ceil(math.log(_TAIL_POW) / math.log(q)))

    def num_term(k):
        qk = q ** k
        c = p * qk + a * (1.0 - qk * q)
        x = g * qk * q + a * g * (-(k + 1) + (1.0 - qk * q * q) / p)
        return c * math.exp(x - shift)

    def den_term(k):
        qk = q ** k
        y = g * qk + a * g * (-k + (1.0 - qk * q) / p)
        return math.exp(y - shift)

    num = _sum_series(num_term, 0, tail_start, g, tail_gain, ratio, eps)
    den_tail = _sum_series(den_term, 1, tail_start, g, tail_gain, ratio, eps)
    return g * num / ((1.0 + a) * g + a * den_tail)


def _sum_series(term, first, tail_start, g, tail_gain, ratio, eps):
    """``g * sum_{k >= first} term(k)`` with a closed-form geometric tail."""
    total = 0.0
    k = first
    while True:
        if k >= tail_start:
            # geometric from here on
            return total + term(k) * tail_gain
        raw = term(k)
        t = g * raw
        total += t
        if total > 0 and t < eps * total and raw * ratio * tail_gain < eps * total:
            return total
        k += 1
        if k - first >= SERIES_CAP:
            raise SeriesConvergenceError(
                f"CSMA series not converged after {SERIES_CAP} terms "
                f"(relative term {t / total if total else float('inf'):.3g})")


def calibrate_g0(p: float, a_ratio: float, g_max: float = 50.0,
                 n_grid: int = 501, tol: float = 1e-10) -> float:
    """Throughput-maximizing offered load on ``(0, g_max]``.

    Coarse grid bracketing followed by golden-section refinement.
    """
    model = CsmaModel(p=p, a_ratio=a_ratio, g0=1.0)
    grid = np.linspace(g_max / n_grid, g_max, n_grid)
    vals = np.array([csma_throughput(g, model) for g in grid])
    i = int(np.argmax(vals))
    lo = grid[i - 1] if i > 0 else grid[0] / 2
    hi = grid[min(i + 1, n_grid - 1)]
    return golden_max(lambda g: csma_throughput(g, model), lo, hi, tol).x


def csma_effective_rates(rates, model: CsmaModel) -> np.ndarray:
    """Effective feedback rates under contention.

    Rates are scaled by ``S(G)/G`` while the total load ``G`` stays within
    ``g0``; beyond it every effective rate is zero.
    """
    rates = np.asarray(rates, dtype=float)
    if np.any(rates < 0):
        raise ValueError("feedback rates must be non-negative")
    model = model.calibrated()
    g = float(rates.sum())
    if g == 0.0 or g > model.g0:
        return np.zeros_like(rates)
    return rates * (csma_throughput(g, model) / g)
