"""Scalar maximization: grid bracketing plus golden-section refinement.

Both routines remember every point they evaluate and return the best one,
ties going to the smaller abscissa. That keeps the result valid for
functions that rise to a cliff and drop, where the final golden-section
bracket midpoint may sit on the wrong side of the edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalarMax:
    x: float
    fx: float
    n_evals: int


class _Tracker:
    def __init__(self, f: Callable[[float], float]):
        self.f = f
        self.best_x = math.nan
        self.best_f = -math.inf
        self.n = 0

    def __call__(self, x: float) -> float:
        fx = self.f(x)
        self.n += 1
        if fx > self.best_f or (fx == self.best_f and x < self.best_x):
            self.best_x, self.best_f = x, fx
        return fx


def _golden(ev: _Tracker, lo: float, hi: float, tol: float) -> None:
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = ev(x1), ev(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = ev(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = ev(x2)


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-8) -> ScalarMax:
    """Maximize a unimodal ``f`` on ``[lo, hi]`` to bracket width ``tol``."""
    if hi < lo:
        raise ValueError("empty interval")
    ev = _Tracker(f)
    ev(lo)
    ev(hi)
    if hi - lo > tol:
        _golden(ev, lo, hi, tol)
    return ScalarMax(ev.best_x, ev.best_f, ev.n)


def grid_golden_max(f: Callable[[float], float], lo: float, hi: float,
                    n_grid: int = 65, tol: float = 1e-3) -> ScalarMax:
    """Maximize ``f`` on ``[lo, hi]``.

    A uniform ``n_grid``-point scan picks the best cell; golden-section search
    then refines within the two neighbouring cells.
    """
    if hi < lo:
        raise ValueError("empty interval")
    ev = _Tracker(f)
    if hi == lo:
        ev(lo)
        return ScalarMax(ev.best_x, ev.best_f, ev.n)
    grid = np.linspace(lo, hi, n_grid)
    vals = [ev(float(x)) for x in grid]
    i = int(np.argmax(vals))  # first maximum, i.e. the smaller rate on ties
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, n_grid - 1)])
    if b - a > tol:
        _golden(ev, a, b, tol)
    return ScalarMax(ev.best_x, ev.best_f, ev.n)
