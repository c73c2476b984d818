import math

import numpy as np
import pytest

from fbgame.search import golden_max, grid_golden_max


def test_golden_on_parabola():
    res = golden_max(lambda x: -(x - 1.234) ** 2, 0, 5, tol=1e-9)
    assert res.x == pytest.approx(1.234, abs=1e-8)


def test_golden_boundary_max():
    res = golden_max(lambda x: -x, 0, 3)
    assert res.x == 0.0


def test_grid_golden_cliff():
    # rises to an edge then drops; the edge itself must be kept
    f = lambda x: x if x <= 2.0 else -1.0
    res = grid_golden_max(f, 0, 10, tol=1e-6)
    assert res.x == pytest.approx(2.0, abs=1e-5) and res.x <= 2.0


def test_ties_go_to_smaller_argument():
    res = grid_golden_max(lambda x: 1.0, 0, 4)
    assert res.x == 0.0


def test_degenerate_interval():
    res = grid_golden_max(lambda x: x, 2.0, 2.0)
    assert (res.x, res.n_evals) == (2.0, 1)
    with pytest.raises(ValueError):
        grid_golden_max(lambda x: x, 1.0, 0.0)


def test_multimodal_picks_global_cell():
    f = lambda x: math.exp(-(x - 1) ** 2 * 40) + 2 * math.exp(-(x - 7) ** 2 * 40)
    assert grid_golden_max(f, 0, 10, tol=1e-6).x == pytest.approx(7.0, abs=1e-4)
