"""Backend selection for the SINR kernels.

The compiled core is used when it imports; setting ``FBGAME_PURE_PYTHON=1``
forces the numpy implementation. Both expose ``sinr_bank`` and
``UserSweep`` with identical contracts.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .precoding import check_invertible

if os.environ.get("FBGAME_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"


def _check_zf(h, nq, rates):
    hb = _kernels_py.quantize(h, nq, rates)
    check_invertible(hb @ hb.conj().transpose(0, 2, 1))


def sinr_bank(h, nq, rates, psi, n0, impl=None):
    """SINR ``(M, n)`` of every user in every trial at the given rates."""
    impl = impl or _impl
    rates = np.ascontiguousarray(rates, dtype=float)
    if psi == 0:
        _check_zf(h, nq, rates)
    return impl.sinr_bank(h, nq, rates, float(psi), float(n0))


def user_sweep(h, nq, rates, k, psi, impl=None):
    """Prepared evaluator of all SINRs as a function of user ``k``'s rate."""
    impl = impl or _impl
    rates = np.ascontiguousarray(rates, dtype=float)
    if psi == 0:
        # the full matrix is only singular if the others already are, or k's row
        # falls in their span; checking the others covers the common case
        others = [j for j in range(h.shape[1]) if j != k]
        if others:
            _check_zf(h[:, others, :], nq[:, others, :], rates[others])
    return impl.UserSweep(h, nq, rates, int(k), float(psi))
