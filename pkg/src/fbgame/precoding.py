"""Regularized channel-inversion precoder and per-user link metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Condition-number limit of ``H H^H`` for the zero-forcing (psi = 0) precoder.
COND_LIMIT = 1e12


class SingularChannelError(np.linalg.LinAlgError):
    """Zero-forcing requested on a (numerically) rank-deficient estimate."""


@dataclass(frozen=True)
class PrecoderSet:
    """Unit-power precoder ``w`` (``n_t x n_s``, column k serves user k)."""

    w: np.ndarray
    k_norm: float
    psi: float


@dataclass(frozen=True)
class LinkMetrics:
    gamma: np.ndarray
    signal_power: np.ndarray
    interference_power: np.ndarray
    n0: float


def regularization_param(cfg) -> float:
    """Regularization ``psi`` for a game configuration.

    An explicit ``cfg.psi`` wins; ``cfg.precoder == "zf"`` gives 0; otherwise
    ``n_s * n0``, the large-system regularizer under unit total power.
    """
    if getattr(cfg, "precoder", "rzf") == "zf":
        return 0.0
    psi = getattr(cfg, "psi", None)
    if psi is not None:
        return float(psi)
    return float(cfg.n_s * cfg.n0)


def check_invertible(gram: np.ndarray) -> None:
    """Raise :class:`SingularChannelError` if any Gram matrix is ill-conditioned."""
    cond = np.linalg.cond(gram)
    bad = ~(cond < COND_LIMIT)
    if np.any(bad):
        raise SingularChannelError(
            f"H H^H is singular for zero-forcing (condition number {np.max(cond):.3g})")


def build_precoder(h_quant: np.ndarray, psi: float) -> PrecoderSet:
    """``T = H^H (H H^H + psi I)^-1`` scaled to unit Frobenius norm."""
    h_quant = np.atleast_2d(np.asarray(h_quant, dtype=complex))
    n_s, n_t = h_quant.shape
    if n_s > n_t:
        raise ValueError(f"need n_s <= n_t, got {n_s} users and {n_t} antennas")
    if psi < 0:
        raise ValueError("psi must be non-negative")
    gram = h_quant @ h_quant.conj().T
    if psi == 0:
        check_invertible(gram)
    t = np.linalg.solve(gram + psi * np.eye(n_s), h_quant).conj().T
    fro = np.linalg.norm(t)
    return PrecoderSet(w=t / fro, k_norm=1.0 / fro, psi=float(psi))


def link_metrics(h_true: np.ndarray, w: PrecoderSet, n0: float) -> LinkMetrics:
    """Signal, interference and SINR of every user.

    Interference is averaged over independent unit-power symbols, i.e. the
    sum of squared cross gains ``|h_k^T w_i|**2`` over ``i != k``.
    """
    if n0 <= 0:
        raise ValueError("noise power must be positive")
    gains = np.abs(np.asarray(h_true) @ w.w) ** 2
    signal = np.diag(gains).copy()
    # sum the cross terms directly; subtracting the diagonal from the row sum
    # would bury near-zero leakage in rounding error
    off = gains.copy()
    np.fill_diagonal(off, 0.0)
    interference = off.sum(axis=1)
    return LinkMetrics(gamma=signal / (interference + n0), signal_power=signal,
                       interference_power=interference, n0=float(n0))


def throughput(gamma, b_dl):
    """Shannon throughput ``b_dl * log2(1 + gamma)``."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0) or np.any(np.asarray(b_dl) < 0):
        raise ValueError("gamma and bandwidth must be non-negative")
    c = b_dl * np.log2(1.0 + gamma)
    return float(c) if np.ndim(c) == 0 else c
