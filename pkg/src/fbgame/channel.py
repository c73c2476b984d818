"""Rayleigh channel draws and the rate-limited CSI quantization model.

A feedback rate of ``r`` bits buys a mean-square distortion ``D = 2**-r``
for a unit-variance complex Gaussian entry. The estimate used at the base
station is the normalized model

    h_bar = sqrt(1 - D) * h + sqrt(D) * n_q

with ``n_q`` an independent CN(0, 1) draw, so every entry of ``h_bar`` keeps
unit variance and has correlation ``sqrt(1 - D)`` with the true entry.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw ``h`` with its paired quantization-noise draw ``nq``.

    Both arrays are ``(n_s, n_t)`` complex, rows indexed by mobile station.
    """

    h: np.ndarray
    nq: np.ndarray
    seed: Seed

    def __post_init__(self):
        if self.h.shape != self.nq.shape:
            raise ValueError("h and nq must have the same shape")
        self.h.setflags(write=False)
        self.nq.setflags(write=False)

    @property
    def n_s(self) -> int:
        return self.h.shape[0]

    @property
    def n_t(self) -> int:
        return self.h.shape[1]


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    # CN(0, 1): real and imaginary parts each N(0, 1/2)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def draw_channel(n_s: int, n_t: int, seed: Seed) -> ChannelRealization:
    """Draw i.i.d. CN(0, 1) channel and quantization-noise matrices.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`; equal
    seeds give bit-identical matrices. ``h`` is drawn before ``nq``.
    """
    if n_s < 1 or n_t < 1:
        raise ValueError(f"channel dimensions must be positive, got ({n_s}, {n_t})")
    rng = np.random.default_rng(seed)
    h = _cn(rng, (n_s, n_t))
    nq = _cn(rng, (n_s, n_t))
    return ChannelRealization(h=h, nq=nq, seed=seed)


def distortion_from_rate(r):
    """Distortion ``2**-r`` for feedback rate ``r`` (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise ValueError("feedback rate must be non-negative")
    d = np.exp2(-r_arr)
    return float(d) if d.ndim == 0 else d


def mu_nu(d: float) -> tuple[float, float]:
    """Coefficients of the un-normalized model ``h_bar = mu*h + nu*n_q``.

    ``mu = 1 - d`` and ``nu = sqrt(d (1 - d))``; they satisfy
    ``mu**2 + nu**2 = 1 - d``.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"distortion must lie in [0, 1], got {d}")
    return 1.0 - d, float(np.sqrt(d * (1.0 - d)))


def quantization_weights(rates) -> tuple[np.ndarray, np.ndarray]:
    """Per-row weights ``(sqrt(1 - 2**-r), sqrt(2**-r))`` of the normalized model."""
    d = np.atleast_1d(distortion_from_rate(rates))
    return np.sqrt(1.0 - d), np.sqrt(d)


def quantize_channel(real: ChannelRealization, rates) -> np.ndarray:
    """Quantized channel estimate at feedback ``rates`` (one rate per row)."""
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (real.n_s,):
        raise ValueError(f"expected {real.n_s} rates, got shape {rates.shape}")
    a, b = quantization_weights(rates)
    return a[:, None] * real.h + b[:, None] * real.nq


def quantize_channel_unnormalized(real: ChannelRealization, rates) -> np.ndarray:
    """Un-normalized estimate ``mu*h + nu*n_q``; entry variance is ``1 - D``.

    Kept as a checked identity only; precoding uses :func:`quantize_channel`.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (real.n_s,):
        raise ValueError(f"expected {real.n_s} rates, got shape {rates.shape}")
    d = np.atleast_1d(distortion_from_rate(rates))
    mu = 1.0 - d
    nu = np.sqrt(d * (1.0 - d))
    return mu[:, None] * real.h + nu[:, None] * real.nq


@dataclass(frozen=True)
class CrnBank:
    """Fixed bank of channel draws reused by every utility evaluation.

    Trial ``m`` of base draw uses seed ``[master_seed, m]``. With
    ``symmetric=True`` each base draw is also included under every cyclic
    shift of the user rows, which makes all users exactly exchangeable.

    Attributes
    ----------
    h, nq : ndarray, shape (M, n_s, n_t)
        Stacked draws, C-contiguous complex128.
    """

    h: np.ndarray
    nq: np.ndarray
    master_seed: int
    symmetric: bool

    @property
    def size(self) -> int:
        return self.h.shape[0]


def trial_seed(master_seed: int, trial: int) -> list[int]:
    """Sub-seed of one Monte Carlo trial."""
    return [int(master_seed), int(trial)]


@lru_cache(maxsize=32)
def crn_bank(n_s: int, n_t: int, mc_trials: int, master_seed: int,
             symmetric: bool = True) -> CrnBank:
    """Build (and memoize) the common-random-number bank.

    When ``symmetric`` the number of base draws is ``ceil(mc_trials / n_s)``
    so the bank holds ``n_s`` times that many entries.
    """
    if mc_trials < 1:
        raise ValueError("mc_trials must be at least 1")
    n_base = -(-mc_trials // n_s) if symmetric else mc_trials
    draws = [draw_channel(n_s, n_t, trial_seed(master_seed, m)) for m in range(n_base)]
    h = np.stack([d.h for d in draws])
    nq = np.stack([d.nq for d in draws])
    if symmetric and n_s > 1:
        h = np.concatenate([np.roll(h, s, axis=1) for s in range(n_s)])
        nq = np.concatenate([np.roll(nq, s, axis=1) for s in range(n_s)])
    h = np.ascontiguousarray(h)
    nq = np.ascontiguousarray(nq)
    h.setflags(write=False)
    nq.setflags(write=False)
    return CrnBank(h=h, nq=nq, master_seed=master_seed, symmetric=symmetric)
