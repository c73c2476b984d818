"""Compare the compiled and numpy SINR kernels on a desk-scale channel bank.

Usage::

    python3 benchmarks/bench_kernels.py [--n 10] [--trials 500] [--repeat 20]

Reports the best-of-``repeat`` wall time of a full bank evaluation, of
preparing a single-user sweep and of one sweep evaluation, plus the largest
relative difference between the two backends.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from fbgame import _kernels_py
from fbgame.channel import crn_bank

try:
    from fbgame import _kernels
except ImportError:  # extension not built
    _kernels = None


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(impl, bank, rates, psi, n0, repeat):
    full = _time(lambda: impl.sinr_bank(bank.h, bank.nq, rates, psi, n0), repeat)
    prep = _time(lambda: impl.UserSweep(bank.h, bank.nq, rates, 0, psi), repeat)
    sweep = impl.UserSweep(bank.h, bank.nq, rates, 0, psi)
    ev = _time(lambda: sweep.gamma(2.5, n0), repeat * 10)
    return full, prep, ev


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10, help="users = antennas")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    bank = crn_bank(args.n, args.n, args.trials, 0)
    rates = np.linspace(0.5, 8.0, args.n)
    psi, n0 = float(args.n), 1.0

    impls = [("numpy", _kernels_py)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))
    else:
        print("compiled extension not built; timing numpy only")

    results = {}
    print(f"bank: {bank.size} trials, {args.n} users x {args.n} antennas")
    print(f"{'backend':<10}{'full bank':>14}{'sweep prep':>14}{'sweep eval':>14}")
    for name, impl in impls:
        full, prep, ev = bench(impl, bank, rates, psi, n0, args.repeat)
        results[name] = (full, prep, ev)
        print(f"{name:<10}{full * 1e3:>12.3f}ms{prep * 1e3:>12.3f}ms{ev * 1e3:>12.3f}ms")

    if "compiled" in results:
        f0, p0, e0 = results["numpy"]
        f1, p1, e1 = results["compiled"]
        print(f"{'speedup':<10}{f0 / f1:>13.1f}x{p0 / p1:>13.1f}x{e0 / e1:>13.1f}x")
        a = _kernels_py.sinr_bank(bank.h, bank.nq, rates, psi, n0)
        b = _kernels.sinr_bank(bank.h, bank.nq, rates, psi, n0)
        print(f"max relative difference: {np.max(np.abs(a - b) / a):.2e}")


if __name__ == "__main__":
    main()
