"""Vectorized numpy kernels (fallback when the compiled core is unavailable).

Shapes: ``h`` and ``nq`` are ``(M, n, n_t)`` complex128 banks, ``rates`` has
length ``n``. Every kernel returns SINR as an ``(M, n)`` float array.

:class:`UserSweep` evaluates the SINR of all users while only user ``k``'s
rate varies. With the other users' quantized rows fixed, the Gram matrix
``G = Hb Hb^H + psi I`` is bordered by one row and column that depend on
``k``'s rate through two real weights ``(a, b)``. The block inverse

    G^-1 = [[A + v v^H / s, -v / s], [-v^H / s, 1 / s]],   A = G_oo^-1,

with ``v = A g`` and Schur complement ``s = g_kk - g^H A g`` reduces every
quantity the SINR needs to quadratic forms in ``(a, b)`` whose coefficients
are precomputed once per trial.
"""
from __future__ import annotations

import numpy as np


def _weights(r):
    d = np.exp2(-np.asarray(r, dtype=float))
    return np.sqrt(1.0 - d), np.sqrt(d)


def quantize(h, nq, rates):
    a, b = _weights(rates)
    return a[None, :, None] * h + b[None, :, None] * nq


def sinr_bank(h, nq, rates, psi, n0):
    hb = quantize(h, nq, rates)
    n = hb.shape[1]
    gram = hb @ hb.conj().transpose(0, 2, 1) + psi * np.eye(n)
    x = np.linalg.solve(gram, hb)            # G^-1 Hb, so T = X^H
    tau = np.einsum("mij,mij->m", x.real, x.real) + np.einsum("mij,mij->m", x.imag, x.imag)
    d = h @ x.conj().transpose(0, 2, 1)      # unnormalized h_j^T t_i
    p = d.real ** 2 + d.imag ** 2
    sig = np.einsum("mkk->mk", p)
    # direct off-diagonal sum: subtracting sig from the row sum loses tiny leakage
    off = (p * (1.0 - np.eye(n))).sum(axis=2)
    return sig / (off + n0 * tau[:, None])


def _rdot(x, y):
    """Real part of sum(conj(x) * y) along the last axis."""
    return np.einsum("...i,...i->...", x.real, y.real) + np.einsum("...i,...i->...", x.imag, y.imag)


def _cdot(x, y):
    """sum(x * y) along the last axis, no conjugation."""
    return np.einsum("...i,...i->...", x, y)


class UserSweep:
    """SINR of every user as a function of user ``k``'s rate alone."""

    def __init__(self, h, nq, rates, k, psi):
        h = np.asarray(h)
        nq = np.asarray(nq)
        m, n, _ = h.shape
        self.k = int(k)
        self.psi = float(psi)
        others = [j for j in range(n) if j != self.k]
        hk = h[:, self.k, :]
        qk = nq[:, self.k, :]
        hb_o = quantize(h[:, others, :], nq[:, others, :], np.asarray(rates, float)[others])

        if others:
            g_oo = hb_o @ hb_o.conj().transpose(0, 2, 1) + self.psi * np.eye(n - 1)
            amat = np.linalg.inv(g_oo)
            amat = 0.5 * (amat + amat.conj().transpose(0, 2, 1))
        else:
            amat = np.zeros((m, 0, 0), dtype=complex)

        pv = np.einsum("mit,mt->mi", hb_o, hk.conj())
        qv = np.einsum("mit,mt->mi", hb_o, qk.conj())
        ap = np.einsum("mij,mj->mi", amat, pv)
        aq = np.einsum("mij,mj->mi", amat, qv)
        aap = np.einsum("mij,mj->mi", amat, ap)
        aaq = np.einsum("mij,mj->mi", amat, aq)

        self.hh = _rdot(hk, hk)
        self.qq = _rdot(qk, qk)
        self.hq = _rdot(qk, hk)
        self.pap = _rdot(pv, ap)
        self.paq = _rdot(pv, aq)
        self.qaq = _rdot(qv, aq)
        self.n_ap = _rdot(ap, ap)
        self.n_aq = _rdot(aq, aq)
        self.apaq = _rdot(ap, aq)
        self.q_pp = _rdot(ap, aap)
        self.q_pq = _rdot(ap, aaq)
        self.q_qq = _rdot(aq, aaq)
        self.tr_a = np.einsum("mii->m", amat).real
        self.fro_a = (amat.real ** 2 + amat.imag ** 2).sum(axis=(1, 2))

        cmat = h @ hb_o.conj().transpose(0, 2, 1)      # (M, n, n-1)
        emat = cmat @ amat
        self.x = np.einsum("mjt,mt->mj", h, hk.conj())
        self.y = np.einsum("mjt,mt->mj", h, qk.conj())
        self.ep = _cdot(emat, pv[:, None, :])
        self.eq = _cdot(emat, qv[:, None, :])
        self.eap = _cdot(emat, ap[:, None, :])
        self.eaq = _cdot(emat, aq[:, None, :])
        self.n_e = (emat.real ** 2 + emat.imag ** 2).sum(axis=2)

        # own-entry pieces for users j != k (position of j within "others")
        self.e_jj = np.zeros((m, n), dtype=complex)
        self.ap_j = np.zeros((m, n), dtype=complex)
        self.aq_j = np.zeros((m, n), dtype=complex)
        for pos, j in enumerate(others):
            self.e_jj[:, j] = emat[:, j, pos]
            self.ap_j[:, j] = ap[:, pos]
            self.aq_j[:, j] = aq[:, pos]

    def gamma(self, rk, n0):
        a, b = (float(w) for w in _weights(rk))
        ab2 = 2.0 * a * b
        psi = self.psi
        s = (a * a * self.hh + b * b * self.qq + ab2 * self.hq + psi
             - (a * a * self.pap + ab2 * self.paq + b * b * self.qaq))
        nv = a * a * self.n_ap + ab2 * self.apaq + b * b * self.n_aq
        vav = a * a * self.q_pp + ab2 * self.q_pq + b * b * self.q_qq
        inv_s = 1.0 / s
        tr_g = self.tr_a + (nv + 1.0) * inv_s
        fro_g = self.fro_a + 2.0 * vav * inv_s + (nv * nv + 2.0 * nv + 1.0) * inv_s * inv_s
        tau = tr_g - psi * fro_g

        t = ((a * self.ep + b * self.eq) - (a * self.x + b * self.y)) * inv_s[:, None]
        ev = a * self.eap + b * self.eaq
        t2 = t.real ** 2 + t.imag ** 2
        total = (self.n_e + 2.0 * (t.real * ev.real + t.imag * ev.imag)
                 + t2 * nv[:, None] + t2)
        own = self.e_jj + t * (a * self.ap_j.conj() + b * self.aq_j.conj())
        sig = own.real ** 2 + own.imag ** 2
        sig[:, self.k] = t2[:, self.k]
        interf = np.maximum(total - sig, 0.0)
        return sig / (interf + n0 * tau[:, None])
