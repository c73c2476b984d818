# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SINR kernels; same contracts as ``_kernels_py``.

Scratch buffers are allocated once per call, so a bank evaluation never
allocates inside the trial loop. Inner products run on raw row pointers
with split real/imaginary accumulators.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp2

cnp.import_array()

ctypedef double complex cplx


cdef inline double abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx mk(double re, double im) noexcept nogil:
    cdef cplx z = 0
    (<double*>&z)[0] = re
    (<double*>&z)[1] = im
    return z


cdef inline cplx cj(cplx z) noexcept nogil:
    return mk(z.real, -z.imag)


cdef inline cplx dotc(const cplx* x, const cplx* y, Py_ssize_t n) noexcept nogil:
    """sum(x * conj(y))"""
    cdef const double* a = <const double*>x
    cdef const double* b = <const double*>y
    cdef double re = 0.0, im = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        re += a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1]
        im += a[2 * i + 1] * b[2 * i] - a[2 * i] * b[2 * i + 1]
    return mk(re, im)


cdef inline cplx dotu(const cplx* x, const cplx* y, Py_ssize_t n) noexcept nogil:
    """sum(x * y)"""
    cdef const double* a = <const double*>x
    cdef const double* b = <const double*>y
    cdef double re = 0.0, im = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        re += a[2 * i] * b[2 * i] - a[2 * i + 1] * b[2 * i + 1]
        im += a[2 * i + 1] * b[2 * i] + a[2 * i] * b[2 * i + 1]
    return mk(re, im)


cdef inline double norm2(const cplx* x, Py_ssize_t n) noexcept nogil:
    cdef const double* a = <const double*>x
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(2 * n):
        s += a[i] * a[i]
    return s


cdef void gram(const cplx* hb, Py_ssize_t n, Py_ssize_t nt, double psi, cplx* g) noexcept nogil:
    """Lower triangle and diagonal of ``hb hb^H + psi I`` (row-major n x n)."""
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(i):
            g[i * n + j] = dotc(hb + i * nt, hb + j * nt, nt)
        g[i * n + i] = mk(norm2(hb + i * nt, nt) + psi, 0.0)


cdef int cholesky(cplx* g, Py_ssize_t n) noexcept nogil:
    """In-place lower Cholesky factor of the Hermitian matrix whose lower
    triangle is stored in ``g``; returns -1 if it is not positive definite."""
    cdef Py_ssize_t i, j
    cdef double diag
    for j in range(n):
        diag = g[j * n + j].real - norm2(g + j * n, j)
        if not diag > 0.0:
            return -1
        diag = sqrt(diag)
        g[j * n + j] = mk(diag, 0.0)
        for i in range(j + 1, n):
            g[i * n + j] = (g[i * n + j] - dotc(g + i * n, g + j * n, j)) / diag
    return 0


cdef void chol_solve(const cplx* low, cplx* rhs, Py_ssize_t n, Py_ssize_t ncol) noexcept nogil:
    """Overwrite row-major ``rhs`` (n x ncol) with ``(L L^H)^-1 rhs``."""
    cdef Py_ssize_t i, p, c
    cdef double d
    cdef cplx f
    for i in range(n):
        for p in range(i):
            f = low[i * n + p]
            for c in range(ncol):
                rhs[i * ncol + c] = rhs[i * ncol + c] - f * rhs[p * ncol + c]
        d = 1.0 / low[i * n + i].real
        for c in range(ncol):
            rhs[i * ncol + c] = rhs[i * ncol + c] * d
    for i in range(n - 1, -1, -1):
        for p in range(i + 1, n):
            f = cj(low[p * n + i])
            for c in range(ncol):
                rhs[i * ncol + c] = rhs[i * ncol + c] - f * rhs[p * ncol + c]
        d = 1.0 / low[i * n + i].real
        for c in range(ncol):
            rhs[i * ncol + c] = rhs[i * ncol + c] * d


def sinr_bank(const cplx[:, :, ::1] h, const cplx[:, :, ::1] nq, rates, double psi, double n0):
    cdef Py_ssize_t m_tot = h.shape[0], n = h.shape[1], nt = h.shape[2]
    cdef double[::1] r = np.ascontiguousarray(rates, dtype=np.float64)
    cdef double[::1] wa = np.empty(n), wb = np.empty(n)
    cdef Py_ssize_t m, i, j, t
    cdef double d, tau, sig, off, pw
    cdef cplx[:, ::1] hb_buf = np.empty((n, nt), dtype=np.complex128)
    cdef cplx[:, ::1] x_buf = np.empty((n, nt), dtype=np.complex128)
    cdef cplx[:, ::1] g_buf = np.empty((n, n), dtype=np.complex128)
    cdef cplx* hb = &hb_buf[0, 0]
    cdef cplx* x = &x_buf[0, 0]
    cdef cplx* g = &g_buf[0, 0]
    cdef const cplx* hm
    cdef const cplx* qm
    out = np.empty((m_tot, n), dtype=np.float64)
    cdef double[:, ::1] gam = out
    cdef int bad = 0

    for i in range(n):
        d = exp2(-r[i])
        wa[i] = sqrt(1.0 - d)
        wb[i] = sqrt(d)

    with nogil:
        for m in range(m_tot):
            hm = &h[m, 0, 0]
            qm = &nq[m, 0, 0]
            for i in range(n):
                for t in range(nt):
                    hb[i * nt + t] = wa[i] * hm[i * nt + t] + wb[i] * qm[i * nt + t]
                    x[i * nt + t] = hb[i * nt + t]
            gram(hb, n, nt, psi, g)
            if cholesky(g, n) != 0:
                bad = 1
                break
            chol_solve(g, x, n, nt)
            tau = norm2(x, n * nt)
            for j in range(n):
                sig = 0.0
                off = 0.0
                for i in range(n):
                    pw = abs2(dotc(hm + j * nt, x + i * nt, nt))
                    if i == j:
                        sig = pw
                    else:
                        off += pw
                gam[m, j] = sig / (off + n0 * tau)
    if bad:
        raise np.linalg.LinAlgError("Gram matrix is not positive definite")
    return out


cdef class UserSweep:
    """SINR of every user as a function of user ``k``'s rate alone."""

    cdef readonly Py_ssize_t k
    cdef readonly double psi
    cdef Py_ssize_t m_tot, n
    cdef double[:, ::1] sc     # per-trial scalar coefficients
    cdef cplx[:, :, ::1] uv    # per-trial, per-user complex coefficients
    cdef double[:, ::1] n_e

    def __init__(self, const cplx[:, :, ::1] h, const cplx[:, :, ::1] nq, rates,
                 Py_ssize_t k, double psi):
        cdef Py_ssize_t m_tot = h.shape[0], n = h.shape[1], nt = h.shape[2]
        cdef Py_ssize_t no = n - 1, nb = max(n - 1, 1)
        cdef double[::1] r = np.ascontiguousarray(rates, dtype=np.float64)
        cdef Py_ssize_t m, i, j, t, oi
        cdef double d
        cdef Py_ssize_t[::1] others
        cdef double[::1] wa = np.empty(nb), wb = np.empty(nb)
        cdef cplx[:, ::1] hb_b = np.empty((nb, nt), dtype=np.complex128)
        cdef cplx[:, ::1] g_b = np.empty((nb, nb), dtype=np.complex128)
        cdef cplx[:, ::1] a_b = np.empty((nb, nb), dtype=np.complex128)
        cdef cplx[:, ::1] vec_b = np.empty((8, nb), dtype=np.complex128)
        cdef cplx* hb = &hb_b[0, 0]
        cdef cplx* g = &g_b[0, 0]
        cdef cplx* amat = &a_b[0, 0]
        cdef cplx* pv = &vec_b[0, 0]
        cdef cplx* qv = &vec_b[1, 0]
        cdef cplx* ap = &vec_b[2, 0]
        cdef cplx* aq = &vec_b[3, 0]
        cdef cplx* aap = &vec_b[4, 0]
        cdef cplx* aaq = &vec_b[5, 0]
        cdef cplx* crow = &vec_b[6, 0]
        cdef cplx* erow = &vec_b[7, 0]
        cdef const cplx* hm
        cdef const cplx* qm
        cdef const cplx* hk
        cdef const cplx* qk
        cdef double* s
        cdef cplx* u
        cdef int bad = 0

        if not 0 <= k < n:
            raise IndexError("user index out of range")
        others = np.array([j for j in range(n) if j != k] or [0], dtype=np.intp)
        self.k = k
        self.psi = psi
        self.m_tot = m_tot
        self.n = n
        for i in range(no):
            d = exp2(-r[others[i]])
            wa[i] = sqrt(1.0 - d)
            wb[i] = sqrt(d)
        self.sc = np.zeros((m_tot, 14))
        self.uv = np.zeros((m_tot, n, 9), dtype=np.complex128)
        self.n_e = np.zeros((m_tot, n))

        with nogil:
            for m in range(m_tot):
                hm = &h[m, 0, 0]
                qm = &nq[m, 0, 0]
                hk = hm + k * nt
                qk = qm + k * nt
                s = &self.sc[m, 0]
                for i in range(no):
                    oi = others[i]
                    for t in range(nt):
                        hb[i * nt + t] = wa[i] * hm[oi * nt + t] + wb[i] * qm[oi * nt + t]
                if no > 0:
                    gram(hb, no, nt, psi, g)
                    if cholesky(g, no) != 0:
                        bad = 1
                        break
                    for i in range(no):
                        for j in range(no):
                            amat[i * no + j] = mk(1.0 if i == j else 0.0, 0.0)
                    chol_solve(g, amat, no, no)
                for i in range(no):
                    pv[i] = dotc(hb + i * nt, hk, nt)
                    qv[i] = dotc(hb + i * nt, qk, nt)
                for i in range(no):
                    ap[i] = dotu(amat + i * no, pv, no)
                    aq[i] = dotu(amat + i * no, qv, no)
                for i in range(no):
                    aap[i] = dotu(amat + i * no, ap, no)
                    aaq[i] = dotu(amat + i * no, aq, no)

                s[0] = norm2(hk, nt)                       # |h_k|^2
                s[1] = norm2(qk, nt)                       # |q_k|^2
                s[2] = dotc(hk, qk, nt).real               # Re <h_k, q_k>
                s[3] = dotc(ap, pv, no).real               # P^H A P
                s[4] = dotc(aq, pv, no).real               # Re P^H A Q
                s[5] = dotc(aq, qv, no).real               # Q^H A Q
                s[6] = norm2(ap, no)
                s[7] = norm2(aq, no)
                s[8] = dotc(aq, ap, no).real
                s[9] = dotc(aap, ap, no).real
                s[10] = dotc(aaq, ap, no).real
                s[11] = dotc(aaq, aq, no).real
                d = 0.0
                for i in range(no):
                    d += amat[i * no + i].real
                s[12] = d
                s[13] = norm2(amat, no * no)

                for j in range(n):
                    u = &self.uv[m, j, 0]
                    u[0] = dotc(hm + j * nt, hk, nt)      # X_j
                    u[1] = dotc(hm + j * nt, qk, nt)      # Y_j
                    for i in range(no):
                        crow[i] = dotc(hm + j * nt, hb + i * nt, nt)
                    # e_j = C_j A, using A[p, i] = conj(A[i, p])
                    for i in range(no):
                        erow[i] = dotc(crow, amat + i * no, no)
                    self.n_e[m, j] = norm2(erow, no)
                    u[2] = dotu(erow, pv, no)
                    u[3] = dotu(erow, qv, no)
                    u[4] = dotu(erow, ap, no)
                    u[5] = dotu(erow, aq, no)
                    if j != k:
                        i = j if j < k else j - 1
                        u[6] = erow[i]
                        u[7] = cj(ap[i])
                        u[8] = cj(aq[i])
        if bad:
            raise np.linalg.LinAlgError("Gram matrix is not positive definite")

    def gamma(self, double rk, double n0):
        cdef double d = exp2(-rk)
        cdef double a = sqrt(1.0 - d), b = sqrt(d)
        cdef double ab2 = 2.0 * a * b, aa = a * a, bb = b * b, psi = self.psi
        cdef double sch, nv, vav, inv_s, tau, t2, total, sig
        cdef Py_ssize_t m, j, n = self.n, k = self.k
        cdef cplx t, ev, own
        cdef const double* s
        cdef const cplx* u
        out = np.empty((self.m_tot, n), dtype=np.float64)
        cdef double[:, ::1] gam = out
        with nogil:
            for m in range(self.m_tot):
                s = &self.sc[m, 0]
                sch = aa * s[0] + bb * s[1] + ab2 * s[2] + psi - (aa * s[3] + ab2 * s[4] + bb * s[5])
                nv = aa * s[6] + ab2 * s[8] + bb * s[7]
                vav = aa * s[9] + ab2 * s[10] + bb * s[11]
                inv_s = 1.0 / sch
                tau = (s[12] + (nv + 1.0) * inv_s
                       - psi * (s[13] + 2.0 * vav * inv_s
                                + (nv * nv + 2.0 * nv + 1.0) * inv_s * inv_s))
                for j in range(n):
                    u = &self.uv[m, j, 0]
                    t = (a * (u[2] - u[0]) + b * (u[3] - u[1])) * inv_s
                    ev = a * u[4] + b * u[5]
                    t2 = abs2(t)
                    total = self.n_e[m, j] + 2.0 * (t.real * ev.real + t.imag * ev.imag) + t2 * (nv + 1.0)
                    if j == k:
                        sig = t2
                    else:
                        own = u[6] + t * (a * u[7] + b * u[8])
                        sig = abs2(own)
                    total = total - sig
                    if total < 0.0:
                        total = 0.0
                    gam[m, j] = sig / (total + n0 * tau)
        return out
