# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the Monte-Carlo hot kernels.

Same contracts as ``_pykernels``.  The correlator bank is evaluated by
direct sums arranged as axpy updates over the longer grid axis (delays or
dopplers), which the compiler vectorizes.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, M_PI, hypot

cnp.import_array()


cdef bint _contiguous(const cnp.int64_t[::1] dl) noexcept nogil:
    cdef Py_ssize_t d
    for d in range(1, dl.shape[0]):
        if dl[d] != dl[0] + d:
            return False
    return True


cdef void _bank_trial(const double[:, ::1] rr, const double[:, ::1] ri, Py_ssize_t t,
                      const double[:, ::1] sr, const double[:, ::1] si, Py_ssize_t ts,
                      const double[:, ::1] twr, const double[:, ::1] twi,
                      const cnp.int64_t[::1] dl, bint delay_inner,
                      double[::1] wr, double[::1] wi,
                      double[:, ::1] accr, double[:, ::1] acci) noexcept nogil:
    """Fill acc[d, h] with the unnormalized correlation of trial t.

    delay_inner: axpy over a contiguous delay range using the reversed,
    doubled conjugate reference.  Otherwise axpy over dopplers with the
    transposed twiddle table (twr/twi are then shaped (N, H)).
    """
    cdef Py_ssize_t N = rr.shape[1], D = dl.shape[0]
    cdef Py_ssize_t H = accr.shape[1]
    cdef Py_ssize_t n, d, h, j, base
    cdef double ar, ai, pr, pi_, cr, ci
    for d in range(D):
        for h in range(H):
            accr[d, h] = 0.0
            acci[d, h] = 0.0
    if delay_inner:
        # w[j] = conj(s[(-j) mod N]) for j in 0..2N-1
        for j in range(2 * N):
            wr[j] = sr[ts, (2 * N - j) % N]
            wi[j] = -si[ts, (2 * N - j) % N]
        for h in range(H):
            for n in range(N):
                ar = rr[t, n] * twr[h, n] - ri[t, n] * twi[h, n]
                ai = rr[t, n] * twi[h, n] + ri[t, n] * twr[h, n]
                base = dl[0] - n + N
                for d in range(D):
                    accr[d, h] += ar * wr[base + d] - ai * wi[base + d]
                    acci[d, h] += ar * wi[base + d] + ai * wr[base + d]
    else:
        for d in range(D):
            for n in range(N):
                j = (n - dl[d] + N) % N
                cr = sr[ts, j]
                ci = -si[ts, j]
                pr = rr[t, n] * cr - ri[t, n] * ci
                pi_ = rr[t, n] * ci + ri[t, n] * cr
                for h in range(H):
                    accr[d, h] += pr * twr[n, h] - pi_ * twi[n, h]
                    acci[d, h] += pr * twi[n, h] + pi_ * twr[n, h]


def _setup(r, sref, dopplers, delays):
    N = r.shape[1]
    H, D = dopplers.shape[0], delays.shape[0]
    rr, ri = _split(r)
    sr, si = _split(sref)
    dl = np.ascontiguousarray(delays, dtype=np.int64)
    delay_inner = bool(_contiguous(dl)) and D >= H
    tw = np.exp(-2j * np.pi * np.outer(dopplers, np.arange(N)) / N)
    if not delay_inner:
        tw = tw.T
    twr, twi = _split(tw)
    return rr, ri, sr, si, twr, twi, dl, delay_inner


def _split(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    return np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag)


def correlator_bank(r, sref, dopplers, delays):
    cdef Py_ssize_t T = r.shape[0], N = r.shape[1]
    cdef Py_ssize_t H = dopplers.shape[0], D = delays.shape[0]
    cdef Py_ssize_t t, h, d, ts = 0
    cdef bint shared = sref.shape[0] == 1
    rr_, ri_, sr_, si_, twr_, twi_, dl_, inner = _setup(r, sref, dopplers, delays)
    cdef const double[:, ::1] rr = rr_
    cdef const double[:, ::1] ri = ri_
    cdef const double[:, ::1] sr = sr_
    cdef const double[:, ::1] si = si_
    cdef const double[:, ::1] twr = twr_
    cdef const double[:, ::1] twi = twi_
    cdef const cnp.int64_t[::1] dl = dl_
    cdef bint delay_inner = inner
    cdef double[::1] wr = np.empty(2 * N)
    cdef double[::1] wi = np.empty(2 * N)
    cdef double[:, ::1] accr = np.empty((D, H))
    cdef double[:, ::1] acci = np.empty((D, H))
    out_ = np.empty((T, H, D), dtype=np.float64)
    cdef double[:, :, ::1] out = out_
    cdef double invN = 1.0 / N
    with nogil:
        for t in range(T):
            if not shared:
                ts = t
            _bank_trial(rr, ri, t, sr, si, ts, twr, twi, dl, delay_inner, wr, wi, accr, acci)
            for d in range(D):
                for h in range(H):
                    out[t, h, d] = hypot(accr[d, h], acci[d, h]) * invN
    return out_


def correlator_peaks(r, sref, dopplers, delays):
    cdef Py_ssize_t T = r.shape[0], N = r.shape[1]
    cdef Py_ssize_t H = dopplers.shape[0], D = delays.shape[0]
    cdef Py_ssize_t t, h, d, bd, bh, ts = 0
    cdef bint shared = sref.shape[0] == 1
    cdef double v, best
    rr_, ri_, sr_, si_, twr_, twi_, dl_, inner = _setup(r, sref, dopplers, delays)
    cdef const double[:, ::1] rr = rr_
    cdef const double[:, ::1] ri = ri_
    cdef const double[:, ::1] sr = sr_
    cdef const double[:, ::1] si = si_
    cdef const double[:, ::1] twr = twr_
    cdef const double[:, ::1] twi = twi_
    cdef const cnp.int64_t[::1] dl = dl_
    cdef bint delay_inner = inner
    cdef double[::1] wr = np.empty(2 * N)
    cdef double[::1] wi = np.empty(2 * N)
    cdef double[:, ::1] accr = np.empty((D, H))
    cdef double[:, ::1] acci = np.empty((D, H))
    peak_ = np.empty(T, dtype=np.float64)
    didx_ = np.empty(T, dtype=np.int64)
    hidx_ = np.empty(T, dtype=np.int64)
    cdef double[::1] peak = peak_
    cdef cnp.int64_t[::1] didx = didx_
    cdef cnp.int64_t[::1] hidx = hidx_
    cdef double invN = 1.0 / N
    with nogil:
        for t in range(T):
            if not shared:
                ts = t
            _bank_trial(rr, ri, t, sr, si, ts, twr, twi, dl, delay_inner, wr, wi, accr, acci)
            best = -1.0
            bd = 0
            bh = 0
            for d in range(D):
                for h in range(H):
                    v = hypot(accr[d, h], acci[d, h]) * invN
                    if v > best:
                        best = v
                        bd = d
                        bh = h
            peak[t] = best
            didx[t] = bd
            hidx[t] = bh
    return peak_, didx_, hidx_


def clarke_gains(double f_d, cos_theta, phase, n):
    cdef Py_ssize_t T = cos_theta.shape[0], L = cos_theta.shape[1], P = cos_theta.shape[2]
    cdef Py_ssize_t S = n.shape[0]
    cdef Py_ssize_t t, l, p, k
    cdef const double[:, :, ::1] ct = np.ascontiguousarray(cos_theta, dtype=np.float64)
    cdef const double[:, :, ::1] ph = np.ascontiguousarray(phase, dtype=np.float64)
    cdef const double[::1] nn = np.ascontiguousarray(n, dtype=np.float64)
    out_ = np.empty((T, L, S), dtype=np.complex128)
    cdef double[:, :, ::1] ore = np.empty((T, L, S))
    cdef double[:, :, ::1] oim = np.empty((T, L, S))
    cdef double w = 2.0 * M_PI * f_d
    cdef double scale = 1.0 / sqrt(<double>P)
    cdef double accr, acci, a
    with nogil:
        for t in range(T):
            for l in range(L):
                for k in range(S):
                    accr = 0.0
                    acci = 0.0
                    for p in range(P):
                        a = w * nn[k] * ct[t, l, p] + ph[t, l, p]
                        accr = accr + cos(a)
                        acci = acci + sin(a)
                    ore[t, l, k] = accr * scale
                    oim[t, l, k] = acci * scale
    out_.real = np.asarray(ore)
    out_.imag = np.asarray(oim)
    return out_
