"""numpy implementations of the hot kernels.

Inputs are already canonicalized by :mod:`chirpaf.kernels` (contiguous
``complex128`` / ``float64`` / ``int64`` arrays with a leading trial axis).
"""
import numpy as np

# Bound on the number of complex intermediates held per chunk.
_CHUNK_ELEMS = 1 << 22


def _doppler_twiddles(dopplers, N):
    n = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(dopplers, n) / N)


def _conj_ref_matrix(sref, delays, N):
    # C[..., n, d] = conj(sref[..., (n - delays[d]) mod N])
    idx = (np.arange(N)[:, None] - delays[None, :]) % N
    return np.conj(sref[..., idx])


def correlator_bank(r, sref, dopplers, delays):
    T, N = r.shape
    H, D = dopplers.size, delays.size
    out = np.empty((T, H, D), dtype=np.float64)
    tw = _doppler_twiddles(dopplers, N)
    shared = sref.shape[0] == 1
    full = D == N and np.array_equal(delays, np.arange(N))
    if shared:
        if full:
            S = np.conj(np.fft.fft(sref[0]))
        else:
            C = _conj_ref_matrix(sref[0], delays, N)
    step = max(1, _CHUNK_ELEMS // (H * max(N, D)))
    for a in range(0, T, step):
        b = min(T, a + step)
        A = r[a:b, None, :] * tw[None, :, :]
        if shared and full:
            acc = np.fft.ifft(np.fft.fft(A, axis=-1) * S, axis=-1)
        elif shared:
            acc = A @ C
        else:
            acc = A @ _conj_ref_matrix(sref[a:b], delays, N)
        out[a:b] = np.abs(acc) / N
    return out


def correlator_peaks(r, sref, dopplers, delays):
    T = r.shape[0]
    H, D = dopplers.size, delays.size
    peak = np.empty(T, dtype=np.float64)
    d_idx = np.empty(T, dtype=np.int64)
    h_idx = np.empty(T, dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // (H * max(r.shape[1], D)))
    for a in range(0, T, step):
        b = min(T, a + step)
        sr = sref if sref.shape[0] == 1 else sref[a:b]
        rho = correlator_bank(r[a:b], sr, dopplers, delays)
        # delay-major flattening so argmax breaks ties on (delay, doppler)
        flat = rho.transpose(0, 2, 1).reshape(b - a, D * H)
        k = np.argmax(flat, axis=1)
        peak[a:b] = flat[np.arange(b - a), k]
        d_idx[a:b] = k // H
        h_idx[a:b] = k % H
    return peak, d_idx, h_idx


def clarke_gains(f_d, cos_theta, phase, n):
    T, L, P = cos_theta.shape
    S = n.size
    out = np.empty((T, L, S), dtype=np.complex128)
    step = max(1, _CHUNK_ELEMS // (L * P * S))
    w = 2 * np.pi * f_d * n
    for a in range(0, T, step):
        b = min(T, a + step)
        arg = cos_theta[a:b, :, :, None] * w + phase[a:b, :, :, None]
        out[a:b] = np.exp(1j * arg).sum(axis=2) / np.sqrt(P)
    return out
