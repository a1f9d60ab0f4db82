"""Hot kernels of the Monte-Carlo engine with a compiled core.

Two implementations share one contract: the Cython extension ``_ckernels``
and the numpy module ``_pykernels``.  The default dispatch is chosen per
kernel from measurements (``benchmarks/bench_kernels.py``): the compiled
sum-of-sinusoids fading kernel beats numpy by about 1.3x, while numpy's batched
FFT/BLAS correlator beats the compiled direct sums, so the correlator always
runs on numpy.  Without the extension everything falls back to numpy.
Setting ``CHIRPAF_PURE_PYTHON=1`` before import forces the fallback.

Functions
---------
correlator_bank
    ``rho[t, h, d] = |(1/N) sum_n r[t,n] conj(s[(n - delay_d) mod N])
    exp(-j 2 pi doppler_h n / N)|``.
correlator_peaks
    Maximum of the bank per trial with its (delay, doppler) indices; ties
    resolve to the smallest delay index, then the smallest doppler index.
clarke_gains
    Sum-of-sinusoids fading ``(1/sqrt(P)) sum_p exp(j(2 pi f_D n cos(theta_p)
    + phi_p))`` for every trial and tap.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

import numpy as np

__all__ = [
    "BACKEND",
    "PREFERRED",
    "available_backends",
    "get_backend",
    "correlator_bank",
    "correlator_peaks",
    "clarke_gains",
]


def _load(name: str) -> ModuleType:
    if name == "cython":
        return importlib.import_module("._ckernels", __name__)
    if name == "python":
        return importlib.import_module("._pykernels", __name__)
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    out = []
    for name in ("cython", "python"):
        try:
            _load(name)
        except ImportError:
            continue
        out.append(name)
    return out


if os.environ.get("CHIRPAF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _load("python")
else:
    try:
        _impl = _load("cython")
    except ImportError:
        _impl = _load("python")

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "python"

# Per-kernel preference when the extension is present.
PREFERRED = {
    "correlator_bank": "python",
    "correlator_peaks": "python",
    "clarke_gains": BACKEND,
}


def _as_trials(a, N: int | None = None) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D samples, got shape {a.shape}")
    if N is not None and a.shape[1] != N:
        raise ValueError(f"length mismatch: {a.shape[1]} != {N}")
    return a


def _canon(r, sref, dopplers, delays):
    r = _as_trials(r)
    N = r.shape[1]
    sref = _as_trials(sref, N)
    if sref.shape[0] not in (1, r.shape[0]):
        raise ValueError("sref must be one sequence or one per trial")
    dopplers = np.ascontiguousarray(np.atleast_1d(dopplers), dtype=np.float64)
    delays = np.ascontiguousarray(np.atleast_1d(delays), dtype=np.int64) % N
    if dopplers.size == 0 or delays.size == 0:
        raise ValueError("hypothesis grid must be non-empty")
    return r, sref, dopplers, delays


class _Backend:
    """Canonicalizing front end over one implementation module."""

    def __init__(self, impl: ModuleType, name: str):
        self._impl = impl
        self.name = name

    def correlator_bank(self, r, sref, dopplers, delays) -> np.ndarray:
        return self._impl.correlator_bank(*_canon(r, sref, dopplers, delays))

    def correlator_peaks(self, r, sref, dopplers, delays):
        return self._impl.correlator_peaks(*_canon(r, sref, dopplers, delays))

    def clarke_gains(self, f_d: float, cos_theta, phase, n) -> np.ndarray:
        ct = np.ascontiguousarray(cos_theta, dtype=np.float64)
        ph = np.ascontiguousarray(phase, dtype=np.float64)
        if ct.shape != ph.shape or ct.ndim != 3:
            raise ValueError("cos_theta and phase must share shape (T, L, P)")
        n = np.ascontiguousarray(np.atleast_1d(n), dtype=np.float64)
        return self._impl.clarke_gains(float(f_d), ct, ph, n)


def get_backend(name: str) -> _Backend:
    return _Backend(_load(name), name)


_backends = {name: get_backend(name) for name in set(PREFERRED.values())}
correlator_bank = _backends[PREFERRED["correlator_bank"]].correlator_bank
correlator_peaks = _backends[PREFERRED["correlator_peaks"]].correlator_peaks
clarke_gains = _backends[PREFERRED["clarke_gains"]].clarke_gains
