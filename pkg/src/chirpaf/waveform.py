"""CCDT, OFDM and DFT-s-OFDM symbol synthesis.

DFT convention, used everywhere in the package: the forward transform has
kernel ``exp(-j*2*pi*k*n/N)``; "unitary" means the ``1/sqrt(N)`` scaling on
both directions (``numpy.fft`` with ``norm="ortho"``).  The chirp filter
``G = DFT(g)`` is the *unnormalized* transform, so that
``s = IDFT_unitary(G * X)`` with ``X = DFT_unitary(x)``.

Chirp parameters are stored doubled (``two_alpha = 2*alpha``,
``two_beta = 2*beta``) so that the validity conditions are exact integer
predicates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "WaveformKind",
    "WaveformParams",
    "Waveform",
    "chirp_basis",
    "chirp_basis_at",
    "chirp_filter",
    "ccdt_modulate_time",
    "ccdt_modulate_freq",
    "ofdm_modulate",
    "dfts_ofdm_modulate",
    "add_cp",
    "remove_cp",
    "upsample",
    "upsample_spectrum",
]


class WaveformKind(str, Enum):
    CCDT = "ccdt"
    OFDM = "ofdm"
    DFTS_OFDM = "dfts-ofdm"

    @classmethod
    def parse(cls, value: "str | WaveformKind") -> "WaveformKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"dft-s-ofdm": "dfts-ofdm", "dftsofdm": "dfts-ofdm"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown waveform kind {value!r}") from None


@dataclass(frozen=True)
class WaveformParams:
    """Symbol length and chirp parameters.

    Parameters
    ----------
    N : int
        Symbol length in samples.
    two_alpha, two_beta : int
        Doubled chirp rate and doubled linear phase coefficient.
    gamma : float
        Constant phase term.
    n_cp : int
        Cyclic prefix length (samples), ``0 <= n_cp <= N``.
    Q : int, optional
        Upsampled symbol length, a multiple of ``N``.  Defaults to ``N``.
    """

    N: int
    two_alpha: int = 4
    two_beta: int = 2
    gamma: float = 0.0
    n_cp: int = 0
    Q: int | None = None

    def __post_init__(self):
        N = int(self.N)
        if N < 1:
            raise ValueError(f"N must be positive, got {N}")
        if int(self.two_alpha) != self.two_alpha or int(self.two_beta) != self.two_beta:
            raise ValueError("two_alpha and two_beta must be integers")
        ta, tb = int(self.two_alpha), int(self.two_beta)
        if math.gcd(ta, N) != 1:
            raise ValueError(f"gcd(2*alpha={ta}, N={N}) != 1")
        if (ta * N + tb) % 2:
            raise ValueError(f"alpha*N + beta must be an integer (2a={ta}, 2b={tb}, N={N})")
        if not 0 <= int(self.n_cp) <= N:
            raise ValueError(f"n_cp must be in 0..{N}, got {self.n_cp}")
        Q = N if self.Q is None else int(self.Q)
        if Q < N or Q % N:
            raise ValueError(f"Q={Q} must be a positive multiple of N={N}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "two_alpha", ta)
        object.__setattr__(self, "two_beta", tb)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "n_cp", int(self.n_cp))
        object.__setattr__(self, "Q", Q)

    @property
    def alpha(self) -> float:
        return self.two_alpha / 2

    @property
    def beta(self) -> float:
        return self.two_beta / 2

    @property
    def inv_two_alpha(self) -> int:
        """Inverse of ``2*alpha`` modulo ``N``."""
        return pow(self.two_alpha, -1, self.N) if self.N > 1 else 0


def chirp_basis_at(params: WaveformParams, k) -> np.ndarray:
    """Evaluate the chirp basis at (possibly non-integer) arguments ``k``."""
    k = np.asarray(k, dtype=float)
    N = params.N
    ph = params.alpha * k * k + params.beta * k + params.gamma
    return np.exp(-2j * np.pi * ph / N) / np.sqrt(N)


def chirp_basis(params: WaveformParams) -> np.ndarray:
    """Basis ``g[k] = exp(-j*2*pi*(alpha k^2 + beta k + gamma)/N)/sqrt(N)``.

    The quadratic part is reduced modulo ``2N`` in integers so the phase stays
    accurate for any ``k``.
    """
    N = params.N
    k = np.arange(N, dtype=np.int64)
    num = (params.two_alpha * k * k + params.two_beta * k) % (2 * N)
    ph = np.pi * num / N + 2 * np.pi * params.gamma / N
    return np.exp(-1j * ph) / np.sqrt(N)


def chirp_filter(params: WaveformParams) -> np.ndarray:
    """Frequency-domain chirp filter ``G[m] = sum_k g[k] exp(-j2pi km/N)``."""
    return np.fft.fft(chirp_basis(params))


def _check_len(x, N: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size != N:
        raise ValueError(f"expected a length-{N} sequence, got shape {x.shape}")
    return x


def ccdt_modulate_time(params: WaveformParams, x) -> np.ndarray:
    """Cyclic convolution ``s[n] = sum_m x[m] g[n-m mod N]`` (direct sum)."""
    N = params.N
    x = _check_len(x, N)
    g = chirp_basis(params)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return g[idx] @ x


def ccdt_modulate_freq(params: WaveformParams, x) -> np.ndarray:
    """Same symbol via ``IDFT_unitary(G * DFT_unitary(x))``."""
    x = _check_len(x, params.N)
    X = np.fft.fft(x, norm="ortho")
    return np.fft.ifft(chirp_filter(params) * X, norm="ortho")


def ofdm_modulate(x) -> np.ndarray:
    """``s[n] = (1/sqrt(N)) sum_k x[k] exp(j*2*pi*k*n/N)``."""
    x = np.asarray(x, dtype=np.complex128)
    return np.fft.ifft(x, norm="ortho")


def dfts_ofdm_modulate(x) -> np.ndarray:
    """The DFT precoder cancels the IDFT, so the symbol is ``x`` itself."""
    return np.array(x, dtype=np.complex128, copy=True)


def add_cp(s, n_cp: int) -> np.ndarray:
    s = np.asarray(s)
    if not 0 <= n_cp <= s.shape[-1]:
        raise ValueError(f"n_cp must be in 0..{s.shape[-1]}, got {n_cp}")
    if n_cp == 0:
        return s.copy()
    return np.concatenate([s[..., -n_cp:], s], axis=-1)


def remove_cp(r, n_cp: int) -> np.ndarray:
    r = np.asarray(r)
    if not 0 <= n_cp <= r.shape[-1] // 2:
        raise ValueError(f"n_cp={n_cp} out of range for length {r.shape[-1]}")
    return r[..., n_cp:].copy()


def upsample_spectrum(spectrum, Q: int) -> np.ndarray:
    """Length-``Q`` signal ``(1/sqrt(Q)) sum_{m<N} S[m] exp(j*2*pi*m*n/Q)``.

    The length-N spectrum occupies bins ``0..N-1`` of the length-Q transform
    (zero padding at the top), exactly as in the upsampled CCDT definition.
    """
    S = np.asarray(spectrum, dtype=np.complex128)
    N = S.shape[-1]
    if Q < N or Q % N:
        raise ValueError(f"Q={Q} must be a positive multiple of N={N}")
    pad = np.zeros(S.shape[:-1] + (Q,), dtype=np.complex128)
    pad[..., :N] = S
    return np.fft.ifft(pad, norm="ortho")


def upsample(params: WaveformParams, x, Q: int | None = None,
             kind: "WaveformKind | str" = WaveformKind.CCDT) -> np.ndarray:
    """Upsampled symbol of length ``Q`` for any waveform kind.

    CCDT uses the spectrum ``G*X``; OFDM uses ``x`` as its spectrum and
    DFT-s-OFDM uses ``DFT_unitary(x)``.  With ``Q = N`` the result equals the
    critically sampled symbol.
    """
    Q = params.Q if Q is None else int(Q)
    x = _check_len(x, params.N)
    kind = WaveformKind.parse(kind)
    if kind is WaveformKind.CCDT:
        spec = chirp_filter(params) * np.fft.fft(x, norm="ortho")
    elif kind is WaveformKind.OFDM:
        spec = x
    else:
        spec = np.fft.fft(x, norm="ortho")
    return upsample_spectrum(spec, Q)


@dataclass(frozen=True)
class Waveform:
    """A waveform kind bound to its parameters."""

    kind: WaveformKind
    params: WaveformParams

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveformKind.parse(self.kind))
        if not isinstance(self.params, WaveformParams):
            raise TypeError("params must be a WaveformParams")

    @property
    def N(self) -> int:
        return self.params.N

    def modulate(self, x) -> np.ndarray:
        if self.kind is WaveformKind.CCDT:
            return ccdt_modulate_freq(self.params, x)
        x = _check_len(x, self.params.N)
        if self.kind is WaveformKind.OFDM:
            return ofdm_modulate(x)
        return dfts_ofdm_modulate(x)

    def modulate_batch(self, X) -> np.ndarray:
        """Modulate each row of ``X`` (shape ``(T, N)``)."""
        X = np.asarray(X, dtype=np.complex128)
        if self.kind is WaveformKind.CCDT:
            G = chirp_filter(self.params)
            return np.fft.ifft(G * np.fft.fft(X, axis=-1, norm="ortho"), axis=-1, norm="ortho")
        if self.kind is WaveformKind.OFDM:
            return np.fft.ifft(X, axis=-1, norm="ortho")
        return X.copy()

    def upsample(self, x, Q: int | None = None) -> np.ndarray:
        return upsample(self.params, x, Q, self.kind)

    def with_cp(self, x) -> np.ndarray:
        return add_cp(self.modulate(x), self.params.n_cp)
