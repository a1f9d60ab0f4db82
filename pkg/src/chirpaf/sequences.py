"""Transmit sequences: Zadoff-Chu, m-sequences, DFT sequences and random M-PSK.

All generators return 1-D ``complex128`` numpy arrays.  Correlations use
direct O(N^2) sums, which is cheap at the lengths used here (N ~ 127).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_TAPS",
    "LfsrSpec",
    "zadoff_chu",
    "m_sequence",
    "lfsr_bits",
    "dft_sequence",
    "random_mpsk",
    "periodic_autocorrelation",
    "autocorrelation",
    "is_cazac",
    "unitary_dft",
]

# Feedback taps (exponents of a primitive polynomial x^p + ... + 1), per degree.
DEFAULT_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
}


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR description.

    ``taps`` are the exponents of the feedback polynomial; ``degree`` must be
    among them.  The recurrence is ``y[n+p] = XOR_t y[n+p-t]`` over the taps,
    which has the reciprocal polynomial as characteristic polynomial (and a
    polynomial is primitive iff its reciprocal is).
    """

    degree: int
    taps: tuple[int, ...] | None = None
    seed: tuple[int, ...] | None = None
    _taps: tuple[int, ...] = field(init=False, repr=False)
    _seed: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        p = int(self.degree)
        if p < 2:
            raise ValueError(f"LFSR degree must be >= 2, got {p}")
        taps = self.taps
        if taps is None:
            if p not in DEFAULT_TAPS:
                raise ValueError(f"no default primitive polynomial for degree {p}")
            taps = DEFAULT_TAPS[p]
        taps = tuple(sorted({int(t) for t in taps}, reverse=True))
        if taps[0] != p or taps[-1] < 1:
            raise ValueError(f"taps {taps} must lie in 1..{p} and include {p}")
        seed = self.seed if self.seed is not None else (1,) * p
        seed = tuple(int(b) & 1 for b in seed)
        if len(seed) != p:
            raise ValueError(f"seed must have {p} bits, got {len(seed)}")
        if not any(seed):
            raise ValueError("LFSR seed must not be all zeros")
        object.__setattr__(self, "_taps", taps)
        object.__setattr__(self, "_seed", seed)

    @property
    def length(self) -> int:
        return 2**self.degree - 1


def zadoff_chu(N: int, u: int) -> np.ndarray:
    """Zadoff-Chu root sequence of length ``N`` and root ``u``.

    Odd ``N`` uses ``exp(j*pi*u*m*(m+1)/N)``, even ``N`` uses
    ``exp(j*pi*u*m^2/N)``.  The root is taken modulo ``N``, so negative roots
    such as ``u = 2*alpha = -4`` are accepted.  The phase is reduced modulo
    ``2N`` in integer arithmetic before exponentiation.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    u = int(u) % N
    if u == 0:
        raise ValueError("Zadoff-Chu root must not be 0 mod N")
    m = np.arange(N, dtype=np.int64)
    if N % 2:
        k = (u * m * (m + 1)) % (2 * N)
    else:
        k = (u * m * m) % (2 * N)
    return np.exp(1j * np.pi * k / N)


def lfsr_bits(spec: LfsrSpec, n: int | None = None) -> np.ndarray:
    """Run the LFSR and return ``n`` output bits (default: one period)."""
    p = spec.degree
    n = spec.length if n is None else int(n)
    out = np.empty(max(n, p), dtype=np.uint8)
    out[:p] = spec._seed
    taps = spec._taps
    for i in range(p, n):
        b = 0
        for t in taps:
            b ^= out[i - t]
        out[i] = b
    return out[:n]


def _period(bits: np.ndarray, p: int) -> int:
    """Smallest shift returning the LFSR to its initial state."""
    state = bytes(bits[:p])
    for k in range(1, len(bits) - p + 1):
        if bytes(bits[k:k + p]) == state:
            return k
    return len(bits)


def m_sequence(spec: LfsrSpec | int = 7) -> np.ndarray:
    """Maximum-length +-1 sequence, bits mapped with 0 -> -1, 1 -> +1.

    Raises ``ValueError`` when the taps are not primitive, detected by
    measuring the state period over one candidate period plus ``p`` bits.
    """
    if not isinstance(spec, LfsrSpec):
        spec = LfsrSpec(int(spec))
    N = spec.length
    bits = lfsr_bits(spec, N + spec.degree)
    period = _period(bits, spec.degree)
    if period != N:
        raise ValueError(
            f"taps {spec._taps} are not primitive: period {period} != {N}"
        )
    return np.where(bits[:N] == 1, 1.0, -1.0).astype(np.complex128)


def dft_sequence(N: int, k: int) -> np.ndarray:
    """Complex exponential ``exp(j*2*pi*k*m/N)``."""
    m = np.arange(int(N), dtype=np.int64)
    return np.exp(2j * np.pi * ((int(k) * m) % N) / N)


def random_mpsk(N: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform M-PSK symbols ``exp(j*2*pi*p/M)``."""
    if M < 2:
        raise ValueError("PSK order must be >= 2")
    p = rng.integers(0, M, size=int(N))
    return np.exp(2j * np.pi * p / M)


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Periodic autocorrelation at every lag, ``(1/N) sum x[m] x*[m+tau]``."""
    x = np.asarray(x, dtype=np.complex128)
    N = x.size
    idx = (np.arange(N)[None, :] + np.arange(N)[:, None]) % N
    return (x[None, :] * np.conj(x[idx])).sum(axis=1) / N


def periodic_autocorrelation(x: np.ndarray, tau: int) -> complex:
    x = np.asarray(x, dtype=np.complex128)
    N = x.size
    return complex(np.sum(x * np.conj(np.roll(x, -(int(tau) % N)))) / N)


def is_cazac(x: np.ndarray, tol: float = 1e-9) -> bool:
    """True if ``x`` has unit modulus and zero off-peak autocorrelation."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=np.complex128)
    ca = np.max(np.abs(np.abs(x) - 1.0))
    ac = autocorrelation(x)
    zac = np.max(np.abs(ac[1:])) if x.size > 1 else 0.0
    return bool(ca < tol and zac < tol)


def unitary_dft(x: np.ndarray) -> np.ndarray:
    return np.fft.fft(np.asarray(x, dtype=np.complex128), norm="ortho")
