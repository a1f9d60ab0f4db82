"""Periodic ambiguity functions: definitions, closed forms and shape checks.

The periodic AF of a length-N signal is

    chi(D, t) = (1/N) sum_n s[n] conj(s[n + t mod N]) exp(j 2 pi D n / N)

with D the Doppler offset in subcarrier units and t the cyclic delay in
samples.  For CCDT several algebraically independent evaluators are
provided (closed form via a linear congruence, convolution of the basis and
sequence AFs, an upsampled double sum and a non-integer-Doppler double sum)
so that each can be cross-checked against the brute-force definition.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .sequences import dft_sequence, m_sequence, random_mpsk, zadoff_chu
from .waveform import (
    WaveformKind,
    WaveformParams,
    ccdt_modulate_freq,
    dfts_ofdm_modulate,
    ofdm_modulate,
    upsample,
)

__all__ = [
    "AmbiguitySurface",
    "ClosedFormContext",
    "PropertyResult",
    "RandomAfStats",
    "af_definition",
    "af_definition_upsampled",
    "af_surface",
    "closed_form_context",
    "af_ccdt_closed_form",
    "af_ccdt_closed_form_surface",
    "chi_g",
    "af_convolution",
    "af_upsampled",
    "af_nonint",
    "af_ofdm",
    "af_dfts_ofdm",
    "dirichlet",
    "verify_shape_properties",
    "mseq_af_table",
    "expected_af_random",
    "surface_for",
]

# |p mod N| below this is treated as the removable singularity of the kernel.
SINGULAR_TOL = 1e-9


@dataclass
class AmbiguitySurface:
    """Dense AF samples on a (Doppler, delay) grid.

    ``values[i, k]`` holds ``chi(deltas[i], taus[k])``.
    """

    values: np.ndarray
    deltas: np.ndarray
    taus: np.ndarray
    N: int

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def at(self, delta, tau) -> complex:
        i = int(np.flatnonzero(np.isclose(self.deltas, delta))[0])
        k = int(np.flatnonzero(self.taus == tau)[0])
        return complex(self.values[i, k])

    def rows(self) -> Iterable[tuple]:
        """``(delta, tau, re, im, abs)`` row-major in delta then tau."""
        for i, d in enumerate(self.deltas):
            for k, t in enumerate(self.taus):
                v = self.values[i, k]
                yield d, int(t), v.real, v.imag, abs(v)

    def to_csv(self, fh: IO[str], comment: str | None = None) -> None:
        if comment is not None:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta", "tau", "re", "im", "abs"])
        integer = np.all(self.deltas == np.round(self.deltas))
        for d, t, re, im, ab in self.rows():
            dd = int(round(d)) if integer else repr(float(d))
            w.writerow([dd, t, repr(float(re)), repr(float(im)), repr(float(ab))])


def _as_signal(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 1 or s.size == 0:
        raise ValueError(f"expected a non-empty 1-D signal, got shape {s.shape}")
    return s


def af_definition(s, delta, tau) -> complex:
    """AF by its defining sum.  ``delta`` may be real; ``tau`` is an integer."""
    s = _as_signal(s)
    N = s.size
    n = np.arange(N)
    shifted = np.conj(s[(n + int(tau)) % N])
    return complex(np.mean(s * shifted * np.exp(2j * np.pi * float(delta) * n / N)))


def af_definition_upsampled(s, delta, tau) -> complex:
    """AF of a length-Q signal with ``mod Q`` shifts and ``exp(j2pi D n/Q)``.

    For a zero-padded upsampled symbol the value at (0, 0) is ``N/Q``.
    """
    return af_definition(s, delta, tau)


def af_surface(s, deltas=None, taus=None) -> AmbiguitySurface:
    """Full AF surface.

    On the integer grid (``deltas`` None) each delay column is the inverse DFT
    of the lag product ``s[n] conj(s[n + tau])``.  Real-valued ``deltas`` use
    an explicit exponential matrix instead.
    """
    s = _as_signal(s)
    N = s.size
    taus = np.arange(N) if taus is None else np.asarray(taus, dtype=np.int64)
    n = np.arange(N)
    lag = s[:, None] * np.conj(s[(n[:, None] + taus[None, :]) % N])
    if deltas is None:
        deltas = np.arange(N)
        # ifft carries the 1/N and the exp(+j...) kernel
        values = np.fft.ifft(lag, axis=0)
    else:
        deltas = np.asarray(deltas, dtype=float)
        if deltas.size == 0:
            raise ValueError("empty Doppler grid")
        E = np.exp(2j * np.pi * np.outer(deltas, n) / N)
        values = E @ lag / N
    if taus.size == 0:
        raise ValueError("empty delay grid")
    return AmbiguitySurface(values, np.asarray(deltas), taus, N)


@dataclass(frozen=True)
class ClosedFormContext:
    """Solution of ``2a k0 = -D - 2a t (mod N)`` and derived quantities.

    ``epsilon`` is the effective sequence delay (equal to ``k0``), ``r0`` the
    integer ``(2a k0 + D + 2a t)/N`` and ``C`` the complex scale with
    ``|C| = 1/N``.
    """

    k0: int
    r0: int
    epsilon: int
    C: complex


def closed_form_context(params: WaveformParams, delta: int, tau: int) -> ClosedFormContext:
    N, ta, tb = params.N, params.two_alpha, params.two_beta
    delta, tau = int(delta), int(tau)
    k0 = ((-delta - ta * tau) * params.inv_two_alpha) % N
    num = ta * k0 + delta + ta * tau
    assert num % N == 0
    # phase exponent pi*M/N with M an exact integer mod 2N
    M = (ta * (tau * tau - k0 * k0) + tb * (tau + k0)) % (2 * N)
    C = complex(np.exp(1j * np.pi * M / N) / N)
    return ClosedFormContext(k0=k0, r0=num // N, epsilon=k0, C=C)


def af_ccdt_closed_form(params: WaveformParams, x, delta: int, tau: int) -> complex:
    """CCDT AF as a Doppler-weighted correlation of ``x`` at lag ``epsilon``."""
    x = _as_signal(x)
    N = params.N
    if x.size != N:
        raise ValueError(f"length mismatch: {x.size} != {N}")
    ctx = closed_form_context(params, delta, tau)
    m = np.arange(N)
    acc = np.sum(x[(m + ctx.epsilon) % N] * np.conj(x) * np.exp(2j * np.pi * int(delta) * m / N))
    return complex(ctx.C * acc)


def af_ccdt_closed_form_surface(params: WaveformParams, x) -> AmbiguitySurface:
    """Closed form on the full integer grid.

    ``A[D, k] = sum_m x[m + k] conj(x[m]) exp(j2pi D m/N)`` is tabulated once
    and each (D, t) picks column ``k0(D, t)``.
    """
    x = _as_signal(x)
    N, ta, tb = params.N, params.two_alpha, params.two_beta
    m = np.arange(N)
    lag = x[(m[:, None] + m[None, :]) % N] * np.conj(x)[:, None]
    A = np.fft.ifft(lag, axis=0) * N
    D = m[:, None]
    T = m[None, :]
    k0 = ((-D - ta * T) * params.inv_two_alpha) % N
    M = (ta * (T * T - k0 * k0) + tb * (T + k0)) % (2 * N)
    values = np.exp(1j * np.pi * M / N) / N * A[D, k0]
    return AmbiguitySurface(values, m.copy(), m.copy(), N)


def chi_g(params: WaveformParams, delta: int, v) -> np.ndarray:
    """AF of the chirp basis: ``(1/N) exp(j2pi(a v^2 + b v)/N) d[2a v + D mod N]``."""
    N, ta, tb = params.N, params.two_alpha, params.two_beta
    v = np.asarray(v, dtype=np.int64)
    ph = (ta * v * v + tb * v) % (2 * N)
    hit = (ta * v + int(delta)) % N == 0
    return np.where(hit, np.exp(1j * np.pi * ph / N) / N, 0.0)


def _af_x_row(x, delta: int, taus) -> np.ndarray:
    # chi_x(delta, taus) by definition, vectorized over taus
    N = x.size
    n = np.arange(N)
    taus = np.asarray(taus, dtype=np.int64)
    lag = x[None, :] * np.conj(x[(n[None, :] + taus[:, None]) % N])
    return lag @ np.exp(2j * np.pi * int(delta) * n / N) / N


def af_convolution(params: WaveformParams, x, delta: int, tau: int) -> complex:
    """``N sum_v chi_g(D, v) chi_x(D, t - v)``; only the support of ``chi_g`` is summed."""
    x = _as_signal(x)
    N = params.N
    v = np.arange(N)
    cg = chi_g(params, delta, v)
    nz = np.flatnonzero(cg)
    if nz.size == 0:
        return 0j
    cx = _af_x_row(x, delta, (int(tau) - v[nz]) % N)
    return complex(N * np.sum(cg[nz] * cx))


def dirichlet(p, N: int, lo: int = 0, L: int | None = None) -> np.ndarray:
    """``sum_{n=lo}^{lo+L-1} exp(j2pi p n/N)`` in closed form.

    Defaults to the full kernel ``sin(pi p)/sin(pi p/N) exp(j pi (N-1) p/N)``.
    Near ``p = kN`` the ratio is replaced by its limit ``L (-1)^{(L-1)k}``.
    """
    L = N if L is None else int(L)
    p = np.asarray(p, dtype=float)
    r = p / N
    k = np.round(r)
    sing = np.abs(r - k) * N < SINGULAR_TOL
    den = np.sin(np.pi * np.where(sing, 0.5, r))
    ratio = np.where(sing, L * np.where((L - 1) * k % 2 == 0, 1.0, -1.0),
                     np.sin(np.pi * L * r) / den)
    return ratio * np.exp(1j * np.pi * (2 * lo + L - 1) * r)


def _upsampled_bins(N: int, Q: int, delta: int) -> tuple[int, int]:
    """First bin and count of spectral bins that overlap after a Doppler shift."""
    if Q == N:
        return 0, N
    d = (-int(delta)) % Q
    if d > Q // 2:
        d -= Q
    if abs(d) >= N:
        return 0, 0
    lo = max(0, -d)
    hi = min(N - 1, N - 1 - d)
    return lo, hi - lo + 1


def af_upsampled(params: WaveformParams, x, Q: int, delta: int, tau: int) -> complex:
    """AF of the CCDT symbol upsampled to ``Q = qN`` samples.

    ``(N/Q) sum_v sum_w chi_g(D, v) chi_x(D, w) K(v + w - N t/Q)`` where ``K``
    is the partial Dirichlet kernel over the spectral bins that still overlap
    after the Doppler shift.  Both AFs are taken on the length-N grid.
    """
    x = _as_signal(x)
    N = params.N
    Q = int(Q)
    if Q < N or Q % N:
        raise ValueError(f"Q={Q} must be a positive multiple of N={N}")
    lo, L = _upsampled_bins(N, Q, delta)
    if L == 0:
        return 0j
    v = np.arange(N)
    cg = chi_g(params, delta, v)
    nz = np.flatnonzero(cg)
    cx = _af_x_row(x, delta, v)
    y = v[nz][:, None] + v[None, :] - N * int(tau) / Q
    K = dirichlet(y, N, lo, L)
    return complex(N / Q * np.sum(cg[nz][:, None] * cx[None, :] * K))


def af_nonint(params: WaveformParams, x, delta: float, tau: int) -> complex:
    """CCDT AF for real-valued Doppler ``delta``.

    ``(1/N^2) sum_m sum_k x[k] conj(x[m]) exp(j2pi/N (a((m-t)^2 - k^2)
    - b(m - k - t))) K(D - 2a(m - k) + 2a t)`` with ``K`` the Dirichlet
    kernel; the kernel depends on ``m - k`` only and is tabulated once.
    """
    x = _as_signal(x)
    N, ta, tb = params.N, params.two_alpha, params.two_beta
    tau = int(tau)
    m = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    M = (ta * ((m - tau) ** 2 - k * k) - tb * (m - k - tau)) % (2 * N)
    d = np.arange(-(N - 1), N)
    Kd = dirichlet(float(delta) - ta * d + ta * tau, N)
    K = Kd[(m - k) + (N - 1)]
    terms = x[None, :] * np.conj(x)[:, None] * np.exp(1j * np.pi * M / N) * K
    return complex(terms.sum() / N**2)


def af_ofdm(x, delta: int, tau: int) -> complex:
    """OFDM AF: ``(1/N) sum_m x[m - D] conj(x[m]) exp(-j2pi t m/N)``.

    This is the exact complex value of the definition applied to the OFDM
    symbol, not only its modulus.
    """
    x = _as_signal(x)
    N = x.size
    m = np.arange(N)
    return complex(np.mean(x[(m - int(delta)) % N] * np.conj(x) * np.exp(-2j * np.pi * int(tau) * m / N)))


def af_dfts_ofdm(x, delta: int, tau: int) -> complex:
    """DFT-s-OFDM AF: ``exp(-j2pi D t/N) (1/N) sum_m x[m - t] conj(x[m]) exp(j2pi D m/N)``.

    The leading phase makes the value exact; its modulus is the
    delay-decoupled correlation of ``x``.
    """
    x = _as_signal(x)
    N = x.size
    delta, tau = int(delta), int(tau)
    m = np.arange(N)
    core = np.mean(x[(m - tau) % N] * np.conj(x) * np.exp(2j * np.pi * delta * m / N))
    return complex(np.exp(-2j * np.pi * ((delta * tau) % N) / N) * core)


# ---------------------------------------------------------------- properties


@dataclass
class PropertyResult:
    """Outcome of one machine-checked property."""

    number: int
    name: str
    max_dev: float
    tol: float
    skipped: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.skipped or self.max_dev < self.tol


def _mseq_degree(N: int) -> int | None:
    p = int(round(math.log2(N + 1)))
    return p if 2**p - 1 == N and p >= 2 else None


def _delta_grid(N: int):
    D, T = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return D, T


def _ccdt_surface(params, x) -> np.ndarray:
    return af_surface(ccdt_modulate_freq(params, x)).values


def verify_shape_properties(params: WaveformParams, tol: float = 1e-10,
                            seed: int = 0, zc_root: int = 3,
                            dft_index: int = 5) -> list[PropertyResult]:
    """Check the AF shape properties on the full integer grid.

    Every surface is the brute-force definition evaluated on the modulated
    symbol; the closed forms are compared against it.  Returns results for
    properties 1-6 and 9-14 (7 and 8 concern PAPR, see :mod:`chirpaf.papr`).
    """
    N, ta = params.N, params.two_alpha
    D, T = _delta_grid(N)
    rng = np.random.default_rng(seed)
    qpsk = random_mpsk(N, 4, rng)
    zc = zadoff_chu(N, zc_root) if N > 1 else np.ones(1, complex)
    out = []

    # 1: closed form against the definition for several sequences
    dev = 0.0
    for x in (qpsk, zc, dft_sequence(N, dft_index % N)):
        ref = _ccdt_surface(params, x)
        dev = max(dev, np.max(np.abs(af_ccdt_closed_form_surface(params, x).values - ref)))
    out.append(PropertyResult(1, "CCDT closed form equals definition", dev, tol))

    # 2: zeros on the line D + 2a t = 0 for unit-modulus x
    A = np.abs(_ccdt_surface(params, qpsk))
    line = (D + ta * T) % N == 0
    dev = np.max(np.abs(A[line] - (D[line] == 0)))
    out.append(PropertyResult(2, "zeros where D + 2a t = 0 (mod N)", dev, tol))

    # 3: sum over delays of |chi|^2 is 1 for a CAZAC sequence
    A = np.abs(_ccdt_surface(params, zc))
    dev = np.max(np.abs((A**2).sum(axis=1) - 1.0))
    out.append(PropertyResult(3, "CAZAC delay energy sums to one", dev, tol))

    # 4: DFT sequences give a ridge along the delay axis
    dev = 0.0
    for k in sorted({0, 1, dft_index % N, N - 1}):
        A = np.abs(_ccdt_surface(params, dft_sequence(N, k)))
        dev = max(dev, np.max(np.abs(A - (D == 0))))
    out.append(PropertyResult(4, "CCDT + DFT sequence: |chi| = d[D]", dev, tol))

    # 5: ZC with u = 2a gives a ridge along the Doppler axis
    u = ta % N
    if u == 0:
        out.append(PropertyResult(5, "CCDT + ZC(u=2a): |chi| = d[t]", 0.0, tol, True, "2a = 0 mod N"))
    else:
        A = np.abs(_ccdt_surface(params, zadoff_chu(N, u)))
        out.append(PropertyResult(5, "CCDT + ZC(u=2a): |chi| = d[t]", np.max(np.abs(A - (T == 0))), tol))

    # 6: m-sequence value table
    p = _mseq_degree(N)
    if p is None:
        out.append(PropertyResult(6, "CCDT + m-sequence value table", 0.0, tol, True, "N != 2^p - 1"))
    else:
        A = np.abs(_ccdt_surface(params, m_sequence(p)))
        out.append(PropertyResult(6, "CCDT + m-sequence value table",
                                  np.max(np.abs(A - mseq_af_table(N, ta))), tol))

    ofdm = lambda x: np.abs(af_surface(ofdm_modulate(x)).values)  # noqa: E731
    dfts = lambda x: np.abs(af_surface(dfts_ofdm_modulate(x)).values)  # noqa: E731
    out.append(PropertyResult(9, "OFDM zero-Doppler cut: |chi(0,t)| = d[t]",
                              np.max(np.abs(ofdm(qpsk)[0] - (np.arange(N) == 0))), tol))
    out.append(PropertyResult(10, "DFT-s-OFDM zero-delay cut: |chi(D,0)| = d[D]",
                              np.max(np.abs(dfts(qpsk)[:, 0] - (np.arange(N) == 0))), tol))
    dev11 = dev12 = 0.0
    for k in sorted({0, 1, dft_index % N, N - 1}):
        x = dft_sequence(N, k)
        dev11 = max(dev11, np.max(np.abs(ofdm(x) - (T == 0))))
        dev12 = max(dev12, np.max(np.abs(dfts(x) - (D == 0))))
    out.append(PropertyResult(11, "OFDM + DFT sequence: |chi| = d[t]", dev11, tol))
    out.append(PropertyResult(12, "DFT-s-OFDM + DFT sequence: |chi| = d[D]", dev12, tol))
    if N % 2 == 0:
        note = "odd N only"
        out.append(PropertyResult(13, "OFDM + ZC: |chi| = d[uD + t]", 0.0, tol, True, note))
        out.append(PropertyResult(14, "DFT-s-OFDM + ZC: |chi| = d[D - t u]", 0.0, tol, True, note))
    else:
        u = zc_root % N
        out.append(PropertyResult(13, "OFDM + ZC: |chi| = d[uD + t]",
                                  np.max(np.abs(ofdm(zc) - ((u * D + T) % N == 0))), tol))
        out.append(PropertyResult(14, "DFT-s-OFDM + ZC: |chi| = d[D - t u]",
                                  np.max(np.abs(dfts(zc) - ((D - T * u) % N == 0))), tol))
    return out


def mseq_af_table(N: int, two_alpha: int) -> np.ndarray:
    """Predicted ``|chi|`` of CCDT with an m-sequence on the integer grid."""
    D, T = _delta_grid(N)
    out = np.full((N, N), math.sqrt(N + 1) / N)
    out[(D + two_alpha * T) % N == 0] = 0.0
    out[0, :] = 1.0 / N
    out[0, 0] = 1.0
    return out


@dataclass
class RandomAfStats:
    """Sample mean of the CCDT AF over random transmit sequences."""

    deltas: np.ndarray
    taus: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trials: int

    @property
    def abs_mean(self) -> np.ndarray:
        return np.abs(self.mean)


def expected_af_random(params: WaveformParams, points: Sequence[tuple[int, int]],
                       trials: int, rng: np.random.Generator,
                       M: int | None = 4, batch: int = 2048) -> RandomAfStats:
    """Monte-Carlo mean of ``chi(D, t)`` at ``points`` over random sequences.

    ``M`` selects i.i.d. M-PSK symbols; ``M=None`` draws phases uniformly on
    the circle.  Each trial evaluates the closed form for a fresh sequence.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    N = params.N
    pts = [(int(d), int(t)) for d, t in points]
    ctx = [closed_form_context(params, d, t) for d, t in pts]
    m = np.arange(N)
    s1 = np.zeros(len(pts), dtype=complex)
    s2 = np.zeros(len(pts))
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        if M is None:
            X = np.exp(2j * np.pi * rng.random((b, N)))
        else:
            X = np.exp(2j * np.pi * rng.integers(0, M, size=(b, N)) / M)
        for i, ((d, _), c) in enumerate(zip(pts, ctx)):
            w = np.exp(2j * np.pi * d * m / N)
            v = c.C * ((X[:, (m + c.epsilon) % N] * np.conj(X)) @ w)
            s1[i] += v.sum()
            s2[i] += np.sum(np.abs(v) ** 2)
        done += b
    mean = s1 / trials
    var = np.maximum(s2 / trials - np.abs(mean) ** 2, 0.0)
    stderr = np.sqrt(var / trials)
    return RandomAfStats(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]),
                         mean, stderr, trials)


def surface_for(kind, params: WaveformParams, x, deltas=None, Q: int | None = None) -> AmbiguitySurface:
    """AF surface of a waveform symbol, optionally upsampled to ``Q`` samples.

    ``deltas`` may be real-valued; on the critically sampled CCDT symbol the
    definition sum then coincides with :func:`af_nonint`.
    """
    kind = WaveformKind.parse(kind)
    Q = params.N if Q is None else int(Q)
    s = upsample(params, x, Q, kind)
    return af_surface(s, deltas)
