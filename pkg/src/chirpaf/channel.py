"""Discrete-time channel models: tapped delay line with Clarke fading, AWGN,
carrier frequency offset and a multi-target radar channel.

All channels act on CP-prefixed symbols and return the CP-free received
block of ``N`` samples.  Batched variants take a leading trial axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "SPEED_OF_LIGHT",
    "TappedDelayProfile",
    "FadingSpec",
    "LinkBudget",
    "RadarTargetSet",
    "vehicular_a",
    "velocity_to_doppler",
    "clarke_fading",
    "apply_multipath",
    "apply_freq_offset",
    "awgn",
    "add_awgn",
    "noise_std",
    "radar_channel",
    "target_speed",
    "target_range",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class TappedDelayProfile:
    """Power delay profile with delays in microseconds and in samples."""

    delays_us: tuple[float, ...]
    powers: tuple[float, ...]
    sample_delays: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.delays_us) == len(self.powers) == len(self.sample_delays)):
            raise ValueError("delays, powers and sample delays must have equal length")
        if len(self.powers) == 0:
            raise ValueError("profile needs at least one tap")
        if any(p <= 0 for p in self.powers):
            raise ValueError("tap powers must be positive")
        if any(b < a for a, b in zip(self.sample_delays, self.sample_delays[1:])):
            raise ValueError("sample delays must be non-decreasing")
        if self.sample_delays[0] < 0:
            raise ValueError("sample delays must be non-negative")

    @property
    def num_taps(self) -> int:
        return len(self.powers)

    @property
    def max_delay(self) -> int:
        return max(self.sample_delays)

    @classmethod
    def from_us(cls, delays_us, powers, f_s: float) -> "TappedDelayProfile":
        """Quantize delays to the nearest sample: ``round(t_l * f_s)``."""
        if f_s <= 0:
            raise ValueError("sampling rate must be positive")
        d = tuple(float(t) for t in delays_us)
        sd = tuple(int(round(t * 1e-6 * f_s)) for t in d)
        return cls(d, tuple(float(p) for p in powers), sd)

    @classmethod
    def static(cls, sample_delays, powers) -> "TappedDelayProfile":
        return cls(tuple(0.0 for _ in sample_delays), tuple(float(p) for p in powers),
                   tuple(int(d) for d in sample_delays))


_VEH_A_US = (0.0, 0.52, 1.05, 1.57, 2.62)
_VEH_A_POW = (0.4850, 0.4463, 0.0485, 0.0153, 0.0049)


def vehicular_a(f_s: float) -> TappedDelayProfile:
    """Five-tap Vehicular A profile; at 127 x 15 kHz the delays are 0,1,2,3,5."""
    return TappedDelayProfile.from_us(_VEH_A_US, _VEH_A_POW, f_s)


def velocity_to_doppler(v_kmh: float, f_c: float, f_s: float) -> float:
    """Maximum Doppler ``(v/c) f_c`` in cycles per sample (divided by ``f_s``)."""
    return (float(v_kmh) / 3.6) / SPEED_OF_LIGHT * f_c / f_s


@dataclass(frozen=True)
class FadingSpec:
    """Clarke sum-of-sinusoids fading with ``num_paths`` rays per tap.

    ``doppler`` is the maximum Doppler frequency in cycles per sample.
    """

    num_paths: int = 5
    doppler: float = 0.0

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")
        if self.doppler < 0:
            raise ValueError("doppler must be non-negative")


def clarke_fading(spec: FadingSpec, n, rng: np.random.Generator,
                  num_taps: int = 1, trials: int | None = None) -> np.ndarray:
    """Draw tap gain series ``(1/sqrt(P)) sum_p exp(j(2pi f_D n cos th_p + ph_p))``.

    Angles and phases are i.i.d. uniform on ``[-pi, pi)`` per path, tap and
    trial.  Returns shape ``(num_taps, len(n))``, or
    ``(trials, num_taps, len(n))`` when ``trials`` is given.
    """
    n = np.atleast_1d(np.asarray(n, dtype=float))
    T = 1 if trials is None else int(trials)
    shape = (T, int(num_taps), spec.num_paths)
    theta = rng.uniform(-np.pi, np.pi, size=shape)
    phase = rng.uniform(-np.pi, np.pi, size=shape)
    h = kernels.clarke_gains(spec.doppler, np.cos(theta), phase, n)
    return h[0] if trials is None else h


def apply_multipath(s_cp, profile: TappedDelayProfile, gains, n_cp: int) -> np.ndarray:
    """Time-varying tapped delay line followed by CP removal.

    ``r[n] = sum_l sqrt(P_l) h_l[n] s_cp[n + n_cp - tau_l]`` for
    ``n = 0..N-1``, which equals the cyclic form on the CP-free symbol when
    every delay fits in the CP.  ``gains`` has shape ``(L, N)`` or
    ``(T, L, N)`` and is indexed by the post-CP sample.
    """
    s_cp = np.asarray(s_cp, dtype=np.complex128)
    if profile.max_delay > n_cp:
        raise ValueError(f"CP of {n_cp} samples is shorter than the max delay {profile.max_delay}")
    N = s_cp.shape[-1] - n_cp
    gains = np.asarray(gains, dtype=np.complex128)
    if gains.shape[-2:] != (profile.num_taps, N):
        raise ValueError(f"gains must have trailing shape {(profile.num_taps, N)}, got {gains.shape}")
    amp = np.sqrt(np.asarray(profile.powers))
    r = np.zeros(np.broadcast_shapes(s_cp.shape[:-1], gains.shape[:-2]) + (N,), dtype=np.complex128)
    for l, d in enumerate(profile.sample_delays):
        r += amp[l] * gains[..., l, :] * s_cp[..., n_cp - d:n_cp - d + N]
    return r


def apply_freq_offset(r, f_o: float, f_scs: float, N: int | None = None) -> np.ndarray:
    """Phase ramp ``exp(j 2pi (f_o/f_scs) n / N)``; ``f_o`` may be an array per trial."""
    r = np.asarray(r, dtype=np.complex128)
    N = r.shape[-1] if N is None else int(N)
    nu = np.asarray(f_o, dtype=float) / float(f_scs)
    n = np.arange(r.shape[-1])
    return r * np.exp(2j * np.pi * nu[..., None] * n / N)


def awgn(shape, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance circular complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def noise_std(snr_db: float) -> float:
    """Noise standard deviation for unit signal power at the given SNR."""
    return float(10.0 ** (-float(snr_db) / 20.0))


def add_awgn(r, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    r = np.asarray(r, dtype=np.complex128)
    return r + noise_std(snr_db) * awgn(r.shape, rng)


@dataclass(frozen=True)
class LinkBudget:
    """Numerology of a link: subcarrier spacing, carrier, length and SNR."""

    f_scs: float = 15e3
    f_c: float = 6e9
    N: int = 127
    snr_db: float = 0.0
    f_o: float = 0.0

    def __post_init__(self):
        if self.f_scs <= 0 or self.f_c <= 0 or self.N < 1:
            raise ValueError("f_scs, f_c and N must be positive")

    @property
    def f_s(self) -> float:
        return self.N * self.f_scs

    def doppler(self, v_kmh: float) -> float:
        return velocity_to_doppler(v_kmh, self.f_c, self.f_s)


@dataclass(frozen=True)
class RadarTargetSet:
    """Point targets with powers, phases, Doppler (subcarrier units) and delays.

    Arrays have shape ``(L,)`` or ``(T, L)`` for a batch of trials.
    """

    powers: np.ndarray
    phases: np.ndarray
    dopplers: np.ndarray
    delays: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=float)
        if p.shape[-1] == 0:
            raise ValueError("need at least one target")
        if np.any(np.diff(p, axis=-1) > 0):
            raise ValueError("target powers must be sorted non-increasing")
        for name in ("phases", "dopplers", "delays"):
            if np.shape(getattr(self, name))[-1] != p.shape[-1]:
                raise ValueError(f"{name} must have one entry per target")
        object.__setattr__(self, "powers", p)
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        object.__setattr__(self, "dopplers", np.asarray(self.dopplers, dtype=float))
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=np.int64))

    @property
    def num_targets(self) -> int:
        return self.powers.shape[-1]

    @classmethod
    def draw(cls, powers, n_cp: int, rng: np.random.Generator,
             trials: int | None = None, max_doppler: float = 1.0) -> "RadarTargetSet":
        """Uniform phases on ``[-pi, pi)``, Doppler on ``[-1, 1]``, delays on ``0..n_cp``."""
        powers = np.asarray(powers, dtype=float)
        L = powers.size
        shape = (L,) if trials is None else (int(trials), L)
        phases = rng.uniform(-np.pi, np.pi, size=shape)
        dopplers = rng.uniform(-max_doppler, max_doppler, size=shape)
        delays = rng.integers(0, n_cp + 1, size=shape)
        return cls(np.broadcast_to(powers, shape).copy(), phases, dopplers, delays)


def radar_channel(s_cp, targets: RadarTargetSet, n_cp: int) -> np.ndarray:
    """Noiseless ``sum_l sqrt(P_l) e^{j ph_l} e^{j2pi D_l n/N} s[n - tau_l mod N]``.

    Delays are applied on the CP-prefixed symbol and the CP is then removed.
    """
    s_cp = np.asarray(s_cp, dtype=np.complex128)
    N = s_cp.shape[-1] - n_cp
    delays = targets.delays
    if np.any(delays > n_cp) or np.any(delays < 0):
        raise ValueError(f"target delays must lie in 0..{n_cp}")
    n = np.arange(N)
    idx = n_cp - delays[..., None] + n  # (..., L, N)
    if s_cp.ndim == 1:
        shifted = s_cp[idx]
    else:
        shifted = np.take_along_axis(s_cp[:, None, :], idx, axis=-1)
    coef = np.sqrt(targets.powers) * np.exp(1j * targets.phases)
    ramp = np.exp(2j * np.pi * targets.dopplers[..., None] * n / N)
    return np.sum(coef[..., None] * ramp * shifted, axis=-2)


def target_speed(delta, f_scs: float, f_c: float):
    """Target speed ``v = f_scs * delta * c / (2 f_c)`` in m/s."""
    return f_scs * np.asarray(delta) * SPEED_OF_LIGHT / (2.0 * f_c)


def target_range(tau, N: int, f_scs: float):
    """Target range ``d = tau * c / (2 N f_scs)`` in metres."""
    return np.asarray(tau) * SPEED_OF_LIGHT / (2.0 * N * f_scs)
