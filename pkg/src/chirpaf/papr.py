"""Peak-to-average power ratio of CCDT, OFDM and DFT-s-OFDM symbols."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .ambiguity import PropertyResult
from .sequences import dft_sequence, zadoff_chu
from .waveform import Waveform, WaveformParams, ccdt_modulate_freq

__all__ = [
    "PaprResult",
    "PaprEntry",
    "papr",
    "papr_upsampled",
    "papr_sweep",
    "verify_papr_properties",
    "write_papr_csv",
    "ofdm_dfts_root_map",
]


@dataclass(frozen=True)
class PaprResult:
    papr_db: float
    peak_index: int
    mean_power: float


@dataclass(frozen=True)
class PaprEntry:
    rank: int
    root: int
    papr_db: float
    waveform: str


def papr(s) -> PaprResult:
    """PAPR in dB, ``10 log10(max |s|^2 / mean |s|^2)``.

    Dividing by the measured mean power makes the value independent of the
    overall scaling.  Pass the CP-free symbol: a prefix repeats samples and
    so shifts the mean of a non-constant envelope.
    """
    s = np.asarray(s, dtype=np.complex128)
    p = np.abs(s) ** 2
    mean = float(p.mean()) if p.size else 0.0
    if mean <= 0.0:
        raise ValueError("PAPR of a zero-energy signal is undefined")
    k = int(np.argmax(p))
    return PaprResult(10.0 * math.log10(p[k] / mean), k, mean)


def papr_upsampled(waveform: Waveform, x, Q: int | None = None) -> PaprResult:
    """PAPR of the symbol interpolated to ``Q`` samples by spectral zero padding."""
    return papr(waveform.upsample(x, Q))


def _family(name: str, N: int):
    name = name.lower().replace("-", "_")
    if name in ("zc", "zadoff_chu"):
        return [(u, zadoff_chu(N, u)) for u in range(1, N)]
    if name in ("dft", "dft_sequence"):
        return [(k, dft_sequence(N, k)) for k in range(N)]
    raise ValueError(f"unknown sequence family {name!r}")


def papr_sweep(waveform: Waveform, family: str = "zc", Q: int | None = None) -> list[PaprEntry]:
    """PAPR for every root (ZC) or index (DFT) of a family, sorted ascending.

    Ties keep the root order, so the output is deterministic.
    """
    N = waveform.N
    vals = [(papr_upsampled(waveform, x, Q).papr_db, r) for r, x in _family(family, N)]
    vals.sort(key=lambda t: (t[0], t[1]))
    return [PaprEntry(i, r, p, waveform.kind.value) for i, (p, r) in enumerate(vals)]


def _is_odd_prime(n: int) -> bool:
    return n > 2 and n % 2 == 1 and all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def verify_papr_properties(params: WaveformParams, tol: float = 1e-9) -> list[PropertyResult]:
    """PAPR properties of critically sampled CCDT.

    7: ZC roots give 0 dB except ``u = 2a``, where all energy sits in one
    sample and the PAPR is ``10 log10 N`` (odd prime N).
    8: every DFT sequence gives 0 dB.
    Deviations are in dB.
    """
    N = params.N
    out = []
    if not _is_odd_prime(N):
        out.append(PropertyResult(7, "CCDT + ZC PAPR: 0 dB, 10log10(N) at u=2a", 0.0, tol, True,
                                  "N is not an odd prime"))
    else:
        u0 = params.two_alpha % N
        dev = 0.0
        for u in range(1, N):
            s = ccdt_modulate_freq(params, zadoff_chu(N, u))
            r = papr(s)
            if u == u0:
                dev = max(dev, abs(r.papr_db - 10 * math.log10(N)))
                p = np.abs(s) ** 2
                # single-sample energy, expressed in dB of the captured fraction
                dev = max(dev, abs(10 * math.log10(p.max() / p.sum())))
            else:
                dev = max(dev, abs(r.papr_db))
        out.append(PropertyResult(7, "CCDT + ZC PAPR: 0 dB, 10log10(N) at u=2a", dev, tol))
    dev = max(abs(papr(ccdt_modulate_freq(params, dft_sequence(N, k))).papr_db) for k in range(N))
    out.append(PropertyResult(8, "CCDT + DFT sequence PAPR is 0 dB", dev, tol))
    return out


def write_papr_csv(fh: IO[str], entries: Iterable[PaprEntry], comment: str | None = None) -> None:
    if comment is not None:
        fh.write(f"# {comment}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["rank", "root", "papr_db", "waveform"])
    for e in entries:
        w.writerow([e.rank, e.root, repr(float(e.papr_db)), e.waveform])


def ofdm_dfts_root_map(N: int, u: int) -> int:
    """OFDM root whose upsampled PAPR equals that of DFT-s-OFDM with root ``u``.

    The DFT of a ZC sequence is a conjugated ZC sequence of root ``u^-1 mod N``
    (times a constant and a cyclic shift), which leaves the PAPR unchanged.
    """
    return pow(int(u), -1, int(N))

