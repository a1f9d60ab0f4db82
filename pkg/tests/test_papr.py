import io
import math

import numpy as np
import pytest

from chirpaf.papr import (
    ofdm_dfts_root_map,
    papr,
    papr_sweep,
    papr_upsampled,
    verify_papr_properties,
    write_papr_csv,
)
from chirpaf.sequences import dft_sequence, random_mpsk, zadoff_chu
from chirpaf.waveform import Waveform, WaveformParams, add_cp, ccdt_modulate_freq, dfts_ofdm_modulate

N = 127
PEAK_DB = 10 * math.log10(N)


def test_unit_modulus_is_zero_db(rng):
    assert abs(papr(random_mpsk(N, 8, rng)).papr_db) < 1e-12


def test_scale_invariant(params, rng):
    s = ccdt_modulate_freq(params, random_mpsk(N, 4, rng))
    ref = papr(s).papr_db
    assert abs(papr(3.5 * s).papr_db - ref) < 1e-12
    r = papr(s)
    assert r.papr_db >= 0 and abs(r.mean_power - 1) < 1e-12


def test_cp_repeats_samples_but_can_shift_mean(params, rng):
    # the peak is unchanged, the mean is not: measure on the CP-free symbol
    s = ccdt_modulate_freq(params, random_mpsk(N, 4, rng))
    assert np.max(np.abs(add_cp(s, 12))) == np.max(np.abs(s))
    x = random_mpsk(N, 4, rng)
    assert abs(papr(add_cp(x, 12)).papr_db) < 1e-12


def test_zero_energy_rejected():
    with pytest.raises(ValueError):
        papr(np.zeros(8))
    with pytest.raises(ValueError):
        papr(np.zeros(0))


def test_zc_not_matching_rate_is_flat(params):
    assert abs(papr(ccdt_modulate_freq(params, zadoff_chu(N, 3))).papr_db) < 1e-9


def test_zc_matching_rate_single_sample(params):
    s = ccdt_modulate_freq(params, zadoff_chu(N, params.two_alpha))
    r = papr(s)
    assert abs(r.papr_db - PEAK_DB) < 1e-9
    assert abs(r.papr_db - 21.038) < 1e-3
    p = np.abs(s) ** 2
    assert abs(p[r.peak_index] / p.sum() - 1) < 1e-12


def test_dfts_ofdm_unit_modulus_zero_db(rng):
    assert abs(papr(dfts_ofdm_modulate(random_mpsk(N, 4, rng))).papr_db) < 1e-12


def test_upsampled_reduction(params, rng):
    x = random_mpsk(N, 4, rng)
    wf = Waveform("ccdt", params)
    assert abs(papr_upsampled(wf, x, N).papr_db - papr(wf.modulate(x)).papr_db) < 1e-12


@pytest.mark.parametrize("kind", ["ccdt", "ofdm", "dfts-ofdm"])
def test_upsampling_never_lowers_papr(kind, params, rng):
    wf = Waveform(kind, params)
    for _ in range(20):
        x = random_mpsk(N, 4, rng)
        assert papr_upsampled(wf, x, 4 * N).papr_db >= papr(wf.modulate(x)).papr_db - 1e-9


def test_dfts_equals_ofdm_for_mapped_root(params):
    Q = 4 * N
    ofdm, dfts = Waveform("ofdm", params), Waveform("dfts-ofdm", params)
    for u in range(1, N):
        v = ofdm_dfts_root_map(N, u)
        a = papr_upsampled(dfts, zadoff_chu(N, u), Q).papr_db
        b = papr_upsampled(ofdm, zadoff_chu(N, v), Q).papr_db
        assert abs(a - b) < 1e-9


def test_sweep_structure(params):
    Q = 4 * N
    ccdt = papr_sweep(Waveform("ccdt", params), "zc", Q)
    ofdm = papr_sweep(Waveform("ofdm", params), "zc", Q)
    assert len(ccdt) == N - 1
    vals = [e.papr_db for e in ccdt]
    assert vals == sorted(vals)
    assert [e.rank for e in ccdt] == list(range(N - 1))
    # single outlier at u = 2a, the rest comparable to OFDM
    assert ccdt[-1].root == params.two_alpha % N and ccdt[-1].papr_db > 20
    lo, hi = ofdm[0].papr_db, ofdm[-1].papr_db
    assert all(lo - 1 <= v <= hi + 1 for v in vals[:-1])
    assert hi < 10


def test_sweep_critical_sampling(params):
    ccdt = Waveform("ccdt", params)
    dft = papr_sweep(ccdt, "dft")
    assert len(dft) == N and max(abs(e.papr_db) for e in dft) < 1e-9
    zc = papr_sweep(ccdt, "zc")
    assert abs(zc[-1].papr_db - PEAK_DB) < 1e-9
    assert max(abs(e.papr_db) for e in zc[:-1]) < 1e-9
    with pytest.raises(ValueError):
        papr_sweep(ccdt, "gold")


def test_properties_pass(params):
    res = verify_papr_properties(params)
    assert [r.number for r in res] == [7, 8]
    assert all(r.passed and not r.skipped for r in res)


def test_property_seven_skipped_for_composite_n():
    res = verify_papr_properties(WaveformParams(63, 4, 2))
    assert res[0].skipped and res[1].passed


def test_csv():
    buf = io.StringIO()
    sweep = papr_sweep(Waveform("ofdm", WaveformParams(7, 2, 0)), "dft")
    write_papr_csv(buf, sweep, "c")
    lines = buf.getvalue().splitlines()
    assert lines[:2] == ["# c", "rank,root,papr_db,waveform"]
    assert len(lines) == 2 + 7 and lines[2].endswith(",ofdm")


def test_dft_sequence_papr_critical(params):
    for k in range(N):
        assert abs(papr(ccdt_modulate_freq(params, dft_sequence(N, k))).papr_db) < 1e-9
