import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chirpaf.sequences import is_cazac, m_sequence, random_mpsk, zadoff_chu
from chirpaf.waveform import (
    Waveform,
    WaveformKind,
    WaveformParams,
    add_cp,
    ccdt_modulate_freq,
    ccdt_modulate_time,
    chirp_basis,
    chirp_basis_at,
    chirp_filter,
    dfts_ofdm_modulate,
    ofdm_modulate,
    remove_cp,
    upsample,
)

N = 127


@pytest.mark.parametrize("ta,tb", [(4, 2), (-4, -4), (3, 1), (5, 1), (1, 1)])
def test_valid_params(ta, tb):
    p = WaveformParams(N, ta, tb)
    assert p.alpha == ta / 2 and (p.two_alpha * p.inv_two_alpha) % N == 1


@pytest.mark.parametrize("ta,tb", [(127, 1), (254, 0), (4, 1), (3, 2)])
def test_invalid_params(ta, tb):
    with pytest.raises(ValueError):
        WaveformParams(N, ta, tb)


def test_invalid_q_and_cp():
    with pytest.raises(ValueError):
        WaveformParams(N, 4, 2, Q=200)
    with pytest.raises(ValueError):
        WaveformParams(N, 4, 2, n_cp=128)
    with pytest.raises(ValueError):
        WaveformParams(N, 4.5, 2)


def test_even_n_parity():
    # N even: 2a must be odd, and 2a*N + 2b even forces 2b even
    WaveformParams(8, 3, 0)
    with pytest.raises(ValueError):
        WaveformParams(8, 3, 1)
    with pytest.raises(ValueError):
        WaveformParams(8, 2, 0)


def test_kind_parse():
    assert WaveformKind.parse("DFT-s-OFDM") is WaveformKind.DFTS_OFDM
    assert WaveformKind.parse("dfts_ofdm") is WaveformKind.DFTS_OFDM
    with pytest.raises(ValueError):
        WaveformKind.parse("fmcw")


def test_basis_at_zero(params):
    p = WaveformParams(N, 4, 2, gamma=0.37)
    g = chirp_basis(p)
    assert abs(g[0] - np.exp(-2j * np.pi * 0.37 / N) / math.sqrt(N)) < 1e-15


def test_basis_cazac_and_periodic(params):
    g = chirp_basis(params)
    assert np.allclose(np.abs(g), 1 / math.sqrt(N), atol=1e-15)
    assert is_cazac(math.sqrt(N) * g)
    k = np.arange(N)
    np.testing.assert_allclose(chirp_basis_at(params, k + N), g, atol=1e-12)
    np.testing.assert_allclose(chirp_basis_at(params, k), g, atol=1e-12)


def test_basis_shifts_orthonormal(params):
    g = chirp_basis(params)
    k = np.arange(N)
    B = g[(k[:, None] - k[None, :]) % N]
    np.testing.assert_allclose(B.conj().T @ B, np.eye(N), atol=1e-10)


def test_filter_constant_amplitude(params):
    assert np.ptp(np.abs(chirp_filter(params))) < 1e-10


def test_impulse_gives_basis(params):
    x = np.zeros(N, complex)
    x[0] = 1
    np.testing.assert_allclose(ccdt_modulate_time(params, x), chirp_basis(params), atol=1e-15)


def test_unit_power_mseq(params):
    s = ccdt_modulate_time(params, m_sequence(7))
    assert abs(np.mean(np.abs(s) ** 2) - 1) < 1e-12


def test_time_and_freq_paths_agree(rng):
    for ta, tb in [(4, 2), (-4, -4), (3, 1)]:
        p = WaveformParams(N, ta, tb, gamma=rng.uniform())
        for _ in range(100 if ta == 4 else 10):
            x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            assert np.max(np.abs(ccdt_modulate_time(p, x) - ccdt_modulate_freq(p, x))) < 1e-10


def test_zero_input(params):
    assert not np.any(ccdt_modulate_freq(params, np.zeros(N)))


def test_length_mismatch(params):
    with pytest.raises(ValueError):
        ccdt_modulate_time(params, np.ones(N - 1))
    with pytest.raises(ValueError):
        ccdt_modulate_freq(params, np.ones(N + 1))


def test_ofdm_examples(rng):
    x = np.zeros(N, complex)
    x[0] = 1
    np.testing.assert_allclose(ofdm_modulate(x), np.full(N, 1 / math.sqrt(N)), atol=1e-15)
    np.testing.assert_allclose(ofdm_modulate(np.ones(4)), [2, 0, 0, 0], atol=1e-15)
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    assert abs(np.sum(np.abs(ofdm_modulate(x)) ** 2) - np.sum(np.abs(x) ** 2)) < 1e-12 * N


def test_dfts_ofdm_identity(rng):
    x = random_mpsk(N, 4, rng)
    s = dfts_ofdm_modulate(x)
    np.testing.assert_array_equal(s, x)
    np.testing.assert_array_equal(dfts_ofdm_modulate(s), s)
    assert s is not x


@pytest.mark.parametrize("kind", list(WaveformKind))
def test_unit_average_power_all_kinds(kind, params, rng):
    s = Waveform(kind, params).modulate(random_mpsk(N, 4, rng))
    assert abs(np.mean(np.abs(s) ** 2) - 1) < 1e-12


def test_cp_examples():
    s = np.array([1, 2, 3, 4])
    np.testing.assert_array_equal(add_cp(s, 0), s)
    np.testing.assert_array_equal(add_cp(s, 2), [3, 4, 1, 2, 3, 4])
    np.testing.assert_array_equal(remove_cp(add_cp(s, 2), 2), s)
    with pytest.raises(ValueError):
        add_cp(s, 5)
    with pytest.raises(ValueError):
        remove_cp(s, -1)


def test_cp_batched():
    S = np.arange(8).reshape(2, 4)
    np.testing.assert_array_equal(add_cp(S, 1), [[3, 0, 1, 2, 3], [7, 4, 5, 6, 7]])


def test_upsample_reduction(params, rng):
    x = random_mpsk(N, 4, rng)
    np.testing.assert_allclose(upsample(params, x, N), ccdt_modulate_freq(params, x), atol=1e-10)


@pytest.mark.parametrize("q", [2, 4, 10])
def test_upsample_energy_and_decimation(q, params, rng):
    x = random_mpsk(N, 4, rng)
    sN = ccdt_modulate_freq(params, x)
    sQ = upsample(params, x, q * N)
    # zero padding is unitary on the occupied bins
    assert abs(np.sum(np.abs(sQ) ** 2) - np.sum(np.abs(sN) ** 2)) < 1e-9
    np.testing.assert_allclose(sQ[::q], sN / math.sqrt(q), atol=1e-10)


@pytest.mark.parametrize("kind", list(WaveformKind))
def test_upsample_all_kinds_reduce(kind, params, rng):
    x = random_mpsk(N, 4, rng)
    wf = Waveform(kind, params)
    np.testing.assert_allclose(wf.upsample(x, N), wf.modulate(x), atol=1e-12)
    np.testing.assert_allclose(wf.upsample(x, 3 * N)[::3], wf.modulate(x) / math.sqrt(3), atol=1e-12)


def test_upsample_rejects_bad_q(params):
    with pytest.raises(ValueError):
        upsample(params, np.ones(N), 2 * N + 1)


def test_modulate_batch_matches_rows(params, rng):
    X = rng.standard_normal((5, N)) + 1j * rng.standard_normal((5, N))
    for kind in WaveformKind:
        wf = Waveform(kind, params)
        B = wf.modulate_batch(X)
        for i in range(5):
            np.testing.assert_allclose(B[i], wf.modulate(X[i]), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([7, 31, 63, 127]), st.integers(-300, 300), st.integers(-300, 300),
       st.floats(0, 10), st.integers(0, 2**32 - 1))
def test_time_freq_paths_any_valid_params(Nn, ta, tb, gamma, seed):
    if math.gcd(ta, Nn) != 1 or (ta * Nn + tb) % 2:
        with pytest.raises(ValueError):
            WaveformParams(Nn, ta, tb, gamma)
        return
    p = WaveformParams(Nn, ta, tb, gamma)
    g = np.random.default_rng(seed)
    x = g.standard_normal(Nn) + 1j * g.standard_normal(Nn)
    assert np.max(np.abs(ccdt_modulate_time(p, x) - ccdt_modulate_freq(p, x))) < 1e-10
