import math

import numpy as np
import pytest

from chirpaf.detection import (
    CHUNK,
    AcquisitionConfig,
    ExperimentStats,
    HypothesisGrid,
    TrackingConfig,
    calibrate_threshold,
    correlate_periodic,
    detect_timing,
    doppler_set,
    mean_ci,
    required_snr,
    run_acquisition,
    run_tracking,
    trial_rng,
)
from chirpaf.channel import awgn
from chirpaf.sequences import m_sequence, random_mpsk, zadoff_chu
from chirpaf.waveform import Waveform, WaveformParams, ccdt_modulate_freq

N = 127


@pytest.fixture
def mseq_ccdt(params):
    return ccdt_modulate_freq(params, m_sequence(7))


def test_doppler_sets():
    np.testing.assert_allclose(doppler_set(3), [-2 / 3, 0, 2 / 3])
    np.testing.assert_allclose(doppler_set(1), [0.0])
    d = doppler_set(N)
    assert d[0] == pytest.approx(-(N - 1) / N) and d[-1] == pytest.approx((N - 1) / N)
    with pytest.raises(ValueError):
        doppler_set(4)


def test_grid_validation():
    with pytest.raises(ValueError):
        HypothesisGrid((), (0,))
    with pytest.raises(ValueError):
        HypothesisGrid((0.0,), (0, N)).check(N)
    g = HypothesisGrid.tracking(N, 12)
    assert g.H == N and g.delays == tuple(range(13))


def test_correlate_examples(mseq_ccdt, params):
    s = mseq_ccdt
    assert abs(correlate_periodic(s, s, 0, 0.0) - 1) < 1e-12
    r = np.roll(s, 5)
    assert int(np.argmax([correlate_periodic(r, s, t, 0.0) for t in range(N)])) == 5
    with pytest.raises(ValueError):
        correlate_periodic(s, s[:-1], 0, 0.0)


def test_ridge_signal_offset_insensitive(params):
    s = ccdt_modulate_freq(params, zadoff_chu(N, params.two_alpha))
    n = np.arange(N)
    for d0 in (1, 5, -3, 60):
        r = s * np.exp(2j * np.pi * d0 * n / N)
        assert abs(correlate_periodic(r, s, 0, 0.0) - 1) < 1e-12


def test_detect_single_tap(mseq_ccdt):
    r = np.roll(mseq_ccdt, 3)
    out = detect_timing(r, mseq_ccdt, HypothesisGrid.acquisition(N, 3), true_delays=[3])
    assert out.tau_star == 3 and out.hit and out.timing_error_s == 0 and out.delta_star == 0


def test_detect_miss_reports_error(mseq_ccdt):
    r = np.roll(mseq_ccdt, 3)
    out = detect_timing(r, mseq_ccdt, HypothesisGrid.acquisition(N, 3), true_delays=[0, 1], f_s=2.0)
    assert not out.hit and out.timing_error_s == pytest.approx(1.0)


def test_doppler_hypothesis_dominates(mseq_ccdt):
    n = np.arange(N)
    r = mseq_ccdt * np.exp(2j * np.pi * 0.66 * n / N)
    assert correlate_periodic(r, mseq_ccdt, 0, 2 / 3) > correlate_periodic(r, mseq_ccdt, 0, 0.0)
    out = detect_timing(r, mseq_ccdt, HypothesisGrid.acquisition(N, 3), true_delta=0.66)
    assert out.delta_star == pytest.approx(2 / 3) and out.doppler_error == pytest.approx(2 / 3 - 0.66)


def test_detect_phase_invariant(mseq_ccdt, rng):
    r = np.roll(mseq_ccdt, 9) + 0.3 * awgn(N, rng)
    g = HypothesisGrid.acquisition(N, 5)
    a = detect_timing(r, mseq_ccdt, g)
    b = detect_timing(r * np.exp(1.234j), mseq_ccdt, g)
    assert (a.tau_star, a.delta_star) == (b.tau_star, b.delta_star)
    assert abs(a.peak_value - b.peak_value) < 1e-12


@pytest.mark.parametrize("x", ["mseq", "qpsk"])
def test_on_grid_target_found_exactly(params, x, rng):
    seq = m_sequence(7) if x == "mseq" else random_mpsk(N, 4, rng)
    s = ccdt_modulate_freq(params, seq)
    grid = HypothesisGrid.tracking(N, 12)
    n = np.arange(N)
    for tau0, d0 in [(0, 0.0), (7, grid.dopplers[40]), (12, grid.dopplers[-1])]:
        r = np.roll(s, tau0) * np.exp(2j * np.pi * d0 * n / N)
        out = detect_timing(r, s, grid)
        assert out.tau_star == tau0 and out.delta_star == pytest.approx(d0)


def test_unsorted_grid_tie_break(mseq_ccdt):
    g = HypothesisGrid((2 / 3, 0.0, -2 / 3), (5, 3, 0))
    out = detect_timing(np.zeros(N), mseq_ccdt, g)
    assert out.tau_star == 0 and out.delta_star == pytest.approx(-2 / 3)


def test_threshold_validation(mseq_ccdt):
    g = HypothesisGrid.tracking(N, 2)
    with pytest.raises(ValueError):
        calibrate_threshold(mseq_ccdt, g, 0.01, 9999, seed=1)
    with pytest.raises(ValueError):
        calibrate_threshold(mseq_ccdt, g, 1.5, 10**6, seed=1)
    with pytest.raises(ValueError):
        calibrate_threshold(mseq_ccdt, g, 0.1, 1000)
    with pytest.raises(ValueError):
        calibrate_threshold(lambda g: mseq_ccdt, g, 0.1, 1000, seed=1)


def test_threshold_monotone_and_median(mseq_ccdt):
    g = HypothesisGrid.acquisition(N, 3)
    ths = [calibrate_threshold(mseq_ccdt, g, p, 2000, seed=3) for p in (0.05, 0.2, 0.5)]
    assert ths[0] >= ths[1] >= ths[2]
    stats = []
    for t in range(2000):
        w = awgn(N, trial_rng(3, 0, t, 1))
        stats.append(detect_timing(w, mseq_ccdt, g).peak_value)
    assert ths[2] == pytest.approx(np.sort(stats)[999])


def test_threshold_holdout_false_alarm(mseq_ccdt):
    g = HypothesisGrid.tracking(N, 12)
    gamma = calibrate_threshold(mseq_ccdt, g, 0.01, 10_000, seed=11)
    from chirpaf import kernels
    W = awgn((10_000, N), np.random.default_rng(99))
    pk = kernels.correlator_peaks(W, mseq_ccdt, g.dopplers, g.delays)[0]
    assert abs(np.mean(pk >= gamma) - 0.01) <= 0.005


def test_mean_ci_and_required_snr():
    m, lo, hi = mean_ci([1.0, 2.0, 3.0])
    assert m == 2.0 and lo < 2 < hi
    assert all(math.isnan(v) for v in mean_ci([]))
    assert required_snr([0, 1, 2], [0.1, 0.01, 0.001], 0.01) == pytest.approx(1.0)
    assert required_snr([0, 1], [0.1, 0.001], 0.01) == pytest.approx(0.5)
    assert required_snr([2, 0, 1], [0.001, 0.1, 0.01], 0.01) == pytest.approx(1.0)
    assert math.isnan(required_snr([0, 1], [0.5, 0.2], 0.01))
    assert required_snr([0, 1], [0.02, 0.0], 0.01) == pytest.approx(0.5)


def test_acquisition_config_validation():
    with pytest.raises(ValueError):
        AcquisitionConfig(sequence="gold")
    with pytest.raises(ValueError):
        AcquisitionConfig(hypotheses=4)
    with pytest.raises(ValueError):
        AcquisitionConfig(n_cp=3)
    with pytest.raises(ValueError):
        AcquisitionConfig(two_alpha=127)
    with pytest.raises(ValueError):
        AcquisitionConfig(snrs_db=())
    c = AcquisitionConfig(sequence="zc")
    assert c.label() == "zc123"


def test_acquisition_high_snr_static():
    c = AcquisitionConfig(velocities_kmh=(0.0,), snrs_db=(40.0,), trials=300, max_offset=0.0)
    (st,) = run_acquisition(c)
    assert st.p_md == 0 and st.mean_te_s == 0 and st.detected == 300


def test_acquisition_stats_shape():
    c = AcquisitionConfig(velocities_kmh=(0.0, 350.0), snrs_db=(-6.0, 0.0), trials=200)
    res = run_acquisition(c)
    assert [(r.velocity_kmh, r.snr_db) for r in res] == [(0.0, -6.0), (0.0, 0.0), (350.0, -6.0), (350.0, 0.0)]
    for r in res:
        assert r.misses == round(r.p_md * r.trials)
        assert r.p_md * r.trials == int(r.p_md * r.trials + 0.5)
        assert len(r.row()) == len(ExperimentStats.CSV_COLUMNS)


def test_acquisition_hits_only_flag():
    c = AcquisitionConfig(snrs_db=(-8.0,), trials=300, te_hits_only=True)
    (st,) = run_acquisition(c)
    assert st.detected == round((1 - st.p_md) * st.trials) and st.mean_te_s == 0


def test_acquisition_worker_invariance():
    c = AcquisitionConfig(snrs_db=(-3.0,), trials=CHUNK + 300)
    a = run_acquisition(c, workers=1)
    b = run_acquisition(c, workers=2)
    assert [r.row() for r in a] == [r.row() for r in b]


def test_tracking_config_validation():
    with pytest.raises(ValueError):
        TrackingConfig(sequence="zc")
    with pytest.raises(ValueError):
        TrackingConfig(powers=(0.5, 1.0))
    with pytest.raises(ValueError):
        TrackingConfig(noise_trials=50)
    with pytest.raises(ValueError):
        TrackingConfig(p_fa=0.0)


def test_tracking_single_target_high_snr():
    c = TrackingConfig(powers=(1.0,), snrs_db=(40.0,), trials=200, p_fa=0.1)
    (st,) = run_tracking(c)
    assert st.p_md == 0 and st.mean_abs_tau_err == 0
    # off-grid Doppler: the nearest hypothesis is at most 1/N away
    assert st.mean_abs_delta_err <= 1 / N + 1e-12
    assert math.isnan(st.velocity_kmh)


def test_tracking_sequences_share_draws():
    a = TrackingConfig(sequence="mseq", powers=(1.0,), snrs_db=(40.0,), trials=50, p_fa=0.1)
    b = TrackingConfig(sequence="qpsk", powers=(1.0,), snrs_db=(40.0,), trials=50, p_fa=0.1)
    from chirpaf.detection import _trk_chunk
    pa, pb = _trk_chunk(a, 0, 50), _trk_chunk(b, 0, 50)
    # strongest-target delay and Doppler are drawn identically
    np.testing.assert_array_equal(pa[3], pb[3])
    np.testing.assert_array_equal(pa[4], pb[4])


def test_tracking_worker_invariance():
    c = TrackingConfig(sequence="qpsk", snrs_db=(-9.0,), trials=CHUNK + 100, p_fa=0.05)
    assert [r.row() for r in run_tracking(c, workers=1)] == [r.row() for r in run_tracking(c, workers=2)]


def test_trial_rng_independent_streams():
    a = trial_rng(1, 0, 5).standard_normal(4)
    assert np.array_equal(a, trial_rng(1, 0, 5).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, 0, 6).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, 1, 5).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, 0, 5, 1).standard_normal(4))
