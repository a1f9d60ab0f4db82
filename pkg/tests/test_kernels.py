import os
import subprocess
import sys

import numpy as np
import pytest

from chirpaf import kernels
from chirpaf.detection import doppler_set

BACKENDS = kernels.available_backends()


def naive_bank(r, s, dops, delays):
    T, N = r.shape
    n = np.arange(N)
    out = np.empty((T, len(dops), len(delays)))
    for t in range(T):
        ref = s[0] if s.shape[0] == 1 else s[t]
        for h, d in enumerate(dops):
            for k, tau in enumerate(delays):
                out[t, h, k] = abs(np.sum(r[t] * np.conj(ref[(n - tau) % N]) * np.exp(-2j * np.pi * d * n / N))) / N
    return out


def _data(rng, T=6, N=31, shared=True):
    r = rng.standard_normal((T, N)) + 1j * rng.standard_normal((T, N))
    s = rng.standard_normal((1 if shared else T, N)) + 1j * rng.standard_normal((1 if shared else T, N))
    return r, s


def test_python_backend_always_available():
    assert "python" in BACKENDS


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("shared", [True, False])
@pytest.mark.parametrize("grid", ["full", "partial"])
def test_bank_matches_naive(name, shared, grid, rng):
    be = kernels.get_backend(name)
    r, s = _data(rng, shared=shared)
    N = r.shape[1]
    dops = doppler_set(5) if grid == "full" else doppler_set(N)
    delays = np.arange(N) if grid == "full" else np.array([0, 1, 2, 5, 9])
    np.testing.assert_allclose(be.correlator_bank(r, s, dops, delays), naive_bank(r, s, dops, delays), atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@pytest.mark.parametrize("H,delays", [(3, None), (127, range(13)), (7, [4, 2, 9])])
def test_backends_agree(H, delays, rng):
    N = 127
    r, s = _data(rng, T=40, N=N)
    d = np.arange(N) if delays is None else np.array(list(delays))
    dops = doppler_set(H)
    a, b = kernels.get_backend("cython"), kernels.get_backend("python")
    np.testing.assert_allclose(a.correlator_bank(r, s, dops, d), b.correlator_bank(r, s, dops, d), atol=1e-12)
    pa, pb = a.correlator_peaks(r, s, dops, d), b.correlator_peaks(r, s, dops, d)
    np.testing.assert_allclose(pa[0], pb[0], atol=1e-12)
    np.testing.assert_array_equal(pa[1], pb[1])
    np.testing.assert_array_equal(pa[2], pb[2])
    ct = np.cos(rng.uniform(-np.pi, np.pi, (10, 5, 5)))
    ph = rng.uniform(-np.pi, np.pi, (10, 5, 5))
    n = np.arange(N)
    np.testing.assert_allclose(a.clarke_gains(0.01, ct, ph, n), b.clarke_gains(0.01, ct, ph, n), atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_peaks_tie_break(name):
    be = kernels.get_backend(name)
    # all-zero input: every cell ties, expect (delay 0, doppler 0)
    r = np.zeros((2, 7), complex)
    s = np.ones((1, 7), complex)
    pk, di, hi = be.correlator_peaks(r, s, doppler_set(3), np.arange(7))
    assert list(di) == [0, 0] and list(hi) == [0, 0] and np.all(pk == 0)


@pytest.mark.parametrize("name", BACKENDS)
def test_clarke_matches_formula(name, rng):
    be = kernels.get_backend(name)
    th = rng.uniform(-np.pi, np.pi, (3, 2, 5))
    ph = rng.uniform(-np.pi, np.pi, (3, 2, 5))
    n = np.arange(20)
    fd = 0.03
    ref = np.exp(1j * (2 * np.pi * fd * n[None, None, None, :] * np.cos(th)[..., None] + ph[..., None])).sum(-2)
    np.testing.assert_allclose(be.clarke_gains(fd, np.cos(th), ph, n), ref / np.sqrt(5), atol=1e-12)


def test_input_validation():
    be = kernels.get_backend("python")
    with pytest.raises(ValueError):
        be.correlator_bank(np.ones((2, 5)), np.ones((3, 5)), [0.0], [0])
    with pytest.raises(ValueError):
        be.correlator_bank(np.ones((2, 5)), np.ones((1, 4)), [0.0], [0])
    with pytest.raises(ValueError):
        be.correlator_bank(np.ones((2, 5)), np.ones((1, 5)), [], [0])
    with pytest.raises(ValueError):
        be.clarke_gains(0.1, np.ones((2, 3)), np.ones((2, 3)), np.arange(4))


def test_env_forces_fallback():
    code = "from chirpaf import kernels; print(kernels.BACKEND, kernels.PREFERRED['clarke_gains'])"
    env = dict(os.environ, CHIRPAF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "python"]
