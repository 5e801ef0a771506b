import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FS, harmonic_tone
from svfront.core import EmptyInputError, Waveform
from svfront.pitch import PitchConfig, extract_pitch, nccf


def direct_nccf(x, lag, n_win):
    num = sum(x[n] * x[n + lag] for n in range(n_win))
    e0 = sum(x[n] ** 2 for n in range(n_win))
    el = sum(x[n + lag] ** 2 for n in range(n_win))
    return num / np.sqrt(e0 * el + 1e-10)


def test_nccf_periodic_and_antiphase():
    x = np.cos(2 * np.pi * np.arange(800) / 80)
    assert abs(nccf(x, 80) - 1.0) < 1e-3
    assert abs(nccf(x, 40) + 1.0) < 1e-3


def test_nccf_noise_matches_direct_sum(rng):
    x = rng.standard_normal(720)
    for lag in rng.integers(40, 320, size=5):
        lag = int(lag)
        assert abs(nccf(x, lag, 400) - direct_nccf(x, lag, 400)) < 1e-6
        assert abs(nccf(x, lag, 400)) < 0.3


def test_nccf_bad_lag():
    with pytest.raises(ValueError):
        nccf(np.ones(10), 10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 399))
def test_nccf_bounded(seed, lag):
    x = np.random.default_rng(seed).standard_normal(400) * 10.0 ** np.random.default_rng(seed).uniform(-4, 4)
    v = nccf(x, lag)
    assert -1 - 1e-6 <= v <= 1 + 1e-6


@pytest.mark.parametrize("f0", [120.0, 220.0, 330.0])
def test_pitch_harmonic_tone(f0):
    p = extract_pitch(Waveform(harmonic_tone(f0), FS))
    assert abs(np.median(p.pitch_hz) / f0 - 1.0) < 0.02
    assert np.all((p.pov >= 0) & (p.pov <= 1))
    interior = p.log_pitch[3:-3]
    assert np.ptp(interior) < 1e-3


def test_pitch_order_preserved():
    lo = extract_pitch(Waveform(harmonic_tone(120.0), FS))
    hi = extract_pitch(Waveform(harmonic_tone(330.0), FS))
    assert np.median(lo.log_pitch) < np.median(hi.log_pitch)


def test_pitch_noise_low_pov(noise3s):
    assert extract_pitch(noise3s).pov.mean() < 0.5


def test_pitch_range(noise3s):
    f = extract_pitch(noise3s).pitch_hz
    cfg = PitchConfig()
    assert np.all((f >= cfg.f_min * 0.95) & (f <= cfg.f_max * 1.05))


def noisy_tone():
    return harmonic_tone(180.0) + 0.3 * np.random.default_rng(0).standard_normal(FS)


@pytest.mark.parametrize("gain", [10.0, 100.0])
def test_pitch_gain_bit_identical(gain):
    a = extract_pitch(Waveform(noisy_tone(), FS)).as_matrix()
    b = extract_pitch(Waveform(noisy_tone() * gain, FS)).as_matrix()
    assert np.array_equal(a, b)


def test_pitch_strong_attenuation_close():
    # at very low levels the epsilon in the NCCF denominator is no longer negligible
    a = extract_pitch(Waveform(noisy_tone(), FS)).as_matrix()
    b = extract_pitch(Waveform(noisy_tone() * 0.01, FS)).as_matrix()
    assert np.max(np.abs(a - b)) < 1e-5


def test_unvoiced_frames_interpolated():
    x = np.concatenate([harmonic_tone(200.0, 0.5), np.zeros(FS // 2), harmonic_tone(200.0, 0.5)])
    p = extract_pitch(Waveform(x, FS))
    assert np.all(np.isfinite(p.log_pitch))
    assert np.allclose(p.pitch_hz, 200.0, rtol=0.02)


def test_pitch_short_input():
    with pytest.raises(EmptyInputError):
        extract_pitch(Waveform(np.ones(399), FS))


def test_pitch_matrix_layout():
    p = extract_pitch(Waveform(harmonic_tone(150.0), FS))
    m = p.as_matrix()
    assert m.shape == (98, 3)
    assert np.array_equal(m[:, 0], p.pov) and np.array_equal(m[:, 2], p.delta_pitch)
