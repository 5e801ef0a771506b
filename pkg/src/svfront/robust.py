"""Extractors with long-term processing: MHEC and PNCC."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .core import (
    FRAME_MS,
    LOG_FLOOR,
    PRE_EMPHASIS,
    SHIFT_MS,
    FeatureMatrix,
    Waveform,
    analytic_signal,
    dct2,
    erb_bandwidth,
    erb_rate_to_hz,
    frame_array,
    hz_to_erb_rate,
    log_floor,
    make_filterbank,
    ms_to_samples,
    pre_emphasis,
)
from .spectral import frames_of, hamming_power
from . import kernels


@dataclass
class EnvelopeBank:
    envelopes: np.ndarray
    channel_center_freqs_hz: np.ndarray


@dataclass
class MediumTimePower:
    power: np.ndarray
    window_frames: int


@dataclass
class MhecConfig:
    # 30 channels so that 30 DCT terms exist; 20 caps the output at 20 dims
    n_channels: int = 30
    n_ceps: int = 30
    f_lo: float = 50.0
    f_hi: Optional[float] = None
    lowpass_hz: float = 20.0
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS


@dataclass
class PnccConfig:
    n_channels: int = 40
    n_ceps: int = 30
    n_fft: int = 512
    f_lo: float = 200.0
    f_hi: Optional[float] = None
    medium_frames: int = 2
    lam_a: float = 0.999
    lam_b: float = 0.5
    floor_init: float = 1.0
    excitation_ratio: float = 2.0
    lam_t: float = 0.85
    mu_t: float = 0.2
    smooth_channels: int = 4
    lam_mu: float = 0.999
    exponent: float = 1.0 / 15.0
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS


# -- MHEC -----------------------------------------------------------------------


def gammatone_centers(n_channels, f_lo, f_hi):
    return erb_rate_to_hz(np.linspace(hz_to_erb_rate(f_lo), hz_to_erb_rate(f_hi), n_channels))


def gammatone_poles(centers, fs, order=4):
    """Complex one-pole cascade coefficients for 4th-order gammatone filters.

    Bandwidth follows the ERB of each centre; the gain makes the real part
    of the output unit-gain at the centre frequency.
    """
    fact = np.prod(np.arange(1, 2 * order - 1, dtype=np.float64))
    fact_half = np.prod(np.arange(1, order, dtype=np.float64))
    a_gamma = np.pi * fact * 2.0 ** (-(2 * order - 2)) / fact_half**2
    b = erb_bandwidth(centers) / a_gamma
    lam = np.exp(-2.0 * np.pi * b / fs)
    poles = lam * np.exp(2j * np.pi * centers / fs)
    gains = 2.0 * (1.0 - lam) ** order
    return poles, gains


def _envelope(x, pole, gain):
    s = kernels.gammatone_cascade(x, np.array([pole]), np.array([gain]))[0]
    s, s_hat = analytic_signal(s)
    return np.sqrt(s**2 + s_hat**2)


def gammatone_envelopes(w: Waveform, cfg: Optional[MhecConfig] = None) -> EnvelopeBank:
    """Hilbert envelope of every gammatone channel (full sample rate)."""
    cfg = cfg or MhecConfig()
    fs = w.sample_rate_hz
    x = pre_emphasis(w.samples, cfg.preemph)
    centers = gammatone_centers(cfg.n_channels, cfg.f_lo, cfg.f_hi or 0.9 * fs / 2.0)
    poles, gains = gammatone_poles(centers, fs)
    env = np.stack([_envelope(x, p, g) for p, g in zip(poles, gains)])
    return EnvelopeBank(env, centers)


def mhec(w: Waveform, cfg: Optional[MhecConfig] = None) -> FeatureMatrix:
    cfg = cfg or MhecConfig()
    fs = w.sample_rate_hz
    frame_len = ms_to_samples(cfg.frame_ms, fs)
    shift = ms_to_samples(cfg.shift_ms, fs)
    x = pre_emphasis(w.samples, cfg.preemph)
    frame_array(x, frame_len, shift)  # raises on short input before any filtering
    centers = gammatone_centers(cfg.n_channels, cfg.f_lo, cfg.f_hi or 0.9 * fs / 2.0)
    poles, gains = gammatone_poles(centers, fs)
    beta = np.exp(-2.0 * np.pi * cfg.lowpass_hz / fs)
    energies = []
    for p, g in zip(poles, gains):
        env = lfilter([1.0 - beta], [1.0, -beta], _envelope(x, p, g))
        energies.append(frame_array(env, frame_len, shift).mean(axis=1))
    log_e = log_floor(np.stack(energies, axis=1))
    return FeatureMatrix(dct2(log_e, min(cfg.n_ceps, cfg.n_channels)), "mhec", cfg.shift_ms)


# -- PNCC -----------------------------------------------------------------------


def medium_time_power(power, m):
    """Running mean over ``2m + 1`` frames, truncated at the edges."""
    c = np.concatenate([np.zeros((1, power.shape[1])), np.cumsum(power, axis=0)])
    idx = np.arange(power.shape[0])
    lo = np.maximum(idx - m, 0)
    hi = np.minimum(idx + m + 1, power.shape[0])
    return MediumTimePower((c[hi] - c[lo]) / (hi - lo)[:, None], 2 * m + 1)


def channel_smooth(ratio, n):
    """Mean over channels ``l-n..l+n`` (clipped to the valid range)."""
    n_ch = ratio.shape[1]
    c = np.concatenate([np.zeros((ratio.shape[0], 1)), np.cumsum(ratio, axis=1)], axis=1)
    idx = np.arange(n_ch)
    lo = np.maximum(idx - n, 0)
    hi = np.minimum(idx + n + 1, n_ch)
    return (c[:, hi] - c[:, lo]) / (hi - lo)


def suppress_noise(q_med, cfg):
    """Asymmetric noise-floor removal plus temporal masking.

    Returns the per-channel gain ``R / Q`` applied to the short-time power.
    """
    q_le = kernels.asymmetric_lowpass(q_med, cfg.lam_a, cfg.lam_b, cfg.floor_init)
    q_0 = np.maximum(q_med - q_le, 0.0)
    q_f = kernels.asymmetric_lowpass(q_0, cfg.lam_a, cfg.lam_b, cfg.floor_init)
    r_tm = np.maximum(kernels.temporal_masking(q_0, cfg.lam_t, cfg.mu_t), q_f)
    excited = q_med >= cfg.excitation_ratio * q_le
    r_sp = np.where(excited, r_tm, q_f)
    return r_sp / np.maximum(q_med, LOG_FLOOR)


def mean_power_normalize(t, lam_mu):
    """Divide each frame by a running mean of channel-averaged power.

    The running mean starts at the utterance average instead of zero.
    """
    frame_mean = t.mean(axis=1)
    mu = lfilter([1.0 - lam_mu], [1.0, -lam_mu], frame_mean, zi=[lam_mu * frame_mean.mean()])[0]
    return t / np.maximum(mu, LOG_FLOOR)[:, None]


def pncc(w: Waveform, cfg: Optional[PnccConfig] = None) -> FeatureMatrix:
    cfg = cfg or PnccConfig()
    fs = w.sample_rate_hz
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    fb = make_filterbank("gammatone", cfg.n_channels, cfg.n_fft, fs, cfg.f_lo, cfg.f_hi)
    p = hamming_power(frames, cfg.n_fft) @ (fb.weights**2).T
    q_med = medium_time_power(p, cfg.medium_frames).power
    gain = channel_smooth(suppress_noise(q_med, cfg), cfg.smooth_channels)
    u = mean_power_normalize(p * gain, cfg.lam_mu)
    v = np.maximum(u, LOG_FLOOR) ** cfg.exponent
    return FeatureMatrix(dct2(v, cfg.n_ceps), "pncc", cfg.shift_ms)
