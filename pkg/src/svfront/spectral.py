"""Magnitude-spectrum cepstral extractors."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    FRAME_MS,
    PRE_EMPHASIS,
    SHIFT_MS,
    FeatureMatrix,
    Waveform,
    autocorrelation,
    cqt,
    dct2,
    frame_array,
    hamming_window,
    log_floor,
    lpc_cepstrum_batch,
    make_filterbank,
    ms_to_samples,
    multitaper_power,
    pre_emphasis,
    rfft_frames,
    sine_tapers,
)
from . import kernels


@dataclass
class CepstralConfig:
    n_filters: int = 30
    n_ceps: int = 30
    n_fft: int = 512
    lp_order: int = 30
    n_tapers: int = 8
    taper_weighting: str = "swce"
    f_lo: float = 20.0
    f_hi: Optional[float] = None
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS

    def __post_init__(self):
        if self.lp_order < 1:
            raise ValueError("lp_order must be >= 1")
        if self.n_ceps < 1:
            raise ValueError("n_ceps must be >= 1")


@dataclass
class CqccConfig:
    bins_per_octave: int = 96
    n_octaves: int = 9
    f_max: Optional[float] = None
    n_uniform: int = 512
    n_ceps: int = 60
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    sidelobes: int = 16


def frames_of(w, frame_ms, shift_ms, preemph):
    fs = w.sample_rate_hz
    x = pre_emphasis(w.samples, preemph)
    return frame_array(x, ms_to_samples(frame_ms, fs), ms_to_samples(shift_ms, fs))


def hamming_power(frames, n_fft):
    spec = rfft_frames(frames, hamming_window(frames.shape[1]), n_fft)
    return spec.real**2 + spec.imag**2


def filterbank_cepstra(power, weights, n_ceps):
    """Filterbank integration, log compression, DCT."""
    return dct2(log_floor(power @ weights.T), n_ceps)


def _check_ceps(cfg):
    if cfg.n_ceps > cfg.n_filters:
        raise ValueError(f"n_ceps={cfg.n_ceps} exceeds n_filters={cfg.n_filters}")


def _feature(values, kind, cfg):
    return FeatureMatrix(np.ascontiguousarray(values), kind, cfg.shift_ms)


def mfcc(w: Waveform, cfg: Optional[CepstralConfig] = None) -> FeatureMatrix:
    """Mel-frequency cepstra, c0 kept as the first coefficient."""
    cfg = cfg or CepstralConfig()
    _check_ceps(cfg)
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    fb = make_filterbank("mel", cfg.n_filters, cfg.n_fft, w.sample_rate_hz, cfg.f_lo, cfg.f_hi)
    power = hamming_power(frames, cfg.n_fft)
    return _feature(filterbank_cepstra(power, fb.weights, cfg.n_ceps), "mfcc", cfg)


def multitaper_mfcc(w: Waveform, cfg: Optional[CepstralConfig] = None, k: Optional[int] = None):
    """MFCC with the periodogram replaced by a sine-taper multitaper estimate."""
    cfg = cfg or CepstralConfig()
    _check_ceps(cfg)
    k = cfg.n_tapers if k is None else k
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    tapers = sine_tapers(frames.shape[1], k, cfg.taper_weighting)
    fb = make_filterbank("mel", cfg.n_filters, cfg.n_fft, w.sample_rate_hz, cfg.f_lo, cfg.f_hi)
    power = multitaper_power(frames, tapers.tapers, tapers.weights, cfg.n_fft)
    return _feature(filterbank_cepstra(power, fb.weights, cfg.n_ceps), "multitaper", cfg)


def lp_cepstra(autocorr, order, n_ceps):
    """LP cepstra c1..c_n_ceps per row; silent rows come back as zeros."""
    coeffs, _ = kernels.levinson_batch(autocorr[:, : order + 1], order)
    return lpc_cepstrum_batch(coeffs, n_ceps)


def lpcc(w: Waveform, cfg: Optional[CepstralConfig] = None) -> FeatureMatrix:
    cfg = cfg or CepstralConfig()
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    r = autocorrelation(frames * hamming_window(frames.shape[1]), cfg.lp_order)
    return _feature(lp_cepstra(r, cfg.lp_order, cfg.n_ceps), "lpcc", cfg)


def equal_loudness(f):
    """Equal-loudness weighting (angular-frequency form)."""
    w2 = (2.0 * np.pi * np.asarray(f, dtype=np.float64)) ** 2
    return (w2 + 56.8e6) * w2**2 / ((w2 + 6.3e6) ** 2 * (w2 + 0.38e9))


def plp_autocorrelation(auditory, max_lag):
    """Autocorrelation of a compressed auditory spectrum by inverse DFT.

    The band edges are duplicated so the spectrum spans DC to Nyquist.
    """
    padded = np.concatenate([auditory[:, :1], auditory, auditory[:, -1:]], axis=1)
    n = 2 * (padded.shape[1] - 1)
    if max_lag >= n:
        raise ValueError(f"LP order {max_lag} too high for {auditory.shape[1]} bands")
    return np.fft.irfft(padded, n)[:, : max_lag + 1]


def plpcc(w: Waveform, cfg: Optional[CepstralConfig] = None) -> FeatureMatrix:
    cfg = cfg or CepstralConfig()
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    fb = make_filterbank("bark", cfg.n_filters, cfg.n_fft, w.sample_rate_hz, cfg.f_lo, cfg.f_hi)
    bands = hamming_power(frames, cfg.n_fft) @ fb.weights.T
    auditory = np.cbrt(bands * equal_loudness(fb.center_freqs_hz))
    r = plp_autocorrelation(auditory, cfg.lp_order)
    return _feature(lp_cepstra(r, cfg.lp_order, cfg.n_ceps), "plpcc", cfg)


def subband_centroids(power, weights, freqs_hz, centers_hz):
    """Frequency centroid of each subband; empty subbands fall back to their centre."""
    num = power @ (weights * freqs_hz).T
    den = power @ weights.T
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return np.where(den > 0, out, centers_hz[None, :])


def scfc(w: Waveform, cfg: Optional[CepstralConfig] = None) -> FeatureMatrix:
    """Subband centroid frequencies in Hz, used directly as features."""
    cfg = cfg or CepstralConfig()
    fs = w.sample_rate_hz
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    fb = make_filterbank("linear", cfg.n_filters, cfg.n_fft, fs, cfg.f_lo, cfg.f_hi)
    freqs = np.arange(cfg.n_fft // 2 + 1) * fs / cfg.n_fft
    power = hamming_power(frames, cfg.n_fft)
    return _feature(subband_centroids(power, fb.weights, freqs, fb.center_freqs_hz), "scfc", cfg)


def subband_centroid_magnitudes(power, weights):
    """Frequency-weighted mean power per subband, weights ``k / n_bins``."""
    n_bins = weights.shape[1]
    fw = weights * (np.arange(n_bins) / n_bins)
    return (power @ fw.T) / fw.sum(axis=1)


def scmc(w: Waveform, cfg: Optional[CepstralConfig] = None) -> FeatureMatrix:
    cfg = cfg or CepstralConfig()
    _check_ceps(cfg)
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    fb = make_filterbank("linear", cfg.n_filters, cfg.n_fft, w.sample_rate_hz, cfg.f_lo, cfg.f_hi)
    scm = subband_centroid_magnitudes(hamming_power(frames, cfg.n_fft), fb.weights)
    return _feature(dct2(log_floor(scm), cfg.n_ceps), "scmc", cfg)


def cqt_for(w, cfg):
    fs = w.sample_rate_hz
    f_max = cfg.f_max or fs / 2.0
    f_min = f_max / 2.0**cfg.n_octaves
    return cqt(
        w,
        f_min,
        f_max,
        cfg.bins_per_octave,
        hop_ms=cfg.shift_ms,
        frame_ms=cfg.frame_ms,
        sidelobes=cfg.sidelobes,
    )


def uniform_resample(log_power, freqs, n_points):
    """Linear interpolation from geometric bin centres onto a uniform Hz grid."""
    grid = np.linspace(freqs[0], freqs[-1], n_points)
    hi = np.clip(np.searchsorted(freqs, grid, side="right"), 1, freqs.size - 1)
    lo = hi - 1
    frac = (grid - freqs[lo]) / (freqs[hi] - freqs[lo])
    return log_power[:, lo] * (1.0 - frac) + log_power[:, hi] * frac


def cqcc(w: Waveform, cfg: Optional[CqccConfig] = None, spectrum=None) -> FeatureMatrix:
    """Constant-Q cepstra; pass ``spectrum`` to reuse a CQT already computed with ``cqt_for``."""
    cfg = cfg or CqccConfig()
    cq = spectrum if spectrum is not None else cqt_for(w, cfg)
    log_power = log_floor(cq.magnitude**2)
    resampled = uniform_resample(log_power, cq.freqs_hz, cfg.n_uniform)
    return FeatureMatrix(dct2(resampled, cfg.n_ceps), "cqcc", cfg.shift_ms)
