"""Short-term phase extractors: MGDF, APGDF, cosphase, CMPOC."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    FRAME_MS,
    LOG_FLOOR,
    PRE_EMPHASIS,
    SHIFT_MS,
    FeatureMatrix,
    Waveform,
    autocorrelation,
    dct2,
    hamming_window,
    log_floor,
    rfft_frames,
)
from .spectral import CqccConfig, cqt_for, frames_of
from . import kernels


@dataclass
class MgdfConfig:
    alpha: float = 0.4
    gamma: float = 0.9
    smoothing: Optional[int] = 30
    n_ceps: int = 30
    n_fft: int = 512
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


@dataclass
class ApgdfConfig:
    lp_order: int = 30
    n_ceps: int = 30
    n_fft: int = 512
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS


@dataclass
class CosphaseConfig:
    n_ceps: int = 30
    n_fft: int = 512
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS
    preemph: float = PRE_EMPHASIS


@dataclass
class CmpocConfig(CqccConfig):
    n_ceps: int = 30


def cepstral_smooth(magnitude, n_lifter, n_fft):
    """Keep the first ``n_lifter`` real-cepstrum terms of ``ln|X|``."""
    ceps = np.fft.irfft(log_floor(magnitude), n_fft)
    ceps[:, n_lifter : n_fft - n_lifter + 1] = 0.0
    return np.exp(np.fft.rfft(ceps, n_fft).real)


def group_delay_terms(frames, window, n_fft):
    """Return ``(X, X_R*Y_R + X_I*Y_I)`` where ``Y`` is the DFT of ``n x(n)``."""
    x = np.asarray(frames, dtype=np.float64) * window
    spec_x = np.fft.rfft(x, n_fft)
    spec_y = np.fft.rfft(x * np.arange(x.shape[1]), n_fft)
    num = spec_x.real * spec_y.real + spec_x.imag * spec_y.imag
    return spec_x, num


def modified_group_delay(frames, window, n_fft, alpha, gamma, smoothing=30):
    """Modified group delay per bin; ``smoothing=None`` uses the raw ``|X|``.

    The whole cross term is divided by ``S^(2 gamma)`` before the exponent.
    """
    spec_x, num = group_delay_terms(frames, window, n_fft)
    mag = np.abs(spec_x)
    s = mag if smoothing is None else cepstral_smooth(mag, smoothing, n_fft)
    s = np.maximum(s, LOG_FLOOR)
    return np.sign(num) * np.abs(num / s ** (2.0 * gamma)) ** alpha


def mgdf(w: Waveform, cfg: Optional[MgdfConfig] = None) -> FeatureMatrix:
    cfg = cfg or MgdfConfig()
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    tau = modified_group_delay(
        frames, hamming_window(frames.shape[1]), cfg.n_fft, cfg.alpha, cfg.gamma, cfg.smoothing
    )
    return FeatureMatrix(dct2(tau, cfg.n_ceps), "mgdf", cfg.shift_ms)


def allpole_group_delay(coeffs, n_fft):
    """Group delay of ``1/A`` from predictor rows ``a_1..a_p`` (A = 1 + sum a_i z^-i)."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    seq = np.concatenate([np.ones((coeffs.shape[0], 1)), coeffs], axis=1)
    spec_a, num = group_delay_terms(seq, 1.0, n_fft)
    mag2 = np.maximum(spec_a.real**2 + spec_a.imag**2, LOG_FLOOR)
    return -num / mag2


def apgdf(w: Waveform, cfg: Optional[ApgdfConfig] = None) -> FeatureMatrix:
    cfg = cfg or ApgdfConfig()
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    r = autocorrelation(frames * hamming_window(frames.shape[1]), cfg.lp_order)
    coeffs, _ = kernels.levinson_batch(r, cfg.lp_order)
    tau = allpole_group_delay(coeffs, cfg.n_fft)
    return FeatureMatrix(dct2(tau, cfg.n_ceps), "apgdf", cfg.shift_ms)


def unwrap_phase(spec, floor=LOG_FLOOR):
    """Unwrap along frequency; bins with ``|X| < floor`` inherit the previous bin."""
    spec = np.atleast_2d(spec)
    phase = np.angle(spec)
    tiny = np.abs(spec) < floor
    phase[:, 0] = np.where(tiny[:, 0], 0.0, phase[:, 0])
    idx = np.where(tiny, 0, np.arange(spec.shape[1]))
    idx = np.maximum.accumulate(idx, axis=1)
    return np.unwrap(np.take_along_axis(phase, idx, axis=1), axis=1)


def cosphase(w: Waveform, cfg: Optional[CosphaseConfig] = None) -> FeatureMatrix:
    cfg = cfg or CosphaseConfig()
    frames = frames_of(w, cfg.frame_ms, cfg.shift_ms, cfg.preemph)
    spec = rfft_frames(frames, hamming_window(frames.shape[1]), cfg.n_fft)
    return FeatureMatrix(dct2(np.cos(unwrap_phase(spec)), cfg.n_ceps), "cosphase", cfg.shift_ms)


def magnitude_phase_spectrum(magnitude, phase):
    """``sqrt(ln(|X|)^2 + phi^2)`` with ``|X|`` floored."""
    return np.sqrt(log_floor(magnitude) ** 2 + np.asarray(phase) ** 2)


def octave_allocation(n_octaves, n_ceps):
    """Coefficients kept per octave: as even as possible, extras to low octaves."""
    base, extra = divmod(n_ceps, n_octaves)
    return [base + (1 if o < extra else 0) for o in range(n_octaves)]


def octave_cepstra(mps, bins_per_octave, n_ceps):
    """Log + DCT within each octave; blocks concatenated lowest octave first."""
    n_bins = mps.shape[1]
    starts = list(range(0, n_bins, bins_per_octave))
    keep = octave_allocation(len(starts), n_ceps)
    blocks = []
    for start, k in zip(starts, keep):
        if k == 0:
            continue
        seg = mps[:, start : start + bins_per_octave]
        blocks.append(dct2(log_floor(seg), min(k, seg.shape[1])))
    return np.concatenate(blocks, axis=1)


def cmpoc(w: Waveform, cfg: Optional[CmpocConfig] = None, spectrum=None) -> FeatureMatrix:
    cfg = cfg or CmpocConfig()
    cq = spectrum if spectrum is not None else cqt_for(w, cfg)
    mps = magnitude_phase_spectrum(cq.magnitude, cq.phase)
    return FeatureMatrix(octave_cepstra(mps, cq.bins_per_octave, cfg.n_ceps), "cmpoc", cfg.shift_ms)
