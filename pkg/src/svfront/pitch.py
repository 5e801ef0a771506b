"""NCCF pitch tracker producing (pov, log-pitch, delta-pitch) per frame.

Peak picking is greedy per frame with an octave cost, followed by voicing
interpolation and median smoothing; there is no Viterbi search.  NCCF
values are rounded to single precision before any decision is taken, so
a change of input gain (which alters the correlations only by rounding
error) leaves the whole track bit-identical.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import median_filter

from .core import (
    FRAME_MS,
    SHIFT_MS,
    EmptyInputError,
    Waveform,
    frame_count,
    ms_to_samples,
    regression_delta,
)
from . import kernels

NCCF_EPS = 1e-10


@dataclass
class PitchConfig:
    f_min: float = 50.0
    f_max: float = 400.0
    octave_cost: float = 0.02
    voicing_threshold: float = 0.5
    median_width: int = 5
    delta_window: int = 2
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS


@dataclass
class PitchTrack:
    pov: np.ndarray
    log_pitch: np.ndarray
    delta_pitch: np.ndarray

    @property
    def n_frames(self):
        return self.pov.size

    @property
    def pitch_hz(self):
        return np.exp(self.log_pitch)

    def as_matrix(self):
        return np.stack([self.pov, self.log_pitch, self.delta_pitch], axis=1)


def _single(x):
    return np.asarray(x, dtype=np.float32).astype(np.float64)


def nccf(frame, lag, n_win=None, eps=NCCF_EPS):
    """Normalised cross-correlation of ``frame`` with itself shifted by ``lag``.

    Sums run over ``n < n_win`` (default: every ``n`` with ``n + lag`` in range).
    """
    x = np.asarray(frame, dtype=np.float64)
    if not 0 <= lag < x.size:
        raise ValueError(f"lag {lag} outside [0, {x.size})")
    if n_win is None:
        n_win = x.size - lag
    if n_win + lag > x.size:
        raise ValueError("window plus lag exceeds the frame")
    a, b = x[:n_win], x[lag : lag + n_win]
    return float(_single(np.dot(a, b) / np.sqrt(np.dot(a, a) * np.dot(b, b) + eps)))


def _pick_peaks(nc, lag_min, octave_cost):
    """Best (lag, value) per row from parabolically refined local maxima."""
    left, mid, right = nc[:, :-2], nc[:, 1:-1], nc[:, 2:]
    is_peak = (mid >= left) & (mid > right)
    curv = left - 2.0 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(curv < 0, 0.5 * (left - right) / curv, 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    value = mid - 0.25 * (left - right) * shift
    lags = lag_min + 1 + np.arange(mid.shape[1]) + shift
    score = np.where(is_peak, value - octave_cost * np.log2(lags / lag_min), -np.inf)
    best = np.argmax(score, axis=1)
    rows = np.arange(nc.shape[0])
    lag = lags[rows, best]
    val = value[rows, best]
    # rows without an interior maximum fall back to the raw argmax
    none = ~np.isfinite(score[rows, best])
    if np.any(none):
        raw = np.argmax(nc[none], axis=1)
        lag[none] = lag_min + raw
        val[none] = nc[none, raw]
    return lag, val


def _fill_unvoiced(log_f0, voiced):
    if not voiced.any() or voiced.all():
        return log_f0
    idx = np.arange(log_f0.size)
    return np.interp(idx, idx[voiced], log_f0[voiced])


def extract_pitch(w: Waveform, cfg: PitchConfig = None) -> PitchTrack:
    cfg = cfg or PitchConfig()
    fs = w.sample_rate_hz
    frame_len = ms_to_samples(cfg.frame_ms, fs)
    shift = ms_to_samples(cfg.shift_ms, fs)
    n_frames = frame_count(w.samples.size, frame_len, shift)
    if n_frames == 0:
        raise EmptyInputError(f"signal of {w.samples.size} samples is shorter than one frame")
    lag_min = int(np.floor(fs / cfg.f_max))
    lag_max = int(np.ceil(fs / cfg.f_min))
    # one spare lag on each side so the outermost candidates can be refined
    x = np.concatenate([w.samples, np.zeros(lag_max + 1)])
    seg = np.lib.stride_tricks.sliding_window_view(x, frame_len + lag_max + 1)[::shift][:n_frames]
    nc = _single(kernels.nccf_batch(seg, frame_len, lag_min - 1, lag_max + 1, NCCF_EPS))
    lag, peak = _pick_peaks(nc, lag_min - 1, cfg.octave_cost)
    pov = np.clip(peak, 0.0, 1.0)
    log_f0 = np.log(fs / lag)
    log_f0 = _fill_unvoiced(log_f0, pov >= cfg.voicing_threshold)
    log_f0 = median_filter(log_f0, size=cfg.median_width, mode="nearest")
    return PitchTrack(pov, log_f0, regression_delta(log_f0, cfg.delta_window))
