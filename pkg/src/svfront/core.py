"""Shared DSP substrate: framing, windows, transforms, filterbanks, LP, CQT."""

from dataclasses import dataclass, field
from typing import FrozenSet, Tuple

import numpy as np
import scipy.fft
import scipy.signal

from . import kernels

LOG_FLOOR = 1e-10
PRE_EMPHASIS = 0.97
FRAME_MS = 25.0
SHIFT_MS = 10.0


class EmptyInputError(ValueError):
    """Signal too short to produce a single analysis frame."""


class SilentFrameError(ValueError):
    """Linear prediction requested on a frame with no energy."""


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("waveform must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(x)):
            raise ValueError("waveform contains non-finite samples")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample rate must be positive")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate_hz


@dataclass
class FrameMatrix:
    frames: np.ndarray
    frame_len_samples: int
    frame_shift_samples: int
    sample_rate_hz: int

    @property
    def n_frames(self):
        return self.frames.shape[0]


@dataclass
class TaperSet:
    tapers: np.ndarray
    weights: np.ndarray


@dataclass
class ComplexSpectrogram:
    real_part: np.ndarray
    imag_part: np.ndarray
    n_fft: int
    sample_rate_hz: int

    @property
    def complex(self):
        return self.real_part + 1j * self.imag_part


@dataclass
class PowerSpectrogram:
    power: np.ndarray


@dataclass
class FilterBank:
    weights: np.ndarray
    scale: str
    center_freqs_hz: np.ndarray

    @property
    def n_filters(self):
        return self.weights.shape[0]


@dataclass
class LpModel:
    """All-pole model with ``A(z) = 1 + sum(a_i z^-i)``."""

    order: int
    coeffs: np.ndarray
    residual_energy: float


@dataclass
class CqtSpectrogram:
    magnitude: np.ndarray
    phase: np.ndarray
    bins_per_octave: int
    f_min_hz: float
    freqs_hz: np.ndarray
    frame_shift_ms: float


@dataclass
class FeatureMatrix:
    values: np.ndarray
    kind: str
    frame_shift_ms: float = SHIFT_MS
    source_id: str = ""
    cmn_exempt: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def n_frames(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]


# -- framing and windows ---------------------------------------------------


def ms_to_samples(ms, fs):
    return int(round(ms * fs / 1000.0))


def pre_emphasis(x, coeff=PRE_EMPHASIS):
    """``y[n] = x[n] - coeff * x[n-1]``; ``y[0] = x[0]``."""
    x = np.asarray(x, dtype=np.float64)
    if not coeff:
        return x.copy()
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:] = x[1:] - coeff * x[:-1]
    return y


def frame_count(n_samples, frame_len, shift):
    if n_samples < frame_len:
        return 0
    return 1 + (n_samples - frame_len) // shift


def frame_array(x, frame_len, shift):
    n = frame_count(x.size, frame_len, shift)
    if n == 0:
        raise EmptyInputError(
            f"signal of {x.size} samples is shorter than one {frame_len}-sample frame"
        )
    view = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::shift]
    return np.ascontiguousarray(view[:n])


def frame_signal(w, frame_ms=FRAME_MS, shift_ms=SHIFT_MS):
    """Cut ``w`` into overlapping frames; the trailing partial frame is dropped."""
    if not frame_ms >= shift_ms > 0:
        raise ValueError("need frame_ms >= shift_ms > 0")
    fs = w.sample_rate_hz
    frame_len = ms_to_samples(frame_ms, fs)
    shift = ms_to_samples(shift_ms, fs)
    return FrameMatrix(frame_array(w.samples, frame_len, shift), frame_len, shift, fs)


def hamming_window(n):
    """Symmetric Hamming window."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    if n == 1:
        return np.ones(1)
    t = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * t / (n - 1))


def swce_weights(k):
    w = np.cos(np.pi * np.arange(1, k + 1) / (2.0 * (k + 1))) ** 2
    return w / w.sum()


def sine_tapers(n, k, weighting="swce"):
    """Orthonormal sine tapers with SWCE (default) or uniform weights."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    j = np.arange(1, k + 1)[:, None]
    t = np.arange(n)[None, :]
    tapers = np.sqrt(2.0 / (n + 1)) * np.sin(np.pi * j * (t + 1) / (n + 1))
    if weighting == "swce":
        weights = swce_weights(k)
    elif weighting == "uniform":
        weights = np.full(k, 1.0 / k)
    else:
        raise ValueError(f"unknown taper weighting {weighting!r}")
    return TaperSet(tapers, weights)


# -- spectra -----------------------------------------------------------------


def _check_nfft(n_fft, frame_len):
    if n_fft < frame_len:
        raise ValueError(f"n_fft={n_fft} is smaller than the frame length {frame_len}")
    if n_fft & (n_fft - 1):
        raise ValueError(f"n_fft={n_fft} is not a power of two")


def rfft_frames(frames, window, n_fft):
    frames = np.asarray(frames, dtype=np.float64)
    _check_nfft(n_fft, frames.shape[-1])
    return np.fft.rfft(frames * window, n_fft)


def dft_complex(frames, window, n_fft):
    spec = rfft_frames(frames.frames, window, n_fft)
    return ComplexSpectrogram(spec.real.copy(), spec.imag.copy(), n_fft, frames.sample_rate_hz)


def power_spectrum(spec):
    return PowerSpectrogram(spec.real_part**2 + spec.imag_part**2)


def multitaper_power(frames, tapers, weights, n_fft):
    frames = np.asarray(frames, dtype=np.float64)
    if tapers.shape[1] != frames.shape[1]:
        raise ValueError(
            f"taper length {tapers.shape[1]} does not match frame length {frames.shape[1]}"
        )
    _check_nfft(n_fft, frames.shape[1])
    out = np.zeros((frames.shape[0], n_fft // 2 + 1))
    for taper, lam in zip(tapers, weights):
        spec = np.fft.rfft(frames * taper, n_fft)
        out += lam * (spec.real**2 + spec.imag**2)
    return out


def multitaper_spectrum(frames, tapers, n_fft):
    """Weighted sum of single-taper periodograms."""
    return PowerSpectrogram(multitaper_power(frames.frames, tapers.tapers, tapers.weights, n_fft))


def dct2(x, n_out=None):
    """Orthonormal DCT-II along the last axis, truncated to ``n_out`` terms."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if n_out is None:
        n_out = n
    if n_out > n:
        raise ValueError(f"cannot keep {n_out} coefficients from a length-{n} input")
    return scipy.fft.dct(x, type=2, norm="ortho", axis=-1)[..., :n_out]


def idct2(c):
    return scipy.fft.idct(np.asarray(c, dtype=np.float64), type=2, norm="ortho", axis=-1)


def log_floor(x):
    return np.log(np.maximum(x, LOG_FLOOR))


# -- filterbanks -------------------------------------------------------------


def hz_to_mel(f):
    return 1127.0 * np.log1p(np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * np.expm1(np.asarray(m, dtype=np.float64) / 1127.0)


def hz_to_bark(f):
    return 6.0 * np.arcsinh(np.asarray(f, dtype=np.float64) / 600.0)


def bark_to_hz(b):
    return 600.0 * np.sinh(np.asarray(b, dtype=np.float64) / 6.0)


def hz_to_erb_rate(f):
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f, dtype=np.float64))


def erb_rate_to_hz(e):
    return (10.0 ** (np.asarray(e, dtype=np.float64) / 21.4) - 1.0) / 0.00437


def erb_bandwidth(f):
    return 24.7 + 0.108 * np.asarray(f, dtype=np.float64)


_WARPS = {
    "mel": (hz_to_mel, mel_to_hz),
    "bark": (hz_to_bark, bark_to_hz),
    "linear": (lambda f: np.asarray(f, dtype=np.float64), lambda f: np.asarray(f, dtype=np.float64)),
}


def make_filterbank(scale, n_filters, n_fft, fs, f_lo=20.0, f_hi=None):
    """Triangular (mel/bark/linear) or gammatone filterbank on the rfft grid.

    Triangles are linear in Hz between centres spaced uniformly on the warped
    scale.  The gammatone rows are 4th-order magnitude responses
    ``(1 + ((f - fc) / b)^2)^-2`` with ``b = 1.019 * ERB(fc)``.
    """
    if f_hi is None:
        f_hi = fs / 2.0
    if not 0.0 <= f_lo < f_hi <= fs / 2.0:
        raise ValueError(f"invalid band edges [{f_lo}, {f_hi}] for fs={fs}")
    if n_filters < 1:
        raise ValueError("n_filters must be >= 1")
    freqs = np.arange(n_fft // 2 + 1) * fs / n_fft

    if scale == "gammatone":
        centers = erb_rate_to_hz(np.linspace(hz_to_erb_rate(f_lo), hz_to_erb_rate(f_hi), n_filters))
        b = 1.019 * erb_bandwidth(centers)
        weights = (1.0 + ((freqs[None, :] - centers[:, None]) / b[:, None]) ** 2) ** -2.0
        return FilterBank(weights, scale, centers)

    if scale not in _WARPS:
        raise ValueError(f"unknown filterbank scale {scale!r}")
    warp, unwarp = _WARPS[scale]
    edges = unwarp(np.linspace(warp(f_lo), warp(f_hi), n_filters + 2))
    left, center, right = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - left) / (center - left)
    falling = (right - freqs) / (right - center)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    empty = ~np.any(weights > 0, axis=1)
    if np.any(empty):
        raise ValueError(
            f"{int(empty.sum())} of {n_filters} {scale} filters cover no FFT bin; "
            "use fewer filters or a larger n_fft"
        )
    return FilterBank(weights, scale, edges[1:-1].copy())


def filter_support_hz(fb):
    """(low, high) frequency interval where each filter row is positive."""
    return _support(fb.weights, fb.weights.shape[1])


def _support(weights, n_bins):
    pos = weights > 0
    lo = np.argmax(pos, axis=1)
    hi = n_bins - 1 - np.argmax(pos[:, ::-1], axis=1)
    return lo, hi


# -- linear prediction ---------------------------------------------------------


def autocorrelation(frames, max_lag):
    """Biased autocorrelation ``r[l] = sum_n x[n] x[n+l]`` for ``l <= max_lag``."""
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    n = frames.shape[1]
    n_fft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(frames, n_fft)
    r = np.fft.irfft(spec.real**2 + spec.imag**2, n_fft)[:, : max_lag + 1]
    if max_lag >= n:
        r[:, n:] = 0.0
    return r


def levinson_durbin(autocorr, order):
    """Solve the Toeplitz normal equations for an order-``order`` predictor."""
    r = np.asarray(autocorr, dtype=np.float64)
    if r.size < order + 1:
        raise ValueError(f"need {order + 1} autocorrelation lags, got {r.size}")
    if r[0] <= kernels.SILENT_R0:
        raise SilentFrameError("autocorrelation at lag 0 is not positive")
    coeffs, err = kernels.levinson_batch(r[None, : order + 1], order)
    return LpModel(order, coeffs[0], float(err[0]))


def lpc_cepstrum_batch(coeffs, n_ceps):
    """Cepstrum ``c_1..c_n_ceps`` of ``1/A(z)`` for each row of ``coeffs``."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    p = coeffs.shape[1]
    a = np.zeros((coeffs.shape[0], max(n_ceps, p) + 1))
    a[:, 1 : p + 1] = coeffs
    c = np.zeros((coeffs.shape[0], n_ceps + 1))
    for n in range(1, n_ceps + 1):
        k = np.arange(1, n)
        acc = (c[:, 1:n] * a[:, n - k] * k).sum(axis=1) if n > 1 else 0.0
        c[:, n] = -a[:, n] - acc / n
    return c[:, 1:]


def lpc_to_cepstrum(lp, n_ceps):
    """LP cepstrum indexed by quefrency: element 0 is ``ln(residual_energy)``."""
    if n_ceps < 1:
        raise ValueError("n_ceps must be >= 1")
    if lp.residual_energy <= 0:
        raise ValueError("residual energy must be positive")
    out = np.empty(n_ceps + 1)
    out[0] = np.log(lp.residual_energy)
    out[1:] = lpc_cepstrum_batch(lp.coeffs, n_ceps)[0]
    return out


def analytic_signal(x) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(x, H{x})`` using the FFT (one-sided spectrum) method."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError("analytic signal needs at least 2 samples")
    z = scipy.signal.hilbert(x)
    return x, z.imag


# -- constant-Q transform ------------------------------------------------------


def cqt_frequencies(f_min, f_max, bins_per_octave):
    n_bins = int(np.ceil(bins_per_octave * np.log2(f_max / f_min) - 1e-9))
    return f_min * 2.0 ** (np.arange(n_bins) / bins_per_octave)


def cqt_window_lengths(freqs, fs, bins_per_octave):
    q = 1.0 / (2.0 ** (1.0 / bins_per_octave) - 1.0)
    return np.ceil(q * fs / freqs).astype(np.int64)


def _hann_centered(n_k):
    half = (n_k + 1) // 2 - 1
    u = np.arange(-half, half + 1)
    return np.cos(np.pi * u / n_k) ** 2


def cqt(
    w,
    f_min,
    f_max=None,
    bins_per_octave=96,
    hop_ms=SHIFT_MS,
    frame_ms=FRAME_MS,
    method="fft",
    sidelobes=16,
):
    """Constant-Q transform evaluated at the centres of the STFT frames.

    Bin ``k`` sits at ``f_min * 2**(k/B)`` and correlates the signal with a
    centred Hann window of ``ceil(Q fs / f_k)`` samples modulated to ``f_k``;
    coefficients are normalised by the window sum and the phase is referred
    to the frame centre.  ``method="direct"`` evaluates the inner products
    literally; ``"fft"`` evaluates the same sums in the frequency domain with
    each kernel spectrum cut off ``sidelobes`` main-lobe half-widths from its
    centre.
    """
    fs = w.sample_rate_hz
    if f_max is None:
        f_max = fs / 2.0
    if not 0.0 < f_min < f_max <= fs / 2.0:
        raise ValueError(f"invalid CQT band [{f_min}, {f_max}] for fs={fs}")
    if bins_per_octave < 1:
        raise ValueError("bins_per_octave must be >= 1")
    x = w.samples
    frame_len = ms_to_samples(frame_ms, fs)
    hop = ms_to_samples(hop_ms, fs)
    n_frames = frame_count(x.size, frame_len, hop)
    if n_frames == 0:
        raise EmptyInputError(f"signal of {x.size} samples is shorter than one frame")
    freqs = cqt_frequencies(f_min, f_max, bins_per_octave)
    lengths = cqt_window_lengths(freqs, fs, bins_per_octave)
    half = (lengths + 1) // 2 - 1
    norms = np.array([_hann_centered(n).sum() for n in lengths])
    omega = 2.0 * np.pi * freqs / fs
    offset = frame_len // 2

    if method == "direct":
        pad = int(half.max())
        xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
        centers = offset + hop * np.arange(n_frames) + pad
        coef = np.empty((n_frames, freqs.size), dtype=np.complex128)
        for b in range(freqs.size):
            h = int(half[b])
            u = np.arange(-h, h + 1)
            kernel = _hann_centered(lengths[b]) * np.exp(-1j * omega[b] * u)
            idx = centers[:, None] + u[None, :]
            coef[:, b] = xp[idx] @ kernel
    elif method == "fft":
        n_fold = scipy.fft.next_fast_len(int(np.ceil((x.size + half.max() + 1) / hop)))
        n_fold = max(n_fold, n_frames)
        n_fft = hop * n_fold
        spec = np.fft.fft(x, n_fft)
        spec *= np.exp(2j * np.pi * np.arange(n_fft) * (offset / n_fft))
        q_center = freqs / fs * n_fft
        reach = np.ceil(sidelobes * 2.0 * n_fft / lengths)
        reach = np.minimum(reach, n_fft // 2)
        q_lo = np.floor(q_center - reach).astype(np.int64)
        q_hi = q_lo + np.minimum(np.ceil(q_center + reach).astype(np.int64) - q_lo, n_fft - 1)
        folded = kernels.cqt_fold(
            spec, omega, lengths.astype(np.float64), half, q_lo, q_hi, n_fft, n_fold
        )
        coef = (np.fft.ifft(folded, axis=1)[:, :n_frames] / hop).T
    else:
        raise ValueError(f"unknown CQT method {method!r}")

    coef = coef / norms
    mag = np.abs(coef)
    phase = np.angle(coef)
    phase[phase <= -np.pi] = np.pi
    return CqtSpectrogram(mag, phase, bins_per_octave, float(f_min), freqs, hop_ms)


def regression_delta(x, window=2):
    """``sum_t t (x[n+t] - x[n-t]) / (2 sum_t t^2)`` along axis 0, edges replicated."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    idx = np.arange(n)
    out = np.zeros_like(x)
    for t in range(1, window + 1):
        out += t * (x[np.minimum(idx + t, n - 1)] - x[np.maximum(idx - t, 0)])
    return out / (2.0 * sum(t * t for t in range(1, window + 1)))
