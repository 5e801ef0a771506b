"""Energy SAD, utterance CMN, regression deltas and pitch appending."""

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    FRAME_MS,
    LOG_FLOOR,
    SHIFT_MS,
    FeatureMatrix,
    Waveform,
    frame_count,
    ms_to_samples,
    regression_delta,
)
from .pitch import PitchTrack

# energies are measured on the 16-bit integer scale, as in common VAD recipes
PCM16_SCALE = 32768.0
DELTA_WINDOW = 2


@dataclass(frozen=True)
class SadConfig:
    threshold: float = 5.5
    mean_scale: float = 0.5
    frame_ms: float = FRAME_MS
    shift_ms: float = SHIFT_MS


@dataclass(frozen=True)
class SadMask:
    keep: np.ndarray

    def __len__(self):
        return self.keep.size

    @property
    def n_kept(self):
        return int(self.keep.sum())


def frame_log_energy(w: Waveform, frame_ms=FRAME_MS, shift_ms=SHIFT_MS):
    """``ln(sum x^2)`` per frame with samples scaled to the PCM16 range."""
    fs = w.sample_rate_hz
    n, h = ms_to_samples(frame_ms, fs), ms_to_samples(shift_ms, fs)
    n_frames = frame_count(w.samples.size, n, h)
    if n_frames == 0:
        return np.zeros(0)
    x = w.samples * PCM16_SCALE
    c = np.concatenate([[0.0], np.cumsum(x * x)])
    starts = np.arange(n_frames) * h
    energy = c[starts + n] - c[starts]
    return np.log(np.maximum(energy, LOG_FLOOR))


def sad_mask(w: Waveform, cfg: SadConfig = None) -> SadMask:
    """Keep frames whose log-energy exceeds ``threshold + mean_scale * mean``.

    The threshold is absolute, so the decision depends on input level.
    """
    cfg = cfg or SadConfig()
    e = frame_log_energy(w, cfg.frame_ms, cfg.shift_ms)
    if e.size == 0:
        return SadMask(np.zeros(0, dtype=bool))
    return SadMask(e > cfg.threshold + cfg.mean_scale * e.mean())


def apply_mask(f: FeatureMatrix, mask: SadMask) -> FeatureMatrix:
    if len(mask) != f.values.shape[0]:
        raise ValueError(f"mask has {len(mask)} frames, features have {f.values.shape[0]}")
    return replace(f, values=f.values[mask.keep])


def cmn(f: FeatureMatrix, exempt_dims=None) -> FeatureMatrix:
    """Subtract the utterance mean from every column not in ``exempt_dims``.

    ``exempt_dims`` defaults to the matrix's own ``cmn_exempt`` set.
    """
    if f.values.shape[0] == 0:
        raise ValueError("cannot normalise an empty feature matrix")
    exempt = f.cmn_exempt if exempt_dims is None else frozenset(exempt_dims)
    cols = np.array([d for d in range(f.values.shape[1]) if d not in exempt], dtype=int)
    out = f.values.copy()
    if cols.size:
        out[:, cols] -= out[:, cols].mean(axis=0)
    return replace(f, values=out)


def deltas(f: FeatureMatrix, order: int = 1) -> FeatureMatrix:
    """Append regression deltas (window 2): ``[static | d]`` or ``[static | d | dd]``."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    n = f.values.shape[0]
    if n < 2 * DELTA_WINDOW + 1:
        raise ValueError(f"need at least {2 * DELTA_WINDOW + 1} frames for deltas, got {n}")
    blocks = [f.values]
    for _ in range(order):
        blocks.append(regression_delta(blocks[-1], DELTA_WINDOW))
    return replace(f, values=np.concatenate(blocks, axis=1), kind=f"{f.kind}+d{order}")


def append_pitch(f: FeatureMatrix, p: PitchTrack) -> FeatureMatrix:
    """Concatenate (pov, log-pitch, delta-pitch); the new columns skip CMN."""
    n, d = f.values.shape
    if p.n_frames != n:
        raise ValueError(f"pitch has {p.n_frames} frames, features have {n}")
    values = np.concatenate([f.values, p.as_matrix()], axis=1)
    exempt = f.cmn_exempt | frozenset(range(d, d + 3))
    return replace(f, values=values, kind=f"{f.kind}+pitch", cmn_exempt=exempt)


def postprocess(f: FeatureMatrix, w: Waveform, sad=True, normalize=True, sad_cfg=None):
    """Drop SAD-rejected frames, then apply CMN to the surviving rows."""
    if sad:
        f = apply_mask(f, sad_mask(w, sad_cfg))
    if normalize and f.values.shape[0] > 0:
        f = cmn(f)
    return f
