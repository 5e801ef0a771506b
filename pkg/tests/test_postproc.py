import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import FS, harmonic_tone, tone
from svfront.core import FeatureMatrix, Waveform
from svfront.pitch import PitchTrack, extract_pitch
from svfront.postproc import append_pitch, apply_mask, cmn, deltas, postprocess, sad_mask
from svfront.spectral import mfcc

finite = st.floats(-1e3, 1e3, allow_nan=False)
matrices = arrays(np.float64, st.tuples(st.integers(1, 40), st.integers(1, 8)), elements=finite)


def test_sad_all_zero():
    m = sad_mask(Waveform(np.zeros(FS), FS))
    assert len(m) == 98 and m.n_kept == 0


def test_sad_full_scale_tone():
    assert sad_mask(Waveform(tone(440.0, amp=1.0), FS)).keep.all()


def test_sad_bursts():
    burst, gap = tone(300.0, 0.3, amp=0.5), np.zeros(int(0.3 * FS))
    x = np.concatenate([gap, burst, gap, burst, gap])
    keep = sad_mask(Waveform(x, FS)).keep
    starts = np.arange(keep.size) * 160
    in_burst = ((starts + 400 > 4800) & (starts < 9600)) | ((starts + 400 > 14400) & (starts < 19200))
    mismatch = np.flatnonzero(keep != in_burst)
    edges = [30, 60, 90, 120]
    assert all(min(abs(i - e) for e in edges) <= 2 for i in mismatch)
    assert keep.sum() > 50


def test_sad_is_level_dependent():
    x = tone(300.0, amp=1e-6)
    assert sad_mask(Waveform(x, FS)).n_kept == 0
    assert sad_mask(Waveform(x * 1e5, FS)).n_kept == len(sad_mask(Waveform(x, FS)))


def test_apply_mask_length_check():
    f = FeatureMatrix(np.zeros((5, 2)), "x")
    with pytest.raises(ValueError):
        apply_mask(f, sad_mask(Waveform(np.zeros(FS), FS)))


@given(matrices)
def test_cmn_zero_means_and_idempotent(v):
    f = cmn(FeatureMatrix(v, "x"))
    assert np.all(np.abs(f.values.mean(axis=0)) < 1e-9 * max(1.0, np.abs(v).max()))
    assert np.allclose(cmn(f).values, f.values, atol=1e-12 * max(1.0, np.abs(v).max()))


def test_cmn_exempt_untouched(rng):
    v = rng.standard_normal((20, 33))
    out = cmn(FeatureMatrix(v, "x"), {30, 31, 32}).values
    assert np.array_equal(out[:, 30:], v[:, 30:])
    assert np.allclose(out[:, :30].mean(axis=0), 0.0)


def test_cmn_constant_and_empty():
    assert not cmn(FeatureMatrix(np.full((5, 3), 7.0), "x")).values.any()
    with pytest.raises(ValueError):
        cmn(FeatureMatrix(np.zeros((0, 3)), "x"))


def test_deltas_constant_and_ramp():
    const = deltas(FeatureMatrix(np.full((10, 30), 4.0), "x"), 2).values
    assert const.shape == (10, 90) and not const[:, 30:].any()
    ramp = deltas(FeatureMatrix(2.5 * np.arange(12.0)[:, None] * np.ones((1, 30)), "x"), 1).values
    assert ramp.shape == (12, 60)
    assert np.array_equal(ramp[2:-2, 30:], np.full((8, 30), 2.5))


def test_deltas_time_reversal(rng):
    v = rng.standard_normal((30, 4))
    fwd = deltas(FeatureMatrix(v, "x")).values[:, 4:]
    rev = deltas(FeatureMatrix(v[::-1].copy(), "x")).values[:, 4:]
    assert np.allclose(rev[::-1][2:-2], -fwd[2:-2])


def test_deltas_errors():
    with pytest.raises(ValueError):
        deltas(FeatureMatrix(np.zeros((4, 3)), "x"))
    with pytest.raises(ValueError):
        deltas(FeatureMatrix(np.zeros((9, 3)), "x"), 3)


def test_append_pitch():
    w = Waveform(harmonic_tone(150.0), FS)
    f = mfcc(w)
    out = append_pitch(f, extract_pitch(w))
    assert out.values.shape == (98, 33)
    assert np.array_equal(out.values[:, :30], f.values)
    assert out.cmn_exempt == frozenset({30, 31, 32})
    normed = cmn(out)
    assert np.array_equal(normed.values[:, 30:], out.values[:, 30:])


def test_append_pitch_mismatch():
    f = FeatureMatrix(np.zeros((10, 30)), "mfcc")
    p = PitchTrack(np.zeros(9), np.zeros(9), np.zeros(9))
    with pytest.raises(ValueError):
        append_pitch(f, p)


def test_postprocess_sad_before_cmn():
    x = np.concatenate([np.zeros(FS // 2), tone(500.0, 1.0)])
    w = Waveform(x, FS)
    f = mfcc(w)
    out = postprocess(f, w)
    keep = sad_mask(w).keep
    assert out.n_frames == keep.sum()
    assert np.allclose(out.values, f.values[keep] - f.values[keep].mean(axis=0))
