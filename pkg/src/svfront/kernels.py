"""Inner loops that dominate runtime.

Every kernel exists twice: a numba-compiled loop (``*_jit``) and a numpy
implementation (``*_numpy``).  The unsuffixed name dispatches according to
``svfront._accel.USE_NUMBA``.  Both paths must agree to rounding error; the
test suite checks this and ``benchmarks/bench_kernels.py`` times them.
"""

import numpy as np
from scipy.signal import lfilter

from ._accel import USE_NUMBA, njit

SILENT_R0 = 1e-12


# -- Levinson-Durbin, batched over frames ---------------------------------


@njit
def _levinson_loop(r, order):
    n_frames = r.shape[0]
    coeffs = np.zeros((n_frames, order))
    err = np.zeros(n_frames)
    a = np.zeros(order + 1)
    prev = np.zeros(order + 1)
    for f in range(n_frames):
        e = r[f, 0]
        if e <= SILENT_R0:
            continue
        a[:] = 0.0
        a[0] = 1.0
        for i in range(1, order + 1):
            acc = r[f, i]
            for j in range(1, i):
                acc += a[j] * r[f, i - j]
            k = -acc / e
            prev[:] = a
            for j in range(1, i):
                a[j] = prev[j] + k * prev[i - j]
            a[i] = k
            e_next = e * (1.0 - k * k)
            if e_next <= 0.0:
                # numerically singular; stop with the last valid model
                a[:] = prev
                break
            e = e_next
        for j in range(order):
            coeffs[f, j] = a[j + 1]
        err[f] = e
    return coeffs, err


def levinson_batch_jit(r, order):
    r = np.ascontiguousarray(r, dtype=np.float64)
    return _levinson_loop(r, int(order))


def levinson_batch_numpy(r, order):
    r = np.asarray(r, dtype=np.float64)
    n_frames = r.shape[0]
    a = np.zeros((n_frames, order + 1))
    a[:, 0] = 1.0
    e = r[:, 0].copy()
    live = e > SILENT_R0
    for i in range(1, order + 1):
        acc = r[:, i] + np.einsum("fj,fj->f", a[:, 1:i], r[:, i - 1 : 0 : -1])
        with np.errstate(divide="ignore", invalid="ignore"):
            k = np.where(live, -acc / np.where(live, e, 1.0), 0.0)
        e_next = e * (1.0 - k * k)
        live &= e_next > 0.0
        k = np.where(live, k, 0.0)
        a[:, 1:i] = a[:, 1:i] + k[:, None] * a[:, i - 1 : 0 : -1]
        a[:, i] = k
        e = np.where(live, e_next, e)
    silent = r[:, 0] <= SILENT_R0
    a[silent] = 0.0
    e[silent] = 0.0
    return a[:, 1:], e


# -- complex one-pole cascade (gammatone) ---------------------------------


@njit
def _gammatone_loop(x, poles, gains, order):
    n_ch = poles.shape[0]
    n = x.shape[0]
    out = np.empty((n_ch, n))
    state = np.zeros(order, dtype=np.complex128)
    for c in range(n_ch):
        p = poles[c]
        g = gains[c]
        state[:] = 0.0
        for t in range(n):
            v = g * x[t] + p * state[0]
            state[0] = v
            for s in range(1, order):
                v = v + p * state[s]
                state[s] = v
            out[c, t] = v.real
    return out


def gammatone_cascade_jit(x, poles, gains, order=4):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _gammatone_loop(
        x, np.asarray(poles, np.complex128), np.asarray(gains, np.float64), int(order)
    )


def gammatone_cascade_numpy(x, poles, gains, order=4):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((len(poles), x.shape[0]))
    for c, (p, g) in enumerate(zip(poles, gains)):
        y = lfilter([g], [1.0, -p], x.astype(np.complex128))
        for _ in range(order - 1):
            y = lfilter([1.0], [1.0, -p], y)
        out[c] = y.real
    return out


# -- PNCC recursions (frames x channels) ----------------------------------


@njit
def _asym_loop(q, lam_a, lam_b, init_scale):
    n_frames, n_ch = q.shape
    out = np.empty_like(q)
    for c in range(n_ch):
        prev = init_scale * q[0, c]
        for m in range(n_frames):
            v = q[m, c]
            if v >= prev:
                prev = lam_a * prev + (1.0 - lam_a) * v
            else:
                prev = lam_b * prev + (1.0 - lam_b) * v
            out[m, c] = prev
    return out


def asymmetric_lowpass_jit(q, lam_a=0.999, lam_b=0.5, init_scale=1.0):
    q = np.ascontiguousarray(q, dtype=np.float64)
    return _asym_loop(q, lam_a, lam_b, init_scale)


def asymmetric_lowpass_numpy(q, lam_a=0.999, lam_b=0.5, init_scale=1.0):
    q = np.asarray(q, dtype=np.float64)
    out = np.empty_like(q)
    prev = init_scale * q[0]
    for m in range(q.shape[0]):
        v = q[m]
        prev = np.where(
            v >= prev, lam_a * prev + (1.0 - lam_a) * v, lam_b * prev + (1.0 - lam_b) * v
        )
        out[m] = prev
    return out


@njit
def _masking_loop(q0, lam_t, mu_t):
    n_frames, n_ch = q0.shape
    out = np.empty_like(q0)
    for c in range(n_ch):
        peak = q0[0, c]
        out[0, c] = q0[0, c]
        for m in range(1, n_frames):
            v = q0[m, c]
            decayed = lam_t * peak
            if v >= decayed:
                out[m, c] = v
            else:
                out[m, c] = mu_t * peak
            peak = max(decayed, v)
    return out


def temporal_masking_jit(q0, lam_t=0.85, mu_t=0.2):
    q0 = np.ascontiguousarray(q0, dtype=np.float64)
    return _masking_loop(q0, lam_t, mu_t)


def temporal_masking_numpy(q0, lam_t=0.85, mu_t=0.2):
    q0 = np.asarray(q0, dtype=np.float64)
    out = np.empty_like(q0)
    peak = q0[0].copy()
    out[0] = q0[0]
    for m in range(1, q0.shape[0]):
        v = q0[m]
        decayed = lam_t * peak
        out[m] = np.where(v >= decayed, v, mu_t * peak)
        peak = np.maximum(decayed, v)
    return out


# -- NCCF over a lag range, batched over segments ---------------------------


@njit
def _nccf_loop(seg, n_win, lag_min, lag_max, eps):
    n_frames = seg.shape[0]
    n_lags = lag_max - lag_min + 1
    out = np.empty((n_frames, n_lags))
    for f in range(n_frames):
        e0 = 0.0
        for n in range(n_win):
            e0 += seg[f, n] * seg[f, n]
        el = 0.0
        for n in range(lag_min, lag_min + n_win):
            el += seg[f, n] * seg[f, n]
        for li in range(n_lags):
            lag = lag_min + li
            if li > 0:
                # slide the lagged-energy window by one sample
                el += seg[f, lag + n_win - 1] ** 2 - seg[f, lag - 1] ** 2
                if el < 0.0:
                    el = 0.0
            acc = 0.0
            for n in range(n_win):
                acc += seg[f, n] * seg[f, n + lag]
            out[f, li] = acc / np.sqrt(e0 * el + eps)
    return out


def _check_nccf_args(seg, n_win, lag_min, lag_max):
    if not 0 <= lag_min <= lag_max:
        raise ValueError("need 0 <= lag_min <= lag_max")
    if seg.shape[1] < n_win + lag_max:
        raise ValueError(f"segments of {seg.shape[1]} samples cannot hold window {n_win} at lag {lag_max}")


def nccf_batch_jit(seg, n_win, lag_min, lag_max, eps=1e-10):
    seg = np.ascontiguousarray(seg, dtype=np.float64)
    _check_nccf_args(seg, n_win, lag_min, lag_max)
    return _nccf_loop(seg, int(n_win), int(lag_min), int(lag_max), eps)


def nccf_batch_numpy(seg, n_win, lag_min, lag_max, eps=1e-10):
    seg = np.asarray(seg, dtype=np.float64)
    _check_nccf_args(seg, n_win, lag_min, lag_max)
    n_seg = seg.shape[1]
    n_fft = 1 << int(np.ceil(np.log2(n_seg + n_win)))
    head = np.fft.rfft(seg[:, :n_win], n_fft)
    full = np.fft.rfft(seg, n_fft)
    xcorr = np.fft.irfft(np.conj(head) * full, n_fft)[:, lag_min : lag_max + 1]
    e0 = np.sum(seg[:, :n_win] ** 2, axis=1)
    csum = np.concatenate([np.zeros((seg.shape[0], 1)), np.cumsum(seg**2, axis=1)], axis=1)
    lags = np.arange(lag_min, lag_max + 1)
    el = np.maximum(csum[:, lags + n_win] - csum[:, lags], 0.0)
    return xcorr / np.sqrt(e0[:, None] * el + eps)


if USE_NUMBA:
    levinson_batch = levinson_batch_jit
    gammatone_cascade = gammatone_cascade_jit
    asymmetric_lowpass = asymmetric_lowpass_jit
    temporal_masking = temporal_masking_jit
    nccf_batch = nccf_batch_jit
else:
    levinson_batch = levinson_batch_numpy
    gammatone_cascade = gammatone_cascade_numpy
    asymmetric_lowpass = asymmetric_lowpass_numpy
    temporal_masking = temporal_masking_numpy
    nccf_batch = nccf_batch_numpy


# -- constant-Q: banded kernel products folded onto the hop grid ----------


@njit
def _ratio(num, den, width):
    # odd width: the limit at every multiple of 2*pi is +width
    if abs(den) < 1e-12:
        return float(width)
    return num / den


@njit
def _cqt_fold_loop(spectrum, omega, win_len, half, q_lo, q_hi, n_fft, n_fold):
    n_bins = omega.shape[0]
    out = np.zeros((n_bins, n_fold), dtype=np.complex128)
    two_pi = 2.0 * np.pi
    for b in range(n_bins):
        width = 2 * half[b] + 1
        step = two_pi / win_len[b]
        cs, ss = np.cos(0.5 * step), np.sin(0.5 * step)
        cws, sws = np.cos(0.5 * width * step), np.sin(0.5 * width * step)
        for q in range(q_lo[b], q_hi[b] + 1):
            theta = two_pi * q / n_fft - omega[b]
            sA, cA = np.sin(0.5 * width * theta), np.cos(0.5 * width * theta)
            sa, ca = np.sin(0.5 * theta), np.cos(0.5 * theta)
            g = (
                0.5 * _ratio(sA, sa, width)
                + 0.25 * _ratio(sA * cws - cA * sws, sa * cs - ca * ss, width)
                + 0.25 * _ratio(sA * cws + cA * sws, sa * cs + ca * ss, width)
            )
            out[b, q % n_fold] += spectrum[q % n_fft] * g
    return out


def cqt_fold_jit(spectrum, omega, win_len, half, q_lo, q_hi, n_fft, n_fold):
    return _cqt_fold_loop(
        np.ascontiguousarray(spectrum, np.complex128),
        np.asarray(omega, np.float64),
        np.asarray(win_len, np.float64),
        np.asarray(half, np.int64),
        np.asarray(q_lo, np.int64),
        np.asarray(q_hi, np.int64),
        int(n_fft),
        int(n_fold),
    )


def _ratio_numpy(num, den, width):
    small = np.abs(den) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / np.where(small, 1.0, den)
    return np.where(small, float(width), val)


def cqt_fold_numpy(spectrum, omega, win_len, half, q_lo, q_hi, n_fft, n_fold):
    out = np.zeros((len(omega), n_fold), dtype=np.complex128)
    for b in range(len(omega)):
        width = 2 * int(half[b]) + 1
        step = 2.0 * np.pi / win_len[b]
        cs, ss = np.cos(0.5 * step), np.sin(0.5 * step)
        cws, sws = np.cos(0.5 * width * step), np.sin(0.5 * width * step)
        q = np.arange(q_lo[b], q_hi[b] + 1)
        theta = 2.0 * np.pi * q / n_fft - omega[b]
        sA, cA = np.sin(0.5 * width * theta), np.cos(0.5 * width * theta)
        sa, ca = np.sin(0.5 * theta), np.cos(0.5 * theta)
        g = (
            0.5 * _ratio_numpy(sA, sa, width)
            + 0.25 * _ratio_numpy(sA * cws - cA * sws, sa * cs - ca * ss, width)
            + 0.25 * _ratio_numpy(sA * cws + cA * sws, sa * cs + ca * ss, width)
        )
        prod = spectrum[q % n_fft] * g
        idx = q % n_fold
        out[b] = np.bincount(idx, prod.real, n_fold) + 1j * np.bincount(idx, prod.imag, n_fold)
    return out


cqt_fold = cqt_fold_jit if USE_NUMBA else cqt_fold_numpy
