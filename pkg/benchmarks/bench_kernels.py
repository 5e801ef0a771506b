"""Time every hot kernel on its numba and pure-numpy path.

Inputs are sized like a 60 s utterance at 16 kHz.  Each kernel is warmed up
once (compiling the jit path), then timed as the best of ``--repeat`` runs.
Outputs of the two paths are compared so a speedup never hides a mismatch.

    python3 benchmarks/bench_kernels.py [--seconds 60] [--repeat 3]
"""

import argparse
import time

import numpy as np

from svfront import kernels
from svfront._accel import NUMBA_AVAILABLE
from svfront.core import Waveform, autocorrelation, cqt, frame_array, hamming_window
from svfront.robust import gammatone_centers, gammatone_poles

FS = 16000


def cases(seconds):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(int(seconds * FS))
    frames = frame_array(x, 400, 160)
    r = autocorrelation(frames * hamming_window(400), 30)
    poles, gains = gammatone_poles(gammatone_centers(4, 50.0, 7200.0), FS)
    q = rng.exponential(size=(frames.shape[0], 40))
    pad = np.concatenate([x, np.zeros(321)])
    seg = np.lib.stride_tricks.sliding_window_view(pad, 721)[::160][: frames.shape[0]]

    n = min(x.size, 10 * FS)
    cqt_args = _cqt_fold_args(Waveform(x[:n], FS))
    return {
        "levinson_batch": (lambda f: f(r, 30), "%d frames, order 30" % frames.shape[0]),
        "gammatone_cascade": (lambda f: f(x, poles, gains), "4 channels"),
        "asymmetric_lowpass": (lambda f: f(q), "40 channels"),
        "temporal_masking": (lambda f: f(q), "40 channels"),
        "nccf_batch": (lambda f: f(seg, 400, 39, 321), "283 lags"),
        "cqt_fold": (lambda f: f(*cqt_args), "%.0f s, 864 bins" % (n / FS)),
    }


def _cqt_fold_args(w):
    """Capture the fold-kernel arguments the CQT builds for ``w``."""
    captured = {}
    original = kernels.cqt_fold

    def spy(*args):
        captured["args"] = args
        return original(*args)

    kernels.cqt_fold = spy
    try:
        cqt(w, 8000.0 / 2**9, 8000.0, 96)
    finally:
        kernels.cqt_fold = original
    return captured["args"]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def _agree(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(u, v, rtol=1e-7, atol=1e-9) for u, v in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=60.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy path exists")
    print(f"{'kernel':<20} {'numba s':>9} {'numpy s':>9} {'speedup':>8}  agree  input")
    for name, (call, note) in cases(args.seconds).items():
        jit = getattr(kernels, f"{name}_jit")
        ref = getattr(kernels, f"{name}_numpy")
        call(jit)  # compile
        t_jit, out_jit = best_of(lambda: call(jit), args.repeat)
        t_np, out_np = best_of(lambda: call(ref), args.repeat)
        ok = "yes" if _agree(out_jit, out_np) else "NO"
        print(f"{name:<20} {t_jit:9.4f} {t_np:9.4f} {t_np / t_jit:7.1f}x  {ok:<5}  {note}")


if __name__ == "__main__":
    main()
