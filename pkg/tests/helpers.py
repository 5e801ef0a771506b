import numpy as np

FS = 16000
ACCEPTANCE = {}


def harmonic_tone(f0, seconds=1.0, n_harm=5, fs=FS):
    t = np.arange(int(seconds * fs)) / fs
    return sum(np.cos(2 * np.pi * h * f0 * t + 0.3 * h) for h in range(1, n_harm + 1)) / n_harm


def tone(f, seconds=1.0, amp=0.5, fs=FS):
    return amp * np.sin(2 * np.pi * f * np.arange(int(seconds * fs)) / fs)


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
