"""WAV input, feature files (fmx binary and CSV) and ``key = value`` configs."""

import struct
import wave
from pathlib import Path

import numpy as np

from .core import FeatureMatrix, Waveform

REQUIRED_RATE = 16000
FMX_MAGIC = b"FMX1"
_FMX_HEADER = struct.Struct("<4sIIIf")


class AudioFormatError(ValueError):
    pass


class FeatureFileError(ValueError):
    pass


def read_wav(path, required_rate=REQUIRED_RATE) -> Waveform:
    """Read 16-bit PCM mono audio scaled to [-1, 1); anything else is rejected."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as fh:
            channels, width, rate = fh.getnchannels(), fh.getsampwidth(), fh.getframerate()
            raw = fh.readframes(fh.getnframes())
    except (wave.Error, EOFError) as exc:
        raise AudioFormatError(f"{path}: not a PCM WAV file ({exc})") from None
    if width != 2:
        raise AudioFormatError(f"{path}: {8 * width}-bit samples, need 16-bit PCM")
    if channels != 1:
        raise AudioFormatError(f"{path}: {channels} channels, need mono")
    if required_rate is not None and rate != required_rate:
        raise AudioFormatError(f"{path}: sample rate {rate} Hz, need {required_rate} Hz (no resampling)")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return Waveform(samples, rate)


def write_wav(path, samples, sample_rate=REQUIRED_RATE):
    pcm = np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(int(sample_rate))
        fh.writeframes(pcm.tobytes())


def write_fmx(path, f: FeatureMatrix, kind_code: int):
    values = np.ascontiguousarray(f.values, dtype="<f4")
    n, d = values.shape
    with open(path, "wb") as fh:
        fh.write(_FMX_HEADER.pack(FMX_MAGIC, n, d, kind_code, f.frame_shift_ms))
        fh.write(values.tobytes())


def read_fmx(path):
    """Return ``(values float32 n x d, kind_code, frame_shift_ms)``."""
    data = Path(path).read_bytes()
    if len(data) < _FMX_HEADER.size:
        raise FeatureFileError(f"{path}: truncated header")
    magic, n, d, code, shift = _FMX_HEADER.unpack_from(data)
    if magic != FMX_MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    body = data[_FMX_HEADER.size :]
    if len(body) != 4 * n * d:
        raise FeatureFileError(f"{path}: expected {n}x{d} floats, got {len(body)} bytes")
    return np.frombuffer(body, dtype="<f4").reshape(n, d).copy(), code, shift


def write_csv(path, values):
    np.savetxt(path, np.atleast_2d(values), fmt="%.9g", delimiter=",")


def read_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def parse_config(lines, source="<config>"):
    """``key = value`` lines; ``#`` and ``;`` start comments.  Returns a dict of strings."""
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"{source}:{lineno}: empty key")
        out[key] = value
    return out


def read_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh, str(path))
