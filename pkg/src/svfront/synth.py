"""Deterministic speech-like test corpus.

Each synthetic speaker has its own mean pitch and formant offsets.  An
utterance is a sequence of syllables: a glottal pulse train shaped by
three formant resonators, optional fricative noise, short pauses of
digital silence, and a slow amplitude envelope.

Run ``python -m svfront.synth OUTDIR`` to write WAV files plus a trial list.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

FS = 16000
BASE_FORMANTS = np.array([[300.0, 2300.0, 3000.0], [700.0, 1200.0, 2600.0], [500.0, 1000.0, 2500.0],
                          [400.0, 1900.0, 2700.0], [600.0, 1700.0, 2500.0]])


@dataclass(frozen=True)
class Speaker:
    name: str
    f0_hz: float
    formant_scale: float
    tilt: float


def make_speakers(n, seed=0):
    rng = np.random.default_rng(seed)
    return [
        Speaker(f"spk{i:02d}", float(rng.uniform(95, 240)), float(rng.uniform(0.85, 1.2)),
                float(rng.uniform(0.85, 0.97)))
        for i in range(n)
    ]


def _resonator(f, bw, fs):
    r = np.exp(-np.pi * bw / fs)
    return [1.0 - r], [1.0, -2.0 * r * np.cos(2.0 * np.pi * f / fs), r * r]


def _syllable(rng, spk, n, fs):
    f0 = spk.f0_hz * np.exp(rng.normal(0.0, 0.08)) * np.linspace(1.05, 0.95, n)
    phase = np.cumsum(f0 / fs)
    pulses = np.diff(np.floor(phase), prepend=0.0)
    src = lfilter([1.0], [1.0, -spk.tilt], pulses + 0.02 * rng.standard_normal(n))
    out = np.zeros(n)
    for f, bw in zip(BASE_FORMANTS[rng.integers(len(BASE_FORMANTS))] * spk.formant_scale, (80, 120, 160)):
        b, a = _resonator(min(f, 0.45 * fs), bw, fs)
        out += lfilter(b, a, src)
    if rng.random() < 0.3:
        k = n // 4
        out[:k] += 0.3 * lfilter([1.0, -0.9], [1.0], rng.standard_normal(k)) * out.std()
    return out * np.hanning(n)


def utterance(spk: Speaker, seed: int, seconds=2.0, fs=FS):
    """Peak-normalised (0.5) speech-like signal for ``spk``."""
    rng = np.random.default_rng(seed)
    total = int(seconds * fs)
    parts, used = [], 0
    while used < total:
        n = int(rng.uniform(0.12, 0.3) * fs)
        parts.append(_syllable(rng, spk, n, fs))
        gap = int(rng.uniform(0.0, 0.12) * fs)
        parts.append(np.zeros(gap))
        used += n + gap
    x = np.concatenate(parts)[:total]
    return 0.5 * x / np.max(np.abs(x))


def add_white_noise(x, snr_db, seed=0):
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(x.size)
    scale = np.sqrt(np.mean(x**2) / (np.mean(noise**2) * 10.0 ** (snr_db / 10.0)))
    return x + scale * noise


def corpus(n_speakers=5, per_speaker=4, seconds=2.0, seed=0):
    """List of ``(utt_id, speaker, samples)``."""
    out = []
    for i, spk in enumerate(make_speakers(n_speakers, seed)):
        for j in range(per_speaker):
            out.append((f"{spk.name}_u{j}", spk.name, utterance(spk, seed * 1000 + i * 100 + j, seconds)))
    return out


def trial_list(utts):
    """All unordered utterance pairs, labelled target when the speaker matches."""
    trials = []
    for a in range(len(utts)):
        for b in range(a + 1, len(utts)):
            label = "target" if utts[a][1] == utts[b][1] else "nontarget"
            trials.append((utts[a][0], utts[b][0], label))
    return trials


def write_corpus(outdir, **kwargs):
    from .io import write_wav

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    utts = corpus(**kwargs)
    for utt_id, _, x in utts:
        write_wav(outdir / f"{utt_id}.wav", x, FS)
    with open(outdir / "trials.txt", "w", encoding="utf-8") as fh:
        for a, b, label in trial_list(utts):
            fh.write(f"{a} {b} {label}\n")
    return utts


def main(argv=None):
    ap = argparse.ArgumentParser(prog="python -m svfront.synth", description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    ap.add_argument("--speakers", type=int, default=5)
    ap.add_argument("--per-speaker", type=int, default=4)
    ap.add_argument("--seconds", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    utts = write_corpus(args.outdir, n_speakers=args.speakers, per_speaker=args.per_speaker,
                        seconds=args.seconds, seed=args.seed)
    print(f"wrote {len(utts)} utterances to {args.outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
