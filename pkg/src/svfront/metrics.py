"""EER, minDCF, DET points and equal-weight score fusion.

A trial is accepted when ``score >= threshold``.  Thresholds sweep
``-inf``, the midpoints between consecutive distinct scores, and ``+inf``.
"""

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

LABELS = ("target", "nontarget")


class ScoreFileError(ValueError):
    pass


@dataclass(frozen=True)
class TrialScores:
    trial_ids: Tuple[str, ...]
    is_target: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        if not (len(self.trial_ids) == self.is_target.size == self.scores.size):
            raise ValueError("trial ids, labels and scores differ in length")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("scores must be finite")

    @classmethod
    def from_trials(cls, trials: Iterable[Tuple[str, str, float]]):
        ids, labels, scores = [], [], []
        for tid, label, score in trials:
            if label not in LABELS:
                raise ValueError(f"label must be 'target' or 'nontarget', got {label!r}")
            ids.append(str(tid))
            labels.append(label == "target")
            scores.append(float(score))
        return cls(tuple(ids), np.array(labels, dtype=bool), np.array(scores, dtype=np.float64))

    @classmethod
    def from_arrays(cls, target_scores, nontarget_scores):
        tar = np.asarray(target_scores, dtype=np.float64).ravel()
        non = np.asarray(nontarget_scores, dtype=np.float64).ravel()
        ids = tuple(f"t{i}" for i in range(tar.size)) + tuple(f"n{i}" for i in range(non.size))
        labels = np.concatenate([np.ones(tar.size, bool), np.zeros(non.size, bool)])
        return cls(ids, labels, np.concatenate([tar, non]))

    def __len__(self):
        return self.scores.size

    @property
    def targets(self):
        return self.scores[self.is_target]

    @property
    def nontargets(self):
        return self.scores[~self.is_target]

    def trials(self) -> List[Tuple[str, str, float]]:
        return [(t, LABELS[0] if y else LABELS[1], float(s))
                for t, y, s in zip(self.trial_ids, self.is_target, self.scores)]


@dataclass(frozen=True)
class DcfParams:
    p_target: float = 0.001
    c_miss: float = 1.0
    c_fa: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p_target < 1.0:
            raise ValueError("p_target must lie in (0, 1)")
        if self.c_miss <= 0 or self.c_fa <= 0:
            raise ValueError("costs must be positive")


@dataclass(frozen=True)
class DetCurve:
    p_fa: np.ndarray
    p_miss: np.ndarray
    thresholds: np.ndarray

    def __len__(self):
        return self.thresholds.size

    def points(self):
        return list(zip(self.p_fa.tolist(), self.p_miss.tolist(), self.thresholds.tolist()))


def _check(t: TrialScores):
    n_tar = int(t.is_target.sum())
    if n_tar == 0 or n_tar == len(t):
        raise ValueError("need at least one target and one nontarget trial")


def sweep_thresholds(scores):
    """``-inf``, midpoints of consecutive distinct scores, ``+inf``."""
    u = np.unique(scores)
    return np.concatenate([[-np.inf], (u[:-1] + u[1:]) / 2.0, [np.inf]])


def error_counts(t: TrialScores):
    """``(thresholds, false accepts, misses)`` as integer counts per threshold."""
    _check(t)
    thr = sweep_thresholds(t.scores)
    tar = np.sort(t.targets)
    non = np.sort(t.nontargets)
    misses = np.searchsorted(tar, thr, side="left")
    false_acc = non.size - np.searchsorted(non, thr, side="left")
    return thr, false_acc, misses


def det_points(t: TrialScores) -> DetCurve:
    thr, fa, miss = error_counts(t)
    n_non = int((~t.is_target).sum())
    n_tar = int(t.is_target.sum())
    return DetCurve(fa / n_non, miss / n_tar, thr)


def eer(t: TrialScores) -> float:
    """Equal error rate, linearly interpolated between the straddling operating points."""
    _, fa, miss = error_counts(t)
    n_non = int((~t.is_target).sum())
    n_tar = int(t.is_target.sum())
    # compare miss/n_tar >= fa/n_non without rounding
    i = int(np.argmax(miss * n_non >= fa * n_tar))
    pm1, pf1 = Fraction(int(miss[i]), n_tar), Fraction(int(fa[i]), n_non)
    if i == 0 or pm1 == pf1:
        return float(pm1)
    pm0, pf0 = Fraction(int(miss[i - 1]), n_tar), Fraction(int(fa[i - 1]), n_non)
    alpha = (pf0 - pm0) / ((pm1 - pm0) - (pf1 - pf0))
    return float(pm0 + alpha * (pm1 - pm0))


def dcf_curve(t: TrialScores, p: DcfParams = DcfParams()):
    det = det_points(t)
    norm = min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target))
    cost = p.c_miss * p.p_target * det.p_miss + p.c_fa * (1.0 - p.p_target) * det.p_fa
    return cost / norm, det.thresholds


def min_dcf(t: TrialScores, p: DcfParams = DcfParams()) -> float:
    """Minimum normalised detection cost; 1.0 is the cost of always rejecting or accepting."""
    return float(np.min(dcf_curve(t, p)[0]))


def fuse_scores(systems: Sequence[TrialScores]) -> TrialScores:
    """Per-trial arithmetic mean over systems, in the first system's trial order."""
    if not systems:
        raise ValueError("nothing to fuse")
    first = systems[0]
    index = {tid: i for i, tid in enumerate(first.trial_ids)}
    if len(index) != len(first):
        raise ValueError("duplicate trial ids")
    total = first.scores.copy()
    for k, s in enumerate(systems[1:], start=2):
        if len(s) != len(first) or set(s.trial_ids) != set(index):
            raise ValueError(f"system {k} has a different trial set")
        order = np.array([index[tid] for tid in s.trial_ids])
        if np.any(first.is_target[order] != s.is_target):
            raise ValueError(f"system {k} disagrees on trial labels")
        aligned = np.empty_like(total)
        aligned[order] = s.scores
        total += aligned
    return TrialScores(first.trial_ids, first.is_target.copy(), total / len(systems))


# -- score files --------------------------------------------------------------


def parse_scores(lines: Iterable[str], source="<scores>") -> TrialScores:
    trials = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ScoreFileError(f"{source}:{lineno}: expected 3 fields, got {len(parts)}")
        tid, label, score = parts
        if label not in LABELS:
            raise ScoreFileError(f"{source}:{lineno}: bad label {label!r}")
        try:
            value = float(score)
        except ValueError:
            raise ScoreFileError(f"{source}:{lineno}: bad score {score!r}") from None
        if not np.isfinite(value):
            raise ScoreFileError(f"{source}:{lineno}: score is not finite")
        trials.append((tid, label, value))
    return TrialScores.from_trials(trials)


def read_scores(path) -> TrialScores:
    with open(path, encoding="utf-8") as fh:
        return parse_scores(fh, str(path))


def write_scores(path, t: TrialScores):
    with open(path, "w", encoding="utf-8") as fh:
        for tid, label, score in t.trials():
            fh.write(f"{tid} {label} {score!r}\n")


def write_det_csv(path, det: DetCurve):
    Path(path).write_text(
        "p_fa,p_miss,threshold\n"
        + "".join(f"{pf!r},{pm!r},{th!r}\n" for pf, pm, th in det.points()),
        encoding="utf-8",
    )
