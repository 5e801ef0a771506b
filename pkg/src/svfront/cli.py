"""``svfront`` command line: extract, vad, cmn, score, eval, fuse, det."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import features as feats
from .core import FeatureMatrix
from .io import (
    AudioFormatError,
    FeatureFileError,
    read_config,
    read_csv,
    read_fmx,
    read_wav,
    write_csv,
    write_fmx,
)
from .metrics import (
    DcfParams,
    ScoreFileError,
    TrialScores,
    det_points,
    eer,
    fuse_scores,
    min_dcf,
    read_scores,
    write_det_csv,
    write_scores,
)
from .postproc import apply_mask, cmn, sad_mask

log = logging.getLogger("svfront")
PITCH_DIMS = 3


def _parse_sets(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _out_path(src, outdir, suffix):
    src = Path(src)
    if outdir:
        Path(outdir).mkdir(parents=True, exist_ok=True)
    return Path(outdir or src.parent) / f"{src.stem}.{suffix}"


def _write_features(path, f: FeatureMatrix, code, fmt):
    if fmt == "csv":
        write_csv(path, f.values)
    else:
        write_fmx(path, f, code)


def _read_features(path):
    """Feature file as FeatureMatrix; fmx keeps its kind code, CSV gets code 0."""
    if str(path).endswith(".csv"):
        return FeatureMatrix(read_csv(path), "csv"), 0
    values, code, shift = read_fmx(path)
    return FeatureMatrix(values.astype(np.float64), feats.KIND_BY_CODE.get(code, "unknown"), shift), code


def cmd_extract(args):
    overrides = read_config(args.config) if args.config else {}
    overrides.update(_parse_sets(args.set))
    configs = feats.build_configs(overrides)
    spec = feats.FEATURES[args.feature]
    failures = 0
    for src in args.inputs:
        try:
            w = read_wav(src)
            f = feats.extract(args.feature, w, configs)
            if args.sad:
                f = apply_mask(f, sad_mask(w, configs["sad"]))
            if args.cmn and f.n_frames > 0:
                f = cmn(f)
        except (OSError, AudioFormatError, ValueError) as exc:
            log.error("%s: %s", src, exc)
            failures += 1
            continue
        dst = _out_path(src, args.outdir, f"{args.feature}.{args.format}")
        _write_features(dst, f, spec.code, args.format)
        log.info("%s -> %s (%d x %d)", src, dst, f.n_frames, f.dim)
    return 1 if failures else 0


def cmd_vad(args):
    cfg = feats.build_configs(_parse_sets(args.set))["sad"]
    failures = 0
    for src in args.inputs:
        try:
            mask = sad_mask(read_wav(src), cfg)
        except (OSError, AudioFormatError, ValueError) as exc:
            log.error("%s: %s", src, exc)
            failures += 1
            continue
        dst = _out_path(src, args.outdir, "vad.txt")
        dst.write_text("".join("1\n" if k else "0\n" for k in mask.keep), encoding="utf-8")
        print(f"{src}\t{mask.n_kept}/{len(mask)} frames kept")
    return 1 if failures else 0


def cmd_cmn(args):
    failures = 0
    for src in args.inputs:
        try:
            f, code = _read_features(src)
            exempt = set(args.exempt or [])
            if code == feats.FEATURES["mfcc_pitch"].code and args.exempt is None:
                exempt = set(range(f.dim - PITCH_DIMS, f.dim))
            f = cmn(f, exempt)
        except (OSError, FeatureFileError, ValueError) as exc:
            log.error("%s: %s", src, exc)
            failures += 1
            continue
        fmt = "csv" if str(src).endswith(".csv") else "fmx"
        _write_features(_out_path(src, args.outdir, f"cmn.{fmt}"), f, code, fmt)
    return 1 if failures else 0


def _read_trials(path):
    trials = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ScoreFileError(f"{path}:{lineno}: expected '<enroll> <test> <label>'")
            trials.append(parts)
    return trials


def _embedding(path):
    f, _ = _read_features(path)
    if f.n_frames == 0:
        raise ValueError(f"{path}: no frames")
    v = np.concatenate([f.values.mean(axis=0), f.values.std(axis=0)])
    return v / max(np.linalg.norm(v), 1e-12)


def cmd_score(args):
    """Cosine similarity of pooled (mean, std) feature statistics for every trial."""
    cache, out = {}, []
    for enroll, test, label in _read_trials(args.trials):
        vecs = []
        for utt in (enroll, test):
            if utt not in cache:
                cache[utt] = _embedding(Path(args.features) / f"{utt}.{args.suffix}")
            vecs.append(cache[utt])
        out.append((f"{enroll}-{test}", label, float(vecs[0] @ vecs[1])))
    write_scores(args.output, TrialScores.from_trials(out))
    return 0


def _report(name, t, params):
    return f"{name}\tEER {100.0 * eer(t):.2f}% minDCF {min_dcf(t, params):.4f}"


def cmd_eval(args):
    params = DcfParams(args.p_target, args.c_miss, args.c_fa)
    systems = [(Path(p).name, read_scores(p)) for p in args.scores]
    rows = list(systems)
    if args.fuse:
        rows.append(("fusion", fuse_scores([t for _, t in systems])))
    for name, t in rows:
        print(_report(name, t, params))
    if args.det:
        if len(rows) == 1:
            write_det_csv(args.det, det_points(rows[0][1]))
        else:
            det = Path(args.det)
            for name, t in rows:
                write_det_csv(det.with_name(f"{det.stem}.{name}{det.suffix}"), det_points(t))
    return 0


def cmd_fuse(args):
    write_scores(args.output, fuse_scores([read_scores(p) for p in args.scores]))
    return 0


def cmd_det(args):
    write_det_csv(args.output, det_points(read_scores(args.scores)))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="svfront", description="Speaker verification front-end features and scoring.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract features from 16 kHz PCM16 mono WAV files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--feature", required=True, choices=list(feats.FEATURES))
    p.add_argument("--config", help="file of 'section.key = value' lines")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--format", choices=["fmx", "csv"], default="fmx")
    p.add_argument("--sad", action="store_true", help="drop low-energy frames")
    p.add_argument("--cmn", action="store_true", help="subtract the utterance mean")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("vad", help="write per-frame speech activity masks")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_vad)

    p = sub.add_parser("cmn", help="mean-normalise feature files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--exempt", type=int, nargs="*", help="column indices left untouched")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_cmn)

    p = sub.add_parser("score", help="cosine-score trials from pooled feature statistics")
    p.add_argument("--trials", required=True, help="lines of '<enroll> <test> <target|nontarget>'")
    p.add_argument("--features", required=True, help="directory holding <utt>.<suffix> files")
    p.add_argument("--suffix", default="mfcc.fmx")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="report EER and minDCF for score files")
    p.add_argument("scores", nargs="+")
    p.add_argument("--p-target", type=float, default=0.001)
    p.add_argument("--c-miss", type=float, default=1.0)
    p.add_argument("--c-fa", type=float, default=1.0)
    p.add_argument("--det", help="write DET points as CSV")
    p.add_argument("--fuse", action="store_true", help="also evaluate the equal-weight fusion")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fuse", help="average scores of several systems")
    p.add_argument("scores", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("det", help="write DET points (p_fa,p_miss,threshold)")
    p.add_argument("scores")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_det)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"svfront: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
