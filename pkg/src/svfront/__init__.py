"""Speaker verification front-end: 14 feature extractors, post-processing and scoring metrics."""

from .core import EmptyInputError, FeatureMatrix, SilentFrameError, Waveform
from .features import FEATURES, build_configs, extract, extract_all
from .metrics import DcfParams, DetCurve, TrialScores, det_points, eer, fuse_scores, min_dcf
from .pitch import PitchTrack, extract_pitch
from .postproc import SadMask, append_pitch, cmn, deltas, postprocess, sad_mask

__all__ = [
    "DcfParams",
    "DetCurve",
    "EmptyInputError",
    "FEATURES",
    "FeatureMatrix",
    "PitchTrack",
    "SadMask",
    "SilentFrameError",
    "TrialScores",
    "Waveform",
    "append_pitch",
    "build_configs",
    "cmn",
    "deltas",
    "det_points",
    "eer",
    "extract",
    "extract_all",
    "extract_pitch",
    "fuse_scores",
    "min_dcf",
    "postprocess",
    "sad_mask",
]
