"""Registry of the 14 feature kinds and typed ``namespace.field`` configuration."""

import dataclasses
import typing
from dataclasses import dataclass
from typing import Callable, Dict, Optional

from .core import FeatureMatrix, Waveform
from .phase import ApgdfConfig, CmpocConfig, CosphaseConfig, MgdfConfig, apgdf, cmpoc, cosphase, mgdf
from .pitch import PitchConfig, extract_pitch
from .postproc import SadConfig, append_pitch
from .robust import MhecConfig, PnccConfig, mhec, pncc
from .spectral import (
    CepstralConfig,
    CqccConfig,
    cqcc,
    cqt_for,
    lpcc,
    mfcc,
    multitaper_mfcc,
    plpcc,
    scfc,
    scmc,
)


def mfcc_pitch(w: Waveform, cfg: Optional[CepstralConfig] = None, pitch_cfg=None) -> FeatureMatrix:
    f = append_pitch(mfcc(w, cfg), extract_pitch(w, pitch_cfg))
    return dataclasses.replace(f, kind="mfcc_pitch")


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    code: int
    config_cls: type
    extract: Callable
    dim: int


FEATURES: Dict[str, FeatureSpec] = {
    s.name: s
    for s in [
        FeatureSpec("mfcc", 1, CepstralConfig, mfcc, 30),
        FeatureSpec("multitaper", 2, CepstralConfig, multitaper_mfcc, 30),
        FeatureSpec("lpcc", 3, CepstralConfig, lpcc, 30),
        FeatureSpec("plpcc", 4, CepstralConfig, plpcc, 30),
        FeatureSpec("scfc", 5, CepstralConfig, scfc, 30),
        FeatureSpec("scmc", 6, CepstralConfig, scmc, 30),
        FeatureSpec("cqcc", 7, CqccConfig, cqcc, 60),
        FeatureSpec("mgdf", 8, MgdfConfig, mgdf, 30),
        FeatureSpec("apgdf", 9, ApgdfConfig, apgdf, 30),
        FeatureSpec("cosphase", 10, CosphaseConfig, cosphase, 30),
        FeatureSpec("cmpoc", 11, CmpocConfig, cmpoc, 30),
        FeatureSpec("mhec", 12, MhecConfig, mhec, 30),
        FeatureSpec("pncc", 13, PnccConfig, pncc, 30),
        FeatureSpec("mfcc_pitch", 14, CepstralConfig, mfcc_pitch, 33),
    ]
}
KIND_BY_CODE = {s.code: s.name for s in FEATURES.values()}
AUX_SECTIONS = {"pitch": PitchConfig, "sad": SadConfig}


def _section_classes():
    out = {name: spec.config_cls for name, spec in FEATURES.items()}
    out.update(AUX_SECTIONS)
    return out


def _convert(text, hint, key):
    optional = False
    if typing.get_origin(hint) is typing.Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        optional, hint = True, args[0]
    if optional and text.lower() == "none":
        return None
    try:
        if hint is bool:
            if text.lower() not in ("true", "false", "1", "0"):
                raise ValueError(text)
            return text.lower() in ("true", "1")
        return hint(text)
    except ValueError:
        raise ValueError(f"{key}: cannot read {text!r} as {hint.__name__}") from None


def build_configs(overrides: Optional[Dict[str, str]] = None) -> Dict[str, object]:
    """Default config per section with ``section.field`` string overrides applied."""
    classes = _section_classes()
    pending: Dict[str, Dict[str, object]] = {name: {} for name in classes}
    for key, text in (overrides or {}).items():
        section, _, field = key.partition(".")
        if section not in classes or not field:
            raise KeyError(f"unknown config key {key!r}")
        hints = typing.get_type_hints(classes[section])
        names = {f.name for f in dataclasses.fields(classes[section])}
        if field not in names:
            raise KeyError(f"unknown config key {key!r}")
        pending[section][field] = _convert(str(text), hints[field], key)
    return {name: cls(**pending[name]) for name, cls in classes.items()}


def extract(kind: str, w: Waveform, configs=None) -> FeatureMatrix:
    if kind not in FEATURES:
        raise KeyError(f"unknown feature kind {kind!r}; choose from {', '.join(FEATURES)}")
    configs = configs or build_configs()
    if kind == "mfcc_pitch":
        return mfcc_pitch(w, configs[kind], configs["pitch"])
    return FEATURES[kind].extract(w, configs[kind])


def _cqt_key(cfg):
    return (cfg.bins_per_octave, cfg.n_octaves, cfg.f_max, cfg.frame_ms, cfg.shift_ms, cfg.sidelobes)


def extract_all(w: Waveform, configs=None, kinds=None) -> Dict[str, FeatureMatrix]:
    """Every requested kind; CQCC and CMPOC share one transform when their settings agree."""
    configs = configs or build_configs()
    out, cqts = {}, {}
    for kind in kinds or FEATURES:
        cfg = configs[kind]
        if kind in ("cqcc", "cmpoc"):
            key = _cqt_key(cfg)
            if key not in cqts:
                cqts[key] = cqt_for(w, cfg)
            out[kind] = FEATURES[kind].extract(w, cfg, spectrum=cqts[key])
        else:
            out[kind] = extract(kind, w, configs)
    return out
