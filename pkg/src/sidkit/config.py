"""Toolkit configuration: defaults, INI-style config files, CLI overrides.

Every tunable constant of the pipeline lives here so that a single text
file fully determines a run.  Defaults target 8 kHz speech: 20 ms frames
with 50% overlap, 0.97 pre-emphasis, order-17 prediction for the residual
stream, 6 residual moments, 19 cepstra from a 20-filter bank, 10 EM
iterations, and equal-weight score fusion.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class PreprocessConfig:
    """Silence removal, pre-emphasis, and framing parameters."""

    pre_emphasis: float = 0.97
    frame_len: int = 160
    frame_shift: int = 80
    silence_energy_ratio: float = 0.06

    def __post_init__(self):
        if not 0.0 <= self.pre_emphasis < 1.0:
            raise ValueError(f"pre_emphasis must be in [0, 1), got {self.pre_emphasis}")
        if not 0 < self.frame_shift <= self.frame_len:
            raise ValueError(
                f"need 0 < frame_shift <= frame_len, got {self.frame_shift}/{self.frame_len}"
            )
        if self.silence_energy_ratio < 0.0:
            raise ValueError("silence_energy_ratio must be non-negative")


@dataclass(frozen=True)
class ResidualConfig:
    """Residual-moment stream parameters."""

    lp_order: int = 17
    num_moments: int = 6

    def __post_init__(self):
        if self.lp_order < 1:
            raise ValueError("lp_order must be >= 1")
        if self.num_moments < 1:
            raise ValueError("num_moments must be >= 1")


@dataclass(frozen=True)
class SpectralConfig:
    """Spectral stream parameters (mfcc, lfcc, or lpcc)."""

    kind: str = "mfcc"
    num_filters: int = 20
    num_cepstra: int = 19
    fft_size: int = 256
    lpcc_lp_order: int = 19

    def __post_init__(self):
        if self.kind not in ("mfcc", "lfcc", "lpcc"):
            raise ValueError(f"spectral kind must be mfcc, lfcc, or lpcc, got {self.kind!r}")
        if self.num_cepstra >= self.num_filters:
            raise ValueError("num_cepstra must be < num_filters (dc term is discarded)")


@dataclass(frozen=True)
class ModelConfig:
    """Mixture-model sizes and training schedule."""

    m_spectral: int = 8
    m_residual: int = 8
    em_iterations: int = 10
    variance_floor_factor: float = 0.01
    lbg_split_epsilon: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.m_spectral < 1 or self.m_residual < 1:
            raise ValueError("mixture sizes must be >= 1")
        if self.em_iterations < 1:
            raise ValueError("em_iterations must be >= 1")


@dataclass(frozen=True)
class FusionConfig:
    """Score-level fusion parameters."""

    eta: float = 0.5
    per_frame_average: bool = False

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class ToolkitConfig:
    """Complete configuration for train / evaluate / identify runs."""

    preprocess: PreprocessConfig = PreprocessConfig()
    residual: ResidualConfig = ResidualConfig()
    spectral: SpectralConfig = SpectralConfig()
    model: ModelConfig = ModelConfig()
    fusion: FusionConfig = FusionConfig()


_SECTIONS = {
    "preprocess": PreprocessConfig,
    "residual": ResidualConfig,
    "spectral": SpectralConfig,
    "model": ModelConfig,
    "fusion": FusionConfig,
}

DEFAULT_CONFIG_TEXT = """\
# sidkit configuration. Omitted keys keep their defaults.

[preprocess]
# First-order pre-emphasis factor applied after silence removal.
pre_emphasis = 0.97
# Frame length and shift in samples: 20 ms frames, 50% overlap at 8 kHz.
frame_len = 160
frame_shift = 80
# A block is kept when its mean-square energy exceeds this fraction of the
# utterance-average block energy.
silence_energy_ratio = 0.06

[residual]
# Predictor order for the residual stream.
lp_order = 17
# Central moments per frame, orders 2 .. num_moments+1.
num_moments = 6

[spectral]
# Spectral stream: mfcc, lfcc, or lpcc.
kind = mfcc
num_filters = 20
# Cepstra retained after discarding the dc coefficient.
num_cepstra = 19
fft_size = 256
# Predictor order when the spectral stream is lpcc.
lpcc_lp_order = 19

[model]
# Mixture components per stream.
m_spectral = 8
m_residual = 8
em_iterations = 10
# Variance floor as a fraction of the global per-dimension variance.
variance_floor_factor = 0.01
# Relative centroid perturbation used by binary-splitting initialization.
lbg_split_epsilon = 0.02
seed = 0

[fusion]
# Weight on the spectral stream; the residual stream gets 1 - eta.
eta = 0.5
# Average per-frame scores instead of summing before fusion.
per_frame_average = false
"""


def _parse_value(parser, section, key, target_type):
    if target_type is bool:
        return parser.getboolean(section, key)
    if target_type is int:
        return parser.getint(section, key)
    if target_type is float:
        return parser.getfloat(section, key)
    return parser.get(section, key)


def parse_config(text: str) -> ToolkitConfig:
    """Parse INI-style configuration text, falling back to defaults per key."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_file(io.StringIO(text))

    kwargs = {}
    for section, cls in _SECTIONS.items():
        known = {f.name: f.type for f in fields(cls)}
        values = {}
        if parser.has_section(section):
            for key in parser.options(section):
                if key not in known:
                    raise ValueError(f"unknown config key [{section}] {key}")
                anno = known[key]
                target = {"int": int, "float": float, "bool": bool, "str": str}[anno]
                values[key] = _parse_value(parser, section, key, target)
        kwargs[section] = cls(**values)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
    return ToolkitConfig(**kwargs)


def load_config(path) -> ToolkitConfig:
    """Load a configuration file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def write_default_config(path) -> None:
    """Write the fully commented default configuration file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DEFAULT_CONFIG_TEXT)
