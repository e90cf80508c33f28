"""Speech preprocessing: silence removal, pre-emphasis, framing, windowing.

The same chain feeds every feature stream: energy-gated silence removal on
the raw waveform, first-order pre-emphasis, then fixed-length overlapping
frames tapered by a Hamming window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PreprocessConfig
from .errors import EmptyAfterVad, SignalTooShort


@dataclass(frozen=True)
class AudioSignal:
    """A mono waveform with its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FrameSequence:
    """Windowed analysis frames, one row per frame."""

    frames: np.ndarray
    source_meta: str = ""

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2:
            raise ValueError("frames must be a 2-D array (num_frames, frame_len)")

    def __len__(self):
        return self.frames.shape[0]

    @property
    def frame_len(self) -> int:
        return self.frames.shape[1]


def hamming_window(length: int) -> np.ndarray:
    """Raised-cosine taper w(n) = 0.54 - 0.46 cos(2 pi n / (length - 1))."""
    return np.hamming(length)


def remove_silence(signal: AudioSignal, cfg: PreprocessConfig) -> AudioSignal:
    """Drop non-overlapping frame-sized blocks below the energy threshold.

    A block survives when its mean-square energy exceeds
    ``silence_energy_ratio`` times the utterance-average block energy.
    Surviving blocks are concatenated in order; a trailing partial block is
    ignored.

    Raises:
        EmptyAfterVad: no block exceeds the threshold.
    """
    block_len = cfg.frame_len
    num_blocks = len(signal) // block_len
    if num_blocks == 0:
        raise EmptyAfterVad("signal shorter than one block")
    blocks = signal.samples[: num_blocks * block_len].reshape(num_blocks, block_len)
    energies = np.mean(blocks * blocks, axis=1)
    threshold = cfg.silence_energy_ratio * float(np.mean(energies))
    keep = energies > threshold
    if not np.any(keep):
        raise EmptyAfterVad("every block below the energy threshold")
    return AudioSignal(blocks[keep].ravel(), signal.sample_rate)


def pre_emphasize(signal: AudioSignal, coeff: float) -> AudioSignal:
    """First-order high-pass: y(n) = x(n) - coeff * x(n-1), y(0) = x(0)."""
    x = signal.samples
    if x.size == 0:
        raise ValueError("signal must be non-empty")
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:] = x[1:] - coeff * x[:-1]
    return AudioSignal(y, signal.sample_rate)


def frame_and_window(
    signal: AudioSignal, cfg: PreprocessConfig, source_meta: str = ""
) -> FrameSequence:
    """Slice into overlapping frames and apply the Hamming window.

    Frames start at multiples of ``frame_shift``; a trailing partial frame
    is discarded.

    Raises:
        SignalTooShort: fewer samples than one frame.
    """
    x = signal.samples
    if x.size < cfg.frame_len:
        raise SignalTooShort(f"{x.size} samples < frame length {cfg.frame_len}")
    windows = np.lib.stride_tricks.sliding_window_view(x, cfg.frame_len)
    frames = windows[:: cfg.frame_shift] * hamming_window(cfg.frame_len)
    return FrameSequence(frames, source_meta=source_meta)


def preprocess(
    signal: AudioSignal, cfg: PreprocessConfig, source_meta: str = ""
) -> FrameSequence:
    """Full chain: silence removal, pre-emphasis, framing and windowing."""
    voiced = remove_silence(signal, cfg)
    emphasized = pre_emphasize(voiced, cfg.pre_emphasis)
    return frame_and_window(emphasized, cfg, source_meta=source_meta)
