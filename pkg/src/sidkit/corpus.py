"""Corpus manifests and deterministic synthetic-corpus generation.

A manifest is a tab-separated text file, one utterance per line
(``speaker_id<TAB>utterance_id<TAB>path<TAB>split``), with ``#`` comments
and an optional ``# sample_rate: <hz>`` directive.

The synthetic corpus drives a jittered pulse train plus a noise floor
through a per-speaker stable all-pole filter, giving each speaker a
distinct spectral envelope and a distinct excitation pitch.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .audio_io import save_audio
from .errors import ManifestError, UnstableFilter
from .frontend import AudioSignal

DEFAULT_SAMPLE_RATE = 8000

_SPLITS = ("train", "test")


@dataclass(frozen=True)
class ManifestEntry:
    speaker_id: str
    utterance_id: str
    path: Path
    split: str

    def __post_init__(self):
        if self.split not in _SPLITS:
            raise ManifestError(f"unknown split {self.split!r} (expected train or test)")


@dataclass(frozen=True)
class CorpusManifest:
    """Validated list of corpus entries plus the expected sample rate."""

    entries: tuple[ManifestEntry, ...]
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.sample_rate <= 0:
            raise ManifestError(f"sample_rate must be positive, got {self.sample_rate}")
        seen: set[str] = set()
        for entry in self.entries:
            if entry.utterance_id in seen:
                raise ManifestError(f"duplicate utterance id {entry.utterance_id!r}")
            seen.add(entry.utterance_id)
        train = {e.speaker_id for e in self.entries if e.split == "train"}
        test = {e.speaker_id for e in self.entries if e.split == "test"}
        if not test <= train:
            missing = sorted(test - train)
            raise ManifestError(
                f"test speakers missing from the train split: {missing}"
            )

    @property
    def train_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == "train"]

    @property
    def test_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == "test"]

    def speakers(self) -> list[str]:
        return sorted({e.speaker_id for e in self.entries})


def read_manifest(path) -> CorpusManifest:
    """Parse a manifest file; relative audio paths resolve against its directory."""
    path = Path(path)
    root = path.parent
    sample_rate = DEFAULT_SAMPLE_RATE
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# sample_rate:"):
                try:
                    sample_rate = int(line.split(":", 1)[1])
                except ValueError as exc:
                    raise ManifestError(f"{path}:{lineno}: bad sample_rate directive") from exc
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ManifestError(
                f"{path}:{lineno}: expected 4 tab-separated fields, got {len(fields)}"
            )
        speaker_id, utterance_id, audio_path, split = fields
        audio = Path(audio_path)
        if not audio.is_absolute():
            audio = root / audio
        entries.append(
            ManifestEntry(
                speaker_id=speaker_id,
                utterance_id=utterance_id,
                path=audio,
                split=split,
            )
        )
    return CorpusManifest(entries=tuple(entries), sample_rate=sample_rate)


def write_manifest(manifest: CorpusManifest, path) -> None:
    """Write a manifest; audio paths are stored relative to its directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# speaker_id\tutterance_id\tpath\tsplit", f"# sample_rate: {manifest.sample_rate}"]
    for entry in manifest.entries:
        try:
            rel = os.path.relpath(entry.path, path.parent)
        except ValueError:
            rel = str(entry.path)
        lines.append(f"{entry.speaker_id}\t{entry.utterance_id}\t{rel}\t{entry.split}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SyntheticSpeakerSpec:
    """One synthetic voice: a stable all-pole envelope plus pitch parameters."""

    speaker_id: str
    filter_coeffs: np.ndarray
    pitch_period: int
    jitter: float = 0.02
    noise_floor: float = 0.01

    def __post_init__(self):
        coeffs = np.asarray(self.filter_coeffs, dtype=np.float64)
        object.__setattr__(self, "filter_coeffs", coeffs)
        roots = np.roots(np.concatenate(([1.0], coeffs)))
        if roots.size and np.max(np.abs(roots)) >= 1.0:
            raise UnstableFilter(
                f"speaker {self.speaker_id!r}: filter poles reach the unit circle"
            )
        if self.pitch_period < 20:
            raise ValueError(f"pitch period must be >= 20 samples, got {self.pitch_period}")
        if not 0.0 <= self.jitter < 1.0:
            raise ValueError(f"jitter must lie in [0, 1), got {self.jitter}")
        if self.noise_floor < 0.0:
            raise ValueError(f"noise floor must be >= 0, got {self.noise_floor}")


def _coeffs_from_reflection(reflection: np.ndarray) -> np.ndarray:
    """Step-up recursion: reflection coefficients with |k| < 1 give a stable filter."""
    a = np.zeros(0)
    for k in reflection:
        a = np.concatenate((a + k * a[::-1], [k]))
    return a


def default_speaker_specs(
    num_speakers: int, seed: int = 0, order: int = 17
) -> list[SyntheticSpeakerSpec]:
    """Build well-separated synthetic speakers: random stable filters, spread pitch."""
    if num_speakers < 1:
        raise ValueError("need at least one speaker")
    periods = np.rint(np.linspace(40, 100, num_speakers)).astype(int)
    specs = []
    for i in range(num_speakers):
        rng = np.random.default_rng([seed, i])
        reflection = rng.uniform(-0.75, 0.75, size=order)
        coeffs = _coeffs_from_reflection(reflection)
        specs.append(
            SyntheticSpeakerSpec(
                speaker_id=f"spk{i:02d}",
                filter_coeffs=coeffs,
                pitch_period=int(periods[i]),
            )
        )
    for i in range(num_speakers):
        for j in range(i + 1, num_speakers):
            dist = np.linalg.norm(specs[i].filter_coeffs - specs[j].filter_coeffs)
            if dist <= 0.1 or abs(specs[i].pitch_period - specs[j].pitch_period) < 5:
                warnings.warn(
                    f"speakers {specs[i].speaker_id} and {specs[j].speaker_id} "
                    "may be too similar for reliable identification",
                    stacklevel=2,
                )
    return specs


def synthesize_utterance(
    spec: SyntheticSpeakerSpec, num_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """One utterance: jittered pulse train + noise through the all-pole filter.

    The output is peak-normalized to 0.7 so PCM16 encoding never clips.
    """
    excitation = rng.standard_normal(num_samples) * spec.noise_floor
    pos = int(rng.integers(0, spec.pitch_period))
    while pos < num_samples:
        excitation[pos] += 1.0
        spacing = spec.pitch_period * (1.0 + spec.jitter * rng.uniform(-1.0, 1.0))
        pos += max(int(round(spacing)), 2)
    denom = np.concatenate(([1.0], spec.filter_coeffs))
    samples = lfilter([1.0], denom, excitation)
    peak = np.max(np.abs(samples))
    if peak > 0.0:
        samples = samples * (0.7 / peak)
    return samples


def generate_synthetic_corpus(
    specs: list[SyntheticSpeakerSpec],
    train_utts: int,
    test_utts: int,
    utt_seconds: float,
    seed: int,
    out_dir,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> CorpusManifest:
    """Write per-speaker WAV files and a manifest; bit-identical for a given seed."""
    if train_utts < 1 or test_utts < 0:
        raise ValueError("need at least one train utterance per speaker")
    out_dir = Path(out_dir)
    num_samples = int(round(utt_seconds * sample_rate))
    entries = []
    for spk_idx, spec in enumerate(specs):
        for utt_idx in range(train_utts + test_utts):
            rng = np.random.default_rng([seed, spk_idx, utt_idx])
            samples = synthesize_utterance(spec, num_samples, rng)
            utt_id = f"{spec.speaker_id}_{utt_idx:03d}"
            wav_path = out_dir / spec.speaker_id / f"{utt_id}.wav"
            save_audio(wav_path, AudioSignal(samples=samples, sample_rate=sample_rate))
            split = "train" if utt_idx < train_utts else "test"
            entries.append(
                ManifestEntry(
                    speaker_id=spec.speaker_id,
                    utterance_id=utt_id,
                    path=wav_path,
                    split=split,
                )
            )
    manifest = CorpusManifest(entries=tuple(entries), sample_rate=sample_rate)
    write_manifest(manifest, out_dir / "manifest.tsv")
    return manifest
