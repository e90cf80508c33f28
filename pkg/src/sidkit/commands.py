"""Batch commands: train speaker models, evaluate a corpus, identify one file.

Per-speaker training jobs and per-utterance scoring jobs are pure functions
mapped over a worker pool (serial by default); the model store and the
report are only touched by the collecting thread, so results are
deterministic for any worker count.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .audio_io import load_audio
from .config import ToolkitConfig
from .corpus import CorpusManifest, ManifestEntry
from .errors import MissingModel, SampleRateMismatch, SidkitError
from .frontend import AudioSignal, preprocess
from .gmm import GmmModel, TrainingConfig, em_train, lbg_init
from .identify import (
    EvaluationReport,
    SpeakerModelSet,
    UtteranceScores,
    evaluate,
    identify,
    score_utterance,
    with_eta,
)
from .residual_moments import extract_residual_moments
from .spectral import extract_filterbank_cepstra, extract_lpcc, make_filterbank
from .store import ModelStore

logger = logging.getLogger(__name__)

SPECTRAL_STREAM = "spectral"
RESIDUAL_STREAM = "residual"
RESIDUAL_KIND = "residual_moments"


def _tagged(exc: SidkitError, context: str) -> SidkitError:
    """Same error class, prefixed with the speaker/utterance it came from."""
    return type(exc)(f"{context}: {exc}")


def extract_streams(
    signal: AudioSignal,
    cfg: ToolkitConfig,
    spectral_kind: str | None = None,
    source_meta: str = "",
) -> tuple[np.ndarray, np.ndarray]:
    """Preprocess one utterance and extract (spectral, residual) feature matrices."""
    kind = spectral_kind or cfg.spectral.kind
    frames = preprocess(signal, cfg.preprocess, source_meta=source_meta)
    if kind in ("mfcc", "lfcc"):
        bank = make_filterbank(
            num_filters=cfg.spectral.num_filters,
            fft_size=cfg.spectral.fft_size,
            sample_rate=signal.sample_rate,
            scale="mel" if kind == "mfcc" else "linear",
        )
        spectral = extract_filterbank_cepstra(frames, bank, cfg.spectral.num_cepstra)
    elif kind == "lpcc":
        spectral = extract_lpcc(frames, cfg.spectral.lpcc_lp_order, cfg.spectral.num_cepstra)
    else:
        raise ValueError(f"unknown spectral feature kind {kind!r}")
    residual = extract_residual_moments(
        frames, cfg.residual.lp_order, cfg.residual.num_moments
    ).vectors
    return spectral, residual


def _map_jobs(fn, items, jobs: int) -> list:
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _speaker_features(
    entries: list[ManifestEntry], manifest: CorpusManifest, cfg: ToolkitConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated feature streams over a speaker's utterances, in manifest order."""
    spectral_parts, residual_parts = [], []
    for entry in entries:
        try:
            signal = load_audio(entry.path, expected_rate=manifest.sample_rate)
            spectral, residual = extract_streams(
                signal, cfg, source_meta=entry.utterance_id
            )
        except SidkitError as exc:
            raise _tagged(
                exc, f"speaker {entry.speaker_id} utterance {entry.utterance_id}"
            ) from exc
        spectral_parts.append(spectral)
        residual_parts.append(residual)
    return np.concatenate(spectral_parts), np.concatenate(residual_parts)


def _train_stream(
    features: np.ndarray, num_components: int, kind: str, cfg: ToolkitConfig
) -> GmmModel:
    training = TrainingConfig(
        num_components=num_components,
        em_iterations=cfg.model.em_iterations,
        variance_floor_factor=cfg.model.variance_floor_factor,
        lbg_split_epsilon=cfg.model.lbg_split_epsilon,
        seed=cfg.model.seed,
    )
    init = lbg_init(features, num_components, training)
    trained = em_train(features, init, training)
    return GmmModel(
        weights=trained.weights,
        means=trained.means,
        variances=trained.variances,
        feature_kind=kind,
        em_log_likelihoods=trained.em_log_likelihoods,
    )


def train_command(
    manifest: CorpusManifest, cfg: ToolkitConfig, store_dir, jobs: int = 1
) -> ModelStore:
    """Train one spectral and one residual model per speaker and persist both."""
    by_speaker: dict[str, list[ManifestEntry]] = {}
    for entry in manifest.train_entries:
        by_speaker.setdefault(entry.speaker_id, []).append(entry)
    for entries in by_speaker.values():
        entries.sort(key=lambda e: e.utterance_id)

    def train_one(speaker: str) -> tuple[str, GmmModel, GmmModel]:
        spectral_feats, residual_feats = _speaker_features(
            by_speaker[speaker], manifest, cfg
        )
        try:
            spectral_model = _train_stream(
                spectral_feats, cfg.model.m_spectral, cfg.spectral.kind, cfg
            )
            residual_model = _train_stream(
                residual_feats, cfg.model.m_residual, RESIDUAL_KIND, cfg
            )
        except SidkitError as exc:
            raise _tagged(exc, f"speaker {speaker}") from exc
        return speaker, spectral_model, residual_model

    results = _map_jobs(train_one, sorted(by_speaker), jobs)
    store = ModelStore(store_dir, sample_rate=manifest.sample_rate)
    for speaker, spectral_model, residual_model in results:
        for stream, model in (
            (SPECTRAL_STREAM, spectral_model),
            (RESIDUAL_STREAM, residual_model),
        ):
            store.save(speaker, stream, model)
            values = " ".join(f"{v:.6f}" for v in model.em_log_likelihoods[1:])
            logger.info(
                "speaker %s %s stream (%s, M=%d): EM log-likelihoods %s",
                speaker, stream, model.feature_kind, model.num_components, values,
            )
    return store


def load_model_set(store: ModelStore, speakers: list[str]) -> SpeakerModelSet:
    """Load both stream models for the given speakers from a store."""
    return SpeakerModelSet(
        spectral={s: store.load(s, SPECTRAL_STREAM) for s in speakers},
        residual={s: store.load(s, RESIDUAL_STREAM) for s in speakers},
    )


@dataclass(frozen=True)
class EvaluationRun:
    """Evaluation of one test split: fused plus both single-stream systems."""

    eta: float
    fused: EvaluationReport
    spectral_only: EvaluationReport
    residual_only: EvaluationReport
    records: tuple[dict, ...]


def _record(entry: ManifestEntry, scores: UtteranceScores, decided: str) -> dict:
    def stream_scores(speaker: str) -> dict:
        s = scores.scores[speaker]
        return {"spectral": s.spectral, "residual": s.residual, "combined": s.combined}

    return {
        "utterance_id": entry.utterance_id,
        "true_id": entry.speaker_id,
        "decided_id": decided,
        "decided_scores": stream_scores(decided),
        "true_scores": stream_scores(entry.speaker_id),
    }


def evaluate_command(
    manifest: CorpusManifest,
    store: ModelStore,
    eta: float = 0.5,
    cfg: ToolkitConfig | None = None,
    report_path=None,
    records_path=None,
    jobs: int = 1,
) -> EvaluationRun:
    """Score every test utterance against every speaker and summarize accuracy.

    Reports identification accuracy three ways: spectral stream alone,
    residual stream alone, and the eta-weighted fusion.  Optionally writes
    a text report table and a JSON-lines record stream.
    """
    cfg = cfg or ToolkitConfig()
    if store.sample_rate is not None and store.sample_rate != manifest.sample_rate:
        raise SampleRateMismatch(
            f"store was trained at {store.sample_rate} Hz, "
            f"manifest expects {manifest.sample_rate} Hz"
        )
    model_set = load_model_set(store, manifest.speakers())
    spectral_kind = next(iter(model_set.spectral.values())).feature_kind or None

    entries = sorted(manifest.test_entries, key=lambda e: e.utterance_id)
    if not entries:
        raise ValueError("manifest has no test utterances")

    def score_one(entry: ManifestEntry) -> tuple[ManifestEntry, UtteranceScores]:
        try:
            signal = load_audio(entry.path, expected_rate=manifest.sample_rate)
            spectral, residual = extract_streams(
                signal, cfg, spectral_kind=spectral_kind, source_meta=entry.utterance_id
            )
            scores = score_utterance(
                spectral, residual, model_set, eta, cfg.fusion.per_frame_average
            )
        except SidkitError as exc:
            raise _tagged(
                exc, f"speaker {entry.speaker_id} utterance {entry.utterance_id}"
            ) from exc
        return entry, scores

    scored = _map_jobs(score_one, entries, jobs)

    fused_triples, spectral_triples, residual_triples, records = [], [], [], []
    for entry, scores in scored:
        decided = identify(scores)
        fused_triples.append((entry.utterance_id, entry.speaker_id, decided))
        spectral_triples.append(
            (entry.utterance_id, entry.speaker_id, identify(with_eta(scores, 1.0)))
        )
        residual_triples.append(
            (entry.utterance_id, entry.speaker_id, identify(with_eta(scores, 0.0)))
        )
        records.append(_record(entry, scores, decided))

    run = EvaluationRun(
        eta=eta,
        fused=evaluate(fused_triples),
        spectral_only=evaluate(spectral_triples),
        residual_only=evaluate(residual_triples),
        records=tuple(records),
    )
    if report_path is not None:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(render_report(run))
    if records_path is not None:
        with open(records_path, "w", encoding="utf-8") as fh:
            fh.write(render_records(run))
    return run


def render_report(run: EvaluationRun) -> str:
    """Line-oriented text table for an evaluation run; stable across reruns."""
    speakers = sorted({true_id for _, true_id, _ in run.fused.decisions})
    lines = [
        "# speaker identification evaluation",
        f"# test utterances: {run.fused.num_trials}",
        f"# speakers: {len(speakers)}",
        f"# eta: {run.eta:.4f}",
        f"# PIA spectral-only: {run.spectral_only.pia:.4f}",
        f"# PIA residual-only: {run.residual_only.pia:.4f}",
        f"# PIA fused: {run.fused.pia:.4f}",
        "# utterance_id\ttrue_id\tdecided_id\tspectral\tresidual\tcombined",
    ]
    by_utt = {r["utterance_id"]: r for r in run.records}
    for utterance_id, true_id, decided in run.fused.decisions:
        s = by_utt[utterance_id]["decided_scores"]
        lines.append(
            f"{utterance_id}\t{true_id}\t{decided}"
            f"\t{s['spectral']:.6f}\t{s['residual']:.6f}\t{s['combined']:.6f}"
        )
    return "\n".join(lines) + "\n"


def render_records(run: EvaluationRun) -> str:
    """One JSON record per test utterance, keys sorted."""
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in run.records)


@dataclass(frozen=True)
class IdentificationResult:
    """Decision for one query utterance plus its full per-speaker ranking."""

    decided_id: str
    ranking: tuple[str, ...]
    scores: UtteranceScores


def identify_command(
    audio_path,
    store: ModelStore,
    eta: float = 0.5,
    cfg: ToolkitConfig | None = None,
    sample_rate: int | None = None,
) -> IdentificationResult:
    """Identify the speaker of one audio file against all models in a store."""
    cfg = cfg or ToolkitConfig()
    rate = sample_rate or store.sample_rate
    speakers = store.speakers()
    if not speakers:
        raise MissingModel(f"model store at {store.path} is empty")
    model_set = load_model_set(store, speakers)
    spectral_kind = next(iter(model_set.spectral.values())).feature_kind or None
    signal = load_audio(audio_path, expected_rate=rate)
    spectral, residual = extract_streams(
        signal, cfg, spectral_kind=spectral_kind, source_meta=str(audio_path)
    )
    scores = score_utterance(
        spectral, residual, model_set, eta, cfg.fusion.per_frame_average
    )
    ranking = tuple(
        sorted(speakers, key=lambda s: (-scores.scores[s].combined, s))
    )
    return IdentificationResult(
        decided_id=identify(scores), ranking=ranking, scores=scores
    )
