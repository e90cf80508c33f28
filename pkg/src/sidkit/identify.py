"""Score-level fusion of the two feature streams and closed-set decisions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFeatureStream
from .gmm import GmmModel, gmm_log_likelihoods


@dataclass(frozen=True)
class StreamScores:
    """Per-speaker log-likelihood totals for one utterance."""

    spectral: float
    residual: float
    combined: float


@dataclass(frozen=True)
class UtteranceScores:
    """Scores of one utterance against every enrolled speaker."""

    scores: dict[str, StreamScores]
    eta: float
    num_spectral_frames: int
    num_residual_frames: int

    def speakers(self) -> list[str]:
        return sorted(self.scores)


@dataclass
class SpeakerModelSet:
    """Enrolled speakers, each with a spectral and a residual model."""

    spectral: dict[str, GmmModel] = field(default_factory=dict)
    residual: dict[str, GmmModel] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.spectral) != set(self.residual):
            missing = set(self.spectral) ^ set(self.residual)
            raise ValueError(f"speakers missing one stream: {sorted(missing)}")
        for models in (self.spectral, self.residual):
            kinds = {m.feature_kind for m in models.values()}
            if len(kinds) > 1:
                raise ValueError(f"inconsistent feature kinds in one stream: {sorted(kinds)}")

    def speakers(self) -> list[str]:
        return sorted(self.spectral)


def combine_scores(spectral: float, residual: float, eta: float) -> float:
    """Weighted sum of the two stream scores; eta weights the spectral stream."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta * spectral + (1.0 - eta) * residual


def score_utterance(
    spectral_features: np.ndarray,
    residual_features: np.ndarray,
    model_set: SpeakerModelSet,
    eta: float = 0.5,
    per_frame_average: bool = False,
) -> UtteranceScores:
    """Score one utterance's feature streams against every enrolled speaker.

    Each stream's score is the total log-likelihood of its frames under the
    speaker's model for that stream (mean per frame when ``per_frame_average``
    is set), and the combined score is their eta-weighted sum.
    """
    spectral_features = np.asarray(spectral_features, dtype=np.float64)
    residual_features = np.asarray(residual_features, dtype=np.float64)
    if spectral_features.ndim != 2 or residual_features.ndim != 2:
        raise ValueError("feature streams must be 2-D (frames x dims)")
    if spectral_features.shape[0] == 0:
        raise EmptyFeatureStream("no spectral feature vectors to score")
    if residual_features.shape[0] == 0:
        raise EmptyFeatureStream("no residual feature vectors to score")
    if not model_set.speakers():
        raise ValueError("model set is empty")

    scores: dict[str, StreamScores] = {}
    for speaker in model_set.speakers():
        s_ll = gmm_log_likelihoods(spectral_features, model_set.spectral[speaker])
        r_ll = gmm_log_likelihoods(residual_features, model_set.residual[speaker])
        s_total = float(np.mean(s_ll) if per_frame_average else np.sum(s_ll))
        r_total = float(np.mean(r_ll) if per_frame_average else np.sum(r_ll))
        scores[speaker] = StreamScores(
            spectral=s_total,
            residual=r_total,
            combined=combine_scores(s_total, r_total, eta),
        )
    return UtteranceScores(
        scores=scores,
        eta=eta,
        num_spectral_frames=spectral_features.shape[0],
        num_residual_frames=residual_features.shape[0],
    )


def with_eta(scores: UtteranceScores, eta: float) -> UtteranceScores:
    """Recombine the same per-stream totals under a different fusion weight."""
    return UtteranceScores(
        scores={
            speaker: StreamScores(
                spectral=s.spectral,
                residual=s.residual,
                combined=combine_scores(s.spectral, s.residual, eta),
            )
            for speaker, s in scores.scores.items()
        },
        eta=eta,
        num_spectral_frames=scores.num_spectral_frames,
        num_residual_frames=scores.num_residual_frames,
    )


def identify(scores: UtteranceScores) -> str:
    """Pick the speaker with the highest combined score, lowest id on ties."""
    best_id = None
    best = -np.inf
    for speaker in scores.speakers():
        value = scores.scores[speaker].combined
        if best_id is None or value > best:
            best_id, best = speaker, value
    assert best_id is not None
    return best_id


@dataclass(frozen=True)
class EvaluationReport:
    """Identification decisions with accuracy and confusion counts."""

    decisions: tuple[tuple[str, str, str], ...]
    pia: float
    confusion: dict[tuple[str, str], int]

    @property
    def num_trials(self) -> int:
        return len(self.decisions)

    @property
    def num_correct(self) -> int:
        return sum(1 for _, true_id, decided in self.decisions if decided == true_id)


def evaluate(decisions) -> EvaluationReport:
    """Summarize (utterance_id, true_id, decided_id) triples.

    Accuracy is the percentage of trials whose decided speaker matches the
    true one; the confusion table counts (true, decided) pairs.
    """
    decisions = tuple((str(u), str(t), str(d)) for u, t, d in decisions)
    if not decisions:
        raise ValueError("no decisions to evaluate")
    correct = sum(1 for _, true_id, decided in decisions if decided == true_id)
    confusion: dict[tuple[str, str], int] = {}
    for _, true_id, decided in decisions:
        key = (true_id, decided)
        confusion[key] = confusion.get(key, 0) + 1
    pia = 100.0 * correct / len(decisions)
    return EvaluationReport(decisions=decisions, pia=pia, confusion=confusion)
