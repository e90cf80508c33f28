"""Vocal-source features: central moments of the peak-normalized LP residual.

Each frame is inverse-filtered, scaled so the residual peaks at +/-1, and
summarized by its central moments of orders 2 through K+1.  The first-order
moment is zero by construction and therefore not emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, NoUsableFrames
from .frontend import FrameSequence
from .lpc import compute_lp, inverse_filter


@dataclass(frozen=True)
class ResidualMomentFeatures:
    """Per-frame moment vectors plus the count of skipped degenerate frames."""

    vectors: np.ndarray
    skipped_frames: int = 0

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def num_moments(self) -> int:
        return self.vectors.shape[1]


def normalize_residual(residual: np.ndarray) -> np.ndarray:
    """Scale a residual frame so its maximum absolute value is exactly 1.

    Raises:
        DegenerateFrame: the residual is identically zero.
    """
    residual = np.asarray(residual, dtype=np.float64)
    if residual.size == 0:
        raise ValueError("residual must be non-empty")
    peak = float(np.max(np.abs(residual)))
    if peak == 0.0:
        raise DegenerateFrame("all-zero residual cannot be normalized")
    return residual / peak


def central_moments(residual: np.ndarray, num_moments: int) -> np.ndarray:
    """Central moments m_2 .. m_(num_moments+1) of one residual frame."""
    residual = np.asarray(residual, dtype=np.float64)
    if num_moments < 1:
        raise ValueError("num_moments must be >= 1")
    deviations = residual - residual.mean()
    orders = np.arange(2, num_moments + 2)
    return np.array([np.mean(deviations**k) for k in orders])


def extract_residual_moments(
    frames: FrameSequence, lp_order: int = 17, num_moments: int = 6
) -> ResidualMomentFeatures:
    """Run the residual-moment pipeline over every frame of an utterance.

    Per frame: fit the predictor, inverse-filter, peak-normalize, take
    central moments.  Degenerate frames are skipped and counted.

    Raises:
        NoUsableFrames: every frame was degenerate.
    """
    if len(frames) == 0:
        raise ValueError("frame sequence must be non-empty")
    vectors = []
    skipped = 0
    for frame in frames.frames:
        try:
            lp = compute_lp(frame, lp_order)
            residual = inverse_filter(frame, lp)
            vectors.append(central_moments(normalize_residual(residual), num_moments))
        except DegenerateFrame:
            skipped += 1
    if not vectors:
        raise NoUsableFrames(f"all {skipped} frames degenerate")
    return ResidualMomentFeatures(np.asarray(vectors), skipped_frames=skipped)
