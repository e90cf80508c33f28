"""Per-frame linear prediction via the autocorrelation method.

Coefficients follow the inverse-filter sign convention
``A(z) = 1 + sum_k a(k) z^-k``, i.e. the predictor output is
``-sum_k a(k) s(n-k)`` and the residual is ``e(n) = s(n) + sum_k a(k) s(n-k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame

# Relative ridge added to the zero-lag autocorrelation so near-silent
# frames stay solvable without measurably biasing the coefficients.
AUTOCORR_RIDGE = 1e-9


@dataclass(frozen=True)
class LpCoefficients:
    """Predictor coefficients a(1)..a(p) plus the residual RMS gain."""

    a: np.ndarray
    gain: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        object.__setattr__(self, "a", a)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("a must be a non-empty 1-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        if self.gain < 0.0:
            raise ValueError("gain must be non-negative")

    @property
    def order(self) -> int:
        return self.a.size


def autocorrelation(frame: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased autocorrelation r(0..max_lag) with zero extension."""
    frame = np.asarray(frame, dtype=np.float64)
    full = np.correlate(frame, frame, mode="full")
    mid = frame.size - 1
    return full[mid : mid + max_lag + 1].copy()


def _levinson_durbin(r: np.ndarray, order: int) -> np.ndarray:
    """Order-recursive solve of the Toeplitz normal equations.

    Returns the forward predictor weights alpha(1..order) with
    ``s_hat(n) = sum_k alpha(k) s(n-k)``.
    """
    alpha = np.zeros(order)
    err = r[0]
    for i in range(order):
        acc = r[i + 1] - np.dot(alpha[:i], r[i:0:-1])
        k = acc / err
        prev = alpha[:i].copy()
        alpha[i] = k
        alpha[:i] = prev - k * prev[::-1]
        err *= 1.0 - k * k
        if err <= 0.0 or not np.isfinite(err):
            raise DegenerateFrame("prediction error collapsed during recursion")
    return alpha


def compute_lp(frame: np.ndarray, order: int) -> LpCoefficients:
    """Fit an order-p predictor to one frame by the autocorrelation method.

    The gain is the RMS of the frame-local residual, so ``gain**2`` equals
    the mean squared residual by construction.

    Raises:
        DegenerateFrame: frame is identically zero, or the regularized
            normal equations are numerically singular.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if order < 1:
        raise ValueError("order must be >= 1")
    if frame.size <= order:
        raise ValueError(f"frame length {frame.size} must exceed order {order}")
    r = autocorrelation(frame, order)
    if r[0] <= 0.0:
        raise DegenerateFrame("frame has zero energy")
    r[0] *= 1.0 + AUTOCORR_RIDGE
    alpha = _levinson_durbin(r, order)
    a = -alpha
    residual = np.convolve(frame, np.concatenate(([1.0], a)))[: frame.size]
    gain = float(np.sqrt(np.mean(residual * residual)))
    return LpCoefficients(a=a, gain=gain)


def inverse_filter(frame: np.ndarray, lp: LpCoefficients) -> np.ndarray:
    """Residual e(n) = s(n) + sum_k a(k) s(n-k), zero history before the frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if lp.order >= frame.size:
        raise ValueError("predictor order must be below the frame length")
    return np.convolve(frame, np.concatenate(([1.0], lp.a)))[: frame.size]


def predict(frame: np.ndarray, lp: LpCoefficients) -> np.ndarray:
    """Predictor output -sum_k a(k) s(n-k), zero history before the frame."""
    frame = np.asarray(frame, dtype=np.float64)
    conv = np.convolve(frame, lp.a)[: frame.size]
    shifted = np.concatenate(([0.0], conv[:-1]))
    return -shifted
