"""Diagonal-covariance Gaussian mixture models for speaker modeling.

Training is deterministic: binary-splitting vector quantization seeds the
components, then a fixed number of EM passes refines weights, means, and
floored diagonal variances.  All densities are evaluated in the log domain.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import InsufficientData

# A component whose total responsibility falls below this is re-seeded.
COLLAPSE_THRESHOLD = 1e-10

_KMEANS_MAX_PASSES = 50
_KMEANS_MOVE_TOL = 1e-6

LOG_TWO_PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class TrainingConfig:
    """Mixture size and training schedule for one feature stream."""

    num_components: int
    em_iterations: int = 10
    variance_floor_factor: float = 0.01
    lbg_split_epsilon: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.num_components < 1:
            raise ValueError("num_components must be >= 1")
        if self.em_iterations < 1:
            raise ValueError("em_iterations must be >= 1")


@dataclass(frozen=True)
class GmmModel:
    """Mixture weights, means, and diagonal variances for one speaker stream.

    ``em_log_likelihoods`` holds the total training log-likelihood at
    initialization and after each EM pass; it is informational and not
    serialized.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    feature_kind: str = ""
    em_log_likelihoods: tuple = ()

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        means = np.array(self.means, dtype=np.float64)
        variances = np.array(self.variances, dtype=np.float64)
        if means.ndim != 2:
            raise ValueError("means must be (num_components, dim)")
        if variances.shape != means.shape or weights.shape != (means.shape[0],):
            raise ValueError("weights/means/variances shapes are inconsistent")
        if abs(float(weights.sum()) - 1.0) > 1e-9 or np.any(weights < 0.0):
            raise ValueError("weights must be non-negative and sum to 1")
        if np.any(variances <= 0.0):
            raise ValueError("variances must be strictly positive")
        for name, arr in (("weights", weights), ("means", means), ("variances", variances)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_components(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _canonical_order(features: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically: makes every accumulation during
    training independent of the caller's vector order, so permuting the
    training set yields a bit-identical model."""
    return features[np.lexsort(features.T[::-1])]


def variance_floor(features: np.ndarray, factor: float) -> np.ndarray:
    """Per-dimension floor: factor times the global variance of the data."""
    features = np.asarray(features, dtype=np.float64)
    global_var = features.var(axis=0)
    floor = factor * global_var
    # Guard constant dimensions so variances stay strictly positive.
    return np.maximum(floor, 1e-12)


def _nearest_centroid(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    sq = (
        np.sum(features**2, axis=1)[:, None]
        - 2.0 * features @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.argmin(sq, axis=1)


def _reseed_empty_cells(features, centroids, labels, empty):
    """Move empty centroids onto the points farthest from their centroid."""
    dists = np.sum((features - centroids[labels]) ** 2, axis=1)
    farthest = np.argsort(dists, kind="stable")[::-1]
    for slot, cell in enumerate(empty):
        centroids[cell] = features[farthest[slot % farthest.size]]
    return centroids


def _kmeans(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Lloyd passes until centroid movement < tolerance or the pass limit."""
    for _ in range(_KMEANS_MAX_PASSES):
        labels = _nearest_centroid(features, centroids)
        new_centroids = centroids.copy()
        counts = np.bincount(labels, minlength=centroids.shape[0])
        empty = np.flatnonzero(counts == 0)
        for j in range(centroids.shape[0]):
            if counts[j] > 0:
                new_centroids[j] = features[labels == j].mean(axis=0)
        if empty.size:
            new_centroids = _reseed_empty_cells(features, new_centroids, labels, empty)
        move = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if move < _KMEANS_MOVE_TOL:
            break
    return centroids


def lbg_init(features: np.ndarray, num_components: int, cfg: TrainingConfig) -> GmmModel:
    """Binary-splitting VQ initialization of a mixture model.

    Starting from the global centroid, each codeword is split into a
    +/- perturbed pair (epsilon times the per-dimension standard deviation)
    and refined by k-means until ``num_components`` cells exist.  Cell
    occupancies give the weights; cell scatter gives the floored variances.

    Raises:
        InsufficientData: fewer vectors than components, or cells cannot
            all be populated.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ValueError("features must be (num_vectors, dim)")
    if num_components & (num_components - 1):
        raise ValueError("binary splitting requires a power-of-two component count")
    if features.shape[0] < num_components:
        raise InsufficientData(
            f"{features.shape[0]} vectors for {num_components} components"
        )
    features = _canonical_order(features)
    floor = variance_floor(features, cfg.variance_floor_factor)
    delta = cfg.lbg_split_epsilon * np.sqrt(features.var(axis=0))
    centroids = features.mean(axis=0, keepdims=True)
    while centroids.shape[0] < num_components:
        centroids = np.vstack([centroids + delta, centroids - delta])
        centroids = _kmeans(features, centroids)

    labels = _nearest_centroid(features, centroids)
    counts = np.bincount(labels, minlength=num_components)
    for _ in range(10):
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            break
        centroids = _reseed_empty_cells(features, centroids, labels, empty)
        labels = _nearest_centroid(features, centroids)
        counts = np.bincount(labels, minlength=num_components)
    else:
        raise InsufficientData("could not populate every cell; too few distinct vectors")

    means = np.empty_like(centroids)
    variances = np.empty_like(centroids)
    for j in range(num_components):
        cell = features[labels == j]
        means[j] = cell.mean(axis=0)
        variances[j] = np.maximum(cell.var(axis=0), floor)
    weights = counts / counts.sum()
    return GmmModel(weights=weights, means=means, variances=variances)


def component_log_density(x: np.ndarray, i: int, model: GmmModel) -> float:
    """Log of the i-th component's Gaussian density at one vector."""
    x = np.asarray(x, dtype=np.float64)
    diff = x - model.means[i]
    return float(
        -0.5
        * (
            model.dim * LOG_TWO_PI
            + np.sum(np.log(model.variances[i]))
            + np.sum(diff * diff / model.variances[i])
        )
    )


def _log_densities(features: np.ndarray, model: GmmModel) -> np.ndarray:
    """Component log densities for a batch: shape (num_vectors, M)."""
    diff = features[:, None, :] - model.means[None, :, :]
    quad = np.sum(diff * diff / model.variances[None, :, :], axis=2)
    const = model.dim * LOG_TWO_PI + np.sum(np.log(model.variances), axis=1)
    return -0.5 * (const[None, :] + quad)


def _log_joint(features: np.ndarray, model: GmmModel) -> np.ndarray:
    with np.errstate(divide="ignore"):
        log_weights = np.log(model.weights)
    return _log_densities(features, model) + log_weights[None, :]


def gmm_log_likelihood(x: np.ndarray, model: GmmModel) -> float:
    """Stable log p(x | model) via max-shifted summation over components."""
    x = np.asarray(x, dtype=np.float64)
    return float(logsumexp(_log_joint(x[None, :], model), axis=1)[0])


def gmm_log_likelihoods(features: np.ndarray, model: GmmModel) -> np.ndarray:
    """Per-vector log-likelihoods for a feature matrix."""
    features = np.asarray(features, dtype=np.float64)
    return logsumexp(_log_joint(features, model), axis=1)


def em_train(features: np.ndarray, init: GmmModel, cfg: TrainingConfig) -> GmmModel:
    """Refine a mixture with a fixed number of EM passes.

    Each pass computes responsibilities from the current parameters, then
    re-estimates weights (mean responsibility), means, and floored diagonal
    variances.  A component whose total responsibility collapses is
    re-seeded on the worst-scoring vector and training continues.

    Returns the final model with the log-likelihood trace attached
    (initial value plus one per pass).
    """
    features = np.asarray(features, dtype=np.float64)
    num = features.shape[0]
    if num < 10 * cfg.num_components:
        warnings.warn(
            f"only {num} vectors for {cfg.num_components} components; "
            "estimates may be unreliable",
            stacklevel=2,
        )
    features = _canonical_order(features)
    floor = variance_floor(features, cfg.variance_floor_factor)
    global_var = np.maximum(features.var(axis=0), floor)

    weights = init.weights.copy()
    means = init.means.copy()
    variances = init.variances.copy()
    model = GmmModel(weights=weights, means=means, variances=variances,
                     feature_kind=init.feature_kind)
    trace = []
    for _ in range(cfg.em_iterations):
        joint = _log_joint(features, model)
        per_vector = logsumexp(joint, axis=1)
        trace.append(float(per_vector.sum()))
        resp = np.exp(joint - per_vector[:, None])
        totals = resp.sum(axis=0)

        collapsed = np.flatnonzero(totals < COLLAPSE_THRESHOLD)
        if collapsed.size:
            worst = np.argsort(per_vector, kind="stable")
            weights = totals / num
            means = model.means.copy()
            variances = model.variances.copy()
            alive = totals >= COLLAPSE_THRESHOLD
            means[alive] = (resp.T[alive] @ features) / totals[alive][:, None]
            second = (resp.T[alive] @ features**2) / totals[alive][:, None]
            variances[alive] = np.maximum(second - means[alive] ** 2, floor)
            for slot, j in enumerate(collapsed):
                means[j] = features[worst[slot % num]]
                variances[j] = global_var
                weights[j] = 1.0 / num
            weights = weights / weights.sum()
        else:
            weights = totals / num
            means = (resp.T @ features) / totals[:, None]
            second = (resp.T @ features**2) / totals[:, None]
            variances = np.maximum(second - means**2, floor)

        model = GmmModel(weights=weights, means=means, variances=variances,
                         feature_kind=init.feature_kind)
    trace.append(float(gmm_log_likelihoods(features, model).sum()))
    return GmmModel(
        weights=model.weights,
        means=model.means,
        variances=model.variances,
        feature_kind=init.feature_kind,
        em_log_likelihoods=tuple(trace),
    )
