"""Bandwidth selection criteria.

Three scores are provided: leave-one-out cross-validation ``cv_score``, the
cheaper split-sample criterion ``sv_score`` (smooths fitted on a training
half, scored on a validation half), and ``prediction_error_ep``, the squared
prediction error of a fully nonparametric competitor on Euclidean
predictors. Candidate bandwidths that leave some required neighborhood
empty raise :class:`InfeasibleBandwidthError`; grid selectors flag them and
exclude them from the argmin instead of crashing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    EmptyNeighborhoodError,
    InfeasibleBandwidthError,
    NoFeasibleBandwidthError,
)
from .geometry import Euclidean
from .plm import Dataset
from .smoothing import SmootherConfig, cross_smoothing_matrix, smoothing_matrix

DEFAULT_GRID_SIZE = 30
# Default grid endpoints: 5th percentile of positive pairwise distances up
# to this fraction of the injectivity radius (or of the data diameter when
# the radius is infinite).
GRID_UPPER_FRACTION = 0.9
GRID_LOWER_PERCENTILE = 5.0


@dataclass(frozen=True)
class BandwidthGrid:
    """Strictly increasing positive bandwidth candidates."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise ValueError("bandwidth grid must be non-empty")
        if not np.all(values > 0.0):
            raise ValueError("bandwidths must be positive")
        if not np.all(np.diff(values) > 0.0):
            raise ValueError("bandwidth grid must be strictly increasing")
        object.__setattr__(self, "values", values)

    @classmethod
    def log_spaced(cls, lo: float, hi: float, count: int) -> "BandwidthGrid":
        if not (0.0 < lo < hi):
            raise ValueError("need 0 < lo < hi")
        if count < 1:
            raise ValueError("need at least one grid point")
        if count == 1:
            return cls(np.array([lo]))
        return cls(np.geomspace(lo, hi, count))


@dataclass(frozen=True)
class BandwidthScore:
    """One grid entry: the candidate, its score (nan if infeasible), feasibility."""

    bandwidth: float
    score: float
    feasible: bool


@dataclass(frozen=True)
class SelectionResult:
    """Best feasible bandwidth plus the full score curve."""

    best_bandwidth: float
    scores: list[BandwidthScore]


def default_grid(data: Dataset, count: int = DEFAULT_GRID_SIZE) -> BandwidthGrid:
    """Log-spaced grid from the 5th percentile of pairwise distances up to
    90% of the injectivity radius (data diameter on Euclidean space)."""
    distances = data.manifold.pairwise_distances(data.points, data.points)
    upper = np.triu_indices(data.n, k=1)
    positive = distances[upper]
    positive = positive[positive > 0.0]
    if positive.size == 0:
        raise ValueError("all points coincide; no data-driven grid exists")
    inj = data.manifold.injectivity_radius
    hi = GRID_UPPER_FRACTION * (inj if math.isfinite(inj) else float(positive.max()))
    lo = float(np.percentile(positive, GRID_LOWER_PERCENTILE))
    lo = min(lo, hi / 2.0)
    return BandwidthGrid.log_spaced(lo, hi, count)


def _loo_centered(data: Dataset, h: float, distances: np.ndarray | None = None):
    """Leave-one-out centered response and covariates at every sample point."""
    config = SmootherConfig(data.manifold, h)
    try:
        weights = smoothing_matrix(config, data.points, leave_one_out=True, distances=distances)
    except EmptyNeighborhoodError as err:
        raise InfeasibleBandwidthError(h, str(err)) from err
    return data.y - weights @ data.y, data.x - weights @ data.x


def _cv_score_from_distances(data: Dataset, h: float, distances: np.ndarray | None) -> float:
    y_tilde, x_tilde = _loo_centered(data, h, distances)
    beta_tilde, *_ = np.linalg.lstsq(x_tilde, y_tilde, rcond=None)
    residuals = y_tilde - x_tilde @ beta_tilde
    return float(residuals @ residuals)


def cv_score(data: Dataset, h: float) -> float:
    """Leave-one-out cross-validation score of a candidate bandwidth.

    Every observation is smoothed out of its own neighborhood; a single
    coefficient vector minimizing the summed squared residuals is fitted on
    the centered design, and the minimized sum is returned.
    """
    if data.n < 3:
        raise ValueError("cross-validation needs at least 3 observations")
    return _cv_score_from_distances(data, h, None)


def select_cv(data: Dataset, grid: BandwidthGrid) -> SelectionResult:
    """Minimize the cross-validation score over a grid.

    Infeasible candidates are flagged (score nan) and excluded; ties break
    toward the smaller bandwidth. Raises
    :class:`NoFeasibleBandwidthError` when nothing on the grid is feasible.
    """
    inj = data.manifold.injectivity_radius
    if grid.values[-1] >= inj:
        raise ValueError(f"grid contains bandwidths >= injectivity radius {inj}")
    distances = data.manifold.pairwise_distances(data.points, data.points)
    scores: list[BandwidthScore] = []
    best_h = math.nan
    best_score = math.inf
    for h in grid.values:
        try:
            score = _cv_score_from_distances(data, float(h), distances)
        except InfeasibleBandwidthError:
            scores.append(BandwidthScore(float(h), math.nan, False))
            continue
        scores.append(BandwidthScore(float(h), score, True))
        if score < best_score:
            best_score = score
            best_h = float(h)
    if math.isnan(best_h):
        raise NoFeasibleBandwidthError("every bandwidth in the grid is infeasible")
    return SelectionResult(best_bandwidth=best_h, scores=scores)


def sv_score(train: Dataset, validate: Dataset, h: float) -> float:
    """Split-sample validation score.

    Smooths are fitted on ``train`` only and evaluated at the validation
    points; the coefficient vector minimizes the validation sum of squares
    and the minimized sum is returned. Partitioning (e.g. odd/even indices)
    is the caller's choice.
    """
    if train.manifold != validate.manifold:
        raise ValueError("train and validation sets must share a manifold")
    config = SmootherConfig(train.manifold, h)
    try:
        weights = cross_smoothing_matrix(config, validate.points, train.points)
    except EmptyNeighborhoodError as err:
        raise InfeasibleBandwidthError(h, str(err)) from err
    y_tilde = validate.y - weights @ train.y
    x_tilde = validate.x - weights @ train.x
    beta_tilde, *_ = np.linalg.lstsq(x_tilde, y_tilde, rcond=None)
    residuals = y_tilde - x_tilde @ beta_tilde
    return float(residuals @ residuals)


def prediction_error_ep(
    train_responses,
    train_predictors,
    validate_responses,
    validate_predictors,
    h: float,
) -> float:
    """Squared prediction error of a fully nonparametric fit on Euclidean predictors.

    The competitor smooths the training responses directly on the predictor
    values (no linear part) and is scored at the validation predictors.
    """
    train_x = _as_matrix(train_predictors)
    validate_x = _as_matrix(validate_predictors)
    if train_x.shape[1] != validate_x.shape[1]:
        raise ValueError("train and validation predictors must have the same width")
    y_train = np.asarray(train_responses, dtype=float).reshape(-1)
    y_validate = np.asarray(validate_responses, dtype=float).reshape(-1)
    config = SmootherConfig(Euclidean(train_x.shape[1]), h)
    try:
        weights = cross_smoothing_matrix(config, validate_x, train_x)
    except EmptyNeighborhoodError as err:
        raise InfeasibleBandwidthError(h, str(err)) from err
    residuals = y_validate - weights @ y_train
    return float(residuals @ residuals)


def _as_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def evaluate_sv_curve(train: Dataset, validate: Dataset, grid: BandwidthGrid) -> list[BandwidthScore]:
    """Split-sample score at every grid candidate, flagging infeasible ones."""
    return _curve(lambda h: sv_score(train, validate, h), grid)


def evaluate_ep_curve(
    train_responses,
    train_predictors,
    validate_responses,
    validate_predictors,
    grid: BandwidthGrid,
) -> list[BandwidthScore]:
    """Nonparametric-competitor score at every grid candidate."""
    return _curve(
        lambda h: prediction_error_ep(
            train_responses, train_predictors, validate_responses, validate_predictors, h
        ),
        grid,
    )


def _curve(score_fn, grid: BandwidthGrid) -> list[BandwidthScore]:
    scores = []
    for h in grid.values:
        try:
            scores.append(BandwidthScore(float(h), score_fn(float(h)), True))
        except InfeasibleBandwidthError:
            scores.append(BandwidthScore(float(h), math.nan, False))
    return scores


def best_feasible(scores: list[BandwidthScore]) -> BandwidthScore | None:
    """Smallest-score feasible entry (ties toward smaller bandwidth), or None."""
    best = None
    for entry in scores:
        if entry.feasible and (best is None or entry.score < best.score):
            best = entry
    return best
