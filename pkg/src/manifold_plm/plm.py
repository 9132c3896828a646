"""Two-stage partially linear estimation.

The model is ``y = x' beta + g(t) + eps`` with ``t`` on a manifold. Both the
response and every linear covariate are smoothed on ``t``; ordinary least
squares on the smoothing residuals gives ``beta``, and plugging back in
gives the nonparametric component ``g``. The large-sample distribution of
``beta`` is normal with covariance ``sigma_eps^2 * Sigma^{-1} / n``, which
the Wald statistic uses for inference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CollinearDesignError, EmptyNeighborhoodError, FitUndefinedError
from .geometry import Manifold
from .smoothing import SmootherConfig, cross_smoothing_matrix, smoothing_matrix

# Relative singular-value cutoff below which the residual design is treated
# as collinear.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Responses, linear covariates and manifold-valued covariates.

    ``points`` are validated (and normalized) against ``manifold`` on
    construction and lengths must agree. Fitting additionally needs
    n >= p + 2, checked where the fit happens so that small validation
    subsets remain representable.
    """

    y: np.ndarray
    x: np.ndarray
    points: np.ndarray
    manifold: Manifold

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        points = self.manifold.validate_points(self.points)
        n = y.shape[0]
        if n < 1:
            raise ValueError("dataset must be non-empty")
        if x.shape[0] != n or points.shape[0] != n:
            raise ValueError("y, x and points must have the same number of rows")
        if x.shape[1] < 1:
            raise ValueError("at least one linear covariate is required")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise ValueError("y and x must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class PlmFit:
    """Result of a partially linear fit.

    ``sigma_hat`` is the centered Gram matrix ``x~' x~ / n`` (symmetric PSD),
    the plug-in for the covariance limit of the residual covariates.
    """

    beta_hat: np.ndarray
    bandwidth: float
    sigma2_eps_hat: float
    sigma_hat: np.ndarray
    phi0_at_sample: np.ndarray
    phi_at_sample: np.ndarray
    residuals: np.ndarray


def center_covariates(data: Dataset, config: SmootherConfig) -> tuple[np.ndarray, np.ndarray]:
    """Full-sample smooths of the response and of each covariate column.

    Returns ``(phi0_hat, phi_hat)`` with ``phi0_hat[i]`` the smooth of y at
    ``t_i`` and ``phi_hat[i, j]`` the smooth of column j. Each observation
    contributes to its own smooth (leave-one-out is reserved for
    cross-validation).
    """
    try:
        weights = smoothing_matrix(config, data.points)
    except EmptyNeighborhoodError as err:
        # Cannot happen at sample points (self-weight is positive), but the
        # contract names the offending index if it ever does.
        index = _nearest_index(data.points, err.query, data.manifold)
        raise FitUndefinedError(index) from err
    return weights @ data.y, weights @ data.x


def _nearest_index(points: np.ndarray, query: np.ndarray, manifold: Manifold) -> int:
    return int(np.argmin(manifold.pairwise_distances(query[None, :], points)[0]))


def fit_beta(data: Dataset, config: SmootherConfig) -> PlmFit:
    """Estimate the linear coefficients by least squares on smoothing residuals.

    Raises :class:`CollinearDesignError` when the centered covariates are
    numerically rank deficient (smallest singular value below
    ``RANK_RTOL`` times the largest).
    """
    if data.n < data.p + 2:
        raise ValueError(f"need n >= p + 2 observations to fit, got n={data.n}, p={data.p}")
    phi0_hat, phi_hat = center_covariates(data, config)
    x_tilde = data.x - phi_hat
    y_tilde = data.y - phi0_hat

    singular_values = np.linalg.svd(x_tilde, compute_uv=False)
    if singular_values[-1] <= RANK_RTOL * singular_values[0]:
        raise CollinearDesignError(
            "centered covariates are collinear "
            f"(singular values {singular_values.tolist()})"
        )

    beta_hat, *_ = np.linalg.lstsq(x_tilde, y_tilde, rcond=None)
    residuals = y_tilde - x_tilde @ beta_hat
    n, p = data.n, data.p
    sigma2 = float(residuals @ residuals) / (n - p)
    sigma_hat = (x_tilde.T @ x_tilde) / n
    return PlmFit(
        beta_hat=beta_hat,
        bandwidth=config.bandwidth,
        sigma2_eps_hat=sigma2,
        sigma_hat=sigma_hat,
        phi0_at_sample=phi0_hat,
        phi_at_sample=phi_hat,
        residuals=residuals,
    )


def estimate_g_many(
    fit: PlmFit, data: Dataset, config: SmootherConfig, queries: np.ndarray
) -> np.ndarray:
    """Nonparametric component at each query point: smooth of y minus smooth of x' beta."""
    weights = cross_smoothing_matrix(config, queries, data.points)
    return weights @ data.y - (weights @ data.x) @ fit.beta_hat


def estimate_g(fit: PlmFit, data: Dataset, config: SmootherConfig, query) -> float:
    """Nonparametric component at one query point."""
    query = config.manifold.check_point(np.asarray(query, dtype=float))
    return float(estimate_g_many(fit, data, config, query[None, :])[0])


def g_at_sample(fit: PlmFit) -> np.ndarray:
    """Nonparametric component evaluated at the fitted sample points."""
    return fit.phi0_at_sample - fit.phi_at_sample @ fit.beta_hat


def predict_many(
    fit: PlmFit, data: Dataset, config: SmootherConfig, x_new: np.ndarray, queries: np.ndarray
) -> np.ndarray:
    """Predicted responses ``x' beta + g(t)`` at new covariate/point pairs."""
    x_new = np.asarray(x_new, dtype=float)
    if x_new.ndim == 1:
        x_new = x_new[:, None]
    return x_new @ fit.beta_hat + estimate_g_many(fit, data, config, queries)


def wald_test(fit: PlmFit, beta0, n: int) -> tuple[float, int]:
    """Wald statistic for ``H0: beta = beta0`` and its chi-square degrees of freedom.

    ``W = n (beta_hat - beta0)' Sigma_hat (beta_hat - beta0) / sigma2_hat``,
    asymptotically chi-square with p degrees of freedom under the null.
    """
    beta0 = np.asarray(beta0, dtype=float).reshape(-1)
    p = fit.beta_hat.shape[0]
    if beta0.shape[0] != p:
        raise ValueError(f"beta0 must have length {p}")
    eigenvalues = np.linalg.eigvalsh(fit.sigma_hat)
    if eigenvalues[0] <= RANK_RTOL * max(eigenvalues[-1], 1.0):
        raise CollinearDesignError("covariance plug-in matrix is singular")
    delta = fit.beta_hat - beta0
    statistic = float(n * delta @ fit.sigma_hat @ delta / fit.sigma2_eps_hat)
    return statistic, p


def beta_standard_errors(fit: PlmFit, n: int) -> np.ndarray:
    """Plug-in standard errors sqrt(sigma2 * Sigma^{-1} / n) of the coefficients."""
    cov = fit.sigma2_eps_hat * np.linalg.inv(fit.sigma_hat) / n
    return np.sqrt(np.diag(cov))
