"""Density-normalized kernel smoothing with geodesic distances.

The smoother weights an observation ``t_i`` seen from a query point ``t`` by

    a_i = K(d(t, t_i) / h) / theta_t(t_i)

where ``K`` is a compactly supported kernel, ``d`` the geodesic distance and
``theta`` the manifold's volume density. The kernel factor is evaluated
first and ``a_i`` is hard-zeroed outside the kernel support, so the sphere's
vanishing density at antipodal pairs is never touched (any admissible
bandwidth satisfies ``h < pi``). Normalized weights divide by the total, so
the regression estimate is a convex combination of responses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import EmptyNeighborhoodError
from .geometry import Manifold


class QuadraticKernel:
    """Quartic polynomial kernel (15/16)(1 - u^2)^2 supported on [0, 1)."""

    def evaluate(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.0):
            raise ValueError("kernel argument must be nonnegative")
        inside = u < 1.0
        out = np.zeros_like(u)
        out[inside] = (15.0 / 16.0) * (1.0 - u[inside] ** 2) ** 2
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadraticKernel)

    def __hash__(self) -> int:
        return hash(type(self))


@dataclass(frozen=True)
class SmootherConfig:
    """Manifold, kernel and bandwidth of a smoother.

    The bandwidth must be positive and strictly below the manifold's
    injectivity radius, which keeps the weights defined everywhere.
    """

    manifold: Manifold
    bandwidth: float
    kernel: QuadraticKernel = field(default_factory=QuadraticKernel)

    def __post_init__(self):
        if not (0.0 < self.bandwidth < self.manifold.injectivity_radius):
            raise ValueError(
                f"bandwidth must lie in (0, {self.manifold.injectivity_radius}), "
                f"got {self.bandwidth}"
            )


def kernel_eval(kernel: QuadraticKernel, u: float) -> float:
    """Evaluate the kernel at a single nonnegative argument."""
    return float(kernel.evaluate(np.asarray(u, dtype=float)))


def raw_weights_from_distances(config: SmootherConfig, distances: np.ndarray) -> np.ndarray:
    """Unnormalized weights for precomputed geodesic distances (any shape)."""
    a = config.kernel.evaluate(distances / config.bandwidth)
    inside = a > 0.0
    if np.any(inside):
        a[inside] /= config.manifold.density_at_distance(distances[inside])
    return a


def raw_weights(config: SmootherConfig, query, sample: np.ndarray) -> np.ndarray:
    """Unnormalized weights of each sample point seen from ``query``.

    Entries are exactly zero outside the kernel support.
    """
    query = config.manifold.check_point(np.asarray(query, dtype=float))
    distances = config.manifold.pairwise_distances(query[None, :], sample)[0]
    return raw_weights_from_distances(config, distances)


def normalized_weights(config: SmootherConfig, query, sample: np.ndarray) -> np.ndarray:
    """Weights rescaled to sum to one.

    Raises :class:`EmptyNeighborhoodError` when no sample point falls inside
    the bandwidth; the caller decides the policy.
    """
    a = raw_weights(config, query, sample)
    total = a.sum()
    if total <= 0.0:
        raise EmptyNeighborhoodError(np.asarray(query, dtype=float))
    return a / total


def nw_regress(config: SmootherConfig, query, sample: np.ndarray, responses) -> float:
    """Locally weighted mean of ``responses`` at ``query``."""
    responses = np.asarray(responses, dtype=float)
    if responses.shape[0] != sample.shape[0]:
        raise ValueError("responses must match the sample length")
    return float(normalized_weights(config, query, sample) @ responses)


def density_estimate(config: SmootherConfig, query, sample: np.ndarray) -> float:
    """Kernel density estimate at ``query``: sum of raw weights over n*h^d.

    Returns 0 for an empty neighborhood. The kernel keeps its univariate
    normalizing constant on every manifold, so on d > 1 manifolds the
    estimate is a constant multiple of a unit-mass density; the constant
    cancels wherever weights are normalized.
    """
    a = raw_weights(config, query, sample)
    n = sample.shape[0]
    return float(a.sum() / (n * config.bandwidth**config.manifold.dim))


def loo_regress(config: SmootherConfig, i: int, sample: np.ndarray, responses) -> float:
    """Locally weighted mean at ``sample[i]`` with observation ``i`` removed."""
    n = sample.shape[0]
    if n < 2:
        raise ValueError("leave-one-out smoothing needs at least 2 observations")
    keep = np.arange(n) != i
    responses = np.asarray(responses, dtype=float)
    return nw_regress(config, sample[i], sample[keep], responses[keep])


def smoothing_matrix(
    config: SmootherConfig,
    sample: np.ndarray,
    *,
    leave_one_out: bool = False,
    distances: np.ndarray | None = None,
) -> np.ndarray:
    """Row-stochastic matrix W with W[i] the weights of a smooth at sample[i].

    With ``leave_one_out`` the diagonal is zeroed before normalizing, so row
    ``i`` smooths over all observations except ``i``. ``distances`` accepts a
    precomputed pairwise geodesic distance matrix (reused across bandwidths).
    Raises :class:`EmptyNeighborhoodError` naming the first empty row.
    """
    if distances is None:
        distances = config.manifold.pairwise_distances(sample, sample)
    a = raw_weights_from_distances(config, distances)
    if leave_one_out:
        np.fill_diagonal(a, 0.0)
    totals = a.sum(axis=1)
    empty = np.flatnonzero(totals <= 0.0)
    if empty.size:
        i = int(empty[0])
        raise EmptyNeighborhoodError(
            sample[i], f"no other sample point within bandwidth of observation {i}"
        )
    return a / totals[:, None]


def cross_smoothing_matrix(
    config: SmootherConfig, queries: np.ndarray, sample: np.ndarray
) -> np.ndarray:
    """Row-stochastic (m, n) matrix smoothing sample responses at m query points."""
    distances = config.manifold.pairwise_distances(queries, sample)
    a = raw_weights_from_distances(config, distances)
    totals = a.sum(axis=1)
    empty = np.flatnonzero(totals <= 0.0)
    if empty.size:
        raise EmptyNeighborhoodError(queries[int(empty[0])])
    return a / totals[:, None]
