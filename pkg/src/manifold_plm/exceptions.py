"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class ManifoldPlmError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidPointError(ManifoldPlmError, ValueError):
    """Raw coordinates do not describe a point on the manifold."""


class InjectivityDomainError(ManifoldPlmError, ValueError):
    """Two points are not within the injectivity radius of each other.

    On the sphere this is the antipodal case, where the volume density
    vanishes and normal coordinates break down.
    """


class EmptyNeighborhoodError(ManifoldPlmError, RuntimeError):
    """No sample point falls inside the kernel support around a query.

    Carries the offending query point so callers can decide a policy
    (skip the bandwidth, fail the fit, ...).
    """

    def __init__(self, query: np.ndarray, message: str | None = None):
        self.query = np.asarray(query)
        super().__init__(message or f"no sample point within bandwidth of query {self.query.tolist()}")


class FitUndefinedError(ManifoldPlmError, RuntimeError):
    """A smoothing step needed by the fit is undefined at some observation."""

    def __init__(self, index: int, message: str | None = None):
        self.index = int(index)
        super().__init__(message or f"smoother undefined at observation {index}")


class CollinearDesignError(ManifoldPlmError, ValueError):
    """The smoothed-out covariate design is numerically rank deficient."""


class InfeasibleBandwidthError(ManifoldPlmError, RuntimeError):
    """A candidate bandwidth leaves some required neighborhood empty.

    This is a control-flow signal for bandwidth selection, not a failure:
    selectors catch it and flag the candidate as infeasible.
    """

    def __init__(self, bandwidth: float, message: str | None = None):
        self.bandwidth = float(bandwidth)
        super().__init__(message or f"bandwidth {bandwidth} is infeasible")


class NoFeasibleBandwidthError(ManifoldPlmError, RuntimeError):
    """Every candidate bandwidth in a grid was infeasible."""


class UnstableDesignError(ManifoldPlmError, RuntimeError):
    """Too many Monte Carlo replications failed to produce an estimate."""


class CsvFormatError(ManifoldPlmError, ValueError):
    """A CSV input violates the expected column/row layout.

    ``row`` is the 1-based data row (header excluded), or None for
    header-level problems.
    """

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")
