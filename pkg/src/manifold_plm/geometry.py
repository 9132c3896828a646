"""Geometry of the supported manifolds.

Three manifolds are supported: Euclidean space of any dimension, the unit
sphere in R^3, and a bounded cylinder of unit radius with the flat product
metric. Each exposes geodesic distance, the volume density correction used
by density-normalized kernel smoothing, the injectivity radius (the upper
bound for admissible bandwidths), and point validation.

Points are plain numpy arrays:

* Euclidean(d): shape ``(d,)``
* Sphere: shape ``(3,)``, unit norm
* Cylinder: shape ``(2,)`` as ``(angle, height)`` with angle in ``[0, 2*pi)``

All operations are pure functions of immutable values and are safe for
concurrent use.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .exceptions import InjectivityDomainError, InvalidPointError

TWO_PI = 2.0 * math.pi

# Norm slack accepted by validate_point before a sphere point is rejected;
# inputs inside it are renormalized. STRICT_UNIT_TOL is the invariant
# enforced on already-validated points.
SPHERE_NORM_TOL = 1e-6
STRICT_UNIT_TOL = 1e-9

# Sphere pairs at geodesic distance >= pi - ANTIPODAL_TOL are treated as
# antipodal: the volume density is undefined there.
ANTIPODAL_TOL = 1e-12


class Manifold(ABC):
    """Common interface of the supported manifolds."""

    #: intrinsic dimension, used by the kernel density normalization n*h^d
    dim: int
    #: number of coordinates in the raw point encoding
    ambient_dim: int

    @property
    @abstractmethod
    def injectivity_radius(self) -> float:
        """Upper bound for admissible bandwidths (may be ``inf``)."""

    @abstractmethod
    def validate_point(self, raw) -> np.ndarray:
        """Return a normalized point or raise :class:`InvalidPointError`."""

    @abstractmethod
    def check_point(self, p: np.ndarray) -> np.ndarray:
        """Assert that ``p`` already satisfies the point invariants."""

    @abstractmethod
    def pairwise_distances(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Geodesic distances between rows of ``a`` (m,k) and ``b`` (n,k) as (m,n)."""

    @abstractmethod
    def density_at_distance(self, rho) -> np.ndarray:
        """Volume density as a function of geodesic distance.

        All supported manifolds have an isotropic volume density, so the
        correction depends on the base point only through the distance.
        """

    def validate_points(self, raw) -> np.ndarray:
        """Validate a batch of points given as rows of a (n, ambient_dim) array."""
        arr = np.asarray(raw, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != self.ambient_dim:
            raise InvalidPointError(
                f"expected an (n, {self.ambient_dim}) array of points, got shape {arr.shape}"
            )
        return np.stack([self.validate_point(row) for row in arr])

    def distance(self, a, b) -> float:
        """Geodesic distance between two valid points."""
        a = self.check_point(np.asarray(a, dtype=float))
        b = self.check_point(np.asarray(b, dtype=float))
        return float(self.pairwise_distances(a[None, :], b[None, :])[0, 0])

    def volume_density(self, base, target) -> float:
        """Volume density at ``target`` in normal coordinates around ``base``.

        Equals 1 at ``target == base`` and everywhere on the flat manifolds;
        the sphere restricts the pair to the injectivity domain.
        """
        return float(self.density_at_distance(np.asarray(self.distance(base, target))))


@dataclass(frozen=True)
class Euclidean(Manifold):
    """R^d with the canonical metric. Distance is the Euclidean norm, density is 1."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("Euclidean dimension must be a positive integer")
        object.__setattr__(self, "dim", int(self.d))
        object.__setattr__(self, "ambient_dim", int(self.d))

    @property
    def injectivity_radius(self) -> float:
        return math.inf

    def validate_point(self, raw) -> np.ndarray:
        p = np.asarray(raw, dtype=float).reshape(-1)
        if p.shape != (self.d,):
            raise InvalidPointError(f"expected {self.d} coordinates, got {p.shape[0]}")
        if not np.all(np.isfinite(p)):
            raise InvalidPointError("coordinates must be finite")
        return p

    def check_point(self, p: np.ndarray) -> np.ndarray:
        return self.validate_point(p)

    def pairwise_distances(self, a, b) -> np.ndarray:
        diff = a[:, None, :] - b[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def density_at_distance(self, rho) -> np.ndarray:
        return np.ones_like(np.asarray(rho, dtype=float))


@dataclass(frozen=True)
class Sphere(Manifold):
    """The unit sphere S^2 embedded in R^3.

    Geodesic distance is the great-circle arc ``arccos(a . b)``, evaluated in
    the equivalent chord form ``2 asin(|a - b| / 2)`` (argument clamped to
    [0, 1] to absorb floating-point drift): identical points get distance
    exactly 0 and antipodes exactly pi, where the arccos form loses ~1e-8.
    The volume density is ``sin(rho)/rho``, extended by continuity to 1 at
    ``rho = 0``; it is undefined at antipodal pairs.
    """

    dim = 2
    ambient_dim = 3

    @property
    def injectivity_radius(self) -> float:
        return math.pi

    def validate_point(self, raw) -> np.ndarray:
        p = np.asarray(raw, dtype=float).reshape(-1)
        if p.shape != (3,):
            raise InvalidPointError(f"expected 3 coordinates, got {p.shape[0]}")
        if not np.all(np.isfinite(p)):
            raise InvalidPointError("coordinates must be finite")
        norm = float(np.linalg.norm(p))
        if abs(norm - 1.0) > SPHERE_NORM_TOL:
            raise InvalidPointError(f"sphere point has norm {norm}, too far from 1")
        return p / norm

    def check_point(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise InvalidPointError("sphere points need 3 finite coordinates")
        if abs(float(np.linalg.norm(p)) - 1.0) > STRICT_UNIT_TOL:
            raise InvalidPointError("sphere point is not unit norm; validate it first")
        return p

    def pairwise_distances(self, a, b) -> np.ndarray:
        diff = a[:, None, :] - b[None, :, :]
        half_chord = 0.5 * np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        return 2.0 * np.arcsin(np.minimum(half_chord, 1.0))

    def density_at_distance(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        if np.any(rho >= math.pi - ANTIPODAL_TOL):
            raise InjectivityDomainError(
                "volume density is undefined at antipodal sphere pairs"
            )
        # np.sinc(x) = sin(pi x)/(pi x), so sinc(rho/pi) = sin(rho)/rho with
        # the rho = 0 limit handled exactly.
        return np.sinc(rho / math.pi)


@dataclass(frozen=True)
class Cylinder(Manifold):
    """S^1 x [height_min, height_max] of unit radius with the flat product metric.

    Distance is the Pythagorean combination of the shorter arc between the
    angles and the height difference; the boundary plays no geometric role.
    The flat metric makes the volume density identically 1.
    """

    height_min: float
    height_max: float

    dim = 2
    ambient_dim = 2

    def __post_init__(self):
        if not (self.height_min < self.height_max):
            raise ValueError("cylinder requires height_min < height_max")

    @property
    def injectivity_radius(self) -> float:
        # Cut locus of the unit circle factor: opposite angles, arc length pi.
        return math.pi

    def validate_point(self, raw) -> np.ndarray:
        p = np.asarray(raw, dtype=float).reshape(-1)
        if p.shape != (2,):
            raise InvalidPointError(f"expected (angle, height), got {p.shape[0]} coordinates")
        if not np.all(np.isfinite(p)):
            raise InvalidPointError("coordinates must be finite")
        angle = float(np.mod(p[0], TWO_PI))
        if angle >= TWO_PI:
            # np.mod of a tiny negative rounds up to the modulus itself.
            angle = 0.0
        height = float(p[1])
        if not (self.height_min <= height <= self.height_max):
            raise InvalidPointError(
                f"height {height} outside [{self.height_min}, {self.height_max}]"
            )
        return np.array([angle, height])

    def check_point(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.shape != (2,) or not np.all(np.isfinite(p)):
            raise InvalidPointError("cylinder points need 2 finite coordinates")
        if not (0.0 <= p[0] < TWO_PI):
            raise InvalidPointError("angle not normalized to [0, 2*pi); validate it first")
        if not (self.height_min <= p[1] <= self.height_max):
            raise InvalidPointError(
                f"height {p[1]} outside [{self.height_min}, {self.height_max}]"
            )
        return p

    def pairwise_distances(self, a, b) -> np.ndarray:
        raw = np.abs(a[:, None, 0] - b[None, :, 0])
        arc = np.minimum(raw, TWO_PI - raw)
        dh = a[:, None, 1] - b[None, :, 1]
        return np.hypot(arc, dh)

    def density_at_distance(self, rho) -> np.ndarray:
        return np.ones_like(np.asarray(rho, dtype=float))
