"""Geometry: distances, volume densities, injectivity radii, validation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manifold_plm import (
    Cylinder,
    Euclidean,
    InjectivityDomainError,
    InvalidPointError,
    Sphere,
)
from conftest import ALL_MANIFOLDS, random_points


class TestDistance:
    def test_sphere_antipodal(self):
        assert Sphere().distance([1, 0, 0], [-1, 0, 0]) == pytest.approx(math.pi, abs=1e-15)

    def test_sphere_orthogonal(self):
        assert Sphere().distance([1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_cylinder_pythagoras(self):
        d = Cylinder(-2, 2).distance([0.0, 0.0], [math.pi / 2, 1.0])
        assert d == pytest.approx(math.hypot(math.pi / 2, 1.0), abs=1e-15)

    def test_cylinder_wraps_short_way(self):
        # 0.1 and 2*pi - 0.1 are 0.2 apart around the circle, not 6.08.
        d = Cylinder(-2, 2).distance([0.1, 0.0], [2 * math.pi - 0.1, 0.0])
        assert d == pytest.approx(0.2, abs=1e-12)

    def test_euclidean_is_norm(self, rng):
        m = Euclidean(3)
        for _ in range(20):
            a, b = rng.normal(size=3), rng.normal(size=3)
            assert m.distance(a, b) == pytest.approx(np.linalg.norm(a - b), rel=1e-15)

    def test_rejects_invalid_point(self):
        with pytest.raises(InvalidPointError):
            Sphere().distance([2, 0, 0], [1, 0, 0])

    @pytest.mark.parametrize("manifold", ALL_MANIFOLDS, ids=str)
    def test_metric_axioms_on_sampled_triples(self, manifold, rng):
        pts = random_points(manifold, rng, 40)
        d = manifold.pairwise_distances(pts, pts)
        assert np.allclose(d, d.T, atol=0), "symmetry must be exact"
        assert np.all(np.diag(d) == 0.0)
        assert np.all(d[~np.eye(40, dtype=bool)] > 0), "distinct points at positive distance"
        # Triangle inequality within 1e-12 on all sampled triples:
        # d(i, k) <= d(i, j) + d(j, k).
        assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-12)

    def test_scalar_matches_matrix_path(self, rng):
        for manifold in ALL_MANIFOLDS:
            pts = random_points(manifold, rng, 10)
            matrix = manifold.pairwise_distances(pts, pts)
            for i in range(10):
                for j in range(10):
                    assert manifold.distance(pts[i], pts[j]) == matrix[i, j]


class TestVolumeDensity:
    @pytest.mark.parametrize("manifold", ALL_MANIFOLDS, ids=str)
    def test_density_at_base_is_one(self, manifold, rng):
        p = random_points(manifold, rng, 1)[0]
        assert manifold.volume_density(p, p) == 1.0

    def test_sphere_quarter_circle(self):
        assert Sphere().volume_density([1, 0, 0], [0, 1, 0]) == pytest.approx(
            2 / math.pi, abs=1e-15
        )

    def test_cylinder_always_one(self, rng):
        m = Cylinder(-2, 2)
        pts = random_points(m, rng, 30)
        for i in range(0, 30, 3):
            assert m.volume_density(pts[i], pts[(i + 7) % 30]) == 1.0

    def test_euclidean_always_one(self, rng):
        m = Euclidean(2)
        a, b = rng.normal(size=2), rng.normal(size=2)
        assert m.volume_density(a, b) == 1.0

    def test_sphere_antipodal_rejected(self):
        with pytest.raises(InjectivityDomainError):
            Sphere().volume_density([1, 0, 0], [-1, 0, 0])

    def test_sphere_arc_matches_arccos_form(self, rng):
        m = Sphere()
        pts = random_points(m, rng, 30)
        dots = np.clip(pts @ pts.T, -1.0, 1.0)
        assert np.allclose(m.pairwise_distances(pts, pts), np.arccos(dots), atol=1e-7)

    def test_sphere_density_symmetric_in_arguments(self, rng):
        m = Sphere()
        pts = random_points(m, rng, 20)
        for i in range(10):
            a, b = pts[2 * i], pts[2 * i + 1]
            if m.distance(a, b) >= math.pi - 1e-9:
                continue
            assert m.volume_density(a, b) == m.volume_density(b, a)

    def test_sphere_density_decreasing_and_bounded(self):
        rhos = np.linspace(0.0, math.pi - 1e-6, 500)
        vals = Sphere().density_at_distance(rhos)
        assert vals[0] == 1.0
        assert np.all(vals > 0.0)
        assert np.all(vals <= 1.0)
        assert np.all(np.diff(vals) < 0.0)


class TestInjectivityRadius:
    def test_values(self):
        assert Euclidean(3).injectivity_radius == math.inf
        assert Sphere().injectivity_radius == math.pi
        assert Cylinder(-2, 2).injectivity_radius == math.pi

    def test_cylinder_arc_formula_is_minimizing(self, rng):
        # The arc term must equal the minimum over unwrapped angle copies,
        # which caps the angular contribution at pi (the cut locus of the
        # circle factor). This pins the injectivity radius at pi.
        m = Cylinder(-2, 2)
        pts = random_points(m, rng, 25)
        for i in range(25):
            for j in range(25):
                direct = m.distance(pts[i], pts[j])
                unwrapped = min(
                    math.hypot(pts[i, 0] - pts[j, 0] + 2 * math.pi * k, pts[i, 1] - pts[j, 1])
                    for k in range(-2, 3)
                )
                assert direct == pytest.approx(unwrapped, abs=1e-12)
                arc = min(
                    abs(pts[i, 0] - pts[j, 0]), 2 * math.pi - abs(pts[i, 0] - pts[j, 0])
                )
                assert arc <= math.pi + 1e-15


class TestValidatePoint:
    def test_sphere_rejects_far_from_unit(self):
        with pytest.raises(InvalidPointError):
            Sphere().validate_point([2.0, 0.0, 0.0])

    def test_sphere_renormalizes_near_unit(self):
        p = Sphere().validate_point([1.0 + 1e-8, 0.0, 0.0])
        assert np.allclose(p, [1.0, 0.0, 0.0], atol=0)
        assert np.linalg.norm(p) == 1.0

    def test_cylinder_normalizes_angle(self):
        p = Cylinder(-2, 2).validate_point([-math.pi / 2, 0.0])
        assert p[0] == pytest.approx(3 * math.pi / 2, abs=1e-15)
        assert p[1] == 0.0

    def test_cylinder_rejects_out_of_range_height(self):
        with pytest.raises(InvalidPointError):
            Cylinder(-2, 2).validate_point([0.0, 2.5])

    def test_euclidean_rejects_wrong_length(self):
        with pytest.raises(InvalidPointError):
            Euclidean(2).validate_point([1.0, 2.0, 3.0])

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidPointError):
            Euclidean(2).validate_point([np.nan, 0.0])
        with pytest.raises(InvalidPointError):
            Sphere().validate_point([np.inf, 0.0, 0.0])

    def test_cylinder_requires_ordered_heights(self):
        with pytest.raises(ValueError):
            Cylinder(2.0, -2.0)

    @given(
        theta=st.floats(-50.0, 50.0),
        s=st.floats(-2.0, 2.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_cylinder_angle_always_lands_in_range(self, theta, s):
        p = Cylinder(-2, 2).validate_point([theta, s])
        assert 0.0 <= p[0] < 2 * math.pi
        assert p[1] == s

    @given(st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3))
    @settings(max_examples=200, deadline=None)
    def test_sphere_validation_idempotent(self, raw):
        norm = math.sqrt(sum(v * v for v in raw))
        if abs(norm - 1.0) > 1e-6:
            with pytest.raises(InvalidPointError):
                Sphere().validate_point(raw)
        else:
            once = Sphere().validate_point(raw)
            twice = Sphere().validate_point(once)
            assert np.allclose(once, twice, atol=1e-15)
