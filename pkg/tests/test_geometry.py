"""Coverings, diameters, and the ball-containment predicate."""

import math

import numpy as np
import pytest

from flowlab import geometry as geo


def ring(n, radius=1.0, center=(0.0, 0.0)):
    ang = 2 * math.pi * np.arange(n) / n
    return np.stack([center[0] + radius * np.cos(ang),
                     center[1] + radius * np.sin(ang)], axis=1)


class TestCoverSphere:
    def test_d1_two_points(self):
        cov = geo.cover_sphere(1, 7.0, 0.1)
        np.testing.assert_array_equal(np.sort(cov.centers.ravel()), [-7.0, 7.0])
        assert cov.count == 2

    def test_d2_count_formula(self):
        # N = ceil(pi / arcsin(xi/(2S))) = ceil(12.434) = 13
        assert geo.cover_sphere(2, 1.0, 0.5).count == 13

    def test_d2_count_linear_bound(self):
        # arcsin(x) >= x gives N <= 2 pi S / xi + 1 for the shipped
        # adjacent-center spacing 2 arcsin(xi/(2S))
        for xi in (0.05, 0.1, 0.3, 0.7, 1.0):
            cov = geo.cover_sphere(2, 1.0, xi)
            assert cov.count <= 2 * math.pi / xi + 1

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_verified_cover_random_pairs(self, d):
        rng = np.random.default_rng(100 + d)
        lo = 0.25 if d == 3 else 0.02
        for _ in range(20):
            S = rng.uniform(0.5, 20.0)
            xi = S * rng.uniform(lo, 1.0)
            cov = geo.cover_sphere(d, S, xi)
            norms = np.linalg.norm(cov.centers, axis=1)
            assert np.abs(norms - S).max() <= 1e-12 * S
            assert geo.probe_gap(cov) <= xi
            assert cov.count <= 40.0 * (S / xi) ** (d - 1) + 1

    def test_invalid_inputs(self):
        with pytest.raises(geo.UnsupportedDimensionError):
            geo.cover_sphere(4, 1.0, 0.5)
        with pytest.raises(ValueError):
            geo.cover_sphere(2, 1.0, 0.0)
        with pytest.raises(ValueError):
            geo.cover_sphere(2, 1.0, 1.5)


class TestDiameter:
    def test_simple_cases(self):
        assert geo.diameter([[0.0, 0.0]]) == 0.0
        assert geo.diameter([[0, 0], [3, 4]]) == 5.0
        assert geo.diameter(ring(16)) == pytest.approx(2.0)

    def test_permutation_and_isometry_invariance(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(60, 2))
        d0 = geo.diameter(pts)
        perm = pts[rng.permutation(60)]
        assert geo.diameter(perm) == pytest.approx(d0, rel=1e-12)
        th = rng.uniform(0, 2 * math.pi)
        rot = np.array([[math.cos(th), -math.sin(th)],
                        [math.sin(th), math.cos(th)]])
        moved = pts @ rot.T + rng.normal(size=2)
        assert geo.diameter(moved) == pytest.approx(d0, rel=1e-9)

    def test_calipers_path_matches_bruteforce(self):
        rng = np.random.default_rng(42)
        pts = rng.normal(size=(5000, 2))        # > 4096, goes through calipers
        fast = geo.diameter(pts)
        hull_pts = pts[geo.ConvexHull(pts).vertices]
        diff = hull_pts[:, None, :] - hull_pts[None, :, :]
        brute = math.sqrt(float((diff * diff).sum(-1).max()))
        assert fast == pytest.approx(brute, rel=1e-12)

    def test_d1_path(self):
        assert geo.diameter(np.array([[1.0], [-2.0], [0.5]])) == 3.0


class TestInnerRadius:
    def test_identity_and_scaling(self):
        assert geo.inner_radius(ring(32, radius=2.0)) == pytest.approx(2.0)
        assert geo.inner_radius(3.0 * ring(32, radius=2.0)) == pytest.approx(6.0)

    def test_translated_circle(self):
        # min |x + (1,0)| over |x| = 2 is 1
        assert geo.inner_radius(ring(720, 2.0, center=(1.0, 0.0))) == \
            pytest.approx(1.0, abs=1e-4)

    def test_never_exceeds_max_norm(self):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(50, 2)) + 3
        assert geo.inner_radius(pts) <= np.linalg.norm(pts, axis=1).max()


class TestContainsBall:
    def test_identity_images(self):
        img = ring(64, radius=5.0)
        assert geo.contains_ball(img, 4.0, 0.5)
        assert not geo.contains_ball(img, 5.0, 0.5)

    def test_origin_outside_winding_zero(self):
        img = ring(64, radius=1.0, center=(5.0, 0.0))
        assert not geo.contains_ball(img, 0.1, 0.0)

    def test_monotone_in_rho(self):
        img = ring(64, radius=5.0)
        rng = np.random.default_rng(6)
        for _ in range(30):
            rho = rng.uniform(0, 6)
            if geo.contains_ball(img, rho, 0.25):
                assert geo.contains_ball(img, rho * rng.uniform(0, 1), 0.25)

    def test_d1_straddle(self):
        assert geo.contains_ball(np.array([[-3.0], [4.0]]), 2.0, 0.5)
        assert not geo.contains_ball(np.array([[1.0], [4.0]]), 0.5, 0.0)

    def test_d3_convex_hull(self):
        sph = 4.0 * geo._fibonacci_sphere(200)
        assert geo.contains_ball(sph, 2.0, 0.5)
        assert not geo.contains_ball(sph + np.array([10.0, 0, 0]), 1.0, 0.0)

    def test_winding_number(self):
        assert geo.winding_number(ring(16)) == 1
        assert geo.winding_number(ring(16)[::-1]) == -1
        assert geo.winding_number(ring(16, center=(5, 0))) == 0
