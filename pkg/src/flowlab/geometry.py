"""Sphere coverings and containment predicates on point-cloud images.

Coverings convert pointwise tail bounds into uniform ones; the number of
centers is reported together with the achieved covering constant
c_d = N (xi/S)^(d-1).  Containment of a ball in a flow image is decided
from the image of the boundary covering, which is justified for (near-)
homeomorphic flows; the discretization slack is absorbed into an explicit
resolution margin.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, cKDTree


class UnsupportedDimensionError(ValueError):
    """Coverings are constructed for d in {1, 2, 3} only."""


@dataclass(frozen=True)
class Covering:
    """Centers on the sphere of radius S covering it at resolution xi."""

    dimension: int
    sphere_radius: float
    ball_radius: float
    centers: np.ndarray        # (N, d), all of norm S

    @property
    def count(self):
        return len(self.centers)

    @property
    def achieved_constant(self):
        """c_d = N (xi/S)^(d-1) actually attained by this construction."""
        return self.count * (self.ball_radius / self.sphere_radius) ** (self.dimension - 1)


def _fibonacci_sphere(n):
    """n points on the unit 2-sphere, near-uniform (golden-angle lattice)."""
    i = np.arange(n)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    th = phi * i
    return np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)


def _sphere_probe(d, n):
    """Dense probe mesh on the unit sphere for cover verification."""
    if d == 2:
        ang = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return _fibonacci_sphere(n)


def probe_gap(covering, mesh_factor=10):
    """Largest distance from a dense sphere probe to the nearest center.

    The probe mesh is xi/mesh_factor, so probe_gap <= xi certifies the cover
    at that resolution.
    """
    d, S, xi = covering.dimension, covering.sphere_radius, covering.ball_radius
    if d == 1:
        return 0.0
    n = int(math.ceil((mesh_factor * math.pi * S / xi))) + 1
    if d == 3:
        n = int(math.ceil(3.0 * (mesh_factor * math.pi * S / xi) ** 2)) + 1
    probe = S * _sphere_probe(d, n)
    dist, _ = cKDTree(covering.centers).query(probe, k=1)
    return float(dist.max())


def cover_sphere(d, S, xi):
    """Cover the radius-S sphere boundary by balls of radius xi.

    d=1: the two endpoints.  d=2: equally spaced points with angular spacing
    at most 2 arcsin(xi/(2S)).  d=3: a Fibonacci lattice grown until a dense
    probe (mesh xi/10) verifies the cover.
    """
    if d not in (1, 2, 3):
        raise UnsupportedDimensionError(f"coverings support d in {{1,2,3}}, got {d}")
    if S <= 0 or not 0 < xi <= S:
        raise ValueError("need S > 0 and 0 < xi <= S")
    if d == 1:
        centers = np.array([[-S], [S]])
        return Covering(1, S, xi, centers)
    if d == 2:
        n = int(math.ceil(math.pi / math.asin(xi / (2.0 * S))))
        ang = 2.0 * math.pi * np.arange(n) / n
        centers = S * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return Covering(2, S, xi, centers)
    # d == 3: area heuristic, then verify and grow
    n = max(8, int(math.ceil(6.0 * (S / xi) ** 2)))
    for _ in range(24):
        cov = Covering(3, S, xi, S * _fibonacci_sphere(n))
        if probe_gap(cov) <= xi:
            return cov
        n = int(n * 1.3) + 1
    raise RuntimeError(f"could not verify a 3-d cover at S={S}, xi={xi}")


def _calipers(pts):
    """Exact diameter of a planar point set via convex hull rotating calipers."""
    hull = ConvexHull(pts)
    hp = pts[hull.vertices]
    k = len(hp)
    if k == 1:
        return 0.0
    if k == 2:
        return float(np.linalg.norm(hp[0] - hp[1]))
    best = 0.0
    j = 1

    def area2(a, b, c):
        u, v = b - a, c - a
        return abs(u[0] * v[1] - u[1] * v[0])
    for i in range(k):
        ni = (i + 1) % k
        while area2(hp[i], hp[ni], hp[(j + 1) % k]) > area2(hp[i], hp[ni], hp[j]):
            j = (j + 1) % k
        for p in (hp[j], hp[(j + 1) % k]):
            best = max(best,
                       float(np.linalg.norm(hp[i] - p)),
                       float(np.linalg.norm(hp[ni] - p)))
    return best


def diameter(points):
    """Largest pairwise distance; exact.

    O(n^2) up to 4096 points; above that the d=2 path goes through the
    convex hull (rotating calipers), other dimensions through the hull
    vertices pairwise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n, d = pts.shape
    if n <= 1:
        return 0.0
    if d == 1:
        return float(pts.max() - pts.min())
    if n <= 4096:
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff * diff).sum(-1).max()))
    if d == 2:
        return _calipers(pts)
    hp = pts[ConvexHull(pts).vertices]
    diff = hp[:, None, :] - hp[None, :, :]
    return float(np.sqrt((diff * diff).sum(-1).max()))


def inner_radius(points):
    """Minimum norm over a boundary image.

    For a (near-)homeomorphic flow whose image region contains the origin,
    the image of the boundary sphere bounds the image of the ball, so this
    lower-bounds the true inner radius up to the covering resolution.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return float(np.linalg.norm(pts, axis=1).min())


def winding_number(points):
    """Winding number of a closed polygon (points in boundary order) around 0."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    dang = np.diff(np.concatenate([ang, ang[:1]]))
    dang = (dang + math.pi) % (2.0 * math.pi) - math.pi
    return int(round(dang.sum() / (2.0 * math.pi)))


def contains_ball(boundary_image, rho, resolution_margin):
    """Does the region bounded by this boundary image contain the ball B_rho?

    Requires inner_radius >= rho + resolution_margin together with a
    containment check of the origin: sign straddle (d=1), winding number 1
    (d=2, points in boundary order), origin inside the convex hull (d=3,
    a documented under-approximation).
    """
    if rho < 0:
        raise ValueError("rho must be >= 0")
    pts = np.atleast_2d(np.asarray(boundary_image, dtype=np.float64))
    if inner_radius(pts) < rho + resolution_margin:
        return False
    d = pts.shape[1]
    if d == 1:
        return bool(pts.min() < 0.0 < pts.max())
    if d == 2:
        return winding_number(pts) == 1
    if d == 3:
        try:
            return bool(Delaunay(pts).find_simplex(np.zeros(3)) >= 0)
        except Exception:
            return False
    raise UnsupportedDimensionError(f"containment supports d in {{1,2,3}}, got {d}")
