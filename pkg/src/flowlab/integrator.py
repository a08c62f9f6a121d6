"""Euler-Maruyama evolution of point clouds under shared noise.

All points of a cloud see the same increments (flow coupling), so a cloud
is a sample of the n-point motion of the flow.  Running extrema of point
norms and (optionally) pairwise distances are tracked on the step grid;
grid suprema underestimate continuous-time suprema, so any bound violation
detected on the grid is genuine.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend as bk
from . import _modeldefs as md

PAIR_TRACKING_LIMIT = 64


class NumericOverflowError(RuntimeError):
    """A coordinate left the 1e300 guard; the realization diverged."""


@dataclass(frozen=True)
class PointCloud:
    """Time-stamped ordered point set with running norm extrema.

    Point order is stable under evolution: point i at any time is the image
    of initial point i.
    """

    time: float
    points: np.ndarray                    # (n, d)
    running_norm_max: np.ndarray          # (n,)
    running_norm_min: np.ndarray          # (n,)
    pair_max: Optional[np.ndarray] = None  # (n, n) running max pairwise distance

    @classmethod
    def create(cls, points, time=0.0, track_pairs=False):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64)).copy()
        nrm = np.linalg.norm(pts, axis=1)
        pair = None
        if track_pairs:
            if len(pts) > PAIR_TRACKING_LIMIT:
                raise ValueError(
                    f"pair tracking limited to {PAIR_TRACKING_LIMIT} points")
            diff = pts[:, None, :] - pts[None, :, :]
            pair = np.sqrt((diff * diff).sum(-1))
        return cls(time=float(time), points=pts,
                   running_norm_max=nrm.copy(), running_norm_min=nrm.copy(),
                   pair_max=pair)

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def dimension(self):
        return self.points.shape[1]

    def norms(self):
        return np.linalg.norm(self.points, axis=1)

    def diameter_seen(self):
        """Largest pairwise distance observed on the grid so far (needs tracking)."""
        if self.pair_max is None:
            raise ValueError("cloud was created without pair tracking")
        return float(self.pair_max.max()) if self.size > 1 else 0.0


def step(model, cloud, increments, h):
    """Single reference Euler-Maruyama step with explicit per-driver increments.

    Every point receives the same increments.  `evolve` is the fast path;
    this function exists as the plainly written single-step oracle.
    """
    dw = np.asarray(increments, dtype=np.float64)
    if dw.shape != (model.driver_count,):
        raise ValueError(
            f"expected {model.driver_count} increments, got shape {dw.shape}")
    pts = md.euler_update(model.kernel_id, model.kernel_params,
                          cloud.points, dw[None, :], h)
    if not np.isfinite(pts).all() or (np.abs(pts) > 1e300).any():
        raise NumericOverflowError(f"divergence at t={cloud.time + h}")
    nrm = np.linalg.norm(pts, axis=1)
    pair = None
    if cloud.pair_max is not None:
        diff = pts[:, None, :] - pts[None, :, :]
        pair = np.maximum(cloud.pair_max, np.sqrt((diff * diff).sum(-1)))
    return PointCloud(
        time=cloud.time + h,
        points=pts,
        running_norm_max=np.maximum(cloud.running_norm_max, nrm),
        running_norm_min=np.minimum(cloud.running_norm_min, nrm),
        pair_max=pair,
    )


def evolve(model, cloud, from_step, to_step, noise):
    """Evolve a cloud from grid step `from_step` to `to_step` (two-sided indices).

    Deterministic in (model, cloud, noise, index range); the discrete flow
    property evolve(s,u) = evolve(t,u) o evolve(s,t) holds bit-exactly
    because the state is passed through unchanged.
    """
    if from_step > to_step:
        raise ValueError("from_step must be <= to_step")
    if noise.driver_count < model.driver_count:
        raise ValueError("noise source has fewer drivers than the model")
    if from_step == to_step:
        return cloud
    pts = cloud.points.copy()
    nmin = cloud.running_norm_min.copy()
    nmax = cloud.running_norm_max.copy()
    pair = None if cloud.pair_max is None else cloud.pair_max.copy()
    diverged = bk.evolve_cloud(
        model.kernel_id, model.kernel_params, pts, noise.seed,
        int(from_step), int(to_step), noise.step_size, nmin, nmax, pair)
    if diverged:
        raise NumericOverflowError(
            f"divergence while evolving steps {from_step}..{to_step}")
    return PointCloud(
        time=to_step * noise.step_size,
        points=pts, running_norm_max=nmax, running_norm_min=nmin, pair_max=pair)


def exact_mult1d(x0, lam, sigma, w_t, t):
    """Closed-form flow of the multiplicative model: x*exp(sigma*W_t + (lam - sigma^2/2)t)."""
    return x0 * np.exp(sigma * w_t + (lam - 0.5 * sigma**2) * t)
