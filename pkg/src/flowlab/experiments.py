"""Monte Carlo estimators confronting the analytic bounds with sampled flows.

Replica k of an experiment uses the noise seed derive_seed(seed, k), so
every estimate is a pure function of (config, seed): reruns are bit-stable
and the worker count never changes a number.  Events are evaluated on the
step grid; grid suprema under-estimate continuous-time suprema, so a Monte
Carlo "pass" against a continuous-time upper bound is evidence, not proof
(reports carry this caveat).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from . import _backend as bk
from . import bounds as bd
from . import geometry as geo
from .models import beta0, beta_star_lower, beta_star_upper

GRID_CAVEAT = ("grid-discretized event: grid suprema under-estimate "
               "continuous-time suprema, so a pass is evidence, not proof")


class ConfigError(ValueError):
    """Experiment configuration violates the hypotheses of its target bound."""


# ---------------------------------------------------------------------------
# estimator machinery
# ---------------------------------------------------------------------------

def _map_blocks(fn, n, threads=1, block=8192):
    """Apply fn(rep0, count) over fixed replica blocks; deterministic fold.

    Block boundaries depend only on `block`, never on the worker count, and
    results are concatenated in block order.
    """
    spans = [(a, min(n, a + block) - a) for a in range(0, n, block)]
    if threads <= 1 or len(spans) == 1:
        parts = [fn(a, c) for a, c in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda s: fn(*s), spans))
    return parts


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    std_error: float
    samples: int
    divergent: int


def estimate(event, n, seed, threads=1, block=8192):
    """Frequency of a replica-indexed event.

    event(rep0, count, seed) returns an int8 array of outcomes per replica:
    0 = false, 1 = true, 2 = diverged (counted as event-true, conservative
    accounting, and reported separately).
    """
    if n < 100:
        raise ConfigError("need at least 100 replicas")
    parts = _map_blocks(lambda a, c: np.asarray(event(a, c, seed)), n,
                        threads, block)
    out = np.concatenate(parts)
    hits = int((out >= 1).sum())
    divergent = int((out == 2).sum())
    p = hits / n
    return Estimate(p, math.sqrt(p * (1.0 - p) / n), n, divergent)


def scalar_event(fn):
    """Adapt a per-replica boolean predicate fn(k, seed) to the block protocol."""
    def block(rep0, count, seed):
        return np.array([1 if fn(rep0 + i, seed) else 0 for i in range(count)],
                        dtype=np.int8)
    return block


@dataclass(frozen=True)
class BoundReport:
    """Monte Carlo estimate vs analytic bound with a 3-sigma verdict."""

    name: str
    model: str
    params: dict
    mc_estimate: float
    std_error: float
    samples: int
    analytic_bound: float        # capped value used for the verdict
    bound_raw: float
    seed: int
    step_size: float
    divergent: int = 0
    caveat: str = GRID_CAVEAT
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self):
        return self.mc_estimate <= self.analytic_bound + 3.0 * self.std_error

    def as_dict(self):
        return {
            "name": self.name, "model": self.model, "params": self.params,
            "mc_estimate": self.mc_estimate, "std_error": self.std_error,
            "samples": self.samples, "analytic_bound": self.analytic_bound,
            "bound_raw": self.bound_raw, "verdict": "pass" if self.verdict else "fail",
            "seed": self.seed, "step_size": self.step_size,
            "divergent": self.divergent, "caveat": self.caveat,
            "extra": self.extra,
        }


def _steps_for(T, h):
    steps = round(T / h)
    if steps < 1 or abs(steps * h - T) > 1e-9 * max(1.0, T):
        raise ConfigError(f"horizon {T} is not an integral number of steps of {h}")
    return steps


# ---------------------------------------------------------------------------
# one-point experiments
# ---------------------------------------------------------------------------

def exp_one_point(model, variant, R, S, r_bar, T, *, h, n, seed, threads=1):
    """Escape (start |x|=R, end beyond S) or return (start |x|=S, end below R)
    while never dipping under r_bar; frequency vs the one-point tail bound."""
    if variant not in ("escape", "return"):
        raise ConfigError(f"variant must be escape or return, got {variant!r}")
    if not model.diffusion_bounded:
        raise ConfigError(f"model {model.name} has unbounded diffusion")
    if not (1 <= r_bar < R and S > r_bar and T > 0):
        raise ConfigError("need 1 <= r_bar < R, S > r_bar, T > 0")
    steps = _steps_for(T, h)
    sigma_B = model.constants.sigma_B
    if variant == "escape":
        beta = beta_star_upper(model, r_bar)
        tb = bd.escape_upper(R, S, r_bar, T, sigma_B, beta)
        start = R
    else:
        beta = beta_star_lower(model, r_bar)
        if not math.isfinite(beta):
            raise ConfigError(f"model {model.name} has no finite lower radial rate")
        tb = bd.return_upper(R, S, r_bar, T, sigma_B, beta)
        start = S
    x0 = np.zeros(model.dimension)
    x0[0] = start

    def event(rep0, count, sd):
        term, mn, _, div = bk.one_point_batch(
            model.kernel_id, model.kernel_params, x0, sd, rep0, count, steps, h)
        hit = (mn >= r_bar) & ((term >= S) if variant == "escape" else (term <= R))
        out = hit.astype(np.int8)
        out[div == 1] = 2
        return out

    est = estimate(event, n, seed, threads)
    return BoundReport(
        name=f"one_point_{variant}", model=model.name,
        params={"R": R, "S": S, "r_bar": r_bar, "T": T,
                "beta_star": beta, "sigma_B": sigma_B},
        mc_estimate=est.p_hat, std_error=est.std_error, samples=n,
        analytic_bound=tb.capped, bound_raw=tb.raw,
        seed=seed, step_size=h, divergent=est.divergent)


def exp_dip(model, S, r_bar, T_trunc, *, h, n, seed, threads=1):
    """Ever dipping under r_bar from |x| = S against outward drift.

    The simulated event is truncated at T_trunc, a lower bound for the
    infinite-horizon event: a pass is meaningful, a fail at small T_trunc
    is not.
    """
    if not model.diffusion_bounded:
        raise ConfigError(f"model {model.name} has unbounded diffusion")
    if not (1 <= r_bar < S):
        raise ConfigError("need 1 <= r_bar < S")
    beta = beta_star_lower(model, r_bar)
    if not (math.isfinite(beta) and beta > 0):
        raise ConfigError("dip experiment needs a positive lower radial rate")
    steps = _steps_for(T_trunc, h)
    tb = bd.dip_bound(S, r_bar, model.constants.sigma_B, beta)
    x0 = np.zeros(model.dimension)
    x0[0] = S

    def event(rep0, count, sd):
        _, mn, _, div = bk.one_point_batch(
            model.kernel_id, model.kernel_params, x0, sd, rep0, count, steps, h)
        out = (mn <= r_bar).astype(np.int8)
        out[div == 1] = 2
        return out

    est = estimate(event, n, seed, threads)
    return BoundReport(
        name="dip", model=model.name,
        params={"S": S, "r_bar": r_bar, "T_trunc": T_trunc,
                "beta_star_lower": beta, "sigma_B": model.constants.sigma_B},
        mc_estimate=est.p_hat, std_error=est.std_error, samples=n,
        analytic_bound=tb.capped, bound_raw=tb.raw,
        seed=seed, step_size=h, divergent=est.divergent,
        caveat=GRID_CAVEAT + "; horizon-truncated event under-estimates the "
                             "infinite-horizon probability")


# ---------------------------------------------------------------------------
# two-point and diameter experiments
# ---------------------------------------------------------------------------

def exp_two_point(model, separation, u, T, *, h, n, seed, threads=1, x_base=1.0):
    """Running pair-distance tail vs the dominating-variable bound.

    The verdict compares against the exact reflection-principle tail of the
    dominating variable (sharper than its exponential cap, which is also
    reported).
    """
    if separation < 0 or u <= 0:
        raise ConfigError("need separation >= 0 and u > 0")
    steps = _steps_for(T, h)
    c = model.constants
    exact, tb = bd.two_point_tail(separation, u, T, c.sigma_L, c.lam)
    x0 = np.zeros(model.dimension)
    y0 = np.zeros(model.dimension)
    x0[0] = x_base
    y0[0] = x_base + separation

    if separation == 0:
        est = Estimate(0.0, 0.0, n, 0)   # identical points stay identical
    else:
        def event(rep0, count, sd):
            sup, div = bk.pair_sup_batch(
                model.kernel_id, model.kernel_params, x0, y0, sd, rep0,
                count, steps, h)
            out = (sup >= u).astype(np.int8)
            out[div == 1] = 2
            return out
        est = estimate(event, n, seed, threads)

    extra = {"running_max_bound": tb.capped, "running_max_bound_raw": tb.raw}
    if model.name == "mult1d" and separation > 0:
        lam, sig = model.kernel_params
        extra["exact_flow_probability"] = bd.drifted_sup_tail(
            math.log(u / separation) / sig, (lam - 0.5 * sig**2) / sig, T)
    return BoundReport(
        name="two_point", model=model.name,
        params={"separation": separation, "u": u, "T": T,
                "sigma_L": c.sigma_L, "lam": c.lam},
        mc_estimate=est.p_hat, std_error=est.std_error, samples=n,
        analytic_bound=min(exact, 1.0), bound_raw=exact,
        seed=seed, step_size=h, divergent=est.divergent, extra=extra)


def _cube_lattice(d, corner, side, g):
    axes = [np.linspace(corner, corner + side, g) for _ in range(d)]
    pts = np.array(list(product(*axes)), dtype=np.float64)
    return pts


def exp_diameter(model, xi, u, T, *, grid_per_side=8, h, n, seed, threads=1,
                 corner=0.0):
    """Running diameter of the image of a side-xi cube lattice vs the
    Kolmogorov-continuity diameter bound (c_bar = 2, Lambda = lam,
    sigma = sigma_L from the two-point domination)."""
    if xi < 0 or u <= 0:
        raise ConfigError("need xi >= 0 and u > 0")
    steps = _steps_for(T, h)
    c = model.constants
    if xi == 0:
        est = Estimate(0.0, 0.0, n, 0)
        tb, q, kappa = bd.ball_diameter_bound_opt(
            1e-300, T, u, 2.0, c.lam, c.sigma_L, model.dimension)
    else:
        tb, q, kappa = bd.ball_diameter_bound_opt(
            xi, T, u, 2.0, c.lam, c.sigma_L, model.dimension)
        pts0 = _cube_lattice(model.dimension, corner, xi, grid_per_side)

        def event(rep0, count, sd):
            sup, div = bk.cloud_diam_batch(
                model.kernel_id, model.kernel_params, pts0, sd, rep0,
                count, steps, h)
            out = (sup >= u).astype(np.int8)
            out[div == 1] = 2
            return out

        est = estimate(event, n, seed, threads)
    extra = {"q": q, "kappa": kappa, "log_bound_raw": tb.log_raw,
             "lattice_points": grid_per_side ** model.dimension}
    if model.name == "mult1d" and xi > 0:
        lam, sig = model.kernel_params
        extra["exact_flow_probability"] = bd.drifted_sup_tail(
            math.log(u / xi) / sig, (lam - 0.5 * sig**2) / sig, T)
    return BoundReport(
        name="diameter", model=model.name,
        params={"xi": xi, "u": u, "T": T, "c_bar": 2.0,
                "Lambda": c.lam, "sigma": c.sigma_L},
        mc_estimate=est.p_hat, std_error=est.std_error, samples=n,
        analytic_bound=tb.capped, bound_raw=tb.raw,
        seed=seed, step_size=h, divergent=est.divergent, extra=extra)


# ---------------------------------------------------------------------------
# headline experiments: pullback attraction and expansion
# ---------------------------------------------------------------------------

def _ball_grid(r0, rings, per_ring):
    """Polar grid of the disk B_r0 (origin + rings of equally spaced angles)."""
    pts = [np.zeros(2)]
    for i in range(1, rings + 1):
        rad = r0 * i / rings
        ang = 2.0 * math.pi * np.arange(per_ring) / per_ring
        pts.extend(np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1))
    return np.array(pts)


def _hausdorff(a, b):
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


@dataclass(frozen=True)
class AttractionReport:
    model: str
    params: dict
    ladder: Tuple[float, ...]
    inclusion_freq: Tuple[float, ...]    # P{pullback image of dB_{gamma t} inside B_r}
    absorb_freq: Tuple[float, ...]       # P{pullback image of the B_r0 grid inside B_r0}
    hausdorff_decrease_frac: float
    samples: int
    divergent: int
    seed: int
    step_size: float
    thresholds: dict
    caveat: str = GRID_CAVEAT

    @property
    def verdict(self):
        return (all(f >= self.thresholds["inclusion"] for f in self.inclusion_freq)
                and self.hausdorff_decrease_frac >= self.thresholds["hausdorff"])

    def as_dict(self):
        return {
            "name": "attraction", "model": self.model, "params": self.params,
            "ladder": list(self.ladder), "inclusion_freq": list(self.inclusion_freq),
            "absorb_freq": list(self.absorb_freq),
            "hausdorff_decrease_frac": self.hausdorff_decrease_frac,
            "samples": self.samples, "divergent": self.divergent,
            "seed": self.seed, "step_size": self.step_size,
            "thresholds": self.thresholds,
            "verdict": "pass" if self.verdict else "fail", "caveat": self.caveat,
        }


def exp_attraction(model, gamma, r, T, r0, *, xi_cover, h, n, seed, threads=1,
                   ladder_multipliers=(1, 2, 4, 8),
                   inclusion_threshold=0.95, hausdorff_threshold=0.90):
    """Pullback attraction: evolve coverings of dB_{gamma t} over [-t, 0] and
    check the image stays inside B_r; track the Hausdorff distance between
    successive pullback images of a fixed ball grid.

    Counter-based noise gives pullback consistency: runs from -t and -t' of
    the same replica share every increment they overlap.
    """
    drift_rate = model.radial_upper(1.0)            # -beta for inward models
    b0 = beta0(model.constants, model.dimension)
    if not drift_rate < -b0:
        raise ConfigError(
            f"attraction needs inward drift beyond beta0={b0:.4f}, "
            f"got radial rate {drift_rate}")
    if not 0 <= gamma < -drift_rate - b0:
        raise ConfigError(f"need 0 <= gamma < {-drift_rate - b0:.4f}")
    ladder = tuple(m * T for m in ladder_multipliers)
    grid0 = _ball_grid(r0, rings=5, per_ring=24)
    nmin = np.empty(len(grid0))
    nmax = np.empty(len(grid0))
    covers = {}
    for t in ladder:
        rad = gamma * t
        covers[t] = geo.cover_sphere(model.dimension, rad,
                                     min(xi_cover, rad)).centers

    def one_replica(k, sd):
        rs = bk.derive_seed(sd, k)
        incl = []
        absorb = []
        images = []
        diverged = False
        for t in ladder:
            k0 = -_steps_for(t, h)
            pts = covers[t].copy()
            nm = np.linalg.norm(pts, axis=1)
            if bk.evolve_cloud(model.kernel_id, model.kernel_params, pts, rs,
                               k0, 0, h, nm.copy(), nm.copy()):
                diverged = True
                incl.append(False)
                absorb.append(False)
                images.append(None)
                continue
            incl.append(bool(np.linalg.norm(pts, axis=1).max() <= r))
            gpts = grid0.copy()
            gnm = np.linalg.norm(gpts, axis=1)
            if bk.evolve_cloud(model.kernel_id, model.kernel_params, gpts, rs,
                               k0, 0, h, gnm.copy(), gnm.copy()):
                diverged = True
                absorb.append(False)
                images.append(None)
                continue
            absorb.append(bool(np.linalg.norm(gpts, axis=1).max() <= r0))
            images.append(gpts)
        if any(im is None for im in images):
            decreasing = False
        else:
            dists = [_hausdorff(images[i], images[i + 1])
                     for i in range(len(images) - 1)]
            decreasing = all(dists[i] > dists[i + 1] for i in range(len(dists) - 1))
        return incl, absorb, decreasing, diverged

    def block(rep0, count):
        return [one_replica(rep0 + i, seed) for i in range(count)]

    parts = _map_blocks(block, n, threads, block=max(1, n // max(1, 4 * threads)))
    rows = [row for part in parts for row in part]
    incl = np.array([row[0] for row in rows], dtype=float)
    absorb = np.array([row[1] for row in rows], dtype=float)
    dec = np.array([row[2] for row in rows], dtype=float)
    divergent = sum(1 for row in rows if row[3])
    return AttractionReport(
        model=model.name,
        params={"gamma": gamma, "r": r, "T": T, "r0": r0, "xi_cover": xi_cover,
                "beta0": b0, "radial_rate": drift_rate},
        ladder=ladder,
        inclusion_freq=tuple(incl.mean(axis=0)),
        absorb_freq=tuple(absorb.mean(axis=0)),
        hausdorff_decrease_frac=float(dec.mean()),
        samples=n, divergent=divergent, seed=seed, step_size=h,
        thresholds={"inclusion": inclusion_threshold,
                    "hausdorff": hausdorff_threshold})


@dataclass(frozen=True)
class ExpansionReport:
    model: str
    params: dict
    ladder: Tuple[float, ...]
    containment_freq: Tuple[float, ...]  # P{B_{gamma t} inside image of B_r}
    median_slope: float
    slope_quartiles: Tuple[float, float]
    samples: int
    divergent: int
    seed: int
    step_size: float
    thresholds: dict
    caveat: str = GRID_CAVEAT

    @property
    def verdict(self):
        lo, hi = self.thresholds["slope_range"]
        return (all(f >= self.thresholds["containment"]
                    for f in self.containment_freq)
                and lo <= self.median_slope <= hi)

    def as_dict(self):
        return {
            "name": "expansion", "model": self.model, "params": self.params,
            "ladder": list(self.ladder),
            "containment_freq": list(self.containment_freq),
            "median_slope": self.median_slope,
            "slope_quartiles": list(self.slope_quartiles),
            "samples": self.samples, "divergent": self.divergent,
            "seed": self.seed, "step_size": self.step_size,
            "thresholds": {"containment": self.thresholds["containment"],
                           "slope_range": list(self.thresholds["slope_range"])},
            "verdict": "pass" if self.verdict else "fail", "caveat": self.caveat,
        }


def exp_expansion(model, gamma, r, *, ladder=(5.0, 10.0, 20.0, 40.0), xi_cover,
                  h, n, seed, threads=1, containment_threshold=0.95,
                  slope_range=None):
    """Forward expansion: evolve a covering of dB_r and check B_{gamma t} is
    contained in the image at each ladder time; fit the inner-radius growth
    slope per replica.

    The containment margin at each time is twice the largest observed
    distance between adjacent covering images (the covering-resolution
    slack of the boundary-image test).
    """
    drift_rate = model.radial_lower(1.0)
    b0 = beta0(model.constants, model.dimension)
    if not (math.isfinite(drift_rate) and drift_rate > b0):
        raise ConfigError(
            f"expansion needs outward drift beyond beta0={b0:.4f}, "
            f"got radial rate {drift_rate}")
    if not 0 <= gamma < drift_rate - b0:
        raise ConfigError(f"need 0 <= gamma < {drift_rate - b0:.4f}")
    if slope_range is None:
        slope_range = (drift_rate - b0, drift_rate + 0.5)
    ladder = tuple(sorted(ladder))
    cover0 = geo.cover_sphere(model.dimension, r, min(xi_cover, r)).centers
    times = np.array(ladder)

    def one_replica(k, sd):
        rs = bk.derive_seed(sd, k)
        pts = cover0.copy()
        nm = np.linalg.norm(pts, axis=1)
        contain = []
        radii = []
        prev = 0
        diverged = False
        for t in ladder:
            kt = _steps_for(t, h)
            if not diverged:
                if bk.evolve_cloud(model.kernel_id, model.kernel_params, pts,
                                   rs, prev, kt, h, nm.copy(), nm.copy()):
                    diverged = True
            prev = kt
            if diverged:
                contain.append(False)
                radii.append(math.nan)
                continue
            adjacent = np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1)
            margin = 2.0 * float(adjacent.max())
            contain.append(geo.contains_ball(pts, gamma * t, margin))
            radii.append(geo.inner_radius(pts))
        return contain, radii, diverged

    def block(rep0, count):
        return [one_replica(rep0 + i, seed) for i in range(count)]

    parts = _map_blocks(block, n, threads, block=max(1, n // max(1, 4 * threads)))
    rows = [row for part in parts for row in part]
    contain = np.array([row[0] for row in rows], dtype=float)
    radii = np.array([row[1] for row in rows], dtype=float)
    divergent = sum(1 for row in rows if row[2])
    good = ~np.isnan(radii).any(axis=1)
    slopes = np.array([np.polyfit(times, rr, 1)[0] for rr in radii[good]]) \
        if good.any() else np.array([math.nan])
    return ExpansionReport(
        model=model.name,
        params={"gamma": gamma, "r": r, "xi_cover": xi_cover,
                "beta0": b0, "radial_rate": drift_rate},
        ladder=ladder,
        containment_freq=tuple(contain.mean(axis=0)),
        median_slope=float(np.median(slopes)),
        slope_quartiles=(float(np.percentile(slopes, 25)),
                         float(np.percentile(slopes, 75))),
        samples=n, divergent=divergent, seed=seed, step_size=h,
        thresholds={"containment": containment_threshold,
                    "slope_range": tuple(slope_range)})


# ---------------------------------------------------------------------------
# exact chaining check on dyadic walks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainRow:
    u: float
    lhs: float
    rhs_raw: float
    rhs_capped: float

    @property
    def ok(self):
        return self.lhs <= self.rhs_raw + 1e-12


@dataclass(frozen=True)
class ChainTable:
    steps: int
    rows: Tuple[ChainRow, ...]

    @property
    def all_ok(self):
        return all(r.ok for r in self.rows)

    def as_dict(self):
        return {"name": "chaining_exact", "steps": self.steps,
                "rows": [{"u": r.u, "lhs": r.lhs, "rhs_raw": r.rhs_raw,
                          "rhs_capped": r.rhs_capped,
                          "ok": bool(r.ok)} for r in self.rows],
                "verdict": "pass" if self.all_ok else "fail"}


def walk_increment_tail(steps):
    """Exact aligned-pair decrement tails of the embedded +-1 walk.

    The walk S_0..S_n is embedded on [0, n] as the piecewise-constant step
    process X_t = S_ceil(t) (constant on (k-1, k], so dyadic-aligned pairs
    with gap < 1 sit inside one constancy cell and their decrement tail
    vanishes for positive thresholds).  Returns (increment_tail, lhs) where
    increment_tail(gap, v) is the exact max over aligned pairs of
    P{X_s - X_t >= v} and lhs(u) = P{sup_t X_t - X_n >= u}, both by
    exhaustive enumeration of all 2^n paths.
    """
    if steps not in (4, 8):
        raise ConfigError("exact chaining check supports 4 or 8 steps")
    n = steps
    signs = np.array(list(product((-1.0, 1.0), repeat=n)))
    S = np.concatenate([np.zeros((len(signs), 1)), np.cumsum(signs, axis=1)],
                       axis=1)                        # (2^n, n+1)

    def lhs(u):
        return float(((S.max(axis=1) - S[:, -1]) >= u).mean())

    def increment_tail(gap, v):
        if v <= 0:
            return 1.0
        # aligned pairs at this level: s = (2k-1) gap, t = 2k gap
        if gap * 2 > n + 1e-12:
            return 0.0   # no pair fits in [0, n]
        best = 0.0
        k = 1
        while 2 * k * gap <= n + 1e-12:
            s, t = (2 * k - 1) * gap, 2 * k * gap
            cs, ct = math.ceil(s - 1e-12), math.ceil(t - 1e-12)
            p = float(((S[:, cs] - S[:, ct]) >= v).mean())
            best = max(best, p)
            k += 1
        return best

    return increment_tail, lhs


def chaining_exact_check(steps, u_grid=None):
    """Exhaustive verification of the chaining bound on +-1 walks.

    LHS and RHS are both computed exactly over all 2^steps paths with
    weights eps_j = 2^-j; levels with 2^-j * steps < 1 contribute nothing
    for u > 0 by the constancy-cell argument, so the dyadic series is a
    finite sum.
    """
    if u_grid is None:
        u_grid = [k / 4.0 for k in range(4 * steps + 1)]
    tail, lhs = walk_increment_tail(steps)
    j_max = int(math.log2(steps))
    eps = [2.0 ** -j for j in range(1, j_max + 1)]
    rows = []
    for u in u_grid:
        res = bd.chaining_bound(tail, eps, u, float(steps), j_max)
        rows.append(ChainRow(u=float(u), lhs=lhs(u), rhs_raw=res.bound.raw,
                             rhs_capped=res.bound.capped))
    return ChainTable(steps=steps, rows=tuple(rows))
