"""Pure-numpy kernel backend.

Reference implementation of the hot loops: counter-based normal increments
(Philox4x32-10 + Box-Muller) and the Euler-Maruyama batch drivers.  The
compiled backend in ``_kernels_cy`` exports the same functions; integer
outputs are bit-identical across backends, float outputs agree to rounding
because the two backends may use different libm implementations.

Increment keying: the standard normal attached to (seed, lane, step) is a
pure function of those three integers.  ``lane`` is the 1-based driver
index, ``step`` ranges over all of Z (negative steps encode time before 0).
"""

import numpy as np

from . import _modeldefs as md

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_C3 = np.uint64(0x464C4F57)  # constant fourth counter word
_GOLDEN = 0x9E3779B97F4A7C15
_TWO53 = float(1 << 53)
_OVERFLOW = 1e300

_REP_CHUNK = 8192   # internal replica chunk (memory bound)
_STEP_CHUNK = 64    # steps per increment block


def derive_seed(seed, k):
    """Per-replica seed: splitmix64 stream element k of the base seed."""
    z = (seed + (k + 1) * _GOLDEN) & 0xFFFFFFFFFFFFFFFF
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & 0xFFFFFFFFFFFFFFFF
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _derive_seeds(seed, ks):
    z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
         + (ks.astype(np.uint64) + np.uint64(1)) * np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _philox(c0, c1, c2, c3, k0, k1):
    """Ten Philox4x32 rounds; all inputs are uint64 arrays holding 32-bit words."""
    for _ in range(10):
        p0 = c0 * _M0
        p1 = c2 * _M1
        c0, c1, c2, c3 = (
            (p1 >> np.uint64(32)) ^ c1 ^ k0,
            p1 & _MASK32,
            (p0 >> np.uint64(32)) ^ c3 ^ k1,
            p0 & _MASK32,
        )
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def philox_words(seed, lane, step):
    """The four 32-bit Philox output words for one (seed, lane, step) key."""
    su = np.uint64(np.int64(step).view(np.uint64) if step < 0 else step)
    seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    c0, c1, c2, c3 = _philox(
        su & _MASK32, su >> np.uint64(32),
        np.uint64(lane), _C3,
        seed & _MASK32, seed >> np.uint64(32),
    )
    return int(c0), int(c1), int(c2), int(c3)


def _normals_from_words(c0, c1, c2, c3):
    a = (c1 << np.uint64(32)) | c0
    b = (c3 << np.uint64(32)) | c2
    u1 = (((a >> np.uint64(11)) + np.uint64(1)).astype(np.float64)) / _TWO53
    u2 = ((b >> np.uint64(11)).astype(np.float64)) / _TWO53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def _normals_grid(seeds, lanes, steps):
    """Standard normals for the broadcast product of seeds/lanes/steps.

    seeds, lanes, steps: uint64/int64 arrays broadcastable to a common shape.
    """
    su = steps.astype(np.int64).view(np.uint64)
    seeds = seeds.astype(np.uint64)
    shp = np.broadcast_shapes(seeds.shape, np.shape(lanes), su.shape)
    c0 = np.broadcast_to(su & _MASK32, shp).copy()
    c1 = np.broadcast_to(su >> np.uint64(32), shp).copy()
    c2 = np.broadcast_to(np.asarray(lanes, dtype=np.uint64), shp).copy()
    c3 = np.full(shp, _C3, dtype=np.uint64)
    k0 = np.broadcast_to(seeds & _MASK32, shp).copy()
    k1 = np.broadcast_to(seeds >> np.uint64(32), shp).copy()
    return _normals_from_words(*_philox(c0, c1, c2, c3, k0, k1))


def std_normals(seed, lane, k0, n):
    """n standard normals for steps k0..k0+n-1 of one (seed, lane) stream."""
    steps = np.arange(k0, k0 + n, dtype=np.int64)
    return _normals_grid(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(lane), steps)


def running_max_batch(seed, rep0, n, steps, h):
    """Running maximum (including W_0 = 0) of n discrete Brownian paths.

    Replica r uses the derived seed derive_seed(seed, rep0 + r), driver lane 1.
    """
    out = np.empty(n, dtype=np.float64)
    sqh = np.sqrt(h)
    for a in range(0, n, _REP_CHUNK):
        b = min(n, a + _REP_CHUNK)
        seeds = _derive_seeds(seed, np.arange(rep0 + a, rep0 + b, dtype=np.int64))
        w = np.zeros(b - a)
        best = np.zeros(b - a)
        for s0 in range(0, steps, 256):
            s1 = min(steps, s0 + 256)
            kk = np.arange(s0, s1, dtype=np.int64)
            z = _normals_grid(seeds[:, None], np.uint64(1), kk[None, :])
            path = w[:, None] + np.cumsum(sqh * z, axis=1)
            np.maximum(best, path.max(axis=1), out=best)
            w = path[:, -1]
        out[a:b] = best
    return out


def _increment_block(seeds, m, s0, s1, sqh):
    """(nrep, m, s1-s0) Brownian increments for lanes 1..m."""
    kk = np.arange(s0, s1, dtype=np.int64)
    lanes = np.arange(1, m + 1, dtype=np.uint64)
    z = _normals_grid(seeds[:, None, None], lanes[None, :, None], kk[None, None, :])
    return sqh * z


def _freeze_diverged(x, diverged):
    bad = ~np.isfinite(x).all(axis=-1) | (np.abs(x) > _OVERFLOW).any(axis=-1)
    newly = bad & ~diverged
    if newly.any():
        diverged |= newly
    if diverged.any():
        x[diverged] = 0.0
    return diverged


def one_point_batch(model_id, params, x0, seed, rep0, n, steps, h):
    """Evolve one point per replica; returns (terminal_norm, min_norm, max_norm, diverged)."""
    params = np.asarray(params, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    m = md.model_drivers(model_id)
    term = np.empty(n)
    mn = np.empty(n)
    mx = np.empty(n)
    div = np.zeros(n, dtype=np.uint8)
    sqh = np.sqrt(h)
    for a in range(0, n, _REP_CHUNK):
        b = min(n, a + _REP_CHUNK)
        nn = b - a
        seeds = _derive_seeds(seed, np.arange(rep0 + a, rep0 + b, dtype=np.int64))
        x = np.tile(x0, (nn, 1))
        nrm = np.linalg.norm(x, axis=1)
        lo = nrm.copy()
        hi = nrm.copy()
        dd = np.zeros(nn, dtype=bool)
        for s0 in range(0, steps, _STEP_CHUNK):
            s1 = min(steps, s0 + _STEP_CHUNK)
            if m > 0:
                dw = _increment_block(seeds, m, s0, s1, sqh)
            for j in range(s1 - s0):
                dwj = dw[:, :, j] if m > 0 else np.zeros((nn, 0))
                x = md.euler_update(model_id, params, x, dwj, h)
                dd = _freeze_diverged(x, dd)
                nrm = np.linalg.norm(x, axis=1)
                live = ~dd
                np.minimum(lo, np.where(live, nrm, lo), out=lo)
                np.maximum(hi, np.where(live, nrm, hi), out=hi)
        term[a:b] = nrm
        mn[a:b] = lo
        mx[a:b] = hi
        div[a:b] = dd
    return term, mn, mx, div


def pair_sup_batch(model_id, params, x0, y0, seed, rep0, n, steps, h):
    """Two coupled points per replica; returns (sup_t |x-y|, diverged)."""
    params = np.asarray(params, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    y0 = np.asarray(y0, dtype=np.float64)
    m = md.model_drivers(model_id)
    sup = np.empty(n)
    div = np.zeros(n, dtype=np.uint8)
    sqh = np.sqrt(h)
    for a in range(0, n, _REP_CHUNK):
        b = min(n, a + _REP_CHUNK)
        nn = b - a
        seeds = _derive_seeds(seed, np.arange(rep0 + a, rep0 + b, dtype=np.int64))
        x = np.tile(x0, (nn, 1))
        y = np.tile(y0, (nn, 1))
        best = np.full(nn, np.linalg.norm(x0 - y0))
        dd = np.zeros(nn, dtype=bool)
        for s0 in range(0, steps, _STEP_CHUNK):
            s1 = min(steps, s0 + _STEP_CHUNK)
            dw = _increment_block(seeds, m, s0, s1, sqh)
            for j in range(s1 - s0):
                x = md.euler_update(model_id, params, x, dw[:, :, j], h)
                y = md.euler_update(model_id, params, y, dw[:, :, j], h)
                dd = _freeze_diverged(x, dd)
                dd = _freeze_diverged(y, dd)
                dist = np.linalg.norm(x - y, axis=1)
                np.maximum(best, np.where(dd, best, dist), out=best)
        sup[a:b] = best
        div[a:b] = dd
    return sup, div


def _exact_diam(pts):
    """Exact diameter per replica for a (nrep, npts, d) stack."""
    diff = pts[:, :, None, :] - pts[:, None, :, :]
    return np.sqrt((diff * diff).sum(-1).max(axis=(1, 2)))


def cloud_diam_batch(model_id, params, pts0, seed, rep0, n, steps, h):
    """Coupled cloud per replica; returns (sup_t diam, diverged).

    The exact diameter is recomputed only when the bounding-box diagonal
    exceeds the best diameter seen so far (the bbox diagonal dominates the
    diameter, so skipped steps cannot hide the supremum).
    """
    params = np.asarray(params, dtype=np.float64)
    pts0 = np.asarray(pts0, dtype=np.float64)
    m = md.model_drivers(model_id)
    sup = np.empty(n)
    div = np.zeros(n, dtype=np.uint8)
    sqh = np.sqrt(h)
    chunk = max(1, min(_REP_CHUNK // max(1, pts0.shape[0]) * 4, 2048))
    for a in range(0, n, chunk):
        b = min(n, a + chunk)
        nn = b - a
        seeds = _derive_seeds(seed, np.arange(rep0 + a, rep0 + b, dtype=np.int64))
        pts = np.tile(pts0, (nn, 1, 1))
        best = _exact_diam(pts)
        dd = np.zeros(nn, dtype=bool)
        for s0 in range(0, steps, _STEP_CHUNK):
            s1 = min(steps, s0 + _STEP_CHUNK)
            dw = _increment_block(seeds, m, s0, s1, sqh)
            for j in range(s1 - s0):
                pts = md.euler_update(model_id, params, pts, dw[:, None, :, j], h)
                bad = (~np.isfinite(pts).all(axis=(1, 2))
                       | (np.abs(pts) > _OVERFLOW).any(axis=(1, 2)))
                newly = bad & ~dd
                if newly.any():
                    dd |= newly
                    pts[dd] = 0.0
                span = pts.max(axis=1) - pts.min(axis=1)
                bbox = np.sqrt((span * span).sum(-1))
                hit = (bbox > best) & ~dd
                if hit.any():
                    best[hit] = np.maximum(best[hit], _exact_diam(pts[hit]))
        sup[a:b] = best
        div[a:b] = dd
    return sup, div


def evolve_cloud(model_id, params, pts, seed, k0, k1, h, norm_min, norm_max,
                 pair_max=None):
    """Evolve one cloud in place over steps k0..k1-1 under one noise path.

    pts is (npts, d); norm_min/norm_max are per-point running extrema updated
    in place; pair_max, when given, is an (npts, npts) running max of pairwise
    distances.  Returns True if any coordinate left the overflow guard.
    """
    params = np.asarray(params, dtype=np.float64)
    m = md.model_drivers(model_id)
    sqh = np.sqrt(h)
    seed_arr = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    lanes = np.arange(1, m + 1, dtype=np.uint64)
    for s0 in range(k0, k1, _STEP_CHUNK):
        s1 = min(k1, s0 + _STEP_CHUNK)
        kk = np.arange(s0, s1, dtype=np.int64)
        if m > 0:
            dw = sqh * _normals_grid(seed_arr, lanes[:, None], kk[None, :])
        for j in range(s1 - s0):
            step_dw = dw[:, j] if m > 0 else np.zeros(0)
            pts[...] = md.euler_update(model_id, params, pts, step_dw[None, :], h)
            if not np.isfinite(pts).all() or (np.abs(pts) > _OVERFLOW).any():
                return True
            nrm = np.linalg.norm(pts, axis=1)
            np.minimum(norm_min, nrm, out=norm_min)
            np.maximum(norm_max, nrm, out=norm_max)
            if pair_max is not None:
                diff = pts[:, None, :] - pts[None, :, :]
                np.maximum(pair_max, np.sqrt((diff * diff).sum(-1)), out=pair_max)
    return False
