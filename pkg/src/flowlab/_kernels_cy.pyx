# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend.

Same contract as ``_kernels_py``; see that module for the keying scheme.
The heavy loops run without the GIL so replica blocks can be farmed out to
a thread pool.
"""

from libc.math cimport sqrt, log, cos, sin, fabs, M_PI
from libc.stdint cimport uint32_t, uint64_t, int64_t
from libc.stdlib cimport malloc, free

import numpy as np

cdef double OVERFLOW = 1e300


cdef inline void _philox10(uint32_t* c, uint32_t k0, uint32_t k1) noexcept nogil:
    cdef int r
    cdef uint64_t p0, p1
    cdef uint32_t n0, n1, n2, n3
    for r in range(10):
        p0 = <uint64_t>c[0] * <uint64_t>0xD2511F53u
        p1 = <uint64_t>c[2] * <uint64_t>0xCD9E8D57u
        n0 = (<uint32_t>(p1 >> 32)) ^ c[1] ^ k0
        n1 = <uint32_t>p1
        n2 = (<uint32_t>(p0 >> 32)) ^ c[3] ^ k1
        n3 = <uint32_t>p0
        c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3
        k0 += 0x9E3779B9u
        k1 += 0xBB67AE85u


cdef inline double _normal(uint64_t seed, uint32_t lane, int64_t step) noexcept nogil:
    cdef uint32_t c[4]
    cdef uint64_t su = <uint64_t>step
    c[0] = <uint32_t>su
    c[1] = <uint32_t>(su >> 32)
    c[2] = lane
    c[3] = 0x464C4F57u
    _philox10(c, <uint32_t>seed, <uint32_t>(seed >> 32))
    cdef uint64_t a = (<uint64_t>c[1] << 32) | c[0]
    cdef uint64_t b = (<uint64_t>c[3] << 32) | c[2]
    cdef double u1 = <double>((a >> 11) + 1) / 9007199254740992.0
    cdef double u2 = <double>(b >> 11) / 9007199254740992.0
    return sqrt(-2.0 * log(u1)) * cos(2.0 * M_PI * u2)


cdef inline uint64_t _sm64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline uint64_t _derive(uint64_t seed, int64_t k) noexcept nogil:
    return _sm64(seed + (<uint64_t>(k + 1)) * <uint64_t>0x9E3779B97F4A7C15u)


def derive_seed(seed, k):
    """Per-replica seed: splitmix64 stream element k of the base seed."""
    return int(_derive(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), <int64_t>k))


def philox_words(seed, lane, step):
    """The four 32-bit Philox output words for one (seed, lane, step) key."""
    cdef uint32_t c[4]
    cdef uint64_t su = <uint64_t>(<int64_t>step)
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    c[0] = <uint32_t>su
    c[1] = <uint32_t>(su >> 32)
    c[2] = <uint32_t>lane
    c[3] = 0x464C4F57u
    _philox10(c, <uint32_t>s, <uint32_t>(s >> 32))
    return int(c[0]), int(c[1]), int(c[2]), int(c[3])


def std_normals(seed, lane, k0, n):
    """n standard normals for steps k0..k0+n-1 of one (seed, lane) stream."""
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint32_t ln = <uint32_t>lane
    cdef int64_t start = <int64_t>k0
    cdef Py_ssize_t nn = n, i
    out = np.empty(nn, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(nn):
            o[i] = _normal(s, ln, start + i)
    return out


# ---------------------------------------------------------------------------
# model right-hand sides (see _modeldefs for the table)
# ---------------------------------------------------------------------------

cdef inline int _model_dim(int mid, const double* prm) noexcept nogil:
    if mid == 0:
        return <int>prm[0]
    if mid == 2:
        return 2
    return 1


cdef inline int _model_drivers(int mid) noexcept nogil:
    if mid == 0:
        return 0
    if mid == 2:
        return 4
    return 1


cdef inline void _update(int mid, const double* prm, double* x,
                         const double* dw, double h) noexcept nogil:
    cdef double x1, x2, den, nrm
    if mid == 0:
        return
    if mid == 1:  # ou1d
        x1 = x[0]
        den = fabs(x1)
        if den < 1.0:
            den = 1.0
        x[0] = x1 + prm[0] * x1 / den * h + prm[1] * dw[0]
        return
    if mid == 2:  # radial2d
        x1 = x[0]; x2 = x[1]
        nrm = sqrt(x1 * x1 + x2 * x2)
        den = nrm if nrm > 1.0 else 1.0
        x[0] = x1 + prm[0] * x1 / den * h + prm[1] * dw[0] \
            + prm[2] * (-sin(prm[3] * x1)) * dw[2] \
            + prm[2] * cos(prm[3] * x2) * dw[3]
        x[1] = x2 + prm[0] * x2 / den * h + prm[1] * dw[1] \
            + prm[2] * cos(prm[3] * x1) * dw[2] \
            + prm[2] * sin(prm[3] * x2) * dw[3]
        return
    if mid == 3:  # mult1d
        x1 = x[0]
        x[0] = x1 + prm[0] * x1 * h + prm[1] * x1 * dw[0]
        return


cdef inline bint _bad(const double* x, int d) noexcept nogil:
    cdef int i
    for i in range(d):
        if not (x[i] == x[i]) or fabs(x[i]) > OVERFLOW:
            return True
    return False


def running_max_batch(seed, rep0, n, steps, h):
    """Running maximum (including W_0 = 0) of n discrete Brownian paths."""
    cdef uint64_t base = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t r0 = <int64_t>rep0
    cdef Py_ssize_t nn = n, i
    cdef int64_t nsteps = <int64_t>steps, k
    cdef double sqh = sqrt(h), w, best
    cdef uint64_t s
    out = np.empty(nn, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(nn):
            s = _derive(base, r0 + i)
            w = 0.0
            best = 0.0
            for k in range(nsteps):
                w += sqh * _normal(s, 1, k)
                if w > best:
                    best = w
            o[i] = best
    return out


def one_point_batch(model_id, params, x0, seed, rep0, n, steps, h):
    """Evolve one point per replica; returns (terminal_norm, min_norm, max_norm, diverged)."""
    prm_arr = np.ascontiguousarray(params, dtype=np.float64)
    x0_arr = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double[::1] prm = prm_arr
    cdef double[::1] xini = x0_arr
    cdef int mid = model_id
    cdef int d = _model_dim(mid, &prm[0])
    cdef int m = _model_drivers(mid)
    cdef uint64_t base = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t r0 = <int64_t>rep0
    cdef Py_ssize_t nn = n, i
    cdef int64_t nsteps = <int64_t>steps, k
    cdef double hh = h
    cdef double sqh = sqrt(hh), nrm, lo, hi
    cdef double x[4]
    cdef double dw[4]
    cdef uint64_t s
    cdef int j
    cdef bint dead
    term = np.empty(nn, dtype=np.float64)
    mn = np.empty(nn, dtype=np.float64)
    mx = np.empty(nn, dtype=np.float64)
    div = np.zeros(nn, dtype=np.uint8)
    cdef double[::1] vterm = term
    cdef double[::1] vmn = mn
    cdef double[::1] vmx = mx
    cdef unsigned char[::1] vdiv = div
    with nogil:
        for i in range(nn):
            s = _derive(base, r0 + i)
            for j in range(d):
                x[j] = xini[j]
            nrm = 0.0
            for j in range(d):
                nrm += x[j] * x[j]
            nrm = sqrt(nrm)
            lo = nrm
            hi = nrm
            dead = False
            for k in range(nsteps):
                for j in range(m):
                    dw[j] = sqh * _normal(s, <uint32_t>(j + 1), k)
                _update(mid, &prm[0], x, dw, hh)
                if _bad(x, d):
                    dead = True
                    for j in range(d):
                        x[j] = 0.0
                    break
                nrm = 0.0
                for j in range(d):
                    nrm += x[j] * x[j]
                nrm = sqrt(nrm)
                if nrm < lo:
                    lo = nrm
                if nrm > hi:
                    hi = nrm
            vterm[i] = nrm
            vmn[i] = lo
            vmx[i] = hi
            vdiv[i] = 1 if dead else 0
    return term, mn, mx, div


def pair_sup_batch(model_id, params, x0, y0, seed, rep0, n, steps, h):
    """Two coupled points per replica; returns (sup_t |x-y|, diverged)."""
    prm_arr = np.ascontiguousarray(params, dtype=np.float64)
    x0_arr = np.ascontiguousarray(x0, dtype=np.float64)
    y0_arr = np.ascontiguousarray(y0, dtype=np.float64)
    cdef double[::1] prm = prm_arr
    cdef double[::1] xini = x0_arr
    cdef double[::1] yini = y0_arr
    cdef int mid = model_id
    cdef int d = _model_dim(mid, &prm[0])
    cdef int m = _model_drivers(mid)
    cdef uint64_t base = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t r0 = <int64_t>rep0
    cdef Py_ssize_t nn = n, i
    cdef int64_t nsteps = <int64_t>steps, k
    cdef double hh = h
    cdef double sqh = sqrt(hh), best, dist, t
    cdef double x[4]
    cdef double y[4]
    cdef double dw[4]
    cdef uint64_t s
    cdef int j
    cdef bint dead
    sup = np.empty(nn, dtype=np.float64)
    div = np.zeros(nn, dtype=np.uint8)
    cdef double[::1] vsup = sup
    cdef unsigned char[::1] vdiv = div
    with nogil:
        for i in range(nn):
            s = _derive(base, r0 + i)
            best = 0.0
            for j in range(d):
                x[j] = xini[j]
                y[j] = yini[j]
                t = x[j] - y[j]
                best += t * t
            best = sqrt(best)
            dead = False
            for k in range(nsteps):
                for j in range(m):
                    dw[j] = sqh * _normal(s, <uint32_t>(j + 1), k)
                _update(mid, &prm[0], x, dw, hh)
                _update(mid, &prm[0], y, dw, hh)
                if _bad(x, d) or _bad(y, d):
                    dead = True
                    break
                dist = 0.0
                for j in range(d):
                    t = x[j] - y[j]
                    dist += t * t
                dist = sqrt(dist)
                if dist > best:
                    best = dist
            vsup[i] = best
            vdiv[i] = 1 if dead else 0
    return sup, div


def cloud_diam_batch(model_id, params, pts0, seed, rep0, n, steps, h):
    """Coupled cloud per replica; returns (sup_t diam, diverged).

    Exact pairwise recomputation is triggered only when the bounding-box
    diagonal exceeds the best diameter seen so far.
    """
    prm_arr = np.ascontiguousarray(params, dtype=np.float64)
    p0_arr = np.ascontiguousarray(pts0, dtype=np.float64)
    cdef double[::1] prm = prm_arr
    cdef double[:, ::1] pini = p0_arr
    cdef int mid = model_id
    cdef int d = _model_dim(mid, &prm[0])
    cdef int m = _model_drivers(mid)
    cdef Py_ssize_t npts = pini.shape[0]
    cdef uint64_t base = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t r0 = <int64_t>rep0
    cdef Py_ssize_t nn = n, i, a, b2
    cdef int64_t nsteps = <int64_t>steps, k
    cdef double hh = h
    cdef double sqh = sqrt(hh), best, acc, t, bbox
    cdef double dw[4]
    cdef double lo[4]
    cdef double hi[4]
    cdef uint64_t s
    cdef int j
    cdef bint dead
    cdef double* pts = <double*>malloc(npts * d * sizeof(double))
    if pts == NULL:
        raise MemoryError
    sup = np.empty(nn, dtype=np.float64)
    div = np.zeros(nn, dtype=np.uint8)
    cdef double[::1] vsup = sup
    cdef unsigned char[::1] vdiv = div
    try:
        with nogil:
            for i in range(nn):
                s = _derive(base, r0 + i)
                for a in range(npts):
                    for j in range(d):
                        pts[a * d + j] = pini[a, j]
                best = 0.0
                for a in range(npts):
                    for b2 in range(a + 1, npts):
                        acc = 0.0
                        for j in range(d):
                            t = pts[a * d + j] - pts[b2 * d + j]
                            acc += t * t
                        if acc > best:
                            best = acc
                best = sqrt(best)
                dead = False
                for k in range(nsteps):
                    for j in range(m):
                        dw[j] = sqh * _normal(s, <uint32_t>(j + 1), k)
                    for a in range(npts):
                        _update(mid, &prm[0], pts + a * d, dw, hh)
                        if _bad(pts + a * d, d):
                            dead = True
                            break
                    if dead:
                        break
                    for j in range(d):
                        lo[j] = pts[j]
                        hi[j] = pts[j]
                    for a in range(1, npts):
                        for j in range(d):
                            t = pts[a * d + j]
                            if t < lo[j]:
                                lo[j] = t
                            if t > hi[j]:
                                hi[j] = t
                    bbox = 0.0
                    for j in range(d):
                        t = hi[j] - lo[j]
                        bbox += t * t
                    bbox = sqrt(bbox)
                    if bbox > best:
                        for a in range(npts):
                            for b2 in range(a + 1, npts):
                                acc = 0.0
                                for j in range(d):
                                    t = pts[a * d + j] - pts[b2 * d + j]
                                    acc += t * t
                                acc = sqrt(acc)
                                if acc > best:
                                    best = acc
                vsup[i] = best
                vdiv[i] = 1 if dead else 0
    finally:
        free(pts)
    return sup, div


def evolve_cloud(model_id, params, pts, seed, k0, k1, h, norm_min, norm_max,
                 pair_max=None):
    """Evolve one cloud in place over steps k0..k1-1 under one noise path."""
    prm_arr = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] prm = prm_arr
    cdef double[:, ::1] p = pts
    cdef double[::1] vmin = norm_min
    cdef double[::1] vmax = norm_max
    cdef double[:, ::1] pm
    cdef bint want_pairs = pair_max is not None
    if want_pairs:
        pm = pair_max
    cdef int mid = model_id
    cdef int d = _model_dim(mid, &prm[0])
    cdef int m = _model_drivers(mid)
    cdef Py_ssize_t npts = p.shape[0], a, b
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t ka = <int64_t>k0, kb = <int64_t>k1, k
    cdef double hh = h
    cdef double sqh = sqrt(hh), nrm, acc, t
    cdef double dw[4]
    cdef int j
    cdef bint dead = False
    with nogil:
        for k in range(ka, kb):
            for j in range(m):
                dw[j] = sqh * _normal(s, <uint32_t>(j + 1), k)
            for a in range(npts):
                _update(mid, &prm[0], &p[a, 0], dw, hh)
                if _bad(&p[a, 0], d):
                    dead = True
                    break
            if dead:
                break
            for a in range(npts):
                nrm = 0.0
                for j in range(d):
                    nrm += p[a, j] * p[a, j]
                nrm = sqrt(nrm)
                if nrm < vmin[a]:
                    vmin[a] = nrm
                if nrm > vmax[a]:
                    vmax[a] = nrm
            if want_pairs:
                for a in range(npts):
                    for b in range(a + 1, npts):
                        acc = 0.0
                        for j in range(d):
                            t = p[a, j] - p[b, j]
                            acc += t * t
                        acc = sqrt(acc)
                        if acc > pm[a, b]:
                            pm[a, b] = acc
                            pm[b, a] = acc
    return bool(dead)
