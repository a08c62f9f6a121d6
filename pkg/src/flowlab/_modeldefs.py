"""Shared definitions of the built-in SDE right-hand sides.

Each built-in model is identified by a small integer id plus a flat float
parameter vector.  Both kernel backends (and the single-step reference in
the integrator) evaluate exactly the same expressions; the Cython backend
re-implements them as a C switch, and the agreement is covered by tests.

Model table
-----------
id 0  "zero"      params [d]                    b = 0, no fields (identity flow)
id 1  "ou1d"      params [c, sigma]             d=1, b(x) = c*x/max(|x|,1), V1 = sigma
id 2  "radial2d"  params [c, sigma, sigma_w, w] d=2, b(x) = c*x/max(|x|,1),
                                                V1=(sigma,0), V2=(0,sigma),
                                                V3=sigma_w*(-sin(w*x1), cos(w*x1)),
                                                V4=sigma_w*( cos(w*x2), sin(w*x2))
id 3  "mult1d"    params [lam, sigma]           d=1, b(x) = lam*x, V1(x) = sigma*x

`c` is the signed radial drift rate (negative = toward the origin).
Driver lanes are numbered 1..m in the order the fields are listed above.
"""

import numpy as np

MODEL_ZERO = 0
MODEL_OU1D = 1
MODEL_RADIAL2D = 2
MODEL_MULT1D = 3

# (dimension, driver count); zero model dimension comes from its params.
_MODEL_SHAPE = {
    MODEL_ZERO: (None, 0),
    MODEL_OU1D: (1, 1),
    MODEL_RADIAL2D: (2, 4),
    MODEL_MULT1D: (1, 1),
}


def model_dim(model_id, params):
    d, _ = _MODEL_SHAPE[model_id]
    return int(params[0]) if d is None else d


def model_drivers(model_id):
    return _MODEL_SHAPE[model_id][1]


def drift(model_id, params, x):
    """Drift field b evaluated on an (..., d) array of points."""
    x = np.asarray(x, dtype=np.float64)
    if model_id == MODEL_ZERO:
        return np.zeros_like(x)
    if model_id in (MODEL_OU1D, MODEL_RADIAL2D):
        c = params[0]
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        return c * x / np.maximum(nrm, 1.0)
    if model_id == MODEL_MULT1D:
        return params[0] * x
    raise ValueError(f"unknown model id {model_id}")


def fields(model_id, params, x):
    """List of diffusion fields V_1..V_m evaluated on an (..., d) array."""
    x = np.asarray(x, dtype=np.float64)
    if model_id == MODEL_ZERO:
        return []
    if model_id == MODEL_OU1D:
        return [np.full_like(x, params[1])]
    if model_id == MODEL_RADIAL2D:
        _, sigma, sigma_w, w = params[:4]
        x1, x2 = x[..., 0], x[..., 1]
        z = np.zeros_like(x1)
        v1 = np.stack([np.full_like(x1, sigma), z], axis=-1)
        v2 = np.stack([z, np.full_like(x1, sigma)], axis=-1)
        v3 = sigma_w * np.stack([-np.sin(w * x1), np.cos(w * x1)], axis=-1)
        v4 = sigma_w * np.stack([np.cos(w * x2), np.sin(w * x2)], axis=-1)
        return [v1, v2, v3, v4]
    if model_id == MODEL_MULT1D:
        return [params[1] * x]
    raise ValueError(f"unknown model id {model_id}")


def euler_update(model_id, params, x, dw, h):
    """One Euler-Maruyama step x + b(x)h + sum_i V_i(x) dW_i.

    x has shape (..., d); dw has shape (..., m) with the same leading shape.
    Returns a new array; the update for every coordinate is written out so
    that both backends perform the additions in the same order.
    """
    x = np.asarray(x, dtype=np.float64)
    dw = np.asarray(dw, dtype=np.float64)
    if model_id == MODEL_ZERO:
        return x.copy()
    if model_id == MODEL_OU1D:
        c, sigma = params[:2]
        x0 = x[..., 0]
        b = c * x0 / np.maximum(np.abs(x0), 1.0)
        return (x0 + b * h + sigma * dw[..., 0])[..., None]
    if model_id == MODEL_RADIAL2D:
        c, sigma, sigma_w, w = params[:4]
        x1, x2 = x[..., 0], x[..., 1]
        nrm = np.sqrt(x1 * x1 + x2 * x2)
        den = np.maximum(nrm, 1.0)
        b1 = c * x1 / den
        b2 = c * x2 / den
        y1 = x1 + b1 * h + sigma * dw[..., 0] \
            + sigma_w * (-np.sin(w * x1)) * dw[..., 2] \
            + sigma_w * np.cos(w * x2) * dw[..., 3]
        y2 = x2 + b2 * h + sigma * dw[..., 1] \
            + sigma_w * np.cos(w * x1) * dw[..., 2] \
            + sigma_w * np.sin(w * x2) * dw[..., 3]
        return np.stack([y1, y2], axis=-1)
    if model_id == MODEL_MULT1D:
        lam, sigma = params[:2]
        x0 = x[..., 0]
        return (x0 + lam * x0 * h + sigma * x0 * dw[..., 0])[..., None]
    raise ValueError(f"unknown model id {model_id}")
