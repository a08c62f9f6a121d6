"""Built-in flow models, their certified constants, and the derived critical rates.

A model is a drift field plus finitely many Brownian vector fields together
with analytically certified constants:

* ``lam``     one-sided Lipschitz rate of the drift including the curvature
              term (d-1)/2 * sigma_L^2,
* ``sigma_L`` two-point diffusion Lipschitz rate,
* ``sigma_B`` uniform diffusion bound (may be inf for models admitted only
              to two-point / diameter experiments).

Constants are supplied by the model factories in closed form and are only
spot-checked numerically (``check_conditions``); the library never infers a
supremum from samples.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from . import _modeldefs as md


class InvalidRadiusError(ValueError):
    """Radial-profile query below the profile's domain r >= 1."""


@dataclass(frozen=True)
class CertifiedConstants:
    """Certified rates (lam, sigma_L, sigma_B) shipped with a model."""

    lam: float
    sigma_L: float
    sigma_B: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lam must be >= 0")
        if not self.sigma_L > 0:
            raise ValueError("sigma_L must be > 0")
        if not self.sigma_B > 0:
            raise ValueError("sigma_B must be > 0")


@dataclass(frozen=True)
class FlowModel:
    """A simulable SDE model: drift b, fields V_1..V_m, certified constants."""

    name: str
    dimension: int
    drift: Callable[[np.ndarray], np.ndarray]
    fields: List[Callable[[np.ndarray], np.ndarray]]
    constants: CertifiedConstants
    radial_upper: Callable[[float], float]
    radial_lower: Callable[[float], float]
    kernel_id: int
    kernel_params: np.ndarray = field(repr=False, default=None)

    @property
    def driver_count(self):
        return len(self.fields)

    @property
    def diffusion_bounded(self):
        """True when the certified sigma_B is finite, i.e. condition (A2) holds."""
        return math.isfinite(self.constants.sigma_B)


def beta0(constants, d):
    """Critical radial drift rate separating attraction from escape.

    sqrt(2)*sigma_B*(lam*(d-1) + sigma_L^2*(d-1)^2
                     + sqrt(sigma_L^4*(d-1)^4 + 2*lam*sigma_L^2*(d-1)^3))^(1/2);
    identically 0 in dimension one.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return 0.0
    lam, sl, sb = constants.lam, constants.sigma_L, constants.sigma_B
    e = d - 1
    inner = lam * e + sl**2 * e**2 + math.sqrt(sl**4 * e**4 + 2 * lam * sl**2 * e**3)
    return math.sqrt(2.0) * sb * math.sqrt(inner)


def gamma0(constants, d):
    """Larger root of (d-1)*G - (G-lam)^2/(2 sigma_L^2); the covering-rate threshold."""
    if d < 1:
        raise ValueError("d must be >= 1")
    lam, sl = constants.lam, constants.sigma_L
    e = d - 1
    return lam + sl**2 * e + math.sqrt(2 * lam * sl**2 * e + sl**4 * e**2)


def beta_star_upper(model, r_bar):
    """Upper radial drift rate outside B_r_bar plus the curvature term.

    sup_{|y|>=r_bar} y.b(y)/|y| + (d-1)*sigma_B^2/(2*r_bar)
    """
    if r_bar < 1:
        raise InvalidRadiusError(f"r_bar must be >= 1, got {r_bar}")
    base = model.radial_upper(r_bar)
    if model.dimension == 1:
        return base
    return base + (model.dimension - 1) * model.constants.sigma_B**2 / (2.0 * r_bar)


def beta_star_lower(model, r_bar):
    """Lower radial drift rate outside B_r_bar: inf_{|y|>=r_bar} y.b(y)/|y|."""
    if r_bar < 1:
        raise InvalidRadiusError(f"r_bar must be >= 1, got {r_bar}")
    return model.radial_lower(r_bar)


@dataclass(frozen=True)
class ConditionViolation:
    kind: str          # "two-point-lipschitz" | "drift-one-sided" | "diffusion-bound"
    ratio: float       # observed value of the certified quantity
    limit: float       # certified value it must not exceed
    x: tuple
    y: tuple


def check_conditions(model, sample_count=10000, box_radius=100.0, seed=0):
    """Numerical spot-check of the certified constants on sampled point pairs.

    Samples pairs uniformly in [-box_radius, box_radius]^d and verifies, up
    to relative tolerance 1e-9,

    * ||A(x,y)|| <= sigma_L^2 |x-y|^2 with A = sum_i dV_i dV_i^T,
    * (x-y).(b(x)-b(y)) + (d-1)/2 sigma_L^2 |x-y|^2 <= lam |x-y|^2,
    * ||a(x,x)|| <= sigma_B^2 (skipped when sigma_B is inf).

    Returns the list of violations; empty means the spot-check passed.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    d = model.dimension
    c = model.constants
    rtol = 1e-9
    x = rng.uniform(-box_radius, box_radius, size=(sample_count, d))
    y = rng.uniform(-box_radius, box_radius, size=(sample_count, d))
    dx = x - y
    dist2 = (dx * dx).sum(axis=1)
    ok = dist2 > 0
    violations = []

    # two-point Lipschitz: ||A(x,y)|| via exact eigenvalues of the PSD d x d matrix
    if model.fields:
        dv = np.stack([v(x) - v(y) for v in model.fields])        # (m, n, d)
        A = np.einsum("mni,mnj->nij", dv, dv)
        norm_A = np.linalg.eigvalsh(A)[:, -1]
        bad = ok & (norm_A > c.sigma_L**2 * dist2 * (1 + rtol))
        for i in np.flatnonzero(bad):
            violations.append(ConditionViolation(
                "two-point-lipschitz", norm_A[i] / dist2[i], c.sigma_L**2,
                tuple(x[i]), tuple(y[i])))

    # one-sided drift condition
    bd = ((dx * (model.drift(x) - model.drift(y))).sum(axis=1)
          + 0.5 * (d - 1) * c.sigma_L**2 * dist2)
    bad = ok & (bd > c.lam * dist2 + rtol * np.maximum(1.0, abs(c.lam)) * dist2)
    for i in np.flatnonzero(bad):
        violations.append(ConditionViolation(
            "drift-one-sided", bd[i] / dist2[i], c.lam, tuple(x[i]), tuple(y[i])))

    # diffusion bound at both sampled points
    if model.fields and math.isfinite(c.sigma_B):
        for pts in (x, y):
            vv = np.stack([v(pts) for v in model.fields])         # (m, n, d)
            a = np.einsum("mni,mnj->nij", vv, vv)
            norm_a = np.linalg.eigvalsh(a)[:, -1]
            bad = norm_a > c.sigma_B**2 * (1 + rtol)
            for i in np.flatnonzero(bad):
                violations.append(ConditionViolation(
                    "diffusion-bound", norm_a[i], c.sigma_B**2,
                    tuple(pts[i]), tuple(pts[i])))
    return violations


# ---------------------------------------------------------------------------
# model zoo
# ---------------------------------------------------------------------------

def _const_profile(value):
    return lambda r_bar: value


def make_ou1d(beta=1.0, sigma=1.0, sigma_L=0.5):
    """d=1 contracting model: b(x) = -beta*x/max(|x|,1), one constant field V1 = sigma.

    The constant field makes A(x,y) = 0, so any sigma_L > 0 certifies the
    two-point condition; the drift is dissipative for beta >= 0, hence lam = 0.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0 (drift points inward)")
    params = np.array([-beta, sigma])
    # sigma_B certifies ||a(x,x)|| <= sigma_B^2; for the zero-noise variant any
    # positive value works, use a tiny surrogate
    consts = CertifiedConstants(lam=0.0, sigma_L=sigma_L,
                                sigma_B=sigma if sigma > 0 else 1e-12)
    return FlowModel(
        name="ou1d", dimension=1,
        drift=lambda x: md.drift(md.MODEL_OU1D, params, x),
        fields=[lambda x: md.fields(md.MODEL_OU1D, params, x)[0]],
        constants=consts,
        radial_upper=_const_profile(-beta),
        radial_lower=_const_profile(-beta),
        kernel_id=md.MODEL_OU1D, kernel_params=params,
    )


def make_radial2d(beta=6.0, inward=True, sigma=0.5, sigma_w=0.25, w=1.0):
    """d=2 radial model: b(x) = s*beta*x/max(|x|,1) with two constant isotropic
    fields and two bounded rotational fields (sin/cos envelopes).

    Certified constants (s = -1 inward, +1 outward):
      sigma_L = sigma_w * w                (fields V3, V4 are sigma_w*w-Lipschitz)
      sigma_B = sqrt(sigma^2 + 2 sigma_w^2)
      lam     = max(s*beta, 0) + sigma_L^2 / 2
    The radial retraction x/max(|x|,1) is the projection onto the unit ball,
    hence monotone and 1-Lipschitz, which gives the one-sided drift rate.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0 (sign comes from `inward`)")
    s = -1.0 if inward else 1.0
    c = s * beta
    params = np.array([c, sigma, sigma_w, w])
    sigma_L = sigma_w * w if sigma_w > 0 else 1e-12
    consts = CertifiedConstants(
        lam=max(c, 0.0) + 0.5 * sigma_L**2,
        sigma_L=sigma_L,
        sigma_B=max(math.sqrt(sigma**2 + 2 * sigma_w**2), 1e-12),
    )
    fs = [
        (lambda i: lambda x: md.fields(md.MODEL_RADIAL2D, params, x)[i])(i)
        for i in range(4)
    ]
    return FlowModel(
        name="radial2d-in" if inward else "radial2d-out", dimension=2,
        drift=lambda x: md.drift(md.MODEL_RADIAL2D, params, x),
        fields=fs,
        constants=consts,
        radial_upper=_const_profile(c),
        radial_lower=_const_profile(c),
        kernel_id=md.MODEL_RADIAL2D, kernel_params=params,
    )


def make_mult1d(lam=0.0, sigma=1.0):
    """d=1 multiplicative linear model: b(x) = lam*x, V1(x) = sigma*x.

    Closed-form flow x*exp(sigma*W_t + (lam - sigma^2/2)*t); the diffusion is
    unbounded so sigma_B = inf and the model is admitted only to two-point and
    diameter experiments.
    """
    params = np.array([lam, sigma])
    consts = CertifiedConstants(lam=max(lam, 0.0),
                                sigma_L=sigma if sigma > 0 else 1e-12,
                                sigma_B=math.inf)

    def upper(r_bar):
        if lam > 0:
            return math.inf
        return lam * r_bar

    def lower(r_bar):
        if lam < 0:
            return -math.inf
        return lam * r_bar

    return FlowModel(
        name="mult1d", dimension=1,
        drift=lambda x: md.drift(md.MODEL_MULT1D, params, x),
        fields=[lambda x: md.fields(md.MODEL_MULT1D, params, x)[0]],
        constants=consts,
        radial_upper=upper,
        radial_lower=lower,
        kernel_id=md.MODEL_MULT1D, kernel_params=params,
    )


def make_zero(dimension=1):
    """Identity-flow model (b = 0, no fields); for tests and calibration."""
    params = np.array([float(dimension)])
    return FlowModel(
        name="zero", dimension=dimension,
        drift=lambda x: md.drift(md.MODEL_ZERO, params, x),
        fields=[],
        constants=CertifiedConstants(lam=0.0, sigma_L=1e-6, sigma_B=1e-6),
        radial_upper=_const_profile(0.0),
        radial_lower=_const_profile(0.0),
        kernel_id=md.MODEL_ZERO, kernel_params=params,
    )


_FACTORIES = {
    "ou1d": make_ou1d,
    "radial2d-in": lambda **kw: make_radial2d(inward=True, **kw),
    "radial2d-out": lambda **kw: make_radial2d(inward=False, **kw),
    "mult1d": make_mult1d,
    "zero": make_zero,
}

MODEL_NAMES = ("ou1d", "radial2d-in", "radial2d-out", "mult1d")


def get_model(name, **overrides):
    """Look up a built-in model by id, optionally overriding its parameters."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; built-ins: {', '.join(sorted(_FACTORIES))}"
        ) from None
    return factory(**overrides)
