"""Closed-form tail bounds for one-point, two-point and set-diameter events.

Every bound returns a TailBound carrying both the raw analytic value (which
may exceed 1 and is then vacuous) and its probability cap min(raw, 1).
Monte Carlo comparisons always use the capped value.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .models import beta0, gamma0


class HypothesisViolationError(ValueError):
    """Inputs violate the hypotheses of the inequality being evaluated."""


class KappaOutOfRangeError(ValueError):
    """Chaining exponent kappa outside its open admissible interval."""


class QTooSmallError(ValueError):
    """Moment order q must exceed the dimension d."""


class WeightViolationError(ValueError):
    """Chaining weights are not positive with partial sum <= 1."""


@dataclass(frozen=True)
class TailBound:
    """An analytic probability bound: raw value, cap at 1, parameter echo."""

    name: str
    raw: float
    inputs: dict = field(default_factory=dict)
    log_raw: float = None

    def __post_init__(self):
        if not (self.raw >= 0 or math.isnan(self.raw)):
            raise ValueError(f"raw bound must be >= 0, got {self.raw}")

    @property
    def capped(self):
        return min(self.raw, 1.0)

    def as_dict(self):
        return {"name": self.name, "raw": self.raw, "capped": self.capped,
                "inputs": dict(self.inputs)}


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# elementary Gaussian tails
# ---------------------------------------------------------------------------

def gaussian_tail(c, t):
    """P{W_t >= c} <= (1/2) exp(-c^2/(2t))."""
    if c < 0 or t <= 0:
        raise HypothesisViolationError("need c >= 0 and t > 0")
    return TailBound("gaussian_tail", 0.5 * _exp(-c * c / (2.0 * t)),
                     {"c": c, "t": t})


def running_max_tail(c, t):
    """P{W_t^* >= c} <= exp(-c^2/(2t))."""
    if c < 0 or t <= 0:
        raise HypothesisViolationError("need c >= 0 and t > 0")
    return TailBound("running_max_tail", _exp(-c * c / (2.0 * t)),
                     {"c": c, "t": t})


def reflection_tail(c, t):
    """Exact tail of the running maximum: P{W_t^* >= c} = 2(1 - Phi(c/sqrt(t)))."""
    if c < 0 or t <= 0:
        raise HypothesisViolationError("need c >= 0 and t > 0")
    return float(2.0 * norm.sf(c / math.sqrt(t)))


def drifted_sup_tail(b, mu, t):
    """Exact P{sup_{s<=t} (W_s + mu*s) >= b}; 1 for b <= 0."""
    if t <= 0:
        raise HypothesisViolationError("need t > 0")
    if b <= 0:
        return 1.0
    rt = math.sqrt(t)
    term1 = norm.sf((b - mu * t) / rt)
    term2 = _exp(2.0 * mu * b + norm.logsf((b + mu * t) / rt))
    return float(min(term1 + term2, 1.0))


# ---------------------------------------------------------------------------
# one-point bounds
# ---------------------------------------------------------------------------

def _check_radii(r_bar, other, label):
    if r_bar < 1:
        raise HypothesisViolationError(f"r_bar must be >= 1, got {r_bar}")
    if other <= r_bar:
        raise HypothesisViolationError(f"{label} must exceed r_bar")


def escape_upper(R, S, r_bar, T, sigma_B, beta_star_up):
    """Outward escape despite inward drift: start |x| = R, reach norm S by T
    while staying above r_bar.

    exp(-1/2 ((-(R-S)/(sigma_B sqrt(T)) - beta*(r_bar) sqrt(T)/sigma_B)^+)^2)
    """
    _check_radii(r_bar, R, "R")
    if S <= r_bar or T <= 0:
        raise HypothesisViolationError("need S > r_bar and T > 0")
    rt = math.sqrt(T)
    arg = -(R - S) / (sigma_B * rt) - beta_star_up * rt / sigma_B
    raw = 1.0 if arg <= 0 else _exp(-0.5 * arg * arg)
    return TailBound("escape_upper", raw,
                     {"R": R, "S": S, "r_bar": r_bar, "T": T,
                      "sigma_B": sigma_B, "beta_star_upper": beta_star_up})


def return_upper(R, S, r_bar, T, sigma_B, beta_star_lo):
    """Inward return despite outward drift: start |x| = S, end below R by T
    while staying above r_bar.

    exp(-1/2 ((beta_*(r_bar) sqrt(T)/sigma_B - (R-S)/(sigma_B sqrt(T)))^+)^2)
    """
    _check_radii(r_bar, R, "R")
    if S <= r_bar or T <= 0:
        raise HypothesisViolationError("need S > r_bar and T > 0")
    rt = math.sqrt(T)
    arg = beta_star_lo * rt / sigma_B - (R - S) / (sigma_B * rt)
    raw = 1.0 if arg <= 0 else _exp(-0.5 * arg * arg)
    return TailBound("return_upper", raw,
                     {"R": R, "S": S, "r_bar": r_bar, "T": T,
                      "sigma_B": sigma_B, "beta_star_lower": beta_star_lo})


def dip_bound(S, r_bar, sigma_B, beta_star_lo):
    """Ever dipping to r_bar from |x| = S against outward drift (infinite horizon).

    exp(-2 (S - r_bar) beta_*(r_bar) / sigma_B^2); vacuously 1 when the lower
    radial rate is not positive.
    """
    _check_radii(r_bar, S, "S")
    raw = 1.0 if beta_star_lo <= 0 else \
        _exp(-2.0 * (S - r_bar) * beta_star_lo / sigma_B**2)
    return TailBound("dip_bound", raw,
                     {"S": S, "r_bar": r_bar, "sigma_B": sigma_B,
                      "beta_star_lower": beta_star_lo})


def crossing_bound(R, S, T, sigma_B):
    """Rising from norm R to norm S within time T (drift term dropped).

    2 exp(-(S-R)^2 / (8 sigma_B^2 T))
    """
    if S < R:
        raise HypothesisViolationError("need S >= R")
    if T <= 0:
        raise HypothesisViolationError("need T > 0")
    raw = 2.0 * _exp(-((S - R) ** 2) / (8.0 * sigma_B**2 * T))
    return TailBound("crossing_bound", raw,
                     {"R": R, "S": S, "T": T, "sigma_B": sigma_B})


def excursion_bound(delta, h, sigma_B):
    """Short-time excursion of size delta from the boundary sphere.

    3 exp(-delta^2 / (8 sigma_B^2 h))
    """
    if delta <= 0 or h <= 0:
        raise HypothesisViolationError("need delta > 0 and h > 0")
    raw = 3.0 * _exp(-delta * delta / (8.0 * sigma_B**2 * h))
    return TailBound("excursion_bound", raw,
                     {"delta": delta, "h": h, "sigma_B": sigma_B})


# ---------------------------------------------------------------------------
# two-point bound
# ---------------------------------------------------------------------------

def two_point_tail(separation, u, T, sigma_L, lam):
    """Tail of the running pair distance via the dominating variable
    separation * exp(sigma_L W_T^* + lam T).

    Returns (exact, bound): the exact reflection-principle tail of the
    dominating variable and the cruder exp(-c^2/2T) cap of the same event.
    """
    if separation < 0 or u <= 0 or T <= 0:
        raise HypothesisViolationError("need separation >= 0, u > 0, T > 0")
    if separation == 0.0:
        return 0.0, TailBound("two_point_tail", 0.0,
                              {"separation": 0.0, "u": u, "T": T,
                               "sigma_L": sigma_L, "lam": lam})
    c = (math.log(u / separation) - lam * T) / sigma_L
    inputs = {"separation": separation, "u": u, "T": T,
              "sigma_L": sigma_L, "lam": lam, "c": c}
    if c <= 0:
        return 1.0, TailBound("two_point_tail", 1.0, inputs)
    exact = reflection_tail(c, T)
    raw = _exp(-c * c / (2.0 * T))
    return exact, TailBound("two_point_tail", raw, inputs)


# ---------------------------------------------------------------------------
# diameter bounds (quantitative Kolmogorov continuity)
# ---------------------------------------------------------------------------

def kolmogorov_moment(a, b, c, kappa, d):
    """Moment factor E(S^a) <= c d 2^(a kappa - b) / (1 - 2^(a kappa - b))."""
    if a < 1 or b <= 0 or c <= 0 or d < 1:
        raise HypothesisViolationError("need a >= 1, b > 0, c > 0, d >= 1")
    if not 0 < kappa < b / a:
        raise KappaOutOfRangeError(f"kappa must lie in (0, {b / a}), got {kappa}")
    e = a * kappa - b
    return c * d * 2.0**e / (1.0 - 2.0**e)


def kolmogorov_tail(a, b, c, kappa, d, u):
    """Uniform-oscillation tail over the unit cube from an a-moment increment bound.

    (2d/(1-2^-kappa))^a * c d 2^(a kappa - b)/(1 - 2^(a kappa - b)) * u^-a
    """
    if u <= 0:
        raise HypothesisViolationError("need u > 0")
    moment = kolmogorov_moment(a, b, c, kappa, d)
    raw = (2.0 * d / (1.0 - 2.0**(-kappa))) ** a * moment * u ** (-a)
    return TailBound("kolmogorov_tail", raw,
                     {"a": a, "b": b, "c": c, "kappa": kappa, "d": d, "u": u,
                      "moment_factor": moment})


def ball_diameter_bound(xi, T, u, q, kappa, c_bar, Lambda, sigma, d):
    """Tail of the running diameter of the image of a side-xi cube.

    (2d/(1-2^-kappa))^q * c_bar^q d 2^(q kappa - q + d)/(1 - 2^(q kappa - q + d))
      * exp((Lambda + q sigma^2 / 2) q T) * xi^q * u^-q,  for q > d,
      kappa in (0, 1 - d/q).

    Evaluated in log space so very large horizons T and exponents q do not
    overflow; the log value is kept on the TailBound.
    """
    if q <= d:
        raise QTooSmallError(f"q must exceed d={d}, got {q}")
    if not 0 < kappa < 1.0 - d / q:
        raise KappaOutOfRangeError(
            f"kappa must lie in (0, {1.0 - d / q}), got {kappa}")
    if xi <= 0 or T < 0 or u <= 0 or c_bar <= 0 or sigma <= 0:
        raise HypothesisViolationError("scales must be positive (T >= 0)")
    e = q * kappa - q + d
    log_raw = (q * math.log(2.0 * d / (1.0 - 2.0**(-kappa)))
               + q * math.log(c_bar) + math.log(d)
               + e * math.log(2.0) - math.log1p(-(2.0**e))
               + (Lambda + 0.5 * q * sigma**2) * q * T
               + q * math.log(xi) - q * math.log(u))
    return TailBound("ball_diameter_bound", _exp(log_raw),
                     {"xi": xi, "T": T, "u": u, "q": q, "kappa": kappa,
                      "c_bar": c_bar, "Lambda": Lambda, "sigma": sigma, "d": d},
                     log_raw=log_raw)


def _q_grid(d):
    offsets = np.geomspace(1e-3, 50.0, 199)
    return d + np.unique(np.concatenate([offsets, [1.0]]))


def _kappa_grid(q, d):
    span = 1.0 - d / q
    fracs = np.concatenate([[0.005], np.linspace(0.01, 0.99, 49)])
    return span * fracs


def ball_diameter_bound_opt(xi, T, u, c_bar, Lambda, sigma, d):
    """Minimize ball_diameter_bound over the (q, kappa) grid.

    q runs over 200 log-spaced offsets in (d, d+50] (including exactly d+1
    and d+50); kappa over 50 fractions of its admissible interval including
    exactly the midpoint.  Returns (bound, q, kappa) at the grid minimum.
    """
    best = None
    for q in _q_grid(d):
        for kappa in _kappa_grid(q, d):
            tb = ball_diameter_bound(xi, T, u, q, kappa, c_bar, Lambda, sigma, d)
            if best is None or tb.log_raw < best[0].log_raw:
                best = (tb, float(q), float(kappa))
    return best


def rate_I(gamma, Lambda, sigma, d, one_to_one=False):
    """Asymptotic decay rate of the diameter tail for cubes of side exp(-gamma T).

    (gamma-Lambda)^2/(2 sigma^2)          if gamma >= Lambda + sigma^2 d
    d (gamma - Lambda - sigma^2 d / 2)    if Lambda + sigma^2 d/2 <= gamma <= Lambda + sigma^2 d
    0                                     if gamma <= Lambda + sigma^2 d/2

    one_to_one substitutes d -> d-1 (injective flows attain the diameter on
    the cube boundary).
    """
    if sigma <= 0 or d < 1:
        raise HypothesisViolationError("need sigma > 0 and d >= 1")
    de = d - 1 if one_to_one else d
    if gamma >= Lambda + sigma**2 * de:
        return (gamma - Lambda) ** 2 / (2.0 * sigma**2)
    if gamma >= Lambda + 0.5 * sigma**2 * de:
        return de * (gamma - Lambda - 0.5 * sigma**2 * de)
    return 0.0


# ---------------------------------------------------------------------------
# chaining
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainingResult:
    bound: TailBound
    truncated: bool           # True when the last term is still > 1e-12
    terms: Tuple[float, ...]


def chaining_bound(increment_tail, epsilons, u, T, j_max):
    """Dyadic chaining bound for P{sup_t X_t - X_T >= u}.

    sum_{j=1..j_max} 2^(j-1) * increment_tail(2^-j T, eps_j u)

    increment_tail(gap, v) must bound P{X_s - X_t >= v} over pairs with
    t - s = gap.  The weights eps_j are positive with partial sum <= 1.
    A truncation flag is set when the last term exceeds 1e-12 (the caller
    must raise j_max or certify the process constant below scale 2^-j_max T).
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    eps = [float(e) for e in epsilons[:j_max]]
    if len(eps) < j_max:
        raise WeightViolationError(f"need at least {j_max} weights")
    if any(e <= 0 for e in eps):
        raise WeightViolationError("weights must be positive")
    if sum(eps) > 1.0 + 1e-12:
        raise WeightViolationError(f"weights sum to {sum(eps)} > 1")
    terms = []
    for j in range(1, j_max + 1):
        p = float(increment_tail(2.0**-j * T, eps[j - 1] * u))
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"increment_tail returned {p} outside [0, 1]")
        terms.append(2.0 ** (j - 1) * p)
    raw = float(sum(terms))
    tb = TailBound("chaining_bound", raw,
                   {"u": u, "T": T, "j_max": j_max, "epsilons": tuple(eps)})
    return ChainingResult(bound=tb, truncated=terms[-1] > 1e-12,
                          terms=tuple(terms))


# ---------------------------------------------------------------------------
# summability certificate and the Borel-Cantelli schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateCertificate:
    feasible: bool
    Gamma: float
    rate_A1: float            # covering growth vs one-point escape rate
    rate_A3: float            # covering growth vs small-ball diameter rate
    rate_A2: float            # always -inf (dip term decays superexponentially)
    beta0: float
    gamma0: float
    inputs: dict


def rate_certificate(beta, gamma, epsilon, constants, d):
    """Search the covering rate Gamma making both polynomial rates negative.

    Scans 1000 points of (Gamma_0, Gamma_0 + 10] subject to the side
    condition Gamma >= lam + sigma_L^2 d (d >= 2) or Gamma >= lam (d = 1),
    and returns the grid point minimizing max(rate_A1, rate_A3) where

      rate_A1 = (d-1) Gamma - (beta - gamma)^2 / (2 sigma_B^2)
      rate_A3 = (d-1) Gamma - (Gamma - lam)^2 / (2 sigma_L^2).

    Infeasibility is reported, never patched.
    """
    if not 0 < epsilon < 0.5:
        raise HypothesisViolationError("need 0 < epsilon < 1/2")
    if gamma <= 0:
        raise HypothesisViolationError("need gamma > 0")
    b0 = beta0(constants, d)
    if gamma + epsilon >= beta - b0:
        raise HypothesisViolationError(
            f"need gamma + epsilon < beta - beta0 = {beta - b0}")
    g0 = gamma0(constants, d)
    lam, sl, sb = constants.lam, constants.sigma_L, constants.sigma_B
    side_min = lam if d == 1 else lam + sl**2 * d
    inputs = {"beta": beta, "gamma": gamma, "epsilon": epsilon, "d": d,
              "lam": lam, "sigma_L": sl, "sigma_B": sb}
    best = None
    for i in range(1, 1001):
        G = g0 + 10.0 * i / 1000.0
        if G < side_min:
            continue
        r1 = (d - 1) * G - (beta - gamma) ** 2 / (2.0 * sb**2)
        r3 = (d - 1) * G - (G - lam) ** 2 / (2.0 * sl**2)
        if r1 < 0 and r3 < 0:
            if best is None or max(r1, r3) < max(best[1], best[2]):
                best = (G, r1, r3)
    if best is None:
        return RateCertificate(False, math.nan, math.nan, math.nan,
                               -math.inf, b0, g0, inputs)
    return RateCertificate(True, best[0], best[1], best[2],
                           -math.inf, b0, g0, inputs)


@dataclass(frozen=True)
class Schedule:
    pairs: Tuple[Tuple[float, float], ...]   # (S_i, T_i = S_i^alpha)
    partial_sums: np.ndarray                 # cumulative sums of exp(-c T_i)
    c: float


def borel_cantelli_schedule(S0, gamma, alpha, n, c=1.0):
    """Radius/horizon schedule S_{i+1} = S_i + gamma * S_i^alpha, T_i = S_i^alpha.

    Also returns the cumulative sums of exp(-c * T_i) to exhibit summability
    numerically for a caller-chosen rate c > 0.
    """
    if S0 < 2:
        raise HypothesisViolationError("need S0 >= 2")
    if gamma <= 0:
        raise HypothesisViolationError("need gamma > 0")
    if not 0 < alpha < 1:
        raise HypothesisViolationError("need alpha in (0, 1)")
    if n < 1:
        raise ValueError("need n >= 1")
    pairs = []
    S = float(S0)
    for _ in range(n):
        T = S ** alpha
        pairs.append((S, T))
        S = S + gamma * T
    sums = np.cumsum([math.exp(-c * T) for _, T in pairs])
    return Schedule(pairs=tuple(pairs), partial_sums=sums, c=c)
