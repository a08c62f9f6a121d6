"""Shipped verification suites and experiment configurations.

Where the underlying theorems only claim limits (r -> infinity, t ->
infinity), the concrete radii, horizons and frequency thresholds below were
fixed by pilot runs and are committed as regression values; reports tag
them as pinned fixtures.  Every suite row is reproducible from (config,
seed) alone.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import norm

from . import _backend as bk
from . import bounds as bd
from . import experiments as ex
from .models import CertifiedConstants, beta0, gamma0, get_model

DEFAULT_SEED = 20260809

PINNED_NOTE = ("pinned fixture: finite-scale regression values standing in "
               "for an asymptotic claim")


# ---------------------------------------------------------------------------
# experiment configuration (JSON surface)
# ---------------------------------------------------------------------------

_TOP_KEYS = {"model", "experiment", "radii", "horizon", "step", "replicas",
             "seed", "output"}
_RADII_KEYS = {"R", "S", "r_bar", "r", "gamma", "xi", "u", "separation",
               "T_trunc", "r0", "beta", "grid_per_side", "x_base", "corner"}


@dataclass(frozen=True)
class ExperimentConfig:
    model: Optional[str] = None
    experiment: Optional[str] = None
    radii: dict = field(default_factory=dict)
    horizon: Optional[float] = None
    step: Optional[float] = None
    replicas: Optional[int] = None
    seed: Optional[int] = None
    output: Optional[str] = None


def parse_config(obj):
    """Validate a config mapping; unknown keys anywhere are a load error."""
    if not isinstance(obj, dict):
        raise ex.ConfigError("config must be a JSON object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ex.ConfigError(f"unknown config keys: {sorted(unknown)}")
    radii = obj.get("radii", {})
    if not isinstance(radii, dict):
        raise ex.ConfigError("radii must be an object")
    bad = set(radii) - _RADII_KEYS
    if bad:
        raise ex.ConfigError(f"unknown radii keys: {sorted(bad)}")
    return ExperimentConfig(
        model=obj.get("model"), experiment=obj.get("experiment"),
        radii=dict(radii), horizon=obj.get("horizon"), step=obj.get("step"),
        replicas=obj.get("replicas"), seed=obj.get("seed"),
        output=obj.get("output"))


# ---------------------------------------------------------------------------
# shipped fixtures
# ---------------------------------------------------------------------------

GAUSSIAN_FIXTURE = dict(n=10**6, h=1e-3, thresholds=(0.5, 1.0, 2.0))
TWO_POINT_FIXTURE = dict(model="mult1d", separation=1.0, u=math.e, T=1.0,
                         n=10**5, step_sizes=(1e-3, 2.5e-4))
ONE_POINT_ESCAPE_FIXTURE = dict(model="radial2d-in", beta=3.0, R=10.0, S=20.0,
                                r_bar=5.0, T=1.0, h=1e-3, n=10**5)
ONE_POINT_RETURN_FIXTURE = dict(model="radial2d-out", beta=2.0, R=10.0, S=20.0,
                                r_bar=5.0, T=1.0, h=1e-3, n=10**5)
DIP_FIXTURE = dict(model="radial2d-out", beta=2.0, S=7.0, r_bar=5.0,
                   T_trunc=50.0, h=1e-2, n=10**5)
DIAMETER_FIXTURES = (
    dict(model="mult1d", xi=1e-3, u=math.e * 1e-3, T=1.0, h=1e-3, n=10**4),
    dict(model="mult1d", xi=1e-3, u=2 * math.e * 1e-3, T=1.0, h=1e-3, n=10**4),
    dict(model="mult1d", xi=1e-3, u=0.1, T=1.0, h=1e-3, n=10**4),
    dict(model="radial2d-in", xi=0.01, u=0.5, T=1.0, h=1e-3, n=10**4),
)
ATTRACTION_FIXTURE = dict(model="radial2d-in", beta=6.0, gamma=1.0, r=30.0,
                          T=1.0, r0=5.0, xi_cover=0.2, h=5e-3, n=200)
EXPANSION_FIXTURE = dict(model="radial2d-out", beta=6.0, gamma=1.0, r=10.0,
                         ladder=(5.0, 10.0, 20.0, 40.0), xi_cover=0.5,
                         h=1e-2, n=200)
RATE_CERT_FIXTURE = dict(lam=1.0, sigma_L=1.0, sigma_B=1.0, d=2,
                         beta=4.0, gamma=1.0, epsilon=0.1)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    rows: tuple          # dict rows (BoundReport.as_dict() or ad-hoc checks)
    passed: bool

    def as_dict(self):
        return {"suite": self.name, "rows": list(self.rows),
                "verdict": "pass" if self.passed else "fail"}


def _csvrow(experiment, model, seed, n, h, estimate, se, bound, verdict):
    return {"experiment": experiment, "model": model, "seed": seed, "n": n,
            "h": h, "estimate": estimate, "se": se, "bound": bound,
            "verdict": "pass" if verdict else "fail"}


def suite_gaussian(seed=DEFAULT_SEED, threads=1, n=None, h=None):
    """Running-maximum tails: grid estimates vs the reflection value and the
    exponential tail bound, plus a step-size bias-scaling diagnostic.

    The grid running maximum carries a deterministic O(sqrt(h)) downward
    bias, so the two-sided reflection check fails at the shipped (n, h) by
    many standard errors; the rows report the measured bias and its sqrt(h)
    scaling honestly.
    """
    cfg = dict(GAUSSIAN_FIXTURE)
    if n:
        cfg["n"] = n
    if h:
        cfg["h"] = h
    n, h = int(cfg["n"]), float(cfg["h"])
    steps = round(1.0 / h)

    def run(nn, hh, ss):
        parts = ex._map_blocks(
            lambda a, c: bk.running_max_batch(seed, a, c, ss, hh),
            nn, threads, block=8192)
        return np.concatenate(parts)

    rm = run(n, h, steps)
    rows = []
    passed = True
    for c in cfg["thresholds"]:
        p = float((rm >= c).mean())
        se = math.sqrt(p * (1 - p) / n)
        target = float(2.0 * norm.sf(c))
        cap = bd.running_max_tail(c, 1.0)
        within = abs(p - target) <= 3 * se
        under_cap = p <= cap.capped + 3 * se
        passed = passed and within and under_cap
        rows.append({
            "name": "running_max_reflection", "c": c, "mc_estimate": p,
            "std_error": se, "target_exact": target, "bias": p - target,
            "bias_in_se": (p - target) / se if se else 0.0,
            "within_3se": within, "samples": n, "step_size": h, "seed": seed,
        })
        rows.append({
            "name": "running_max_tail_bound", "c": c, "mc_estimate": p,
            "std_error": se, "analytic_bound": cap.capped,
            "verdict": "pass" if under_cap else "fail",
            "samples": n, "step_size": h, "seed": seed,
        })
    # sqrt(h) bias scaling: quadruple h, bias should double
    h4 = 4 * h
    rm4 = run(n, h4, round(1.0 / h4))
    c_ref = 1.0
    b1 = float((rm >= c_ref).mean()) - float(2.0 * norm.sf(c_ref))
    b4 = float((rm4 >= c_ref).mean()) - float(2.0 * norm.sf(c_ref))
    rows.append({
        "name": "running_max_bias_scaling", "c": c_ref,
        "bias_h": b1, "bias_4h": b4,
        "ratio": b4 / b1 if b1 else math.nan,
        "expected_ratio": 2.0, "step_sizes": [h, h4], "samples": n,
        "seed": seed,
        "note": "discretization bias of the grid running maximum scales "
                "like sqrt(h)",
    })
    return SuiteResult("gaussian", tuple(rows), passed)


def suite_two_point(seed=DEFAULT_SEED, threads=1, n=None):
    f = TWO_POINT_FIXTURE
    n = int(n or f["n"])
    model = get_model(f["model"])
    reports = []
    for h in f["step_sizes"]:
        reports.append(ex.exp_two_point(
            model, f["separation"], f["u"], f["T"], h=h, n=n, seed=seed,
            threads=threads))
    diff = abs(reports[0].mc_estimate - reports[1].mc_estimate)
    pooled = math.sqrt(reports[0].std_error**2 + reports[1].std_error**2)
    robust = diff < 3 * pooled
    rows = [r.as_dict() for r in reports]
    rows.append({
        "name": "two_point_step_robustness", "difference": diff,
        "pooled_3se": 3 * pooled, "verdict": "pass" if robust else "fail",
        "step_sizes": list(f["step_sizes"]), "samples": n, "seed": seed,
    })
    return SuiteResult("two-point",
                       tuple(rows),
                       all(r.verdict for r in reports) and robust)


def suite_one_point(seed=DEFAULT_SEED, threads=1, n=None):
    fe, fr = ONE_POINT_ESCAPE_FIXTURE, ONE_POINT_RETURN_FIXTURE
    me = get_model(fe["model"], beta=fe["beta"])
    mr = get_model(fr["model"], beta=fr["beta"])
    r1 = ex.exp_one_point(me, "escape", fe["R"], fe["S"], fe["r_bar"], fe["T"],
                          h=fe["h"], n=int(n or fe["n"]), seed=seed,
                          threads=threads)
    r2 = ex.exp_one_point(mr, "return", fr["R"], fr["S"], fr["r_bar"], fr["T"],
                          h=fr["h"], n=int(n or fr["n"]), seed=seed,
                          threads=threads)
    return SuiteResult("one-point", (r1.as_dict(), r2.as_dict()),
                       r1.verdict and r2.verdict)


def suite_dip(seed=DEFAULT_SEED, threads=1, n=None):
    f = DIP_FIXTURE
    m = get_model(f["model"], beta=f["beta"])
    r = ex.exp_dip(m, f["S"], f["r_bar"], f["T_trunc"], h=f["h"],
                   n=int(n or f["n"]), seed=seed, threads=threads)
    return SuiteResult("dip", (r.as_dict(),), r.verdict)


def suite_diameter(seed=DEFAULT_SEED, threads=1, n=None):
    rows = []
    passed = True
    estimates = {}
    for f in DIAMETER_FIXTURES:
        kw = {} if "beta" not in f else {"beta": f["beta"]}
        m = get_model(f["model"], **kw)
        r = ex.exp_diameter(m, f["xi"], f["u"], f["T"], h=f["h"],
                            n=int(n or f["n"]), seed=seed, threads=threads)
        estimates[(f["model"], f["u"])] = r.mc_estimate
        passed = passed and r.verdict
        if "exact_flow_probability" in r.extra:
            passed = passed and (r.extra["exact_flow_probability"]
                                 <= r.analytic_bound + 1e-15)
        rows.append(r.as_dict())
    # threshold nesting on the mult1d pair of rows
    u1, u2 = math.e * 1e-3, 2 * math.e * 1e-3
    nested = estimates[("mult1d", u2)] <= estimates[("mult1d", u1)]
    rows.append({"name": "diameter_threshold_nesting",
                 "p_at_u": estimates[("mult1d", u1)],
                 "p_at_2u": estimates[("mult1d", u2)],
                 "verdict": "pass" if nested else "fail", "seed": seed})
    return SuiteResult("diameter", tuple(rows), passed and nested)


def suite_chaining():
    tables = [ex.chaining_exact_check(s) for s in (4, 8)]
    return SuiteResult("chaining", tuple(t.as_dict() for t in tables),
                       all(t.all_ok for t in tables))


def suite_constants(seed=DEFAULT_SEED):
    """Exact-arithmetic checks of the derived constants (no Monte Carlo)."""
    rows = []
    passed = True
    b = beta0(CertifiedConstants(1, 1, 1), 2)
    g = gamma0(CertifiedConstants(1, 1, 1), 2)
    ok_b = abs(b - (1 + math.sqrt(3))) <= 1e-12
    ok_g = abs(g - (2 + math.sqrt(3))) <= 1e-12
    rows.append({"name": "beta0_exact", "value": b, "target": 1 + math.sqrt(3),
                 "verdict": "pass" if ok_b else "fail"})
    rows.append({"name": "gamma0_exact", "value": g, "target": 2 + math.sqrt(3),
                 "verdict": "pass" if ok_g else "fail"})
    passed = passed and ok_b and ok_g
    rng = np.random.default_rng(seed)
    worst_d1 = 0.0
    worst_id = 0.0
    for _ in range(100):
        c = CertifiedConstants(rng.uniform(0, 5), rng.uniform(0.1, 3),
                               rng.uniform(0.1, 3))
        worst_d1 = max(worst_d1, abs(beta0(c, 1)))
        d = int(rng.integers(2, 6))
        lhs = (d - 1) * gamma0(c, d)
        rhs = beta0(c, d) ** 2 / (2 * c.sigma_B**2)
        worst_id = max(worst_id, abs(lhs - rhs) / max(1.0, abs(lhs)))
    ok1 = worst_d1 == 0.0
    ok2 = worst_id <= 1e-9
    rows.append({"name": "beta0_d1_zero", "worst": worst_d1,
                 "verdict": "pass" if ok1 else "fail"})
    rows.append({"name": "gamma0_beta0_identity", "worst_rel_err": worst_id,
                 "verdict": "pass" if ok2 else "fail"})
    rc = bd.rate_certificate(
        RATE_CERT_FIXTURE["beta"], RATE_CERT_FIXTURE["gamma"],
        RATE_CERT_FIXTURE["epsilon"],
        CertifiedConstants(RATE_CERT_FIXTURE["lam"],
                           RATE_CERT_FIXTURE["sigma_L"],
                           RATE_CERT_FIXTURE["sigma_B"]),
        RATE_CERT_FIXTURE["d"])
    ok3 = rc.feasible and rc.rate_A1 < 0 and rc.rate_A3 < 0
    rows.append({"name": "rate_certificate", "Gamma": rc.Gamma,
                 "rate_A1": rc.rate_A1, "rate_A3": rc.rate_A3,
                 "verdict": "pass" if ok3 else "fail"})
    return SuiteResult("constants", tuple(rows), passed and ok1 and ok2 and ok3)


def run_attraction(seed=DEFAULT_SEED, threads=1, n=None, h=None, overrides=None):
    f = dict(ATTRACTION_FIXTURE)
    f.update(overrides or {})
    model = get_model(f["model"], beta=f["beta"])
    return ex.exp_attraction(
        model, gamma=f["gamma"], r=f["r"], T=f["T"], r0=f["r0"],
        xi_cover=f["xi_cover"], h=float(h or f["h"]), n=int(n or f["n"]),
        seed=seed, threads=threads)


def run_expansion(seed=DEFAULT_SEED, threads=1, n=None, h=None, overrides=None):
    f = dict(EXPANSION_FIXTURE)
    f.update(overrides or {})
    model = get_model(f["model"], beta=f["beta"])
    return ex.exp_expansion(
        model, gamma=f["gamma"], r=f["r"], ladder=f["ladder"],
        xi_cover=f["xi_cover"], h=float(h or f["h"]), n=int(n or f["n"]),
        seed=seed, threads=threads)


SUITES = {
    "constants": lambda seed, threads, n, h: suite_constants(seed),
    "gaussian": lambda seed, threads, n, h: suite_gaussian(seed, threads, n, h),
    "two-point": lambda seed, threads, n, h: suite_two_point(seed, threads, n),
    "one-point": lambda seed, threads, n, h: suite_one_point(seed, threads, n),
    "dip": lambda seed, threads, n, h: suite_dip(seed, threads, n),
    "diameter": lambda seed, threads, n, h: suite_diameter(seed, threads, n),
    "chaining": lambda seed, threads, n, h: suite_chaining(),
}


def run_suite(name, seed=None, threads=1, replicas=None, h=None):
    if name not in SUITES:
        raise ex.ConfigError(
            f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    return SUITES[name](seed if seed is not None else DEFAULT_SEED,
                        threads, replicas, h)
