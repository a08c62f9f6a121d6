"""Command-line interface.

Subcommands map 1:1 onto library operations; every run that writes files
produces report.json (pure function of config and seed), summary.csv, and
manifest.json (timestamps live only here) under --out.

Exit codes: 0 all verdicts pass, 1 any verdict fails, 2 configuration or
usage error.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import bounds as bd
from . import experiments as ex
from . import geometry as geo
from . import reporting as rp
from . import suites
from .integrator import PointCloud, evolve
from .models import CertifiedConstants, beta0, gamma0, get_model
from .noise import NoiseSource


def _seed(text):
    return int(text, 0)   # decimal or hex


def _parse_params(text):
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise ex.ConfigError(f"bad --params entry {part!r}, expected k=v")
        k, v = part.split("=", 1)
        k = k.strip()
        try:
            out[k] = int(v) if k in ("d", "a_int",) else float(v)
        except ValueError:
            raise ex.ConfigError(f"bad --params value {v!r} for {k!r}")
    return out


def _load_config(path):
    if path is None:
        return suites.ExperimentConfig()
    with open(path) as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise ex.ConfigError(f"config {path} is not valid JSON: {e}")
    return suites.parse_config(obj)


def _merge(cfg, args, key, flag_value):
    """Flags win over config keys; config wins over built-in defaults."""
    if flag_value is not None:
        return flag_value
    return getattr(cfg, key, None)


def _emit(outdir, command, seed, config_echo, report_payload, summary_rows,
          started):
    paths = {}
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        rep = os.path.join(outdir, "report.json")
        rp.write_report_json(rep, report_payload)
        paths["report"] = rep
        csvp = os.path.join(outdir, "summary.csv")
        rp.write_summary_csv(csvp, summary_rows)
        paths["summary"] = csvp
        man = rp.RunManifest(version=__version__, command=command,
                             seed=seed, config=config_echo,
                             started_at=started, results=paths)
        man.finish()
        manp = os.path.join(outdir, "manifest.json")
        man.write(manp)
        paths["manifest"] = manp
    return paths


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_beta0(args):
    c = CertifiedConstants(args.lam, args.sigma_l, args.sigma_b)
    print(f"beta0 = {rp.fmt9(beta0(c, args.d))}")
    print(f"gamma0 = {rp.fmt9(gamma0(c, args.d))}")
    return 0


def cmd_rates(args):
    c = CertifiedConstants(args.lam, args.sigma_l, args.sigma_b)
    out = {
        "beta0": beta0(c, args.d),
        "gamma0": gamma0(c, args.d),
    }
    if args.gamma is not None:
        out["rate_I"] = bd.rate_I(args.gamma, c.lam, c.sigma_L, args.d,
                                  one_to_one=args.one_to_one)
    if args.beta is not None:
        if args.gamma is None:
            raise ex.ConfigError("--beta requires --gamma")
        cert = bd.rate_certificate(args.beta, args.gamma, args.epsilon, c,
                                   args.d)
        out["certificate"] = {
            "feasible": cert.feasible, "Gamma": cert.Gamma,
            "rate_A1": cert.rate_A1, "rate_A3": cert.rate_A3,
            "rate_A2": cert.rate_A2,
        }
    print(json.dumps(rp.sanitize(out), sort_keys=True, indent=2))
    return 0


_BOUND_SPECS = {
    "gaussian-tail": (bd.gaussian_tail, ("c", "t")),
    "running-max-tail": (bd.running_max_tail, ("c", "t")),
    "escape": (bd.escape_upper, ("R", "S", "r_bar", "T", "sigma_B", "beta_star")),
    "return": (bd.return_upper, ("R", "S", "r_bar", "T", "sigma_B", "beta_star")),
    "dip": (bd.dip_bound, ("S", "r_bar", "sigma_B", "beta_star")),
    "crossing": (bd.crossing_bound, ("R", "S", "T", "sigma_B")),
    "excursion": (bd.excursion_bound, ("delta", "h", "sigma_B")),
    "kolmogorov": (bd.kolmogorov_tail, ("a", "b", "c", "kappa", "d", "u")),
    "ball-diameter": (bd.ball_diameter_bound,
                      ("xi", "T", "u", "q", "kappa", "c_bar", "Lambda",
                       "sigma", "d")),
}


def cmd_bounds(args):
    params = _parse_params(args.params)
    name = args.name
    if name == "two-point":
        exact, tb = bd.two_point_tail(params["separation"], params["u"],
                                      params["T"], params["sigma_L"],
                                      params["lam"])
        payload = tb.as_dict()
        payload["exact"] = exact
    elif name == "ball-diameter-opt":
        tb, q, kappa = bd.ball_diameter_bound_opt(
            params["xi"], params["T"], params["u"], params["c_bar"],
            params["Lambda"], params["sigma"], int(params["d"]))
        payload = tb.as_dict()
        payload["q_opt"] = q
        payload["kappa_opt"] = kappa
    elif name in _BOUND_SPECS:
        fn, keys = _BOUND_SPECS[name]
        missing = [k for k in keys if k not in params]
        if missing:
            raise ex.ConfigError(f"bound {name!r} needs params {missing}")
        kw = {k: (int(params[k]) if k == "d" else params[k]) for k in keys}
        payload = fn(**kw).as_dict()
    else:
        raise ex.ConfigError(
            f"unknown bound {args.name!r}; available: "
            f"{', '.join(sorted(list(_BOUND_SPECS) + ['two-point', 'ball-diameter-opt']))}")
    print(json.dumps(rp.sanitize(payload), sort_keys=True, indent=2))
    return 0


def cmd_cover(args):
    cov = geo.cover_sphere(args.d, args.radius, args.xi)
    gap = geo.probe_gap(cov)
    payload = {"dimension": cov.dimension, "sphere_radius": cov.sphere_radius,
               "ball_radius": cov.ball_radius, "count": cov.count,
               "achieved_c_d": cov.achieved_constant, "probe_gap": gap,
               "verified": gap <= cov.ball_radius}
    print(json.dumps(rp.sanitize(payload), sort_keys=True, indent=2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "centers.csv")
        header = ",".join(f"x_{i+1}" for i in range(cov.dimension))
        lines = [header] + [",".join(rp.fmt9(float(v)) for v in row)
                            for row in cov.centers]
        rp.atomic_write(path, "\n".join(lines) + "\n")
        print(f"centers written to {path}")
    return 0 if payload["verified"] else 1


def _parse_points(text):
    pts = []
    for chunk in text.split(";"):
        pts.append([float(v) for v in chunk.split(",")])
    return np.array(pts)


def cmd_simulate(args):
    model = get_model(args.model, **({"beta": args.beta} if args.beta
                                     is not None else {}))
    pts = _parse_points(args.points)
    if pts.shape[1] != model.dimension:
        raise ex.ConfigError(
            f"points have dimension {pts.shape[1]}, model {model.name} "
            f"has dimension {model.dimension}")
    noise = NoiseSource(args.seed, max(1, model.driver_count), args.h)
    cloud = PointCloud.create(pts, time=args.from_step * args.h)
    lines = []
    header = "t,point_index," + ",".join(f"x_{i+1}"
                                         for i in range(model.dimension))
    lines.append(header)

    def dump(c):
        for i, p in enumerate(c.points):
            lines.append(",".join([rp.fmt9(c.time), str(i)]
                                  + [rp.fmt9(float(v)) for v in p]))

    dump(cloud)
    for k in range(args.from_step, args.to_step):
        cloud = evolve(model, cloud, k, k + 1, noise)
        dump(cloud)
    text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "trajectory.csv")
        rp.atomic_write(path, text)
        print(f"trajectory written to {path}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    cfg = _load_config(args.config)
    seed = _merge(cfg, args, "seed", args.seed)
    seed = suites.DEFAULT_SEED if seed is None else seed
    replicas = _merge(cfg, args, "replicas", args.replicas)
    h = _merge(cfg, args, "step", args.h)
    started = time.time()
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        results.append(suites.run_suite(name, seed=seed, threads=args.threads,
                                        replicas=replicas, h=h))
    payload = {"command": "verify", "seed": seed,
               "suites": [r.as_dict() for r in results]}
    rows = [row for r in results for row in r.rows]
    _emit(args.out, "verify " + args.suite, seed,
          {"suite": args.suite, "replicas": replicas, "step": h},
          payload, rows, started)
    ok = all(r.passed for r in results)
    for r in results:
        print(f"suite {r.name}: {'pass' if r.passed else 'FAIL'}")
    return 0 if ok else 1


def _run_headline(args, runner, name):
    cfg = _load_config(args.config)
    seed = _merge(cfg, args, "seed", args.seed)
    seed = suites.DEFAULT_SEED if seed is None else seed
    replicas = _merge(cfg, args, "replicas", args.replicas)
    h = _merge(cfg, args, "step", args.h)
    overrides = dict(cfg.radii)
    for key in ("gamma", "r", "r0", "beta"):
        v = getattr(args, key, None)
        if v is not None:
            overrides[key] = v
    if getattr(args, "xi", None) is not None:
        overrides["xi_cover"] = args.xi
    if getattr(args, "horizon", None) is not None:
        overrides["T"] = args.horizon
    elif cfg.horizon is not None:
        overrides["T"] = cfg.horizon
    if "xi" in overrides:
        overrides["xi_cover"] = overrides.pop("xi")
    started = time.time()
    report = runner(seed=seed, threads=args.threads, n=replicas, h=h,
                    overrides=overrides)
    payload = report.as_dict()
    payload["note"] = suites.PINNED_NOTE
    _emit(args.out, name, seed, overrides, payload, [payload], started)
    print(json.dumps(rp.sanitize(payload), sort_keys=True, indent=2))
    return 0 if report.verdict else 1


def cmd_attract(args):
    return _run_headline(args, suites.run_attraction, "attract")


def cmd_expand(args):
    return _run_headline(args, suites.run_expansion, "expand")


def cmd_chain_check(args):
    ok = True
    for steps in args.steps:
        table = ex.chaining_exact_check(steps)
        ok = ok and table.all_ok
        print(f"# steps={steps} paths={2**steps}")
        print("u,lhs,rhs_raw,rhs_capped,ok")
        for r in table.rows:
            print(",".join([rp.fmt9(r.u), rp.fmt9(r.lhs), rp.fmt9(r.rhs_raw),
                            rp.fmt9(r.rhs_capped), "1" if r.ok else "0"]))
    return 0 if ok else 1


def cmd_schedule(args):
    s = bd.borel_cantelli_schedule(args.s0, args.gamma, args.alpha, args.n,
                                   c=args.c)
    print("i,S_i,T_i,partial_sum_exp(-c*T_i)")
    for i, ((S, T), ps) in enumerate(zip(s.pairs, s.partial_sums)):
        print(",".join([str(i), rp.fmt9(S), rp.fmt9(T), rp.fmt9(float(ps))]))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(sub, out=True):
    sub.add_argument("--seed", type=_seed, default=None,
                     help="RNG seed (decimal or hex)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker thread cap (results are thread-count "
                          "independent)")
    sub.add_argument("--config", default=None, help="JSON config file")
    sub.add_argument("--replicas", type=int, default=None,
                     help="Monte Carlo replica count override")
    sub.add_argument("--h", type=float, default=None,
                     help="integration step size override")
    if out:
        sub.add_argument("--out", default=None,
                         help="output directory (report.json, summary.csv, "
                              "manifest.json)")


def build_parser():
    p = argparse.ArgumentParser(
        prog="flowlab",
        description="Verification lab for attraction/expansion bounds of "
                    "Brownian flows driven by finitely many Brownian motions.")
    p.add_argument("--version", action="version", version=__version__)
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("beta0", help="critical rate beta0 and covering rate "
                                      "gamma0 from certified constants")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--sigma-l", type=float, required=True)
    s.add_argument("--sigma-b", type=float, required=True)
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(fn=cmd_beta0)

    s = subs.add_parser("rates", help="decay rate I(gamma) and the "
                                      "summability certificate")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--sigma-l", type=float, required=True)
    s.add_argument("--sigma-b", type=float, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--one-to-one", action="store_true",
                   help="use the injective-flow reading (d -> d-1) in I(gamma)")
    s.add_argument("--beta", type=float, default=None,
                   help="radial drift rate for the certificate")
    s.add_argument("--epsilon", type=float, default=0.1)
    s.set_defaults(fn=cmd_rates)

    s = subs.add_parser("bounds", help="evaluate a single tail bound")
    s.add_argument("name", help="bound name (see module docs)")
    s.add_argument("--params", default="", help="comma-separated k=v list")
    s.set_defaults(fn=cmd_bounds)

    s = subs.add_parser("cover", help="sphere covering construction")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_cover)

    s = subs.add_parser("simulate", help="dump a trajectory as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--beta", type=float, default=None,
                   help="drift magnitude override")
    s.add_argument("--points", required=True,
                   help="initial points, e.g. '1,0;2,0'")
    s.add_argument("--from-step", type=int, default=0)
    s.add_argument("--to-step", type=int, required=True)
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--seed", type=_seed, default=suites.DEFAULT_SEED)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_simulate)

    s = subs.add_parser("verify", help="run a bound-verification suite")
    s.add_argument("suite", help="suite name or 'all'; suites: "
                                 + ", ".join(sorted(suites.SUITES)))
    _common(s)
    s.set_defaults(fn=cmd_verify)

    s = subs.add_parser("attract", help="pullback attraction experiment "
                                        "(pinned fixture)")
    _common(s)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--r", type=float, default=None)
    s.add_argument("--r0", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--xi", type=float, default=None)
    s.add_argument("--horizon", type=float, default=None)
    s.set_defaults(fn=cmd_attract)

    s = subs.add_parser("expand", help="forward expansion experiment "
                                       "(pinned fixture)")
    _common(s)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--r", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--xi", type=float, default=None)
    s.set_defaults(fn=cmd_expand)

    s = subs.add_parser("chain-check", help="exact chaining check on walks")
    s.add_argument("--steps", type=int, action="append", default=None,
                   help="walk length (repeatable; default 4 and 8)")
    s.set_defaults(fn=cmd_chain_check)

    s = subs.add_parser("schedule", help="radius/horizon schedule with "
                                         "summability partial sums")
    s.add_argument("--s0", type=float, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=float, default=1.0)
    s.set_defaults(fn=cmd_schedule)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    if getattr(args, "command", None) == "chain-check" and args.steps is None:
        args.steps = [4, 8]
    try:
        return args.fn(args)
    except (ex.ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
