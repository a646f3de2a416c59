"""Command-line interface.

    python -m crtwist classify --c1 -2 --c2 1
    python -m crtwist curve --q1 -2/15 --q3 -10/21 --rect 1.83,1.86,0.65,0.75 --seed 7 --out run1

Every command prints a JSON report on stdout (or writes files under --out)
and exits with status 1 on any library error, 2 on bad arguments.
"""

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import closure, dynamics, geometry_io, invariants, moduli, quadrature, reconstruction
from .errors import CRTwistError, DomainError

DEFAULTS = {
    "quad_tol": 1e-10,
    "rtol": dynamics.RTOL,
    "atol": dynamics.ATOL,
    "group_tol": 1e-6,
    "popsize": 20,
    "mutation": 0.8,
    "recombination": 0.9,
    "maxiter": 300,
    "seed": 0,
    "samples_per_period": invariants.SAMPLES_PER_PERIOD,
    "max_denominator": 256,
    "rational_tol": 1e-8,
    "out": None,
}


def load_config(path):
    """Read a JSON object of settings; unknown keys are rejected."""
    if path is None:
        return dict(DEFAULTS)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    cfg = dict(DEFAULTS)
    cfg.update(data)
    for key in ("quad_tol", "rtol", "atol", "group_tol", "rational_tol"):
        if not cfg[key] > 0:
            raise DomainError(f"config value {key} must be positive")
    return cfg


def _merge(args):
    cfg = load_config(args.config)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _rect(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad rectangle {text!r}") from exc
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("rectangle needs t0,t1,s0,s1")
    return vals


def _emit(report, cfg, name):
    text = json.dumps({"schema_version": geometry_io.SCHEMA_VERSION, **geometry_io.to_jsonable(report)},
                      indent=2)
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# reports


def spectral_report(c):
    c = moduli.as_modulus(c)
    roots = moduli.quintic_roots(c)
    mom = moduli.momentum_eigenvalues(c)
    cl = moduli.classify(c)
    gen = moduli.is_general(c)
    return {
        "modulus": {"c1": c.c1, "c2": c.c2},
        "classification": {"phase": cl.phase, "orbit": cl.orbit, "region": cl.region,
                           "curve_classes": list(cl.curve_classes), "boundary": list(cl.boundary),
                           "separatrix_distance": cl.separatrix_distance},
        "quintic": {"real_roots": list(roots.real_roots), "multiplicities": list(roots.multiplicities),
                    "complex_pairs": [list(p) for p in roots.complex_pairs]},
        "momentum": {"kind": mom.kind, "eigenvalues": list(mom.eigenvalues)},
        "discriminants": {"delta1": gen.delta1, "delta2": gen.delta2, "general": gen.general},
    }


def _rationals(P, cfg):
    q1 = closure.rationalize(P[0], cfg["max_denominator"], cfg["rational_tol"])
    q2 = closure.rationalize(P[1], cfg["max_denominator"] * 3, cfg["rational_tol"])
    q3 = closure.rationalize(P[2], cfg["max_denominator"], cfg["rational_tol"])
    return q1, q2, q3


def build_curve(c, cfg, q=None):
    """Standard configuration, closing integrals and (if closed) invariants of ``c``."""
    c = moduli.as_modulus(c)
    report = spectral_report(c)
    profile = dynamics.twist_profile(c, "B'1", rtol=cfg["rtol"], atol=cfg["atol"])
    config = reconstruction.standard_configuration(c, profile)
    P = quadrature.quantum_integrals(c, tol=cfg["quad_tol"]).values
    report["half_period"] = profile.omega
    report["quantum_integrals"] = list(P)
    report["polarization"] = {"eps": config.eps, "label": config.polarization}
    q1, q2, q3 = _rationals(P, cfg)
    if q is not None:
        q1, q3 = q
    inv = None
    if q1 is not None and q3 is not None and q2 is not None:
        inv = invariants.curve_invariants(config, q1, q3, q2, cfg["samples_per_period"])
        qn = inv.numbers
        report["quantum_numbers"] = {"q1": qn.q1, "q2": qn.q2, "q3": qn.q3, "n": qn.n}
        report["invariants"] = geometry_io.invariants_block(inv)
        report["invariant_checks"] = {
            "closed_form_turning": qn.turning_branches, "closed_form_trace": qn.trace_branches,
            "matching_eps": list(inv.matching_branch), "linking": inv.linking,
            "closure_distance": inv.closure_distance, "axis_clearance": inv.axis_clearance,
        }
        periods = qn.wave_number
    else:
        report["quantum_numbers"] = None
        report["invariants"] = None
        periods = 1
    return report, config, periods


def curve_samples(config, periods, samples_per_period):
    sampler = invariants.PeriodSampler(config, samples_per_period)
    return sampler.s(periods), sampler.points(periods)


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args, cfg):
    _emit(spectral_report((args.c1, args.c2)), cfg, "classify")
    return 0


def cmd_twist(args, cfg):
    c = moduli.Modulus(args.c1, args.c2)
    prof = dynamics.twist_profile(c, args.curve_class, horizon=args.horizon, tau0=args.tau0,
                                  dtau0=args.dtau0, rtol=cfg["rtol"], atol=cfg["atol"])
    end = 2 * prof.omega if prof.periodic else prof.t_end
    s = np.linspace(0.0, end, args.samples)
    tau, dtau, kappa, phi = prof(s)
    report = {
        "modulus": {"c1": c.c1, "c2": c.c2}, "curve_class": prof.curve_class,
        "omega": prof.omega, "t_end": prof.t_end, "truncated": prof.truncated,
        "conservation_residual": float(prof.conservation_residual().max()),
    }
    if prof.periodic:
        report["phase_jump_over_2pi"] = list((prof.phase_jump / (2 * np.pi)).real)
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        rows = np.column_stack([s, tau, dtau, kappa, phi.real.T, phi.imag.T])
        header = "s,tau,dtau,kappa,phi1,phi2,phi3,phi1_im,phi2_im,phi3_im"
        np.savetxt(out / "twist.csv", rows, delimiter=",", header=header, comments="", fmt="%.17g")
    _emit(report, cfg, "twist")
    return 0


def _search_cfg(args, cfg, rect):
    return closure.SearchConfig(rect=rect, branch=args.branch, popsize=cfg["popsize"],
                                mutation=cfg["mutation"], recombination=cfg["recombination"],
                                maxiter=cfg["maxiter"], seed=int(cfg["seed"]))


def _screen(q1, q3, branch):
    (t, s, d), rect = closure.screen_grid(q1, q3, branch)
    return {"nearest_grid_point": [t, s], "grid_distance": d}, rect


def _search(args, cfg):
    q1, q3 = float(args.q1), float(args.q3)
    rect = args.rect
    screen = None
    if rect is None:
        screen, rect = _screen(q1, q3, args.branch)
    res = closure.search_modulus(q1, q3, _search_cfg(args, cfg, rect))
    report = {
        "seed": res.seed, "target": [args.q1, args.q3], "rect": list(rect), "found": res.found,
        "point": list(res.point), "modulus": {"c1": res.modulus.c1, "c2": res.modulus.c2},
        "delta": res.delta, "quantum_integrals": list(res.P),
        "delta1": res.delta1, "delta2": res.delta2, "generations": res.generations,
        "evaluations": res.evaluations, "refined": res.refined,
    }
    if not res.found:
        report["diagnostic"] = screen or _screen(q1, q3, args.branch)[0]
    return res, report


def cmd_search(args, cfg):
    res, report = _search(args, cfg)
    _emit(report, cfg, "search")
    return 0 if res.found else 1


def cmd_curve(args, cfg):
    q = None
    search_report = None
    if args.q1 is not None or args.q3 is not None:
        if args.q1 is None or args.q3 is None:
            raise DomainError("--q1 and --q3 go together")
        res, search_report = _search(args, cfg)
        if not res.found:
            _emit({"search": search_report, "found": False}, cfg, "curve")
            return 1
        c = res.modulus
        q = (args.q1, args.q3)
    elif args.c1 is not None and args.c2 is not None:
        c = moduli.Modulus(args.c1, args.c2)
    else:
        raise DomainError("give either --q1/--q3 or --c1/--c2")
    report, config, periods = build_curve(c, cfg, q)
    report["seed"] = cfg["seed"]
    if search_report is not None:
        report["search"] = search_report
    if cfg.get("out"):
        s, pts = curve_samples(config, periods, cfg["samples_per_period"])
        closed = report["invariants"] is not None
        geometry_io.export_curve(cfg["out"], "curve", s, pts, report, closed,
                                 comment=f"seed={cfg['seed']}")
    _emit(report, cfg, "report")
    return 0


def cmd_pmap(args, cfg):
    lo, hi = closure.branch_interval(args.branch)
    t0, t1, s0, s1 = args.rect if args.rect else (lo, hi, 0.0, 1.0)
    ts = np.linspace(t0, t1, args.nt + 2)[1:-1]
    ss = np.linspace(s0, s1, args.ns + 2)[1:-1]
    rows = closure.pmap_grid(args.branch, ts, ss)
    lines = ["t,s,c1,c2,P1,P3,delta1,delta2"]
    for v in rows:
        vals = (v.t, v.s, v.modulus.c1, v.modulus.c2, v.P[0], v.P[2], v.delta1, v.delta2)
        lines.append(",".join("%.17g" % x for x in vals))
    text = "\n".join(lines) + "\n"
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "pmap.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_invariants(args, cfg):
    qn = invariants.discrete_invariants(args.q1, args.q3, args.eps, args.q2)
    report = {
        "q1": qn.q1, "q2": qn.q2, "q3": qn.q3, "n": qn.n, "s1": qn.s1, "s3": qn.s3,
        "spin": qn.spin_label, "wave_number": qn.wave_number, "eps": qn.eps,
        "turning": qn.turning, "trace": qn.trace,
        "turning_branches": qn.turning_branches, "trace_branches": qn.trace_branches,
    }
    _emit(report, cfg, "invariants")
    return 0


def cmd_export(args, cfg):
    if not cfg.get("out"):
        raise DomainError("export needs --out")
    c = moduli.Modulus(args.c1, args.c2)
    prof = dynamics.twist_profile(c, "B'1", rtol=cfg["rtol"], atol=cfg["atol"])
    config = reconstruction.standard_configuration(c, prof)
    s, pts = curve_samples(config, args.periods, cfg["samples_per_period"])
    report = spectral_report(c)
    report["half_period"] = prof.omega
    report["periods"] = args.periods
    if args.dual:
        path = dynamics.integrate_frame(prof, tol=cfg["group_tol"])
        A, _ = reconstruction.align_to_standard(config, path)
        F3, diag = geometry_io.dual_curve(path, s)
        pts = F3 @ A.T
        report["dual_diagnostic_min_abs"] = float(np.min(np.abs(diag)))
    files, xyz = geometry_io.export_curve(cfg["out"], "dual" if args.dual else "curve", s, pts, report)
    print(json.dumps({k: str(v) for k, v in files.items()}, indent=2))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed for the search (default 0)")
    common.add_argument("--config", help="JSON file with settings; flags override it")

    p = argparse.ArgumentParser(prog="crtwist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def modulus_args(sp, required=True):
        sp.add_argument("--c1", type=float, required=required)
        sp.add_argument("--c2", type=float, required=required)

    sp = sub.add_parser("classify", parents=[common], help="roots, spectra and class of a modulus")
    modulus_args(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("twist", parents=[common], help="integrate the twist and phases")
    modulus_args(sp)
    sp.add_argument("--class", dest="curve_class")
    sp.add_argument("--horizon", type=float)
    sp.add_argument("--tau0", type=float)
    sp.add_argument("--dtau0", type=float)
    sp.add_argument("--samples", type=int, default=257)
    sp.set_defaults(func=cmd_twist)

    for name, func, helptext in (("search", cmd_search, "find a modulus with given P1, P3"),
                                 ("curve", cmd_curve, "full pipeline: search, reconstruct, export")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--q1", type=_fraction, required=name == "search")
        sp.add_argument("--q3", type=_fraction, required=name == "search")
        sp.add_argument("--rect", type=_rect, help="t0,t1,s0,s1")
        sp.add_argument("--branch", choices=("minus", "plus"), default="minus")
        if name == "curve":
            modulus_args(sp, required=False)
        sp.set_defaults(func=func)

    sp = sub.add_parser("pmap", parents=[common], help="grid of (P1, P3) over a parameter rectangle")
    sp.add_argument("--branch", choices=("minus", "plus"), default="minus")
    sp.add_argument("--nt", type=int, default=40)
    sp.add_argument("--ns", type=int, default=40)
    sp.add_argument("--rect", type=_rect)
    sp.set_defaults(func=cmd_pmap)

    sp = sub.add_parser("invariants", parents=[common], help="closed-form discrete invariants")
    sp.add_argument("--q1", type=_fraction, required=True)
    sp.add_argument("--q3", type=_fraction, required=True)
    sp.add_argument("--q2", type=_fraction)
    sp.add_argument("--eps", type=int, choices=(1, -1), default=1)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("export", parents=[common], help="export a standard configuration")
    modulus_args(sp)
    sp.add_argument("--periods", type=int, default=1)
    sp.add_argument("--dual", action="store_true", help="export the dual curve instead")
    sp.set_defaults(func=cmd_export)
    return p


_NEGATIVE = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+([eE][-+]?\d+)?)$")


def _attach_negative_values(argv):
    """Join ``--opt -2/15`` into ``--opt=-2/15`` so argparse does not read a flag."""
    out = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        cfg = _merge(args)
        return args.func(args, cfg)
    except CRTwistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
