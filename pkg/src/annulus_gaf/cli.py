"""Command line front end: density/correlation curves, the critical-weight
curve, the identity suite, and Monte Carlo verification runs as CSV/JSON.

Exit codes: 0 pass, 1 validation failure, 2 usage error.  Output is
deterministic for a fixed flag set (including the seed): numbers are
written with 17 significant digits and '\n' line endings.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, gaf, identity_suite, pointprocess
from .errors import AnnulusGafError

FMT = "%.17g"


def _write_csv(path, header, rows, meta):
    lines = [f"# annulus-gaf {__version__} | {meta}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(FMT % v if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _meta(args, extra=""):
    skip = ("func", "command", "out")
    flags = " ".join(
        f"--{k.replace('_', '-')}={v}"
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    )
    seed = getattr(args, "seed", None)
    return f"cmd: {args.command} {flags} | seed: {seed}" + (f" | {extra}" if extra else "")


def cmd_density(args) -> int:
    q, r, n = args.q, args.r, args.grid
    if not (0.0 <= q < 1.0) or r <= 0 or n < 1:
        print("density: need 0 <= q < 1, r > 0, grid >= 1", file=sys.stderr)
        return 2
    if q == 0.0:
        grid = np.linspace(0.0, 1.0, n + 1)[:-1]
        rho = [pointprocess.density_disk(s, r) for s in grid]
    else:
        grid = np.linspace(q, 1.0, n + 2)[1:-1]
        rho = [pointprocess.density_annulus(s, r, q) for s in grid]
    rows = [(float(s), float(v)) for s, v in zip(grid, rho)]
    _write_csv(args.out, ["abs_z", "rho1"], rows, _meta(args))
    return 0


def cmd_gvee(args) -> int:
    q, n = args.q, args.grid
    r_list = args.r_list
    if not (0.0 < q < 1.0) or n < 1 or not r_list:
        print("gvee: need 0 < q < 1, grid >= 1 and at least one r", file=sys.stderr)
        return 2
    grid = np.linspace(q, 1.0, n + 2)[1:-1]
    rows = []
    for r in sorted(r_list):
        for x in grid:
            rows.append((float(x), float(r), pointprocess.g_antipodal(float(x), r, q)))
    rows.sort(key=lambda t: (t[1], t[0]))
    _write_csv(args.out, ["x", "r", "G_vee"], rows, _meta(args))
    return 0


def cmd_r0_curve(args) -> int:
    if args.q_list:
        qs = args.q_list
    else:
        qs = list(np.linspace(0.95 / args.grid, 0.95, args.grid))
    if any(not 0.0 < q <= 0.95 for q in qs):
        print("r0-curve: q values must lie in (0, 0.95]", file=sys.stderr)
        return 2
    rc = pointprocess.R_CRITICAL_DISK
    rows = []
    for q in sorted(qs):
        pt = pointprocess.critical_weight(q)
        if not q < pt.r0 < 1.0:
            print(f"r0-curve: q={q} produced r0={pt.r0} outside (q, 1)", file=sys.stderr)
            return 1
        rows.append((float(q), pt.r0, rc + 8.515307593 * q * q, 1.0 - (1.0 - q) / 2.0))
    _write_csv(args.out, ["q", "r0", "rc_parabola", "one_minus_half"], rows, _meta(args))
    return 0


def cmd_identity_suite(args) -> int:
    report = identity_suite.run_identity_suite(
        q_list=args.q_list or (0.2, 0.35, 0.5),
        r_list=args.r_list or (0.3, 0.7, 1.1),
        seed=args.seed,
        instances=args.samples,
        perturb=args.flip_sign,
    )
    payload = {
        "version": __version__,
        "seed": args.seed,
        "suites": report,
        "counts": {name: entry["instances"] for name, entry in report.items()},
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    failing = [name for name, entry in report.items() if not entry["pass"]]
    if failing:
        print(f"identity-suite: FAIL {failing[0]} "
              f"(max residual {report[failing[0]]['max_residual']:.3e})", file=sys.stderr)
        return 1
    return 0


def cmd_mc_verify(args) -> int:
    q, r = args.q, args.r
    if q < 0 or q >= 1 or r <= 0:
        print("mc-verify: need 0 <= q < 1 and r > 0", file=sys.stderr)
        return 2
    summary = {"version": __version__, "q": q, "r": r, "seed": args.seed,
               "samples": args.samples, "checks": {}}
    worst = 0.0
    margin = args.margin if args.margin is not None else (0.25 if q == 0 else 0.15)
    dens = gaf.mc_density(q, r, args.samples, args.bins, args.seed,
                          margin=margin, modes=args.modes)
    rows = []
    for k, est in enumerate(dens.estimates):
        rows.append((float(dens.edges[k]), float(dens.edges[k + 1]), est.value,
                     est.std_error, float(dens.expected[k]), float(dens.z_scores[k])))
    _write_csv(args.out, ["bin_lo", "bin_hi", "intensity", "std_error", "expected", "z"],
               rows, _meta(args))
    worst = float(np.max(dens.z_scores))
    summary["checks"]["density_max_z"] = worst
    if q > 0:
        probes = [complex(0.55 * np.cos(t), 0.55 * np.sin(t)) for t in (0.3, 2.1, 4.4)]
        anchor = complex((q + 1) / 2 * np.cos(1.0), (q + 1) / 2 * np.sin(1.0))
        resid = gaf.conditional_covariance_check(q, r, [anchor], probes,
                                                 max(args.samples, 2000), args.seed)
        summary["checks"]["conditional_max_z"] = float(resid)
        worst = max(worst, float(resid))
    summary["max_z"] = worst
    summary["pass"] = bool(worst < 5.0)
    out_json = None if args.out in (None, "-") else str(args.out) + ".json"
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if out_json is None:
        sys.stdout.write(text)
    else:
        with open(out_json, "w") as fh:
            fh.write(text)
    if not summary["pass"]:
        print(f"mc-verify: FAIL max z-score {worst:.2f} >= 5", file=sys.stderr)
        return 1
    return 0


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agaf", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="radial zero density profile as CSV")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("gvee", help="antipodal pair-correlation curves as CSV")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--r", dest="r_list", type=_float_list, required=True,
                   help="comma-separated weight values")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gvee)

    p = sub.add_parser("r0-curve", help="critical weight curve r0(q) as CSV")
    p.add_argument("--q-list", type=_float_list, default=None)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_r0_curve)

    p = sub.add_parser("identity-suite", help="randomized identity residual report (JSON)")
    p.add_argument("--q-list", type=_float_list, default=None)
    p.add_argument("--r-list", type=_float_list, default=None)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--samples", type=int, default=100, help="instances per identity")
    p.add_argument("--out", default=None)
    p.add_argument("--flip-sign", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_identity_suite)

    p = sub.add_parser("mc-verify", help="Monte Carlo density/conditioning checks")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--bins", type=int, default=6)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mc_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AnnulusGafError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
