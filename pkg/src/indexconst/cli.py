"""Command-line interface: ``indexconst {constant,design,chi-plot,verify-paper}``.

Exit codes: 0 success, 1 numerical failure or infeasible parameters,
2 usage or input error.
"""
import argparse
import csv
import io
import json
import math
import sys

from . import checks, slepian
from .designer import (CENTERED, LITERAL, PAPER_AMP_BOUND, PAPER_EPS_HI, PAPER_EPS_LO,
                       DesignParams, design_constant, solve_system, build_constraints,
                       verify_profile)
from .errors import DomainError, InfeasibleError, NumericalError
from .specfun import PAPER_N5, CosineProfile

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


class InputError(Exception):
    """Bad input file or option combination (exit code 2)."""


def _add_shared(p):
    p.add_argument("--modes", type=int, default=5, help="number of cosine modes n (default 5)")
    p.add_argument("--eps-lo", type=float, default=PAPER_EPS_LO)
    p.add_argument("--eps-hi", type=float, default=PAPER_EPS_HI)
    p.add_argument("--amp-bound", type=float, default=PAPER_AMP_BOUND)
    p.add_argument("--grid-step", type=float, default=0.005)
    p.add_argument("--x-max", type=float, default=60.0)
    p.add_argument("--quad-order", type=int, default=slepian.DEFAULT_QUAD_ORDER)
    p.add_argument("--sigma-tol", type=float, default=1e-4)
    p.add_argument("--beta-grid", type=float, default=1e-4)
    p.add_argument("--band", choices=(CENTERED, LITERAL), default=CENTERED,
                   help="band reading: 1-eps_lo < chi < 1+eps_hi (centered) or "
                        "eps_lo < chi-1 < eps_hi (literal)")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="indexconst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constant", help="estimate the universal constant C")
    p.add_argument("--method", choices=("slepian", "lp"), required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_shared(p)

    p = sub.add_parser("design", help="LP design of a normalizing function")
    p.add_argument("--sigma", type=float, help="solve at this sigma instead of minimizing")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    _add_shared(p)

    p = sub.add_parser("chi-plot", help="sample chi_f as CSV")
    p.add_argument("--profile", default="paper-n5",
                   help="'paper-n5' or a JSON file (report or coefficient list)")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = sub.add_parser("verify-paper", help="run the reference checks")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_shared(p)
    return parser


def _params(args, sigma=None):
    return DesignParams(n=args.modes, eps_lo=args.eps_lo, eps_hi=args.eps_hi,
                        amp_bound=args.amp_bound, sigma=sigma, grid_step=args.grid_step,
                        x_max=args.x_max, band=args.band)


def _report_text(rep):
    lines = [f"method: {rep.method}"]
    lines += [f"{step['name']:>10} = {step['value']!r}" for step in rep.chain()]
    if rep.profile is not None:
        lines.append("profile: " + " ".join(f"{a:.10g}" for a in rep.profile.coeffs))
    return "\n".join(lines) + "\n"


def cmd_constant(args):
    if args.method == "slepian":
        rep = slepian.slepian_constant(beta_grid_step=args.beta_grid, quad_order=args.quad_order)
    else:
        rep = design_constant(args.modes, _params(args), tol=args.sigma_tol)
    return rep.to_json() + "\n" if args.format == "json" else _report_text(rep)


def cmd_design(args):
    if args.sigma is None:
        rep = design_constant(args.modes, _params(args), tol=args.sigma_tol)
        profile, doc = rep.profile, rep.to_dict()
    else:
        params = _params(args, sigma=args.sigma)
        out = solve_system(build_constraints(params))
        if not out.feasible:
            raise InfeasibleError(f"no profile with n={args.modes} at sigma={args.sigma} "
                                  f"(best margin {out.margin:.3e})")
        profile = out.profile
        check = verify_profile(profile, params)
        doc = {
            "method": "lp",
            "inputs": params.as_dict(),
            "result": {"sigma": args.sigma, "margin": out.margin},
            "profile": list(profile.coeffs),
            "diagnostics": {"lp_iterations": out.iterations, "verification": check.worst,
                            "verification_passed": check.passed},
        }
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "a"])
        for k, a in enumerate(profile.coeffs):
            w.writerow([k, f"{a:.17g}"])
        return buf.getvalue()
    return "\n".join(f"a_{k} = {a:.12g}" for k, a in enumerate(profile.coeffs)) + "\n"


def load_profile(source):
    if source == "paper-n5":
        return PAPER_N5
    try:
        with open(source) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read profile {source!r}: {exc}") from exc
    coeffs = doc.get("profile") if isinstance(doc, dict) else doc
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError(f"{source!r} holds no coefficient list")
    try:
        return CosineProfile(tuple(float(a) for a in coeffs))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad coefficients in {source!r}: {exc}") from exc


def cmd_chi_plot(args):
    if not args.step > 0 or not math.isfinite(args.step):
        raise InputError("--step must be positive")
    if args.stop < args.start:
        raise InputError("--stop must not be below --start")
    profile = load_profile(args.profile)
    x, chi = checks.chi_samples(profile, args.start, args.stop, args.step)
    if args.format == "json":
        return json.dumps({"x": x.tolist(), "chi": chi.tolist()}) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "chi"])
    for xi, ci in zip(x, chi):
        # %-formatting ignores the locale
        w.writerow(["%.17g" % xi, "%.17g" % ci])
    return buf.getvalue()


def cmd_verify_paper(args):
    cfg = checks.CheckConfig(beta_grid=args.beta_grid, quad_order=args.quad_order,
                             sigma_tol=args.sigma_tol, design=_params(args))
    results = checks.run_all(cfg)
    ok = all(r.passed for r in results)
    if args.format == "json":
        text = json.dumps({"passed": ok, "checks": [vars(r) for r in results]}, indent=2) + "\n"
    else:
        header = f"{'check':<16} {'status':<6} {'seconds':>8}  expected | computed | tolerance"
        rows = [header, "-" * len(header)]
        for r in results:
            rows.append(f"{r.name:<16} {'PASS' if r.passed else 'FAIL':<6} {r.seconds:>8.2f}  "
                        f"{r.expected} | {r.computed} | {r.tolerance}")
            if r.detail:
                rows.append(f"{'':<32}{r.detail}")
        rows.append(f"overall: {'PASS' if ok else 'FAIL'} "
                    f"({sum(r.passed for r in results)}/{len(results)}, "
                    f"{sum(r.seconds for r in results):.1f} s)")
        text = "\n".join(rows) + "\n"
    return text, (EXIT_OK if ok else EXIT_NUMERIC)


COMMANDS = {
    "constant": cmd_constant,
    "design": cmd_design,
    "chi-plot": cmd_chi_plot,
    "verify-paper": cmd_verify_paper,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"indexconst: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, DomainError) as exc:
        print(f"indexconst: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"indexconst: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"indexconst: cannot write {args.out!r}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
