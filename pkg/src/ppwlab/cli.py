"""Command-line front end: one `ppw` entry point over every pipeline.

Exit codes separate CI-relevant outcomes: 0 means computed and all
asserted checks passed, 2 means computed but a mathematical check failed
beyond its slack, 1 means the run could not complete (usage or runtime
error).  Results go to stdout by default; `--out` takes either a bare
format keyword (`json`, `csv`) or a destination path whose `.json`/`.csv`
suffix selects the format.  Every JSON result embeds a run manifest and
every CSV carries it as leading `#` comments; the manifest's wall time is
the single field that varies between identical runs, everything computed
is deterministic.  `--seed` steers only the randomized ratio-shift sweep
reachable through `diagnostics --sweep`; numbers render with 17
significant digits so re-runs diff clean.

The environment variable PPW_DEFAULT_TOL overrides the default
eigenvalue tolerance wherever a subcommand does not pass `--tol`.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import NumericError

__all__ = ["RunManifest", "dispatch", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

_EIGEN_TOL_DEFAULT = 1e-10
_VERIFY_TOL_DEFAULT = 1e-8
_SHIFT_RELATION_TOL = 1e-7
_EQLAMBDA_SLACK = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # the contract wants full help on a bad flag, and exit status 1 for
    # usage errors (2 is reserved for failed mathematical checks)
    def error(self, message):
        self.print_help(sys.stderr)
        sys.stderr.write(f"\nerror: {message}\n")
        raise _UsageError(message)


class RunManifest:
    """Provenance block embedded in every emitted result.

    Carries the literal command line, the parsed parameter echo, the
    library version, the tolerances in effect, the wall time, and one
    pass/fail entry per asserted check.
    """

    def __init__(self, argv, args, tolerances, checks, wall_time_s):
        self.command = "ppw " + " ".join(argv) if argv else "ppw"
        self.parameters = {
            k: v for k, v in sorted(vars(args).items())
            if not k.startswith("_") and k != "func"}
        self.version = __version__
        self.tolerances = dict(tolerances)
        self.checks = dict(checks)
        self.wall_time_s = wall_time_s

    def to_dict(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "version": self.version,
            "tolerances": self.tolerances,
            "wall_time_s": self.wall_time_s,
            "checks": self.checks,
        }

    def comment_lines(self):
        yield f"# ppw {self.version}"
        yield f"# command: {self.command}"
        for k, v in self.parameters.items():
            yield f"# param {k}: {v}"
        for k, v in self.tolerances.items():
            yield f"# tol {k}: {_f17(v)}"
        for k, v in self.checks.items():
            yield f"# check {k}: {'pass' if v else 'FAIL'}"
        yield f"# wall_time_s: {self.wall_time_s:.3f}"

    @property
    def all_passed(self):
        return all(self.checks.values())


def _f17(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON-serializable: {type(x).__name__}")


def _default_tol(args, fallback):
    tol = getattr(args, "tol", None)
    if tol is not None:
        return float(tol)
    env = os.environ.get("PPW_DEFAULT_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise _UsageError(
                f"PPW_DEFAULT_TOL must be a float, got {env!r}")
    return fallback


def _resolve_out(args, default_fmt):
    out = getattr(args, "out", None)
    if out is None:
        return default_fmt, None
    if out in ("json", "csv"):
        return out, None
    if out.endswith(".json"):
        return "json", out
    if out.endswith(".csv"):
        return "csv", out
    raise _UsageError(
        f"--out must be json, csv, or a path ending in .json/.csv, "
        f"got {out!r}")


def _write(body, path):
    if path is None:
        sys.stdout.write(body)
    else:
        with open(path, "w") as fh:
            fh.write(body)


def _emit(args, manifest, result, table, default_fmt):
    """Render and write one result; returns the exit code from checks.

    result is the JSON payload; table is (header, rows) for CSV, where
    scalar-only commands pass a one-row table of the same fields.
    """
    fmt, path = _resolve_out(args, default_fmt)
    if fmt == "json":
        body = json.dumps({"manifest": manifest.to_dict(), "result": result},
                          indent=2, sort_keys=True, default=_jsonable) + "\n"
    else:
        header, rows = table
        lines = list(manifest.comment_lines())
        lines.append(",".join(header))
        lines.extend(",".join(_f17(x) for x in row) for row in rows)
        body = "\n".join(lines) + "\n"
    _write(body, path)
    return EXIT_OK if manifest.all_passed else EXIT_CHECK_FAILED


def _potential(spec):
    from .potentials import potential_from_spec

    return potential_from_spec(spec)


# ---------------------------------------------------------------- commands


def cmd_constant(args, argv):
    from .special import ppw_constant

    t0 = time.perf_counter()
    val = ppw_constant(args.dim)
    man = RunManifest(argv, args, {}, {}, time.perf_counter() - t0)
    if getattr(args, "out", None) is None:
        sys.stdout.write(_f17(val) + "\n")
        return EXIT_OK
    result = {"dim": args.dim, "constant": val}
    return _emit(args, man, result,
                 (["dim", "constant"], [(args.dim, val)]), "json")


def cmd_solve_ball(args, argv):
    from .radial import BallProblem, solve_sector

    tol = _default_tol(args, _EIGEN_TOL_DEFAULT)
    t0 = time.perf_counter()
    prob = BallProblem(n=args.dim, R=args.radius, ell=args.sector,
                       potential=_potential(args.potential),
                       weight_sign=args.weight)
    pair = solve_sector(prob, k=args.k, tol=tol)
    man = RunManifest(argv, args, {"eigenvalue": tol}, {},
                      time.perf_counter() - t0)
    result = {
        "lambda": pair.lam,
        "node_count": pair.node_count,
        "residual": pair.residual,
        "samples": [[float(r), float(z)] for r, z in
                    zip(pair.r, pair.z)],
    }
    return _emit(args, man, result, (["r", "z"], zip(pair.r, pair.z)),
                 "json")


def cmd_solve_domain(args, argv):
    from .domains import read_mask_file, solve_domain

    t0 = time.perf_counter()
    grid = read_mask_file(args.mask)
    spec = solve_domain(grid, _potential(args.potential), k=args.k)
    man = RunManifest(argv, args, {}, {}, time.perf_counter() - t0)
    result = {
        "lambdas": list(spec.lambdas),
        "h": grid.h,
        "cells": int(grid.mask.sum()),
        "estimated_discretization_error":
            spec.estimated_discretization_error,
    }
    header = ["index", "lambda"]
    rows = [(i + 1, lam) for i, lam in enumerate(spec.lambdas)]
    return _emit(args, man, result, (header, rows), "json")


def cmd_rearrange(args, argv):
    from .domains import read_mask_file, solve_domain
    from .rearrange import rearrange

    t0 = time.perf_counter()
    grid = read_mask_file(args.mask)
    cell = grid.h ** 2
    if args.what == "potential":
        V = _potential(args.potential)
        vals = np.asarray(V.value(grid.radii()[grid.mask]), dtype=float)
        prof = rearrange(vals, cell, "increasing", n=2)
    else:
        spec = solve_domain(grid, _potential(args.potential), k=1)
        prof = rearrange(spec.u1[grid.mask], cell, "decreasing", n=2)
    man = RunManifest(argv, args, {}, {}, time.perf_counter() - t0)
    result = {
        "what": args.what,
        "direction": prof.direction,
        "R_max": prof.R_max,
        "samples": [[float(r), float(v)] for r, v in
                    zip(prof.radii, prof.values)],
    }
    return _emit(args, man, result,
                 (["r", "value"], zip(prof.radii, prof.values)), "csv")


def cmd_diagnostics(args, argv):
    from .potentials import potential_from_spec
    from .radial import first_two
    from .riccati import diagnostics, ratio_shift_sweep, slope_field_check

    t0 = time.perf_counter()
    ft = first_two(args.dim, args.radius, _potential(args.potential))
    d = diagnostics(ft.z1, ft.z2)
    facts = {
        "q_in_01": bool(d.q.min() >= -1e-6 and d.q.max() <= 1.0 + 1e-6),
        "q_decreasing": bool(np.gradient(d.q, d.r).max() <= 1e-6),
        "g_increasing": bool(np.all(np.diff(d.g) > 0.0)),
        "B_decreasing": bool(np.all(np.diff(d.B) < 0.0)),
    }
    result = {
        "lambda1": d.lambda1, "lambda2": d.lambda2, "gap": d.E,
        "q_origin": d.q_origin, "q_boundary": d.q_boundary,
        "r": d.r, "q": d.q, "B": d.B, "g": d.g, "p": d.p,
        "residuals": {"ric_q": d.residual_ric_q,
                      "ric_p": d.residual_ric_p},
        "facts": facts,
    }
    checks = dict(facts)
    if args.y is not None:
        rep = slope_field_check(d, args.y)
        result["slope_field"] = {
            "y": args.y,
            "zeros": rep.zeros,
            "zero_gaps": rep.zero_gaps,
            "head_positive": rep.head_positive,
            "tail_positive": rep.tail_positive,
        }
    if args.sweep:
        srep = ratio_shift_sweep(args.sweep, seed=args.seed)
        result["sweep"] = srep._asdict()
        checks["sweep_clean"] = bool(srep.failures == 0
                                     and srep.worst_x0 < 0.0)
    man = RunManifest(argv, args, {}, checks, time.perf_counter() - t0)
    header = ["r", "q", "B", "g", "p"]
    rows = zip(d.r, d.q, d.B, d.g, d.p)
    return _emit(args, man, result, (header, rows), "json")


def cmd_verify(args, argv):
    from .domains import read_mask_file
    from .verify import verify_ppw_bound

    tol = _default_tol(args, _VERIFY_TOL_DEFAULT)
    t0 = time.perf_counter()
    grid = read_mask_file(args.mask)
    try:
        rep = verify_ppw_bound(grid, _potential(args.potential),
                               _potential(args.comparison), tol=tol)
    except NumericError as exc:
        if "gap bound violated" in str(exc):
            sys.stderr.write(f"check failed: {exc}\n")
            return EXIT_CHECK_FAILED
        raise
    checks = {"second_eigenvalue_bound": rep.passed}
    man = RunManifest(argv, args, {"eigenvalue": tol}, checks,
                      time.perf_counter() - t0)
    result = {
        "lambda1_domain": rep.lambda1_domain,
        "lambda2_domain": rep.lambda2_domain,
        "radius": rep.radius,
        "lambda1_ball": rep.lambda1_ball,
        "lambda2_ball": rep.lambda2_ball,
        "margin": rep.margin,
        "error_budget": rep.error_budget,
        "passed": rep.passed,
        "gap_bound_rhs": rep.gap_bound_rhs,
        "gap_exterior_fraction": rep.gap_exterior_fraction,
        "center": list(rep.center) if rep.center is not None else None,
    }
    scalars = [(k, v) for k, v in result.items()
               if isinstance(v, (int, float, bool)) and v is not None]
    return _emit(args, man, result,
                 ([k for k, _ in scalars], [tuple(v for _, v in scalars)]),
                 "json")


def cmd_scan(args, argv):
    from .verify import scan_ratio

    t0 = time.perf_counter()
    try:
        sc = scan_ratio(args.dim, _potential(args.potential), args.rmin,
                        args.rmax, args.steps, jobs=args.jobs)
    except NumericError as exc:
        if "ratio increased" in str(exc):
            sys.stderr.write(f"check failed: {exc}\n")
            return EXIT_CHECK_FAILED
        raise
    eq_ok = bool(np.all(sc.eqlambda_margin
                        >= -_EQLAMBDA_SLACK
                        * np.maximum(1.0, np.abs(sc.lambda2))))
    checks = {"ratio_nonincreasing": True, "eqlambda_nonnegative": eq_ok}
    man = RunManifest(argv, args, {}, checks, time.perf_counter() - t0)
    header = ["R", "lambda1", "lambda2", "ratio", "eqlambda_margin"]
    rows = zip(sc.R, sc.lambda1, sc.lambda2, sc.ratio, sc.eqlambda_margin)
    result = {
        "R": sc.R, "lambda1": sc.lambda1, "lambda2": sc.lambda2,
        "ratio": sc.ratio, "eqlambda_margin": sc.eqlambda_margin,
    }
    return _emit(args, man, result, (header, rows), "csv")


def cmd_sharpness(args, argv):
    from .verify import sharpness_scan

    try:
        eps = [float(e) for e in args.eps.split(",") if e.strip()]
    except ValueError:
        raise _UsageError(f"--eps wants comma-separated floats, "
                          f"got {args.eps!r}")
    t0 = time.perf_counter()
    sh = sharpness_scan(args.dim, eps, args.rmin, args.rmax, args.steps)
    checks = {"no_violations": not sh.violations}
    man = RunManifest(argv, args, {"margin_slack": _EQLAMBDA_SLACK},
                      checks, time.perf_counter() - t0)
    rows = [(e, R, sh.margin[i, j])
            for i, e in enumerate(sh.eps)
            for j, R in enumerate(sh.R)]
    result = {
        "eps": sh.eps, "R": sh.R, "margin": sh.margin,
        "violations": [list(v) for v in sh.violations],
        "min_margin": sh.min_margin,
    }
    return _emit(args, man, result, (["eps", "R", "margin"], rows), "csv")


def cmd_gaussian(args, argv):
    tol = _default_tol(args, _EIGEN_TOL_DEFAULT)
    t0 = time.perf_counter()
    if args.mask is not None:
        from .domains import read_mask_file
        from .gaussian import verify_weighted_bound

        grid = read_mask_file(args.mask)
        rep = verify_weighted_bound(grid, args.sign,
                                    tol=max(tol, _VERIFY_TOL_DEFAULT))
        checks = {"weighted_second_bound": rep.passed}
        man = RunManifest(argv, args, {"eigenvalue": tol}, checks,
                          time.perf_counter() - t0)
        result = rep._asdict()
        scalars = [(k, v) for k, v in result.items()
                   if isinstance(v, (int, float, bool))]
        return _emit(args, man, result,
                     ([k for k, _ in scalars],
                      [tuple(v for _, v in scalars)]), "json")

    if args.radius is None:
        raise _UsageError("gaussian needs --radius (or --mask)")
    from .gaussian import solve_gaussian

    g = solve_gaussian(args.sign, args.dim, args.radius, k=2, tol=tol)
    dev_ok = bool(
        g.deviation1 <= _SHIFT_RELATION_TOL * max(1.0, abs(g.crosscheck1))
        and g.deviation2 <= _SHIFT_RELATION_TOL
        * max(1.0, abs(g.crosscheck2)))
    checks = {"shift_relation": dev_ok}
    man = RunManifest(argv, args, {"eigenvalue": tol}, checks,
                      time.perf_counter() - t0)
    result = {
        "sign": g.sign, "n": g.n, "R": g.R,
        "lambda1_pm": g.lambda1_pm, "lambda2_pm": g.lambda2_pm,
        "crosscheck1": g.crosscheck1, "crosscheck2": g.crosscheck2,
        "deviation1": g.deviation1, "deviation2": g.deviation2,
        "ratio": g.ratio,
    }
    header = ["lambda1_pm", "lambda2_pm", "crosscheck1", "crosscheck2",
              "deviation1", "deviation2", "ratio"]
    row = tuple(result[k] for k in header)
    return _emit(args, man, result, (header, [row]), "json")


# ----------------------------------------------------------------- parser


def _build_parser():
    parser = _Parser(
        prog="ppw",
        description="Verification lab for two-eigenvalue comparison "
                    "bounds of radial Schrodinger operators.")
    parser.add_argument("--version", action="version",
                        version=f"ppw {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("constant", cmd_constant,
            "free-ball eigenvalue ratio for a given dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--out")

    p = add("solve-ball", cmd_solve_ball,
            "one radial eigenvalue with its eigenfunction samples")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--potential", required=True,
                   help="zero | power:k=..,alpha=.. | poly:c2=..[,c4=..] "
                        "| table:<path>")
    p.add_argument("--sector", type=int, default=0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--weight", choices=["plus", "minus", "none"],
                   default="none")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    p = add("solve-domain", cmd_solve_domain,
            "planar Dirichlet eigenvalues on a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--out")

    p = add("rearrange", cmd_rearrange,
            "radial rearrangement profile of a potential or ground mode")
    p.add_argument("--mask", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--what", choices=["potential", "eigenfunction"],
                   required=True)
    p.add_argument("--out")

    p = add("diagnostics", cmd_diagnostics,
            "mode-ratio diagnostics q, B, g, p with structure facts")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--y", type=float,
                   help="also sample the slope field at this level")
    p.add_argument("--sweep", type=int,
                   help="run the randomized ratio-shift sweep this many "
                        "times")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for --sweep (the only randomized path)")
    p.add_argument("--out")

    p = add("verify", cmd_verify,
            "comparison-ball bound for a mask domain")
    p.add_argument("--mask", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--comparison", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    p = add("scan", cmd_scan,
            "eigenvalue ratio across a radius window")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel scan cells; rows stay ordered by index")
    p.add_argument("--out")

    p = add("sharpness", cmd_sharpness,
            "gap-bound margins for slope families r^(2-eps)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps", required=True,
                   help="comma-separated values in [0, 1)")
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out")

    p = add("gaussian", cmd_gaussian,
            "density-weighted ball spectrum or mask comparison")
    p.add_argument("--sign", choices=["plus", "minus"], required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--mask")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    return parser


def dispatch(argv) -> int:
    """Parse argv, run the subcommand, map outcomes to the exit code."""
    argv = list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version land here with code 0
        return EXIT_OK if not exc.code else EXIT_ERROR
    try:
        return args.func(args, argv)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except BrokenPipeError:
        return EXIT_ERROR
    except Exception as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
