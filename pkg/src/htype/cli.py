"""Command-line interface.

Exit status: 0 on success, 1 when the computed verdict is negative (failed
validation, infeasible search, or a non H-type algebra handed to
``geodesic``/``curvature``), 2 on usage errors and malformed input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .algebra import AlgebraSpecError, HTypeAlgebra, validate_h_type
from .catalog import FAMILIES, catalog, parse_catalog_ref
from .composition import search_composition_2d
from .curvature import curvature_report
from .geodesics import geodesic_closed_form, integrate_hamiltonian

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _vector(text: str) -> np.ndarray:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty vector")
    return np.array(vals)


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return val


def _algebra(args) -> HTypeAlgebra:
    if args.catalog:
        name, n = parse_catalog_ref(args.catalog)
        return catalog(name, n)[0]
    try:
        return io.load_algebra(args.algebra)
    except OSError as exc:
        raise UsageError(f"cannot read {args.algebra}: {exc.strerror}") from None


def _emit(args, text: str) -> None:
    if args.out:
        io.atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _require_h_type(alg: HTypeAlgebra, args) -> bool:
    report = validate_h_type(alg, tol=args.validate_tol, seed=args.seed)
    if not report.passed:
        sys.stderr.write("algebra is not of general H-type\n")
        sys.stderr.write(io.dumps(report.to_dict()))
    return report.passed


def cmd_catalog(args) -> int:
    if args.list or not args.ref:
        _emit(args, "\n".join(FAMILIES) + "\n")
        return 0
    name, n = parse_catalog_ref(args.ref)
    alg, comp = catalog(name, n)
    _emit(args, io.dumps({"algebra": alg.to_dict(), "composition": comp.to_dict()}
                         if args.with_composition else alg.to_dict()))
    return 0


def cmd_validate(args) -> int:
    alg = _algebra(args)
    report = validate_h_type(alg, trials=args.trials, tol=args.tol, seed=args.seed)
    _emit(args, io.dumps({"label": alg.label, **report.to_dict()}))
    return 0 if report.passed else 1


def cmd_geodesic(args) -> int:
    alg = _algebra(args)
    if len(args.v0) != alg.n:
        raise UsageError(f"--v0 has {len(args.v0)} entries, algebra has n = {alg.n}")
    if len(args.theta) != alg.m:
        raise UsageError(f"--theta has {len(args.theta)} entries, algebra has m = {alg.m}")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not _require_h_type(alg, args):
        return 1
    s = np.linspace(0.0, args.s_max, args.samples + 1)
    if args.method == "closed":
        traj = geodesic_closed_form(alg, args.v0, args.theta, s, tol=args.tol)
    else:
        steps_per_sample = max(1, int(round(args.s_max / args.samples / args.dt)))
        dt = args.s_max / args.samples / steps_per_sample
        full = integrate_hamiltonian(alg, args.v0, args.theta, args.s_max, dt)
        idx = np.arange(0, len(full.s), steps_per_sample)
        traj = type(full)(full.s[idx], full.x[idx], full.t[idx], full.regime, full.theta2,
                          full.v0, full.theta, full.xi[idx])
    if args.out:
        io.write_trajectory(traj, args.out, method=args.method, label=alg.label)
    else:
        sys.stdout.write(io.trajectory_csv(traj))
    return 0


def cmd_curvature(args) -> int:
    alg = _algebra(args)
    if not _require_h_type(alg, args):
        return 1
    _emit(args, io.dumps(curvature_report(alg, samples=args.samples, seed=args.seed)))
    return 0


def cmd_compose_search(args) -> int:
    for name, val in (("--phi-index", args.phi_index), ("--lambda-index", args.lambda_index)):
        if not 0 <= val <= 2:
            raise UsageError(f"{name} must be 0, 1 or 2")
    result = search_composition_2d(args.phi_index, args.lambda_index, restarts=args.restarts,
                                   seed=args.seed, threshold=args.tol)
    out = {"phi_index": args.phi_index, "lambda_index": args.lambda_index,
           "restarts": args.restarts, "seed": args.seed, **result.to_dict()}
    if result.composition is not None:
        out["composition"] = result.composition.to_dict()
    _emit(args, io.dumps(out))
    return 0 if result.found else 1


def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="NAME:N", help=f"catalog family, one of {', '.join(FAMILIES)}")
    src.add_argument("--algebra", metavar="PATH", help="algebra JSON file")


def _add_common(p):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="htype", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="print a catalog algebra as JSON")
    p.add_argument("ref", nargs="?", metavar="NAME:N")
    p.add_argument("--list", action="store_true", help="list the families")
    p.add_argument("--with-composition", action="store_true", help="include the composition tensor")
    _add_common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("validate", help="run the H-type validator")
    _add_source(p)
    p.add_argument("--trials", type=int, default=256)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("geodesic", help="geodesic through the identity, written as CSV")
    _add_source(p)
    p.add_argument("--v0", type=_vector, required=True, metavar="X1,...,XN")
    p.add_argument("--theta", type=_vector, required=True, metavar="T1,...,TM")
    p.add_argument("--s-max", type=_positive_float, default=1.0)
    p.add_argument("--samples", type=int, default=100, help="number of intervals; writes samples+1 rows")
    p.add_argument("--method", choices=("closed", "rk4"), default="closed")
    p.add_argument("--dt", type=_positive_float, default=1e-4, help="RK4 step")
    p.add_argument("--tol", type=_positive_float, default=1e-10, help="quadrature tolerance")
    p.add_argument("--validate-tol", type=_positive_float, default=1e-9)
    _add_common(p)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("curvature", help="Ricci, scalar curvature and sample planes as JSON")
    _add_source(p)
    p.add_argument("--samples", type=int, default=4, help="random planes per kind")
    p.add_argument("--validate-tol", type=_positive_float, default=1e-9)
    _add_common(p)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("compose-search", help="search for a composition of two binary forms")
    p.add_argument("--phi-index", type=int, required=True)
    p.add_argument("--lambda-index", type=int, required=True)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--tol", type=_positive_float, default=1e-10, help="residual threshold for 'found'")
    _add_common(p)
    p.set_defaults(func=cmd_compose_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AlgebraSpecError as exc:
        sys.stderr.write(f"htype: malformed algebra spec, field {exc.field!r}: {exc}\n")
        return 2
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"htype: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
