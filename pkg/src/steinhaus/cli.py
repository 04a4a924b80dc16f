"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 budget
exceeded.  Outputs are written to a temp file and renamed into place, so a
failing run leaves no partial files behind.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io as sio
from .acceptance import CRITERIA, run_acceptance
from .bounds import shape_functionals, steiner_2d_check, theorem1_bound, theorem2_bound
from .convex import quasi_support, star_subset
from .errors import BudgetExceeded, EmptyInner, InvalidInput, SteinhausError
from .minkowski import iterate_process, mstar_estimate
from .raster import sandwich
from .render import render_svg
from .scalar import exact
from .sets import Ball, ConvexPolytope, GridSandwich, GridSet

log = logging.getLogger("steinhaus")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _positive_int(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_rational(text):
    try:
        v = exact(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steinhaus",
                                description="Difference-set iteration and Steinhaus radius tools.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True, input_help="set JSON file"):
        if needs_input:
            sp.add_argument("--input", required=True, type=Path, help=input_help)
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--mode", choices=("exact", "float"), default="exact",
                        help="number encoding of the outputs")
        sp.add_argument("--budget", type=_positive_int, default=None,
                        help="cell budget for grid images (STEINHAUS_BUDGET overrides)")

    sp = sub.add_parser("iterate", help="run K_n = S(K_{n-1}) and write the trace")
    common(sp)
    sp.add_argument("--iters", type=_positive_int, default=6)
    sp.add_argument("--resolution", type=_positive_rational, default=None,
                    help="rasterize polytope/ball inputs into a grid sandwich at this h")
    sp.add_argument("--svg", action="store_true", help="one SVG snapshot per n (planar sets)")
    sp.add_argument("--snapshots", action="store_true", help="embed each K_n in trace.json")

    sp = sub.add_parser("radius", help="Steinhaus radius lower bounds for a grid set")
    common(sp)
    sp.add_argument("--resolution", type=_positive_rational, default=None)
    sp.add_argument("--no-truth", action="store_true", help="skip the brute-force bracket")

    sp = sub.add_parser("mstar", help="bracket M*(U) for a grid set")
    common(sp)
    sp.add_argument("--resolution", type=_positive_rational, default=None)

    sp = sub.add_parser("star", help="star subset and quasi-support profile of a symmetric set")
    common(sp)
    sp.add_argument("--directions", type=_positive_int, default=360)
    sp.add_argument("--svg", action="store_true")

    sp = sub.add_parser("steiner", help="dilated area of a convex polygon against the Steiner formula")
    common(sp)
    sp.add_argument("--radius", type=_positive_rational, action="append", required=True,
                    help="dilation radius (repeatable)")
    sp.add_argument("--resolution", type=_positive_rational, default=Fraction(1, 256))

    sp = sub.add_parser("shape", help="Blaschke-Santalo coordinates of polygons")
    common(sp, input_help="polygon JSON file or a directory of them")

    sp = sub.add_parser("verify", help="run the acceptance suite")
    common(sp, needs_input=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--only", action="append", default=None,
                    help="criterion key or number (repeatable); keys: "
                         + ", ".join(k for _, k, *_ in CRITERIA))

    sp = sub.add_parser("export", help="re-emit a set in canonical JSON (and optionally SVG)")
    common(sp)
    sp.add_argument("--svg", action="store_true")
    return p


# --------------------------------------------------------------------------
# helpers


def _load_grid(args):
    K = sio.load_set(args.input)
    if isinstance(K, GridSandwich):
        K = K.outer
    if isinstance(K, (ConvexPolytope, Ball)):
        if args.resolution is None:
            raise InvalidInput("a polytope or ball needs --resolution to become a grid")
        K = sandwich(K, args.resolution)
        if K.inner is None:
            raise InvalidInput("no cell fits inside the set at this resolution")
        K = K.inner
    if not isinstance(K, GridSet):
        raise InvalidInput("this command works on grid sets (or rasterized polytopes)")
    return K


def _emit(path: Path, doc):
    sio.write_json(path, doc)
    print(path)


# --------------------------------------------------------------------------
# subcommands


def cmd_iterate(args) -> int:
    K0 = sio.load_set(args.input)
    if args.resolution is not None and isinstance(K0, (ConvexPolytope, Ball)):
        K0 = sandwich(K0, args.resolution)
    trace = iterate_process(K0, args.iters, budget=args.budget)
    csv_path, json_path = sio.write_trace(args.out, trace, args.mode, args.snapshots)
    print(csv_path)
    print(json_path)
    if args.svg:
        for rec in trace:
            if trace.dimension > 2:
                log.warning("SVG snapshots are planar; skipped")
                break
            svg = render_svg(rec.snapshot, trace.hull, title=f"K_{rec.n}")
            print(sio.atomic_write_text(args.out / f"snapshot_{rec.n:02d}.svg", svg))
    return EXIT_OK


def cmd_radius(args) -> int:
    U = _load_grid(args)
    truth = not args.no_truth
    t1 = theorem1_bound(U, truth=truth)
    t2 = theorem2_bound(U, truth=truth)
    _emit(args.out / "radius.json", {
        "schema_version": sio.SCHEMA_VERSION,
        "h": sio.encode_scalar(U.h, args.mode),
        "volume": sio.encode_scalar(U.count * U.h ** U.dimension, args.mode),
        "theorem1": t1.to_json(),
        "theorem2": t2.to_json(),
    })
    return EXIT_OK


def cmd_mstar(args) -> int:
    U = _load_grid(args)
    rep = mstar_estimate(U)
    _emit(args.out / "mstar.json", {
        "schema_version": sio.SCHEMA_VERSION,
        "lower_estimate": rep.lower_estimate,
        "upper_bound": float(rep.upper_bound),
        "upper_bound_sq": sio.encode_scalar(rep.upper_bound_sq, args.mode),
        "argmax_shift": [sio.encode_scalar(x, args.mode) for x in rep.argmax_shift],
        "face_measures": [sio.encode_scalar(x, args.mode) for x in rep.face_measures],
        "lipschitz_L": sio.encode_scalar(rep.lipschitz_L, args.mode),
        "sample_plan": rep.sample_plan,
    })
    return EXIT_OK


def cmd_star(args) -> int:
    K = sio.load_set(args.input)
    prof = quasi_support(K, args.directions if K.dimension > 1 else None)
    star = star_subset(K, args.directions if K.dimension > 1 else None)
    d = prof.directions.shape[1]
    header = [f"theta_{i}" for i in range(d)] + ["r_theta", "D_theta"]
    rows = [[*r[:d], sio.encode_scalar(r[d], args.mode), sio.encode_scalar(r[d + 1], args.mode)]
            for r in prof.to_rows()]
    print(sio.write_csv(args.out / "profile.csv", header, rows))
    _emit(args.out / "star.json", sio.set_to_json(star, args.mode))
    if args.svg and K.dimension == 2:
        print(sio.atomic_write_text(args.out / "star.svg", render_svg(star, title="star")))
    return EXIT_OK


def cmd_steiner(args) -> int:
    B = sio.load_set(args.input)
    if not isinstance(B, ConvexPolytope):
        raise InvalidInput("steiner needs a polytope input")
    out = []
    for r in args.radius:
        s = steiner_2d_check(B, r, args.resolution)
        out.append({
            "r": sio.encode_scalar(r, args.mode),
            "predicted_area": s.predicted_area,
            "predicted_perimeter": s.predicted_perimeter,
            "measured_area": s.measured_area,
            "measured_bracket": list(s.measured_bracket),
            "error_bound": s.error_bound,
            "relative_error": s.relative_error,
            "offset_area": s.offset_area,
            "offset_perimeter": s.offset_perimeter,
        })
    _emit(args.out / "steiner.json", {"schema_version": sio.SCHEMA_VERSION,
                                      "h": sio.encode_scalar(args.resolution, args.mode),
                                      "results": out})
    return EXIT_OK


SHAPE_COLUMNS = ("file", "A", "P", "W", "r_in", "R", "D", "x", "y")


def cmd_shape(args) -> int:
    src = args.input
    files = sorted(src.glob("*.json")) if src.is_dir() else [src]
    if not files:
        raise InvalidInput(f"{src}: no .json files")
    rows = []
    for f in files:
        K = sio.load_set(f)
        if not isinstance(K, ConvexPolytope) or K.dimension != 2:
            raise InvalidInput(f"{f}: shape needs a convex polygon")
        sf = shape_functionals(K)
        x, y = sf.bs_point
        rows.append([f.name, sio.encode_scalar(sf.A, args.mode), sf.P,
                     sio.encode_scalar(sf.W, args.mode), float(sf.r_in), float(sf.R),
                     sio.encode_scalar(sf.D, args.mode), x, y])
        log.info("%s: (%.6f, %.6f)", f.name, x, y)
    print(sio.write_csv(args.out / "shape.csv", SHAPE_COLUMNS, rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_acceptance(args.only, seed=args.seed, echo=True)
    if not results:
        raise InvalidInput(f"no criterion matches {args.only}")
    ok = all(r.passed for r in results)
    # timings vary run to run, so they live apart from the deterministic report
    report = {"schema_version": sio.SCHEMA_VERSION, "seed": args.seed, "passed": ok,
              "criteria": [{k: v for k, v in r.to_json().items() if k != "runtime_s"}
                           for r in results]}
    sio.write_json(args.out / "verify.json", report)
    sio.write_json(args.out / "verify_timing.json",
                   {"schema_version": sio.SCHEMA_VERSION,
                    "runtime_s": {str(r.number): round(r.runtime, 3) for r in results}})
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(args) -> int:
    K = sio.load_set(args.input)
    stem = args.input.stem
    _emit(args.out / f"{stem}.json", sio.set_to_json(K, args.mode))
    if args.svg:
        print(sio.atomic_write_text(args.out / f"{stem}.svg", render_svg(K, title=stem)))
    return EXIT_OK


COMMANDS = {
    "iterate": cmd_iterate, "radius": cmd_radius, "mstar": cmd_mstar, "star": cmd_star,
    "steiner": cmd_steiner, "shape": cmd_shape, "verify": cmd_verify, "export": cmd_export,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if os.environ.get("STEINHAUS_BUDGET"):
        log.info("STEINHAUS_BUDGET=%s overrides --budget", os.environ["STEINHAUS_BUDGET"])
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInput, EmptyInner) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SteinhausError, ValueError) as exc:
        # the remaining domain errors are all about the input not meeting a precondition
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
