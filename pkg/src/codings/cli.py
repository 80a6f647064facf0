"""Command-line frontend.

Exit codes: 0 success, 2 precondition violation, 3 budget exhausted,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, PreconditionError, VerificationError
from .greedy import coding_stream
from .ifs import Membership, format_decimal, hull_membership, load_model, project, to_fraction, vector
from .spectrum import enumerate_spectrum, gap_stats, is_pisot, spectrum_to_csv
from .symbolic import Word, champernowne_blocks, verify_missing_zeros
from .universal import (
    all_words,
    interior_simplex_locate,
    regular_polygon,
    sample_interior,
    threshold_csv,
    threshold_table,
    thresholds,
    universal_coding_prefix,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4
PRECISION_ENV = "CODINGS_PRECISION"


@dataclass(frozen=True)
class RunConfig:
    precision: int = 53
    tol: float | None = None
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.precision < 53:
            raise PreconditionError("precision must be at least 53 bits")
        if self.format not in ("csv", "json"):
            raise PreconditionError("format must be csv or json")


def _config(args) -> RunConfig:
    return RunConfig(args.precision, args.tol, args.format or args.default_format, args.seed)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _exact_coords(text: str) -> list:
    return [to_fraction(t) for t in text.split(",") if t.strip()]


def _points(text: str) -> list[list[float]]:
    return [_floats(p) for p in text.split(";") if p.strip()]


# ------------------------------------------------------------ commands

def cmd_blocks(args, cfg: RunConfig) -> int:
    blocks = champernowne_blocks(args.n, args.k)
    report = verify_missing_zeros(args.n, args.k)
    if cfg.format == "csv":
        print("i,block")
        for i, b in enumerate(blocks.blocks):
            print(f"{i},{b}")
        print(f"# missing-zeros check: {report.summary()}")
    else:
        _emit({"n": args.n, "k": args.k, "blocks": [str(b) for b in blocks.blocks],
               "report": report.summary(), "passed": report.passed,
               "failures": [list(f) for f in report.failures]})
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_spectrum(args, cfg: RunConfig) -> int:
    window = tuple(_floats(args.window)) if args.window else None
    tol = cfg.tol
    while True:
        try:
            spec = enumerate_spectrum(args.q, args.n, args.bound, poly=args.poly, window=window,
                                      tol=tol, precision=cfg.precision)
            break
        except BudgetExhausted:
            # without an explicit tolerance, coarsen the merge cells until the run fits
            if cfg.tol is not None or args.poly is not None:
                raise
            tol = 10 * (tol if tol is not None else 1e-10 * args.bound)
    stats = gap_stats(spec, window)
    summary = {"min_gap": stats.min_gap, "max_gap": stats.max_gap, "window": list(stats.window),
               "count": stats.count, "approximate": stats.approximate}
    if cfg.format == "csv":
        sys.stdout.write(spectrum_to_csv(spec))
        print("# " + " ".join(f"{k}={v}" for k, v in summary.items()))
    else:
        _emit({"q": spec.q, "n": spec.n, "bound": spec.bound, "exact": spec.exact,
               "poly": list(spec.poly) if spec.poly else None, "tol": spec.tol,
               "points": [float(v) for v in spec.points], "gap_stats": summary})
    return EXIT_OK


def cmd_thresholds(args, cfg: RunConfig) -> int:
    if args.table:
        if cfg.format == "csv":
            sys.stdout.write(threshold_csv())
        else:
            _emit([{"k": k, "q_max": v} for k, v in threshold_table()])
        return EXIT_OK
    if not args.kind:
        raise PreconditionError("give --table q or --kind")
    value = thresholds(args.kind, d=args.d, k=args.k, n=args.n)
    if cfg.format == "csv":
        print("kind,value")
        print(f"{args.kind},{value!r}")
    else:
        _emit({"kind": args.kind, "value": value})
    return EXIT_OK


def _targets(text: str | None, n: int) -> list[Word]:
    if not text:
        return []
    if text.startswith("all:"):
        return all_words(n, int(text[4:]))
    return [Word.parse(t, n) for t in text.split(";" if n > 9 else ",") if t.strip()]


def cmd_code(args, cfg: RunConfig) -> int:
    model = load_model(args.model)
    x = _exact_coords(args.x)
    if len(x) != model.d:
        raise PreconditionError(f"x has {len(x)} coordinates, model has d={model.d}")
    if hull_membership(model, vector(x)) is Membership.EXTERIOR:
        raise PreconditionError("x lies outside conv(F)")
    if args.policy == "greedy":
        xf = [float(v) for v in x]
        word = coding_stream(model, xf, args.length)
        centre, radius = project(model, word)
        err = float(np.linalg.norm(centre - np.array(xf)))
        ok = err <= radius + 1e-9 * model.fixed_points.diam
        _emit({"policy": "greedy", "digits": str(word), "length": len(word),
               "center": [format_decimal(v) for v in centre], "tail_radius": radius,
               "distance": err, "contains_x": ok})
        return EXIT_OK if ok else EXIT_VERIFY
    cert = universal_coding_prefix(model, x, _targets(args.targets, model.n), budget=args.budget)
    _emit(cert.to_dict())
    return EXIT_OK


def cmd_hexagon(args, cfg: RunConfig) -> int:
    hexagon = regular_polygon(6)
    samples = sample_interior(hexagon, args.samples, seed=cfg.seed) if args.samples else []
    located = sum(interior_simplex_locate(hexagon, x) is not None for x in samples)
    line = f"{located}/{args.samples} interior points located in an interior triangle"
    if cfg.format == "csv":
        print("samples,located")
        print(f"{args.samples},{located}")
    else:
        _emit({"samples": args.samples, "located": located, "seed": cfg.seed, "report": line})
    return EXIT_OK if located == args.samples else EXIT_VERIFY


def cmd_locate(args, cfg: RunConfig) -> int:
    pts = load_model(args.model).fixed_points.array if args.model else np.array(_points(args.points))
    x = _floats(args.x)
    found = interior_simplex_locate(pts, x)
    if found is None:
        if cfg.format == "csv":
            print("none")
        else:
            _emit({"simplex": "none"})
        return EXIT_OK
    payload = {"indices": list(found.indices), "weights": found.witness.tolist(),
               "points": found.points(pts).tolist()}
    if cfg.format == "csv":
        print("index,weight")
        for i, w in zip(found.indices, found.witness):
            print(f"{i},{w!r}")
    else:
        _emit({"simplex": payload})
    return EXIT_OK


def cmd_pisot(args, cfg: RunConfig) -> int:
    cand = is_pisot(args.poly, args.margin)
    _emit({"poly": list(cand.poly), "certified": cand.certified, "dominant_root": cand.dominant_root,
           "conjugate_moduli": list(cand.conjugate_moduli), "irreducible": cand.irreducible})
    return EXIT_OK


# -------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--precision", type=int,
                        default=int(os.environ.get(PRECISION_ENV, "53")),
                        help=f"working precision in bits (default from ${PRECISION_ENV} or 53)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)

    parser = argparse.ArgumentParser(prog="codings", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blocks", parents=[common], help="Champernowne-type blocks and their window check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_blocks, default_format="csv")

    p = sub.add_parser("spectrum", parents=[common], help="points and gaps of Z_n(q)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--q", type=float)
    g.add_argument("--poly", help='minimal polynomial of q, highest degree first, e.g. "1,-1,-1"')
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--window", help="lo,hi")
    p.set_defaults(func=cmd_spectrum, default_format="csv")

    p = sub.add_parser("thresholds", parents=[common], help="explicit parameter thresholds")
    p.add_argument("--table", choices=("q",))
    p.add_argument("--kind", choices=("d_plus_one", "d_plus_one_unconditional", "explicit_k", "q_table"))
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_thresholds, default_format="csv")

    p = sub.add_parser("code", parents=[common], help="coding prefix or universal certificate for a point")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--x", required=True, help="comma separated coordinates")
    p.add_argument("--policy", choices=("greedy", "universal"), default="greedy")
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--targets", help='comma separated words, or "all:L" for every word of length <= L')
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_code, default_format="json")

    p = sub.add_parser("hexagon", parents=[common], help="interior triangles for sampled hexagon points")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_hexagon, default_format="json")

    p = sub.add_parser("locate", parents=[common], help="interior simplex of fixed points around x")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--points", help='"x,y;x,y;..."')
    g.add_argument("--model")
    p.add_argument("--x", required=True)
    p.set_defaults(func=cmd_locate, default_format="json")

    p = sub.add_parser("pisot", parents=[common], help="Pisot certification of a monic polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--margin", type=float, default=1e-9)
    p.set_defaults(func=cmd_pisot, default_format="json")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, _config(args))
    except BudgetExhausted as exc:
        _emit({"error": str(exc), "kind": "budget", "last_attempt": repr(exc.last_attempt)})
        return EXIT_BUDGET
    except VerificationError as exc:
        _emit({"error": str(exc), "kind": "verification"})
        return EXIT_VERIFY
    except PreconditionError as exc:
        _emit({"error": str(exc), "kind": "precondition"})
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
