"""Command line front end.

Commands: lbp-hist (pattern histogram of a PGM image), pdc-run (apply a
difference operator and write the normalized response), verify (pair
loop vs folded kernel equivalence), bench (naive/reparam/dense
timings), gradcheck (analytic vs finite-difference gradients).

Exit codes: 0 success, 1 runtime failure (unreadable input, failed
check), 2 usage error (unknown command, flag, or out-of-domain value).
All file output is atomic. Seeded commands are deterministic: the same
seed produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .gradcheck import GRADCHECK_OPS, grad_check
from .lbp import (
    INTERPOLATIONS,
    MAPPING_KINDS,
    NeighborhoodSpec,
    build_mapping,
    histogram,
    lbp_image,
)
from .operators import build_operator
from .pairs import PairSet
from .pgm import read_pgm, write_atomic, write_pgm
from .reparam import bench_compare, thread_limit, verify_equivalence
from .tensor import PadSpec

_VERIFY_SHAPE = (1, 16, 64, 64)
_BENCH_SHAPE = (1, 16, 256, 256)
_RUN_OPS = ("cpdc", "cdc", "apdc", "rpdc", "gcdc", "ccdc-hv", "ccdc-dg", "mediconv", "lbc", "custom")
_FOLDABLE_OPS = ("cpdc", "apdc", "rpdc", "gcdc", "ccdc-hv", "ccdc-dg")


def _theta(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be a number, got {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"theta must lie in [0, 1], got {value}")
    return value


def _radius(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"radius must be a number, got {text!r}")
    if not value >= 1.0:
        raise argparse.ArgumentTypeError(f"radius must be >= 1, got {value}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _load_pairs(text: str) -> PairSet:
    if text.startswith("@"):
        text = Path(text[1:]).read_text(encoding="utf-8")
    return PairSet.from_json(text)


def cmd_lbp_hist(args: argparse.Namespace) -> int:
    image = read_pgm(args.input)
    spec = NeighborhoodSpec(
        radius=args.radius, points=args.points, interpolation=args.interp
    )
    codes = lbp_image(image, spec)
    mapping = build_mapping(args.mapping, args.points)
    hist = histogram(codes, mapping=mapping)
    if args.format == "json":
        _emit(hist.to_json() + "\n", args.out)
    else:
        _emit(hist.to_csv(), args.out)
    return 0


def _build_run_operator(args: argparse.Namespace):
    if args.pairs or args.op == "custom":
        if not args.pairs:
            raise ValueError("custom operator needs --pairs JSON")
        pair_set = _load_pairs(args.pairs)
        return build_operator("custom", pair_set=pair_set, seed=args.seed)
    return build_operator(args.op, theta=args.theta, seed=args.seed)


def cmd_pdc_run(args: argparse.Namespace) -> int:
    image = read_pgm(args.input).astype(np.float64)
    op = _build_run_operator(args)
    padding = PadSpec.same(op.window, mode=args.pad)
    response = op.forward(image[np.newaxis, np.newaxis], padding=padding)[0, 0]
    stats = {
        "op": op.name,
        "min": float(response.min()),
        "max": float(response.max()),
        "mean": float(response.mean()),
    }
    magnitude = np.abs(response)
    peak = float(magnitude.max())
    if peak > 0.0:
        out_image = np.rint(magnitude * (255.0 / peak)).astype(np.uint8)
    else:
        out_image = np.zeros(magnitude.shape, dtype=np.uint8)
    write_pgm(args.out, out_image)
    write_atomic(args.out + ".json", (json.dumps(stats) + "\n").encode("utf-8"))
    return 0


def _verify_targets(args: argparse.Namespace):
    channels = _VERIFY_SHAPE[1]
    if args.op:
        names = [args.op]
    else:
        names = list(_FOLDABLE_OPS)
    targets = []
    for name in names:
        if name == "gcdc" and args.op is None:
            for theta in (0.0, 0.5, 1.0):
                op = build_operator(name, channels, channels, theta=theta, seed=args.seed)
                op.name = f"gcdc(theta={theta})"
                targets.append(op)
        else:
            targets.append(
                build_operator(name, channels, channels, theta=args.theta, seed=args.seed)
            )
    return targets


def cmd_verify(args: argparse.Namespace) -> int:
    reports = []
    ok = True
    for op in _verify_targets(args):
        for dtype, tolerance in ((np.float32, 1e-5), (np.float64, 1e-12)):
            report = verify_equivalence(
                op,
                trials=args.trials,
                shape=_VERIFY_SHAPE,
                tolerance=tolerance,
                dtype=dtype,
                seed=args.seed,
            )
            reports.append(report.to_dict())
            ok = ok and report.passed
    _emit(json.dumps(reports, indent=2) + "\n", args.out)
    return 0 if ok else 1


def cmd_bench(args: argparse.Namespace) -> int:
    names = [args.op] if args.op else list(_FOLDABLE_OPS)
    channels = _BENCH_SHAPE[1]
    reports = []
    for name in names:
        op = build_operator(name, channels, channels, theta=args.theta, seed=args.seed)
        reports.append(
            bench_compare(
                op,
                shape=_BENCH_SHAPE,
                repetitions=args.reps,
                threads=thread_limit(),
                seed=args.seed,
            )
        )
    if args.format == "json":
        _emit(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
        return 0
    lines = ["op,shape,path,median_ns,max_abs_error"]
    for report in reports:
        shape = "x".join(str(v) for v in report.shape)
        for path_name, ns in (
            ("naive", report.naive_ns),
            ("reparam", report.reparam_ns),
            ("dense", report.dense_ns),
        ):
            lines.append(
                f"{report.op},{shape},{path_name},{int(ns)},{report.max_abs_error!r}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    ops = [args.op] if args.op else list(GRADCHECK_OPS)
    results = []
    ok = True
    for name in ops:
        for result in grad_check(name, seeds=args.seeds, tol=args.tol):
            results.append(result.to_dict())
            ok = ok and result.passed
    _emit(json.dumps(results, indent=2) + "\n", args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pixdiff",
        description="Local binary patterns and pixel difference convolutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    hist = sub.add_parser("lbp-hist", help="pattern histogram of a PGM image")
    hist.add_argument("--input", required=True, help="8-bit binary PGM image")
    hist.add_argument("--radius", type=_radius, default=1.0)
    hist.add_argument("--points", type=_positive, default=8)
    hist.add_argument("--mapping", choices=MAPPING_KINDS, default="raw")
    hist.add_argument("--interp", choices=INTERPOLATIONS, default="nearest")
    hist.add_argument("--format", choices=("csv", "json"), default="csv")
    hist.add_argument("--out", help="output path (default: stdout)")
    hist.set_defaults(handler=cmd_lbp_hist)

    run = sub.add_parser("pdc-run", help="apply an operator, write |response| as PGM")
    run.add_argument("--input", required=True, help="8-bit binary PGM image")
    run.add_argument("--op", choices=_RUN_OPS, default="cpdc")
    run.add_argument("--pairs", help="pair set JSON (inline, or @path to a file)")
    run.add_argument("--theta", type=_theta, default=0.5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument(
        "--pad",
        choices=("zero", "replicate"),
        default="replicate",
        help="padding mode (replicate keeps constant images exactly zero)",
    )
    run.add_argument("--out", required=True, help="response PGM; stats go to OUT.json")
    run.set_defaults(handler=cmd_pdc_run)

    verify = sub.add_parser("verify", help="pair loop vs folded dense kernel")
    verify.add_argument("--op", choices=_FOLDABLE_OPS)
    verify.add_argument("--theta", type=_theta, default=0.5)
    verify.add_argument("--trials", type=_positive, default=20)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", help="JSON report path (default: stdout)")
    verify.set_defaults(handler=cmd_verify)

    bench = sub.add_parser("bench", help="time naive, reparam, and dense routes")
    bench.add_argument("--op", choices=_FOLDABLE_OPS)
    bench.add_argument("--theta", type=_theta, default=0.5)
    bench.add_argument("--reps", type=_positive, default=50)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--out", help="report path (default: stdout)")
    bench.set_defaults(handler=cmd_bench)

    gradcheck = sub.add_parser("gradcheck", help="analytic vs finite-difference grads")
    gradcheck.add_argument("--op", choices=GRADCHECK_OPS)
    gradcheck.add_argument("--seeds", type=_positive, default=20)
    gradcheck.add_argument("--tol", type=float, default=1e-4)
    gradcheck.add_argument("--out", help="JSON report path (default: stdout)")
    gradcheck.set_defaults(handler=cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.handler(args)
    except (OSError, ValueError) as exc:
        print(f"pixdiff: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
