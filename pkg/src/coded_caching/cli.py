"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
guard exceeded, 4 arithmetic overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analytics
from .bounded_subsets import (
    SchemeParams,
    count_bounded_closed,
    enumerate_bounded,
)
from .errors import ParameterError, ResourceLimitError
from .sim_harness import CORRUPTIONS, DemandSpec, TrialConfig, run_trial

ENUMERATE_MAX_K = 24

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_OVERFLOW = 0, 1, 2, 3, 4


def _guard(K: int) -> None:
    if K > ENUMERATE_MAX_K:
        raise ResourceLimitError(f"enumeration is limited to K <= {ENUMERATE_MAX_K}, got K={K}")


def cmd_enumerate(args: argparse.Namespace) -> int:
    _guard(args.K)
    subsets = enumerate_bounded(args.K, args.size, args.ell)
    if args.format == "json":
        doc = {"K": args.K, "size": args.size, "ell": args.ell, "subsets": [list(A) for A in subsets], "count": len(subsets)}
        print(json.dumps(doc))
    else:
        for A in subsets:
            print(",".join(map(str, A)))
        print(f"# count={len(subsets)}")
    return EXIT_OK


def cmd_count(args: argparse.Namespace) -> int:
    closed = count_bounded_closed(args.K, args.size, args.ell)
    if not args.brute_force:
        print(closed)
        return EXIT_OK
    _guard(args.K)
    brute = len(enumerate_bounded(args.K, args.size, args.ell))
    ok = brute == closed
    print(closed, brute, "OK" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_metrics(args: argparse.Namespace) -> int:
    params = SchemeParams.from_tn(args.K, args.t, args.n)
    mt = analytics.metrics(params)
    base = analytics.mn_baseline(args.K, args.t)
    condition = args.n > args.t - Fraction(args.K, args.K - args.t)
    fields = {
        "K": args.K,
        "t": args.t,
        "n": args.n,
        "m": params.m,
        "ell": params.ell,
        "cache_ratio": str(mt.cache_ratio),
        "F": mt.F,
        "R": str(mt.R),
        "R_decimal": analytics.decimal(mt.R),
        "F_upper": mt.F_upper,
        "F_mn": base.F_mn,
        "R_mn": str(base.R_mn),
        "R_mn_decimal": analytics.decimal(base.R_mn),
        "mn_condition": condition,
        "equals_mn": mt.F == base.F_mn and mt.R == base.R_mn,
    }
    if args.format == "json":
        print(json.dumps(fields))
    else:
        for key, value in fields.items():
            print(f"{key}={str(value).lower() if isinstance(value, bool) else value}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = TrialConfig(
        SchemeParams(args.K, args.m, args.ell),
        N=args.files,
        packet_bytes=args.packet_bytes,
        seed=args.seed,
        demands=DemandSpec.parse(args.demands),
        corrupt=args.corrupt,
    )
    report = run_trial(cfg)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for f in report.failures:
        print(f"FAIL demands={list(f.demands)} user={f.user} packet={f.packet}: {f.reason}", file=sys.stderr)
    return EXIT_OK if report.recovered_ok else EXIT_FAIL


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = analytics.sweep(args.K, args.t, args.n_min, args.n_max)
    text = analytics.sweep_csv(rows)
    for problem in analytics.monotonicity_violations(rows):
        print(f"warning: {problem}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(text)
        print(f"rows={len(rows)}")
    else:
        sys.stdout.write(text)
        print(f"rows={len(rows)}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coded-caching", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list the ell-bounded subsets of Z_K")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("count", help="closed-form count of bounded subsets")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--brute-force", action="store_true", help="cross-check by enumeration")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("metrics", help="subpacketization, rate and the Maddah-Ali-Niesen baseline")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify", help="simulate the scheme and check every user's recovery")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--files", type=int, required=True)
    p.add_argument("--packet-bytes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--demands", default="random:100", help="random:COUNT | exhaustive")
    p.add_argument("--corrupt", choices=CORRUPTIONS, default="none", help="replay a tampered transcript")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="F and R for every n at fixed K and t, as CSV")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n-min", type=int, default=0)
    p.add_argument("--n-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
