"""Run random-demand trials for every valid (K, m, ell) up to K_max and tabulate pass/fail.

    python scripts/verify_grid.py --K-max 10 --files 3 --packet-bytes 16 --count 100
"""

import argparse
import sys
import time

from coded_caching.sim_harness import verify_grid


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--K-max", type=int, default=8)
    parser.add_argument("--files", type=int, default=3)
    parser.add_argument("--packet-bytes", type=int, default=1)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--corrupt", default="none", choices=("none", "flip", "drop"))
    args = parser.parse_args()

    start = time.perf_counter()
    rows = verify_grid(args.K_max, args.files, args.packet_bytes, args.count, args.seed, args.corrupt)
    print("K,m,ell,passed,failed")
    for r in rows:
        print(f"{r.params.K},{r.params.m},{r.params.ell},{r.passed},{r.failed}")
    failed = sum(1 for r in rows if r.failed)
    print(f"# {len(rows)} triples, {failed} with failures, {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
