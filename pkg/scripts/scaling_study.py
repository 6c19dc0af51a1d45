#!/usr/bin/env python3
"""Wall-clock study of pipeline cost versus sample count.

Holds m, c, d, and the cycle counts fixed while n grows, so the measured
times should grow close to linearly. Writes the same CSV schema as the
`anchorclust benchmark` subcommand.
"""

from __future__ import annotations

import argparse
import csv
import time

from anchorclust import SolverConfig, build_all, fit, select_anchors, synth_blobs


def time_pipeline(n, args):
    ds = synth_blobs(n=n, c=args.c, V=len(args.dims), dims=args.dims,
                     noise=1.0, seed=args.seed)
    t0 = time.perf_counter()
    anchor_set = select_anchors(ds, m=args.m, seed=args.seed,
                                max_iters=args.kmeans_iters)
    graphs = build_all(ds, anchor_set, k=args.k)
    build = time.perf_counter() - t0
    cfg = SolverConfig(c=args.c, max_iters=args.cycles, rel_tol=1e-15,
                       seed=args.seed)
    solve = fit(graphs, cfg).elapsed
    return build, solve


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=lambda s: [int(t) for t in s.split(",")],
                        default=[2500, 5000, 10000, 20000])
    parser.add_argument("--m", type=int, default=30)
    parser.add_argument("--c", type=int, default=5)
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--dims", type=lambda s: [int(t) for t in s.split(",")],
                        default=[10, 10])
    parser.add_argument("--cycles", type=int, default=15,
                        help="fixed solver cycles per size")
    parser.add_argument("--kmeans-iters", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default="scaling.csv")
    args = parser.parse_args()

    time_pipeline(500, args)  # warm up the numerics stack
    rows = []
    for n in args.sizes:
        build, solve = min(
            (time_pipeline(n, args) for _ in range(args.repeats)),
            key=lambda bs: bs[0] + bs[1],
        )
        rows.append({"n": n, "build_seconds": build, "solve_seconds": solve,
                     "total_seconds": build + solve})
        per_thousand = 1000.0 * rows[-1]["total_seconds"] / n
        print(f"n={n:>7}  build {build:7.3f}s  solve {solve:7.3f}s  "
              f"({per_thousand:.4f}s per 1k samples)")

    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
