#!/usr/bin/env python3
"""Sweep the input size and compare in-situ vs streaming bit movement.

For each N the script computes one 64-bit median through the tiled model
and charges the stream-everything baseline for the same selection, then
prints a gnuplot-ready CSV of the traffic ratio.  Example:

    python scripts/cost_sweep.py --sizes 64,256,1024,4096,16384 > ratios.csv
    gnuplot -e "set datafile separator ','; plot 'ratios.csv' using 1:8 with lines"
"""

import argparse
import csv
import random
import sys

from bitmedian.bitplane import build_bitplanes
from bitmedian.pimsim import (
    TileConfig,
    partition,
    simulated_median,
    streaming_baseline_cost,
)

FIELDS = (
    "N",
    "W",
    "tiles",
    "counting_steps",
    "merge_ops",
    "bits_moved",
    "host_bits_moved",
    "ratio",
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512,1024,2048,4096,8192,16384")
    ap.add_argument("--width", type=int, default=64)
    ap.add_argument("--rows-per-array", type=int, default=256)
    ap.add_argument("--group-size", type=int, default=16)
    ap.add_argument("--tree-fanin", type=int, default=2)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cfg = TileConfig(
        rows_per_array=args.rows_per_array,
        group_size=min(args.group_size, args.rows_per_array),
        tree_fanin=args.tree_fanin,
    )
    rng = random.Random(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(FIELDS)
    for n in (int(s) for s in args.sizes.split(",")):
        values = [rng.getrandbits(args.width) for _ in range(n)]
        plan = partition(build_bitplanes(values, args.width), cfg)
        _, ledger = simulated_median(plan)
        streaming_baseline_cost(n, args.width, ledger)
        w.writerow(
            [
                n,
                args.width,
                plan.n_tiles,
                ledger.counting_steps,
                ledger.merge_ops,
                ledger.bits_moved,
                ledger.host_bits_moved,
                repr(ledger.ratio()),
            ]
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
