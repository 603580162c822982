#!/usr/bin/env python3
"""Show why the median centroid resists outliers where the mean does not.

Clusters {1, 2, 3, 100} with k=1 in both centroid modes: the median lands
on 2 while the mean is dragged to 26.5.
"""

import sys

from bitmedian.clustering import ClusterConfig, run
from bitmedian.fixedpoint import FixedPointCodec, decode, encode


def main() -> int:
    values = [1.0, 2.0, 3.0, 100.0]
    codec = FixedPointCodec(width=16, frac_bits=1)
    data = [(encode(v, codec),) for v in values]
    print(f"data: {values}")
    for mode in ("median", "mean"):
        model = run(data, ClusterConfig(k=1, centroid_mode=mode, width=codec.width))
        centroid = decode(model.centroids[0][0], codec)
        print(f"{mode:>6} centroid: {centroid:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
