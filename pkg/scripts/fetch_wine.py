#!/usr/bin/env python3
"""Download the UCI wine-quality CSVs into data/.

The white-wine file enables the two dataset-bound acceptance tests
(engine-equivalent clustering and statistics reproduction); without it they
skip.  Alternatively point $BITMEDIAN_WINE_WHITE at an existing copy.
"""

import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases/wine-quality"
FILES = ("winequality-white.csv", "winequality-red.csv")


def main() -> int:
    dest = Path(__file__).resolve().parent.parent / "data"
    dest.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in FILES:
        target = dest / name
        if target.exists():
            print(f"{target} already present ({target.stat().st_size} bytes)")
            continue
        url = f"{BASE}/{name}"
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                body = resp.read()
        except OSError as exc:
            print(f"failed to fetch {url}: {exc}", file=sys.stderr)
            failures += 1
            continue
        target.write_bytes(body)
        print(f"fetched {target} ({len(body)} bytes)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
