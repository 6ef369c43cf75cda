#!/usr/bin/env python3
"""Convert the UCI Computer Hardware file into a benchmark CSV.

Usage: python scripts/prepare_machinecpu.py machine.data machinecpu.csv

Input rows look like ``vendor,model,MYCT,MMIN,MMAX,CACH,CHMIN,CHMAX,PRP,ERP``.
The six numeric hardware attributes become features and the published
relative performance (PRP) is discretized into 10 equal-frequency
ordinal labels.
"""

import sys

import numpy as np

from advloss.data import equal_frequency_bins


def convert(src: str, dst: str, n_bins: int = 10) -> int:
    features = []
    targets = []
    with open(src, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            features.append([float(c) for c in cells[2:8]])
            targets.append(float(cells[8]))
    labels = equal_frequency_bins(np.asarray(targets), n_bins)
    with open(dst, "w", encoding="utf-8") as handle:
        for row, label in zip(features, labels):
            handle.write(",".join(f"{v:g}" for v in row) + f",{label}\n")
    return len(labels)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        print(__doc__)
        sys.exit(2)
    n = convert(sys.argv[1], sys.argv[2])
    print(f"wrote {n} rows to {sys.argv[2]}")
