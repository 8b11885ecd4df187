#!/usr/bin/env python3
"""Convert a face dataset stored as a MATLAB file (fea: N x m, gnd: N) to genet CSV."""

import argparse
import math
import sys

import numpy as np
import scipy.io


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("mat", help="input .mat file with 'fea' and 'gnd'")
    ap.add_argument("out", help="output .csv path")
    ap.add_argument("--height", type=int, help="image height (default: sqrt of m)")
    ap.add_argument("--width", type=int, help="image width (default: m / height)")
    args = ap.parse_args()

    data = scipy.io.loadmat(args.mat)
    fea = np.asarray(data["fea"], dtype=np.float64)
    gnd = np.asarray(data["gnd"]).reshape(-1).astype(np.int64)
    if fea.shape[0] != gnd.shape[0]:
        print(f"fea has {fea.shape[0]} rows but gnd has {gnd.shape[0]}", file=sys.stderr)
        return 1
    m = fea.shape[1]
    height = args.height or math.isqrt(m)
    width = args.width or m // height
    if height * width != m:
        print(f"{height}x{width} does not match {m} features", file=sys.stderr)
        return 1

    with open(args.out, "w", encoding="ascii") as f:
        f.write(f"label,{height},{width}\n")
        for label, row in zip(gnd, fea):
            f.write(str(label) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
