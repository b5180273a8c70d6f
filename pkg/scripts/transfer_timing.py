"""Time the two transfer evaluators (explicit tree sums vs. recursive partitions) on the fixtures."""

import argparse
import time
from pathlib import Path

from rhmap.dsl import parse_source
from rhmap.mapspace import check_transfer_agreement

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-arity", type=int, default=4)
    ap.add_argument("sources", nargs="*", default=["wedge.alg", "wedge_dga.alg", "hy.alg"])
    a = ap.parse_args()
    Y = parse_source((FIX / "y.sul").read_text()).payload
    print(f"{'source':<16}{'method':<12}{'seconds':>9}  agrees")
    for name in a.sources:
        A = parse_source((FIX / name).read_text()).payload
        for method in ("partitions", "trees"):
            t0 = time.perf_counter()
            agr = check_transfer_agreement(A, Y, a.max_arity, method=method)
            print(f"{name:<16}{method:<12}{time.perf_counter() - t0:>9.2f}  {bool(agr)}")


if __name__ == "__main__":
    main()
