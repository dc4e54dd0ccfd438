"""Fitted cost-improvement exponent versus interaction level d (expect about -1/d)."""
import argparse

import numpy as np

from techperf import experiments as ex


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--attempts", type=int, default=200_000)
    ap.add_argument("--out", default="out/mcnerney")
    args = ap.parse_args()
    for d in args.d:
        expos = [ex.cmd_mcnerney(100, d, args.attempts, s, args.out)[1] for s in range(args.seeds)]
        print(f"d={d}  exponent {np.mean(expos):.3f} +- {np.std(expos):.3f}  (-1/d = {-1 / d:.3f})")


if __name__ == "__main__":
    main()
