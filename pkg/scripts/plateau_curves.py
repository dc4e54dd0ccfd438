"""Write uncoupled pool curves for several basic-idea counts (saturation at 2**n - 1)."""
import argparse

from techperf import experiments as ex


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-basic", type=int, nargs="+", default=[5, 10])
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/plateau")
    args = ap.parse_args()
    for n in args.n_basic:
        s = ex.cmd_plateau(n, 0.25, args.steps, args.seed, args.out)
        first = s.ioi_c.index(s.ioi_c[-1])
        print(f"n_basic={n:3d}  final={s.ioi_c[-1]:6d}  limit={(1 << n) - 1:6d}  reached at t={first}")


if __name__ == "__main__":
    main()
