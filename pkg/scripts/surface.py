"""Mean K over a finer (n_basic, R) grid, written as CSV for contour plotting."""
import argparse

from techperf import experiments as ex


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-basic", type=int, nargs="+", default=[5, 8, 10, 15, 20])
    ap.add_argument("--r", type=float, nargs="+", default=[1.5, 2, 3, 4, 5])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--out", default="out/surface")
    args = ap.parse_args()
    spec = ex.ExperimentSpec(name="surface", n_basic_grid=tuple(args.n_basic),
                             threshold_grid=tuple(args.r), n_reps=args.reps)
    rows = ex.cmd_surface(spec, args.out)
    header = "n_basic " + " ".join(f"R={r:<6g}" for r in args.r)
    print(header)
    for nb in args.n_basic:
        ks = [row.mean_k for row in rows if row.n_basic == nb]
        print(f"{nb:7d} " + " ".join(f"{k:8.4f}" for k in ks))


if __name__ == "__main__":
    main()
