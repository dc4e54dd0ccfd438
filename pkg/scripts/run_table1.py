"""Replicate the growth-rate grid and print it next to the reference bands.

    python scripts/run_table1.py [--config scripts/table1.cfg] [--out out/table1]
"""
import argparse
import time

from techperf import experiments as ex

REFERENCE = {
    "5B1.5R": (0.123, 0.011), "5B3R": (0.055, 0.019), "5B5R": (0.039, 0.007),
    "10B1.5R": (0.122, 0.011), "10B3R": (0.115, 0.007), "10B5R": (0.117, 0.007),
    "20B1.5R": (0.116, 0.007), "20B3R": (0.116, 0.009), "20B5R": (0.119, 0.016),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--out")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    spec = ex.load_config(args.config, ex.ExperimentSpec) if args.config else ex.ExperimentSpec()
    t0 = time.perf_counter()
    rows = ex.cmd_table1(spec, args.out or spec.output_dir, workers=args.workers)
    print(f"{'run':8s} {'K':>7s} {'2sd':>7s} {'R2':>6s}   reference")
    for r in rows:
        ref = REFERENCE.get(r.run)
        mark = "" if ref is None else ("ok" if abs(r.mean_k - ref[0]) <= ref[1] else "out")
        ref_s = "" if ref is None else f"{ref[0]:.3f}+-{ref[1]:.3f} {mark}"
        print(f"{r.run:8s} {r.mean_k:7.4f} {r.two_sigma:7.4f} {r.r_squared:6.3f}   {ref_s}")
    print(f"theoretical ln(1+p/2) = {rows[0].theoretical_k:.4f}; {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
