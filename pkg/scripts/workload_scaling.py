"""Mean analyzed-frame count per duration family, against the frame-count ratio."""

import argparse
from statistics import fmean

from airsel.harness import make_spec, run_family


def main() -> None:
    ap = argparse.ArgumentParser(description="analyzer workload vs video length")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = {}
    for fam in ("short", "medium", "long"):
        out = run_family(fam, args.runs, args.seed, strategies=("air",))
        frames = fmean(make_spec(fam, s).total_frames for s in range(args.seed, args.seed + args.runs))
        s = out["summary"]["strategies"]["air"]
        rows[fam] = (s["mean_n_air"], frames)
        print(
            f"{fam:7s} mean n_air {s['mean_n_air']:6.2f}  mean frames {frames:9.0f}  "
            f"early stop {s['early_stop_rate']:.0%}  recall {s['mean_recall']:.3f}"
        )
    work = rows["long"][0] / rows["short"][0]
    length = rows["long"][1] / rows["short"][1]
    print(f"long/short: workload x{work:.2f} vs frames x{length:.2f}")


if __name__ == "__main__":
    main()
