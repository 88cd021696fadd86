"""Uniform vs similarity top-K vs A.I.R. on the distractor-trap family.

Prints per-strategy mean recall plus the fraction of seeds where A.I.R.
recall is at least the top-K recall.
"""

import argparse
import time
from statistics import fmean

from airsel.harness import TRAP_BUDGET, make_spec, run_comparison


def main() -> None:
    ap = argparse.ArgumentParser(description="distractor-trap recall comparison")
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=TRAP_BUDGET)
    args = ap.parse_args()

    t0 = time.perf_counter()
    recalls: dict[str, list[float]] = {"uniform": [], "topk": [], "air": []}
    wins = 0
    for s in range(args.seed, args.seed + args.runs):
        res = run_comparison(make_spec("trap", s), budget=args.budget)
        for name, m in res.items():
            recalls[name].append(m.recall)
        wins += res["air"].recall >= res["topk"].recall
    for name, vals in recalls.items():
        print(f"{name:8s} mean recall {fmean(vals):.3f}")
    print(f"air >= topk on {wins}/{args.runs} seeds ({wins / args.runs:.1%})")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
