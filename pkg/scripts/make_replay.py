"""Write a replay scorer file (similarity + analyzer text) for one synthetic video.

    python scripts/make_replay.py --family trap --seed 3 --out trap-3.jsonl

The video id inside the file is ``<family>-<seed>``; pass that as
``air select --video`` together with ``--num-frames`` printed by this script.
"""

import argparse
import json

from airsel.harness import FAMILIES, make_spec, replay_records
from airsel.scorers import write_replay


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=FAMILIES, default="short")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    ap.add_argument("--config-out", help="also write a config pointing both scorers at the file")
    args = ap.parse_args()

    spec = make_spec(args.family, args.seed)
    n = write_replay(args.out, replay_records(spec))
    if args.config_out:
        cfg = {"similarity_replay_path": args.out, "analyzer_replay_path": args.out}
        with open(args.config_out, "w", encoding="utf-8") as fh:
            json.dump(cfg, fh, indent=2, sort_keys=True)
    print(json.dumps({"video_id": spec.spec_id, "num_frames": spec.total_frames, "records": n}))


if __name__ == "__main__":
    main()
