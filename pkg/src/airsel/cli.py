"""``air`` command line: select, simulate, bench and cache maintenance."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from pathlib import Path
from typing import Sequence

from . import harness
from .cache import CachedSimilarity, ScoreCache
from .config import ConfigError, PipelineConfig
from .dataset import DatasetRecord, EmptyDataset, load_dataset
from .frames import FrameDirectory
from .pipeline import select_frames
from .scorers import (
    ReplayAnalyzer,
    ReplaySimilarity,
    ReplayStore,
    RemoteAnalyzer,
    RemoteAnswerer,
    RemoteSimilarity,
    ScorerError,
    format_query,
)
from .scorers.replay import video_id_of
from .signal import VideoMeta

log = logging.getLogger("airsel")

_SYNTHETIC_REF = re.compile(r"^(?P<family>[a-z]+)-(?P<seed>\d+)$")


class CliError(Exception):
    pass


def _write_json(data: dict, out: str | None) -> None:
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _synthetic_spec(video_ref: str, cfg: PipelineConfig) -> harness.SyntheticVideoSpec:
    m = _SYNTHETIC_REF.match(Path(video_ref).name)
    if not m or m["family"] not in harness.FAMILIES:
        raise CliError(f"synthetic video refs look like '<family>-<seed>' with family in {harness.FAMILIES}")
    return harness.make_spec(m["family"], int(m["seed"]), cfg.storage_rate)


def build_similarity(cfg: PipelineConfig, video_ref: str):
    d = cfg.similarity_descriptor()
    if d.kind == "replay":
        return ReplaySimilarity(ReplayStore.load(d.replay_path))
    if d.kind == "remote":
        return RemoteSimilarity(d.endpoint, d.model_id, retries=cfg.retries, backoff_s=cfg.backoff_s, timeout_s=cfg.timeout_s)
    return harness.SyntheticSimilarity(_synthetic_spec(video_ref, cfg))


def build_analyzer(cfg: PipelineConfig, video_ref: str):
    d = cfg.analyzer_descriptor()
    if d.kind == "replay":
        return ReplayAnalyzer(ReplayStore.load(d.replay_path), cfg.positive_threshold)
    if d.kind == "remote":
        return RemoteAnalyzer(
            d.endpoint,
            positive_threshold=cfg.positive_threshold,
            batch=cfg.analyzer_batch,
            retries=cfg.retries,
            backoff_s=cfg.backoff_s,
            timeout_s=cfg.timeout_s,
        )
    return harness.OracleAnalyzer(_synthetic_spec(video_ref, cfg))


def resolve_total_frames(video_ref: str, cfg: PipelineConfig, num_frames: int | None) -> int:
    if num_frames is not None:
        return num_frames
    if Path(video_ref).is_dir():
        total = FrameDirectory(video_ref).total_frames
        if total == 0:
            raise CliError(f"{video_ref}: no frame images found")
        return total
    if "synthetic" in (cfg.similarity_kind, cfg.analyzer_kind):
        return _synthetic_spec(video_ref, cfg).total_frames
    raise CliError(f"cannot infer the frame count of {video_ref!r}; pass --num-frames")


def _select_one(
    cfg: PipelineConfig,
    video_ref: str,
    query: str,
    num_frames: int | None,
    cache: ScoreCache | None,
):
    meta = VideoMeta(resolve_total_frames(video_ref, cfg, num_frames), cfg.storage_rate)
    similarity = build_similarity(cfg, video_ref)
    if cache is not None:
        model_id = cfg.similarity_model_id or cfg.similarity_kind
        similarity = CachedSimilarity(similarity, cache, model_id, video_id_of)
    analyzer = build_analyzer(cfg, video_ref)
    return select_frames(query, meta, cfg, similarity, analyzer, video_ref)


def cmd_select(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.load(args.config)
    options = [o.strip() for o in args.options.split(",")] if args.options else []
    query = format_query(args.query, options)
    cache = ScoreCache(args.cache) if args.cache else None
    run = _select_one(cfg, args.video, query, args.num_frames, cache)
    _write_json(run.to_dict(), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.load(args.config, env={})
    families = harness.FAMILIES if args.family == "all" else (args.family,)
    report: dict = {"families": {}, "seed": args.seed, "runs": args.runs}
    for family in families:
        out = harness.run_family(family, args.runs, args.seed, cfg)
        report["families"][family] = out["summary"]
        if args.records:
            report["families"][family]["records"] = out["records"]
    report["bound_violations"] = sum(s["bound_violations"] for s in report["families"].values())
    _write_json(report, args.report)
    return 0 if report["bound_violations"] == 0 else 1


def _bench_record(rec: DatasetRecord, cfg: PipelineConfig, answerer, cache) -> dict:
    query = rec.prompt_query
    run = _select_one(cfg, rec.video_ref, query, rec.num_frames, cache)
    row: dict = {
        "video_id": rec.video_id,
        "frames": list(run.result.frames),
        "n_air": run.result.stats.analyzed_count,
        "answer": rec.answer,
        "predicted": None,
    }
    if answerer is not None:
        letter, raw = answerer.answer(query, list(run.result.frames), rec.video_ref, len(rec.options) or 4)
        row["predicted"] = letter
        row["raw_answer"] = raw
    return row


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.load(args.config)
    records = load_dataset(args.dataset)
    endpoint = args.answerer or cfg.answerer_endpoint
    answerer = (
        RemoteAnswerer(endpoint, retries=cfg.retries, backoff_s=cfg.backoff_s, timeout_s=cfg.timeout_s)
        if endpoint
        else None
    )
    cache = ScoreCache(args.cache) if args.cache else None
    t0 = time.perf_counter()
    rows = []
    for rec in records:
        try:
            rows.append(_bench_record(rec, cfg, answerer, cache))
        except (ScorerError, CliError, FileNotFoundError, NotADirectoryError) as exc:
            log.error("%s: %s", rec.video_id, exc)
            rows.append({"video_id": rec.video_id, "error": str(exc), "answer": rec.answer, "predicted": None})
    graded = [r for r in rows if r["answer"] is not None and answerer is not None]
    report = {
        "records": rows,
        "total": len(rows),
        "errors": sum(1 for r in rows if "error" in r),
        "accuracy": (sum(r["predicted"] == r["answer"] for r in graded) / len(graded)) if graded else None,
        "elapsed_s": round(time.perf_counter() - t0, 3),
    }
    _write_json(report, args.report)
    return 0


def cmd_cache(args: argparse.Namespace) -> int:
    cache = ScoreCache(args.path)
    if args.action == "clear":
        cache.clear()
    _write_json(cache.stats(), None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="air", description="Query-aware video frame selection.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("select", help="select frames for one query")
    s.add_argument("--video", required=True, help="frame directory, replay video id or synthetic '<family>-<seed>'")
    s.add_argument("--query", required=True)
    s.add_argument("--options", help="comma-separated answer options")
    s.add_argument("--config", help="JSON config file")
    s.add_argument("--out", help="output JSON path (default stdout)")
    s.add_argument("--num-frames", type=int, help="stored frame count when it cannot be inferred")
    s.add_argument("--cache", help="similarity score cache directory")
    s.set_defaults(func=cmd_select)

    m = sub.add_parser("simulate", help="run the synthetic harness")
    m.add_argument("--family", default="all", choices=(*harness.FAMILIES, "all"))
    m.add_argument("--runs", type=int, default=100)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--config")
    m.add_argument("--report", help="output JSON path (default stdout)")
    m.add_argument("--records", action="store_true", help="include per-run records")
    m.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="select and answer over a JSONL dataset")
    b.add_argument("--dataset", required=True)
    b.add_argument("--config")
    b.add_argument("--answerer", help="answering service base URL")
    b.add_argument("--report", help="output JSON path (default stdout)")
    b.add_argument("--cache")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("cache", help="inspect or clear a score cache")
    c.add_argument("action", choices=("stats", "clear"))
    c.add_argument("--path", required=True)
    c.set_defaults(func=cmd_cache)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, CliError, EmptyDataset) as exc:
        print(f"air: {exc}", file=sys.stderr)
        return 2
    except (ScorerError, OSError, ValueError) as exc:
        print(f"air: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
