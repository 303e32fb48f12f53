"""Command-line entry point: ``buycascade {synth,split,stats,train,predict,score}``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import ingest
from .cascade import emit_solution, load_cascade, parse_solution, predict, save_cascade, train_cascade
from .config import CascadeConfig, read_key_values, write_key_values
from .errors import CascadeError, InsufficientData
from .evaluation import GroundTruth, dataset_stats, evaluate, split_testbed
from .synth import SynthParams, generate

log = logging.getLogger("buycascade")


def _ingest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--memory-budget", type=int, default=ingest.DEFAULT_MEMORY_BUDGET,
                   help="bytes of rows buffered per external-sort run")
    p.add_argument("--malformed", choices=("raise", "skip"), default="raise")
    p.add_argument("--tmp-dir", default=None, help="directory for sort runs (or BUYCASCADE_TMPDIR)")


def _load(args, clicks, buys=None, source=ingest.SourceFile.CLICKS):
    counters = ingest.IngestCounters()
    sessions = list(
        ingest.load_sessions(clicks, buys, args.memory_budget, args.tmp_dir, args.malformed, counters, source)
    )
    if counters.malformed:
        log.warning("skipped %d malformed rows", counters.malformed)
    if counters.clickless_buy_sessions:
        log.info("%d buy sessions without clicks", counters.clickless_buy_sessions)
    return sessions


def cmd_synth(args) -> int:
    params = SynthParams(
        n_sessions=args.sessions,
        buy_fraction=args.buy_fraction,
        n_items=args.items,
        zipf_exponent=args.zipf,
        mean_clicks_per_session=args.clicks_per_session,
        missing_category_cutoff=args.missing_category_cutoff,
        seed=args.seed,
    )
    files = generate(params, args.out)
    print(f"clicks={files.clicks}\nbuys={files.buys}\ntruth={files.truth}")
    return 0


def cmd_split(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sessions = _load(args, args.clicks, args.buys)
    tb = split_testbed(sessions, args.seed)
    ingest.write_clicks(out / "train_clicks.dat", (c for s in tb.train for c in s.clicks))
    ingest.write_buys(out / "train_buys.dat", (b for s in tb.train for b in s.buys))
    ingest.write_clicks(out / "test_clicks.dat", (c for s in tb.test for c in s.clicks))
    gt = tb.ground_truth
    with open(out / "groundtruth.sol", "w", newline="\n") as fh:
        for sid in sorted(gt.buy_sessions):
            fh.write(f"{sid};{','.join(map(str, sorted(gt.buy_sessions[sid])))}\n")
    write_key_values(
        {"test_sessions": gt.test_session_count, "buy_sessions": len(gt.buy_sessions), "seed": args.seed},
        out / "testbed.meta",
    )
    for name, side in (("train", tb.train), ("test", tb.test)):
        for line in dataset_stats(side).as_lines():
            print(f"{name}.{line}")
    return 0


def cmd_stats(args) -> int:
    for line in dataset_stats(_load(args, args.clicks, args.buys)).as_lines():
        print(line)
    return 0


_OVERRIDE_FLAGS = {
    "seed": "seed",
    "session_stage": "session_stage",
    "item_stage": "item_stage",
    "mask": "session_mask",
    "rounds": "boost_rounds",
    "trees": "n_trees",
    "threads": "threads",
    "no_resample": "resample",
    "recompute_thresholds": "recompute_thresholds",
}


def build_config(args) -> CascadeConfig:
    cfg = CascadeConfig()
    if args.config:
        cfg = cfg.updated(read_key_values(args.config))
    overrides = {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    for flag, key in _OVERRIDE_FLAGS.items():
        value = getattr(args, flag, None)
        if value is None or value is False:
            continue
        overrides[key] = False if flag == "no_resample" else value
    return cfg.updated(overrides)


def cmd_train(args) -> int:
    cfg = build_config(args)
    sessions = _load(args, args.clicks, args.buys)
    if not any(s.bought_items for s in sessions):
        raise InsufficientData("training data has no buy sessions")
    extra = ()
    if args.test_clicks:
        extra = ingest.iter_events(args.test_clicks, ingest.SourceFile.TEST, args.malformed)
    t0 = time.perf_counter()
    model = train_cascade(sessions, cfg, extra)
    save_cascade(model, args.model)
    for stage, secs in model.timings.items():
        print(f"time.{stage}={secs:.3f}s")
    print(f"time.total={time.perf_counter() - t0:.3f}s")
    print(f"model={args.model}")
    return 0


def cmd_predict(args) -> int:
    model = load_cascade(args.model)
    sessions = _load(args, args.clicks, None, ingest.SourceFile.TEST)
    entries = predict(model, sessions)
    report = emit_solution(entries, args.out, args.max_bytes)
    print(f"predicted_sessions={len(entries)}")
    print(f"written_sessions={report.written}")
    print(f"dropped_sessions={report.dropped}")
    print(f"bytes={report.bytes}")
    return 0


def _test_session_count(args) -> int:
    if args.test_sessions is not None:
        return args.test_sessions
    if args.meta:
        return int(read_key_values(args.meta)["test_sessions"])
    if args.test_clicks:
        return len({ev.session_id for ev in ingest.iter_events(args.test_clicks, ingest.SourceFile.TEST)})
    raise ValueError("one of --test-sessions, --meta or --test-clicks is required")


def cmd_score(args) -> int:
    solution = parse_solution(args.solution)
    gt = GroundTruth.from_entries(parse_solution(args.groundtruth), _test_session_count(args))
    report = evaluate(solution, gt)
    print(report.table() if args.format == "table" else "\n".join(report.key_values()))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="buycascade", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic click/buy corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--sessions", type=int, default=1000)
    p.add_argument("--items", type=int, default=2000)
    p.add_argument("--buy-fraction", type=float, default=0.05)
    p.add_argument("--zipf", type=float, default=0.8)
    p.add_argument("--clicks-per-session", type=float, default=4.0)
    p.add_argument("--missing-category-cutoff", type=float, default=0.4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="build a local train/test testbed")
    p.add_argument("--clicks", required=True)
    p.add_argument("--buys", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _ingest_args(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--clicks", required=True)
    p.add_argument("--buys")
    _ingest_args(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train the cascade")
    p.add_argument("--clicks", required=True)
    p.add_argument("--buys", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--test-clicks", help="extra clicks used only for category resolution")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override (repeatable)")
    p.add_argument("--seed", type=int)
    p.add_argument("--session-stage", choices=("adaboost", "naive_bayes", "forest", "heuristic", "always"))
    p.add_argument("--item-stage", choices=("forest", "naive_bayes", "heuristic", "all"))
    p.add_argument("--mask")
    p.add_argument("--rounds", type=int)
    p.add_argument("--trees", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--no-resample", action="store_true")
    p.add_argument("--recompute-thresholds", action="store_true")
    _ingest_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write a solution file")
    p.add_argument("--model", required=True)
    p.add_argument("--clicks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-bytes", type=int, default=25 * 2**20)
    _ingest_args(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("score", help="score a solution against ground truth")
    p.add_argument("--solution", required=True)
    p.add_argument("--groundtruth", required=True)
    p.add_argument("--test-sessions", type=int)
    p.add_argument("--meta", help="testbed.meta written by split")
    p.add_argument("--test-clicks")
    p.add_argument("--format", choices=("table", "kv"), default="kv")
    p.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CascadeError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
