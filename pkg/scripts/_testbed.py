"""Synthetic testbed shared by the experiment scripts."""

import argparse
import tempfile

from buycascade.evaluation import split_testbed
from buycascade.ingest import load_sessions
from buycascade.synth import SynthParams, generate


def add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sessions", type=int, default=20_000)
    p.add_argument("--items", type=int, default=20_000)
    p.add_argument("--buy-fraction", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=2015)
    p.add_argument("--clicks", help="use an existing click file instead of generating one")
    p.add_argument("--buys")


def build_testbed(args):
    if args.clicks:
        sessions = list(load_sessions(args.clicks, args.buys))
    else:
        with tempfile.TemporaryDirectory() as d:
            params = SynthParams(n_sessions=args.sessions, n_items=args.items,
                                 buy_fraction=args.buy_fraction, seed=args.seed)
            files = generate(params, d)
            sessions = list(load_sessions(files.clicks, files.buys))
    return split_testbed(sessions, args.seed)
