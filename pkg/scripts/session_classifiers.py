"""Compare session-stage learners, with and without class resampling."""

import argparse
import time
from dataclasses import replace

from _testbed import add_corpus_args, build_testbed

from buycascade.cascade import score_sessions, train_cascade
from buycascade.config import CascadeConfig
from buycascade.evaluation import session_metrics

STAGES = ("adaboost", "naive_bayes", "forest", "heuristic")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    add_corpus_args(p)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--rounds", type=int, default=10)
    args = p.parse_args()

    tb = build_testbed(args)
    truth = tb.ground_truth.buy_sessions
    base = CascadeConfig(item_stage="all", n_trees=args.trees, boost_rounds=args.rounds, seed=args.seed)
    print(f"{'classifier':<14}{'resampled':>10}{'R':>8}{'P':>8}{'F1':>8}{'build s':>9}")
    for stage in STAGES:
        for resample in ((True, False) if stage != "heuristic" else (False,)):
            t0 = time.perf_counter()
            model = train_cascade(tb.train, replace(base, session_stage=stage, resample=resample))
            build = time.perf_counter() - t0
            is_buy, _ = score_sessions(model, tb.test)
            r, prec, f1 = session_metrics([s.session_id for s, b in zip(tb.test, is_buy) if b], truth)
            print(f"{stage:<14}{str(resample):>10}{r:>8.3f}{prec:>8.3f}{f1:>8.3f}{build:>9.2f}")


if __name__ == "__main__":
    main()
