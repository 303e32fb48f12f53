"""Item-stage comparison with the true buy sessions given.

The session stage is bypassed: exactly the held-out buy sessions are fed to
the item stage, so the score isolates item-set quality.
"""

import argparse
import time
from dataclasses import replace

from _testbed import add_corpus_args, build_testbed

from buycascade.cascade import predict_items, train_cascade
from buycascade.config import CascadeConfig
from buycascade.evaluation import average_jaccard, challenge_score, max_possible_score


def main():
    p = argparse.ArgumentParser(description=__doc__)
    add_corpus_args(p)
    p.add_argument("--trees", type=int, default=100)
    args = p.parse_args()

    tb = build_testbed(args)
    gt = tb.ground_truth
    buy_sessions = [s for s in tb.test if s.session_id in gt.buy_sessions and s.clicks]
    base = CascadeConfig(session_stage="always", n_trees=args.trees, seed=args.seed)
    print(f"{'item stage':<14}{'score':>10}{'Jaccard':>9}{'build s':>9}")
    for stage in ("forest", "naive_bayes", "heuristic", "all"):
        t0 = time.perf_counter()
        model = train_cascade(tb.train, replace(base, item_stage=stage))
        build = time.perf_counter() - t0
        entries = predict_items(model, buy_sessions)
        print(f"{stage:<14}{challenge_score(entries, gt):>10.1f}{average_jaccard(entries, gt):>9.3f}{build:>9.2f}")
    print(f"possible score {max_possible_score(gt):.1f} over {len(buy_sessions)} sessions")


if __name__ == "__main__":
    main()
