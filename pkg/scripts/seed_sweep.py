"""End-to-end cascade vs heuristic vs random sessions across corpus seeds."""

import argparse
import random
from dataclasses import replace

from _testbed import add_corpus_args, build_testbed

from buycascade.cascade import predict, score_sessions, train_cascade
from buycascade.config import CascadeConfig
from buycascade.evaluation import challenge_score, session_metrics
from buycascade.model import SolutionEntry


def main():
    p = argparse.ArgumentParser(description=__doc__)
    add_corpus_args(p)
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    args = p.parse_args()

    print(f"{'seed':>5}{'cascade':>10}{'heuristic':>11}{'random':>9}{'R resampled':>13}{'R plain':>9}")
    for seed in args.seeds:
        tb = build_testbed(replace_seed(args, seed))
        gt = tb.ground_truth
        cfg = CascadeConfig(seed=seed)
        model = train_cascade(tb.train, cfg)
        entries = predict(model, tb.test)
        heur = train_cascade(tb.train, replace(cfg, session_stage="heuristic", item_stage="heuristic"))
        picks = random.Random(seed).sample([s for s in tb.test if s.clicks], len(entries))
        rand = challenge_score([SolutionEntry(s.session_id, s.distinct_items()) for s in picks], gt)
        plain = train_cascade(tb.train, replace(cfg, resample=False, item_stage="all"))
        recalls = []
        for m in (model, plain):
            is_buy, _ = score_sessions(m, tb.test)
            recalls.append(session_metrics([s.session_id for s, b in zip(tb.test, is_buy) if b], gt.buy_sessions)[0])
        print(f"{seed:>5}{challenge_score(entries, gt):>10.1f}{challenge_score(predict(heur, tb.test), gt):>11.1f}"
              f"{rand:>9.1f}{recalls[0]:>13.3f}{recalls[1]:>9.3f}")


def replace_seed(args, seed):
    ns = argparse.Namespace(**vars(args))
    ns.seed = seed
    return ns


if __name__ == "__main__":
    main()
