"""Session-feature subset sweep: train the cascade once per mask, report testbed metrics."""

import argparse
import time
from dataclasses import replace

from _testbed import add_corpus_args, build_testbed

from buycascade.cascade import predict, train_cascade
from buycascade.config import CascadeConfig
from buycascade.evaluation import evaluate
from buycascade.features import BUILTIN_MASKS


def main():
    p = argparse.ArgumentParser(description=__doc__)
    add_corpus_args(p)
    p.add_argument("--masks", nargs="*", default=[m for m in BUILTIN_MASKS if m != "selected"])
    p.add_argument("--trees", type=int, default=100)
    args = p.parse_args()

    tb = build_testbed(args)
    base = CascadeConfig(n_trees=args.trees, seed=args.seed)
    print(f"{'features':<18}{'score':>9}{'R':>7}{'P':>7}{'F1':>7}{'Jacc':>7}{'sessions':>10}{'secs':>7}")
    for name in args.masks:
        t0 = time.perf_counter()
        model = train_cascade(tb.train, replace(base, session_mask=name))
        rep = evaluate(predict(model, tb.test), tb.ground_truth)
        secs = time.perf_counter() - t0
        print(f"{name:<18}{rep.score:>9.1f}{rep.recall:>7.3f}{rep.precision:>7.3f}{rep.f1:>7.3f}"
              f"{rep.average_jaccard:>7.3f}{rep.predicted_session_count:>10}{secs:>7.1f}")
    print(f"possible score {rep.max_possible_score:.1f}")


if __name__ == "__main__":
    main()
