"""Challenge scoring, session/item metrics and the local testbed split."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BothEmpty, EmptyItemSet, NoOverlap
from .model import DatasetStats, Session, SolutionEntry


@dataclass(frozen=True)
class GroundTruth:
    """Reference buy sets of a test set with ``test_session_count`` sessions."""

    test_session_count: int
    buy_sessions: Mapping[int, frozenset[int]]

    def __post_init__(self):
        if len(self.buy_sessions) > self.test_session_count:
            raise ValueError("more buy sessions than test sessions")
        for sid, items in self.buy_sessions.items():
            if not items:
                raise ValueError(f"buy session {sid} has an empty item set")

    @property
    def buy_fraction(self) -> float:
        if not self.test_session_count:
            return 0.0
        return len(self.buy_sessions) / self.test_session_count

    @classmethod
    def from_sessions(cls, sessions: Sequence[Session]) -> "GroundTruth":
        return cls(
            len(sessions),
            {s.session_id: frozenset(s.bought_items) for s in sessions if s.bought_items},
        )

    @classmethod
    def from_entries(cls, entries: Iterable[SolutionEntry], test_session_count: int) -> "GroundTruth":
        return cls(test_session_count, {e.session_id: e.items for e in entries})


def jaccard(a: frozenset | set, b: frozenset | set) -> float:
    union = len(a | b)
    if not union:
        raise BothEmpty("jaccard of two empty sets")
    return len(a & b) / union


def challenge_score(solution: Iterable[SolutionEntry], gt: GroundTruth) -> float:
    """Sum over predicted sessions: +|S_b|/|S_t| + Jaccard for true buy
    sessions, -|S_b|/|S_t| otherwise."""
    frac = gt.buy_fraction
    terms = []
    for e in solution:
        if not e.items:
            raise EmptyItemSet(f"session {e.session_id}")
        truth = gt.buy_sessions.get(e.session_id)
        if truth is None:
            terms.append(-frac)
        else:
            terms.append(frac + jaccard(e.items, truth))
    return math.fsum(terms)


def max_possible_score(gt: GroundTruth) -> float:
    n_b = len(gt.buy_sessions)
    return n_b * (gt.buy_fraction + 1.0)


def session_metrics(predicted: Iterable[int], truth: Iterable[int]) -> tuple[float, float, float]:
    """(recall, precision, F1) of predicted buy-session ids."""
    predicted, truth = set(predicted), set(truth)
    tp = len(predicted & truth)
    recall = tp / len(truth) if truth else 0.0
    precision = tp / len(predicted) if predicted else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return recall, precision, f1


def average_jaccard(solution: Iterable[SolutionEntry], gt: GroundTruth) -> float:
    """Mean Jaccard over predicted sessions that are true buy sessions."""
    values = [
        jaccard(e.items, gt.buy_sessions[e.session_id])
        for e in solution
        if e.session_id in gt.buy_sessions
    ]
    if not values:
        raise NoOverlap("no predicted session is a buy session")
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class MetricsReport:
    score: float
    recall: float
    precision: float
    f1: float
    average_jaccard: float
    predicted_session_count: int
    max_possible_score: float

    def key_values(self) -> list[str]:
        return [
            f"score={self.score!r}",
            f"recall={self.recall!r}",
            f"precision={self.precision!r}",
            f"f1={self.f1!r}",
            f"average_jaccard={self.average_jaccard!r}",
            f"predicted_sessions={self.predicted_session_count}",
            f"max_possible_score={self.max_possible_score!r}",
        ]

    def table(self) -> str:
        rows = [
            ("Score", f"{self.score:.1f}"),
            ("Possible score", f"{self.max_possible_score:.1f}"),
            ("R", f"{self.recall:.3f}"),
            ("P", f"{self.precision:.3f}"),
            ("F1", f"{self.f1:.3f}"),
            ("Average Jaccard", f"{self.average_jaccard:.3f}"),
            ("Sessions", str(self.predicted_session_count)),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>12}" for k, v in rows)


def evaluate(solution: Sequence[SolutionEntry], gt: GroundTruth) -> MetricsReport:
    r, p, f1 = session_metrics((e.session_id for e in solution), gt.buy_sessions)
    try:
        aj = average_jaccard(solution, gt)
    except NoOverlap:
        aj = 0.0
    return MetricsReport(
        challenge_score(solution, gt), r, p, f1, aj, len(solution), max_possible_score(gt)
    )


# -- testbed ------------------------------------------------------------------


@dataclass(frozen=True)
class Testbed:
    train: list[Session]
    test: list[Session]
    ground_truth: GroundTruth


def split_testbed(sessions: Iterable[Session], seed: int = 0) -> Testbed:
    """Half of the buy sessions and a quarter of the non-buy sessions go to test.

    Counts are floored; the remainder stays in train. Sessions are ordered by
    id before shuffling, so the split depends only on the seed and the set of
    sessions, never on input order. Both sides come back sorted by id.
    """
    ordered = sorted(sessions, key=lambda s: s.session_id)
    buys = [s for s in ordered if s.bought_items]
    others = [s for s in ordered if not s.bought_items]
    rng = np.random.default_rng(seed)
    test_ids = set()
    for group, share in ((buys, 2), (others, 4)):
        pick = rng.permutation(len(group))[: len(group) // share]
        test_ids.update(group[k].session_id for k in pick)
    train = [s for s in ordered if s.session_id not in test_ids]
    test = [s for s in ordered if s.session_id in test_ids]
    return Testbed(train, test, GroundTruth.from_sessions(test))


def dataset_stats(sessions: Iterable[Session]) -> DatasetStats:
    n_b = n_c = buy_pairs = click_pairs = 0
    items: set[int] = set()
    for s in sessions:
        clicked = {c.item_id for c in s.clicks}
        items |= clicked
        items |= s.bought_items
        if s.bought_items:
            n_b += 1
            buy_pairs += len(s.bought_items)
        else:
            n_c += 1
            click_pairs += len(clicked)
    return DatasetStats(n_b, n_c, buy_pairs, click_pairs, len(items))
