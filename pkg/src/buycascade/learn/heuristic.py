"""Click-buy ratio threshold rule used as a no-learning baseline."""

from __future__ import annotations

import math
from typing import Mapping

from ..model import Label, Session
from ..preprocess import ItemStatsTable

DEFAULT_THRESHOLD = 5.5


def heuristic_from_ratios(
    ratios: Mapping[int, float], threshold: float = DEFAULT_THRESHOLD
) -> tuple[Label, list[int]]:
    """Buy iff the mean item ratio exceeds ``threshold``.

    For Buy sessions the upper half (rounded up) of the distinct items by
    ratio is returned, highest first; ties keep the mapping's order.
    """
    if not ratios:
        return Label.NON_BUY, []
    mean = sum(ratios.values()) / len(ratios)
    if not mean > threshold:
        return Label.NON_BUY, []
    ranked = sorted(ratios, key=lambda i: -ratios[i])
    return Label.BUY, ranked[: math.ceil(len(ranked) / 2)]


def session_ratios(s: Session, stats: ItemStatsTable) -> dict[int, float]:
    return {i: stats.get(i).ratio for i in s.distinct_items()}


def heuristic_classify(
    s: Session, stats: ItemStatsTable, threshold: float = DEFAULT_THRESHOLD
) -> tuple[Label, list[int]]:
    return heuristic_from_ratios(session_ratios(s, stats), threshold)


def mean_ratio(s: Session, stats: ItemStatsTable) -> float:
    r = session_ratios(s, stats)
    return sum(r.values()) / len(r) if r else 0.0
