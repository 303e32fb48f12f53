"""Item (22-dim) and session (15-dim) feature vectors and named feature masks.

Feature indices are 1-based throughout, matching the column names below.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange
from .model import Label, Session, session_label
from .preprocess import CategoryMap, ItemStatsTable, compute_click_durations

ITEM_FEATURES = (
    "clickBuyRatio",
    "numberOfAppearance",
    "itemPosition",
    "isSunday",
    "isTuesday",
    "hour",
    "numberOfItems",
    "itemAppearanceOverThree",
    "isFirstItemCategory",
    "isLastItemCategory",
    "buyCount",
    "itemDuration",
    "price",
    "categoryTopClickBuyRatio",
    "categoryTopBuy",
    "sessionTopClickBuyRatio",
    "sessionTopBuyCount",
    "maxDuration",
    "itemOwnDuration",
    "clickCount",
    "categoryLowestPrice",
    "categoryHighestPrice",
)

SESSION_FEATURES = (
    "numberOfClicks",
    "numberOfItems",
    "itemsOverClickBuyRatio",
    "itemsOverClickBuyCount",
    "averageClickBuyRatio",
    "averageBuyCount",
    "itemAppearanceOverTwo",
    "itemAppearanceOverThree",
    "duration",
    "hour",
    "isSunday",
    "isTuesday",
    "averageItemDuration",
    "averageItemClickCount",
    "averageItemPrice",
)

DEFAULT_RATIO_THRESHOLD = 3.6
DEFAULT_BUY_COUNT_THRESHOLD = 57.0


@dataclass(frozen=True)
class ItemFeatureVector:
    session_id: int
    item_id: int
    values: tuple[float, ...]
    label: Label

    def __getitem__(self, index: int) -> float:
        return self.values[index - 1]


@dataclass(frozen=True)
class SessionFeatureVector:
    session_id: int
    values: tuple[float, ...]
    label: Label

    def __getitem__(self, index: int) -> float:
        return self.values[index - 1]


@dataclass(frozen=True)
class SessionThresholds:
    ratio: float = DEFAULT_RATIO_THRESHOLD
    buy_count: float = DEFAULT_BUY_COUNT_THRESHOLD


def recompute_thresholds(stats: ItemStatsTable) -> SessionThresholds:
    """Median click-buy ratio and mean buyCount over the items in ``stats``."""
    if not len(stats):
        return SessionThresholds()
    ratios = [st.ratio for st in stats.items.values()]
    buys = [st.buy_count for st in stats.items.values()]
    return SessionThresholds(float(statistics.median(ratios)), float(statistics.fmean(buys)))


def _calendar(ms: int) -> tuple[int, int, int]:
    """(hour, isSunday, isTuesday) of a UTC millisecond timestamp."""
    days, rem = divmod(ms, 86_400_000)
    weekday = (days + 3) % 7  # 1970-01-01 was a Thursday; Monday == 0
    return rem // 3_600_000, int(weekday == 6), int(weekday == 1)


def _flags_top(values: dict[int, float], groups: dict, pick=max) -> dict[int, int]:
    """1 for every item holding the extreme value inside its group."""
    best: dict = {}
    for item, v in values.items():
        g = groups[item]
        best[g] = v if g not in best else pick(best[g], v)
    return {item: int(v == best[groups[item]]) for item, v in values.items()}


def session_item_features(
    s: Session, stats: ItemStatsTable, cats: CategoryMap
) -> list[ItemFeatureVector]:
    """Feature vectors for every distinct clicked item of ``s``, in first-click order."""
    if not s.clicks:
        return []
    durations = compute_click_durations(s).item_durations
    hour, is_sunday, is_tuesday = _calendar(s.clicks[0].timestamp)

    appearances: dict[int, int] = {}
    position: dict[int, int] = {}
    for k, c in enumerate(s.clicks, 1):
        appearances[c.item_id] = appearances.get(c.item_id, 0) + 1
        position.setdefault(c.item_id, k)
    items = list(position)
    over_three = sum(1 for n in appearances.values() if n > 3)

    # items with no resolved category form their own singleton group
    group = {i: ("cat", cats[i]) if i in cats else ("item", i) for i in items}
    first_in_group: dict = {}
    last_in_group: dict = {}
    for c in s.clicks:
        g = group[c.item_id]
        first_in_group.setdefault(g, c.item_id)
        last_in_group[g] = c.item_id

    st = {i: stats.get(i) for i in items}
    ratio = {i: st[i].ratio for i in items}
    buys = {i: float(st[i].buy_count) for i in items}
    price = {i: st[i].price for i in items}
    session_group = {i: 0 for i in items}

    cat_top_ratio = _flags_top(ratio, group)
    cat_top_buy = _flags_top(buys, group)
    cat_low_price = _flags_top(price, group, min)
    cat_high_price = _flags_top(price, group, max)
    top_ratio = _flags_top(ratio, session_group)
    top_buy = _flags_top(buys, session_group)
    top_duration = _flags_top(durations, session_group)

    label_of = lambda i: Label.BUY if i in s.bought_items else Label.NON_BUY  # noqa: E731
    out = []
    for i in items:
        values = (
            ratio[i],
            appearances[i],
            position[i],
            is_sunday,
            is_tuesday,
            hour,
            len(items),
            over_three,
            int(first_in_group[group[i]] == i),
            int(last_in_group[group[i]] == i),
            buys[i],
            durations[i],
            price[i],
            cat_top_ratio[i],
            cat_top_buy[i],
            top_ratio[i],
            top_buy[i],
            top_duration[i],
            st[i].observation_span,
            float(st[i].click_count),
            cat_low_price[i],
            cat_high_price[i],
        )
        out.append(ItemFeatureVector(s.session_id, i, tuple(float(v) for v in values), label_of(i)))
    return out


def extract_item_features(
    s: Session, item_id: int, stats: ItemStatsTable, cats: CategoryMap
) -> ItemFeatureVector:
    for v in session_item_features(s, stats, cats):
        if v.item_id == item_id:
            return v
    raise KeyError(f"item {item_id} not clicked in session {s.session_id}")


def extract_session_features(
    s: Session,
    stats: ItemStatsTable,
    thresholds: SessionThresholds = SessionThresholds(),
) -> SessionFeatureVector:
    if not s.clicks:
        raise ValueError(f"session {s.session_id} has no clicks")
    appearances: dict[int, int] = {}
    for c in s.clicks:
        appearances[c.item_id] = appearances.get(c.item_id, 0) + 1
    st = [stats.get(i) for i in appearances]
    n = len(st)
    hour, is_sunday, is_tuesday = _calendar(s.clicks[0].timestamp)
    values = (
        len(s.clicks),
        n,
        sum(1 for x in st if x.ratio > thresholds.ratio),
        sum(1 for x in st if x.buy_count > thresholds.buy_count),
        sum(x.ratio for x in st) / n,
        sum(x.buy_count for x in st) / n,
        sum(1 for a in appearances.values() if a > 2),
        sum(1 for a in appearances.values() if a > 3),
        (s.clicks[-1].timestamp - s.clicks[0].timestamp) / 1000.0,
        hour,
        is_sunday,
        is_tuesday,
        sum(x.global_duration for x in st) / n,
        sum(x.click_count for x in st) / n,
        sum(x.price for x in st) / n,
    )
    return SessionFeatureVector(s.session_id, tuple(float(v) for v in values), session_label(s))


# -- masks --------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureMask:
    name: str
    indices: tuple[int, ...]
    arity: int = len(SESSION_FEATURES)

    def __post_init__(self):
        bad = [i for i in self.indices if not 1 <= i <= self.arity]
        if bad:
            raise IndexOutOfRange(f"mask {self.name!r}: indices {bad} outside 1..{self.arity}")

    @classmethod
    def without(cls, name: str, dropped: Iterable[int], arity: int = len(SESSION_FEATURES)):
        dropped = set(dropped)
        return cls(name, tuple(i for i in range(1, arity + 1) if i not in dropped), arity)


_ALL = tuple(range(1, len(SESSION_FEATURES) + 1))
TIME_BASED = (9, 10, 11, 12)
AGGREGATED = (5, 6, 13, 14, 15)

BUILTIN_MASKS = {
    m.name: m
    for m in (
        FeatureMask("all", _ALL),
        FeatureMask("selected", _ALL),
        FeatureMask.without("w/o time-based", TIME_BASED),
        FeatureMask.without("w/o 3 and 4", (3, 4)),
        FeatureMask("{1,5,6,7,15}", (1, 5, 6, 7, 15)),
        FeatureMask.without("w/o 1 and 2", (1, 2)),
        FeatureMask.without("w/o aggregated", AGGREGATED),
    )
}


def get_mask(name: str) -> FeatureMask:
    """Built-in mask by name, or an explicit comma list such as ``"1,5,6"``."""
    if name in BUILTIN_MASKS:
        return BUILTIN_MASKS[name]
    try:
        indices = tuple(int(x) for x in name.strip("{}").split(","))
    except ValueError:
        raise KeyError(f"unknown feature mask {name!r}") from None
    return FeatureMask(name, indices)


def apply_mask(values: Sequence[float], mask: FeatureMask) -> tuple[float, ...]:
    n = len(values)
    for i in mask.indices:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"feature index {i} outside 1..{n}")
    return tuple(values[i - 1] for i in mask.indices)


def mask_matrix(X: np.ndarray, mask: FeatureMask) -> np.ndarray:
    if mask.indices and max(mask.indices) > X.shape[1]:
        raise IndexOutOfRange(f"mask {mask.name!r} needs {max(mask.indices)} columns, have {X.shape[1]}")
    return X[:, [i - 1 for i in mask.indices]]


# -- matrices and dumps -------------------------------------------------------


def to_matrix(vectors: Sequence) -> tuple[np.ndarray, np.ndarray]:
    if not vectors:
        return np.empty((0, 0)), np.empty(0, dtype=np.int8)
    X = np.array([v.values for v in vectors], dtype=np.float64)
    y = np.array([int(v.label) for v in vectors], dtype=np.int8)
    return X, y


def dump_features(vectors: Sequence, path) -> None:
    """CSV with header ``sessionId[,itemId],f1..fN,label``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not vectors:
            return
        has_item = isinstance(vectors[0], ItemFeatureVector)
        n = len(vectors[0].values)
        w.writerow(["sessionId"] + (["itemId"] if has_item else []) + [f"f{k}" for k in range(1, n + 1)] + ["label"])
        for v in vectors:
            keys = [v.session_id] + ([v.item_id] if has_item else [])
            w.writerow(keys + [repr(x) for x in v.values] + [int(v.label)])
