"""Category resolution, click dwell times and the global item statistics table."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import MissingStats, NegativeDuration
from .model import ClickEvent, Session

# smoothing constants applied to zero-valued statistics
CLICK_COUNT_FLOOR = 1
BUY_COUNT_FLOOR = 10
PRICE_FLOOR = 1000

CLICKS_PER_BUY = "clicks_per_buy"
BUYS_PER_CLICK = "buys_per_click"


class CategoryMap(dict):
    """itemId -> resolved regular category (1..12)."""

    def category_of(self, item_id: int) -> int | None:
        return self.get(item_id)


def resolve_categories(clicks: Iterable[ClickEvent]) -> CategoryMap:
    """Map each item to its most frequently observed regular category.

    Unknown, special and brand codes are not counted. Ties go to the
    smallest category id.
    """
    counts: dict[int, Counter] = defaultdict(Counter)
    for c in clicks:
        if c.category.is_regular:
            counts[c.item_id][c.category.value] += 1
    return CategoryMap(
        (item, min(cnt.items(), key=lambda kv: (-kv[1], kv[0]))[0])
        for item, cnt in counts.items()
    )


@dataclass(frozen=True)
class SessionDurations:
    dwells: tuple[float, ...]  # seconds, one per click
    item_durations: dict[int, float]


def compute_click_durations(s: Session) -> SessionDurations:
    """Dwell of each click is the gap to the next click; the last click gets 0."""
    clicks = s.clicks
    dwells = []
    item_durations: dict[int, float] = {}
    for k, c in enumerate(clicks):
        if k + 1 < len(clicks):
            gap = clicks[k + 1].timestamp - c.timestamp
            if gap < 0:
                raise NegativeDuration(
                    f"session {s.session_id}: clicks {k} and {k + 1} out of order"
                )
            d = gap / 1000.0
        else:
            d = 0.0
        dwells.append(d)
        item_durations[c.item_id] = item_durations.get(c.item_id, 0.0) + d
    return SessionDurations(tuple(dwells), item_durations)


@dataclass(frozen=True)
class ItemStats:
    click_count: int
    buy_count: int
    ratio: float
    price: float
    global_duration: float  # seconds
    observation_span: float  # seconds


@dataclass
class ItemStatsTable:
    """Per-item statistics over the training sessions (smoothed).

    Items absent from the table resolve to the smoothed all-zero entry, so
    lookups for unseen test items never fail.
    """

    items: dict[int, ItemStats] = field(default_factory=dict)
    ratio_direction: str = CLICKS_PER_BUY

    def __len__(self):
        return len(self.items)

    def __contains__(self, item_id):
        return item_id in self.items

    def __getitem__(self, item_id: int) -> ItemStats:
        try:
            return self.items[item_id]
        except KeyError:
            raise MissingStats(item_id) from None

    def get(self, item_id: int) -> ItemStats:
        st = self.items.get(item_id)
        if st is None:
            st = _smoothed(0, 0, 0, 0.0, 0.0, self.ratio_direction)
        return st

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(
                ["itemId", "clickCount", "buyCount", "ratio", "price", "globalDuration", "span"]
            )
            for item in sorted(self.items):
                st = self.items[item]
                w.writerow(
                    [item, st.click_count, st.buy_count, repr(st.ratio), repr(st.price),
                     repr(st.global_duration), repr(st.observation_span)]
                )

    @classmethod
    def load_csv(cls, path, ratio_direction: str = CLICKS_PER_BUY) -> "ItemStatsTable":
        items = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                items[int(row["itemId"])] = ItemStats(
                    int(row["clickCount"]), int(row["buyCount"]), float(row["ratio"]),
                    float(row["price"]), float(row["globalDuration"]), float(row["span"]),
                )
        return cls(items, ratio_direction)


def _smoothed(clicks, buys, price, duration, span, direction) -> ItemStats:
    clicks = clicks or CLICK_COUNT_FLOOR
    buys = buys or BUY_COUNT_FLOOR
    price = price or PRICE_FLOOR
    ratio = clicks / buys if direction == CLICKS_PER_BUY else buys / clicks
    return ItemStats(clicks, buys, ratio, float(price), float(duration), float(span))


class StatsAccumulator:
    """Raw (unsmoothed) counters; partial accumulators merge deterministically."""

    def __init__(self):
        self.click_sessions: Counter = Counter()
        self.buy_sessions: Counter = Counter()
        self.price: dict[int, tuple[int, float]] = {}  # item -> (timestamp, price)
        self.duration: defaultdict = defaultdict(float)
        self.first_seen: dict[int, int] = {}
        self.last_seen: dict[int, int] = {}

    def add(self, s: Session) -> None:
        durations = compute_click_durations(s)
        for item, d in durations.item_durations.items():
            self.click_sessions[item] += 1
            self.duration[item] += d
        for c in s.clicks:
            first = self.first_seen.get(c.item_id)
            if first is None or c.timestamp < first:
                self.first_seen[c.item_id] = c.timestamp
            if c.timestamp > self.last_seen.get(c.item_id, -1):
                self.last_seen[c.item_id] = c.timestamp
        for item in s.bought_items:
            self.buy_sessions[item] += 1
        for b in s.buys:
            if b.price > 0:
                self._offer_price(b.item_id, b.timestamp, b.price)

    def _offer_price(self, item, ts, price):
        prev = self.price.get(item)
        # latest wins; equal timestamps keep the higher price for order independence
        if prev is None or (ts, price) > prev:
            self.price[item] = (ts, price)

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        self.click_sessions.update(other.click_sessions)
        self.buy_sessions.update(other.buy_sessions)
        for item, d in other.duration.items():
            self.duration[item] += d
        for item, (ts, p) in other.price.items():
            self._offer_price(item, ts, p)
        for item, t in other.first_seen.items():
            if t < self.first_seen.get(item, t + 1):
                self.first_seen[item] = t
        for item, t in other.last_seen.items():
            if t > self.last_seen.get(item, -1):
                self.last_seen[item] = t
        return self

    def finish(self, ratio_direction: str = CLICKS_PER_BUY) -> ItemStatsTable:
        items = set(self.click_sessions) | set(self.buy_sessions)
        table = {}
        for item in sorted(items):
            span = 0.0
            if item in self.first_seen:
                span = (self.last_seen[item] - self.first_seen[item]) / 1000.0
            price = self.price.get(item, (0, 0))[1]
            table[item] = _smoothed(
                self.click_sessions.get(item, 0), self.buy_sessions.get(item, 0),
                price, self.duration.get(item, 0.0), span, ratio_direction,
            )
        return ItemStatsTable(table, ratio_direction)


def compute_item_stats(
    train_sessions: Iterable[Session], ratio_direction: str = CLICKS_PER_BUY
) -> ItemStatsTable:
    """Global item statistics. Pass training sessions only."""
    acc = StatsAccumulator()
    for s in train_sessions:
        acc.add(s)
    return acc.finish(ratio_direction)


def invert_ratio(table: ItemStatsTable) -> ItemStatsTable:
    other = BUYS_PER_CLICK if table.ratio_direction == CLICKS_PER_BUY else CLICKS_PER_BUY
    return ItemStatsTable(
        {i: replace(st, ratio=1.0 / st.ratio) for i, st in table.items.items()}, other
    )


def dump_category_map(cats: Mapping[int, int], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("itemId,category\n")
        for item in sorted(cats):
            fh.write(f"{item},{cats[item]}\n")


def load_category_map(path) -> CategoryMap:
    with open(path, newline="") as fh:
        return CategoryMap((int(r["itemId"]), int(r["category"])) for r in csv.DictReader(fh))
