"""Core domain types: click/buy events, category codes, sessions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Union


class Label(enum.IntEnum):
    NON_BUY = 0
    BUY = 1


class CategoryKind(enum.Enum):
    UNKNOWN = "unknown"
    REGULAR = "regular"
    SPECIAL = "special"
    BRAND = "brand"


@dataclass(frozen=True, slots=True)
class CategoryCode:
    """Category attribute of a click row.

    ``0`` is unknown, ``1..12`` are regular categories, ``"S"`` marks the
    special category and any other integer is a brand id.
    """

    kind: CategoryKind
    value: int = 0

    def __post_init__(self):
        if self.kind is CategoryKind.REGULAR and not 1 <= self.value <= 12:
            raise ValueError(f"regular category out of range: {self.value}")
        if self.kind is CategoryKind.BRAND and 0 <= self.value <= 12:
            raise ValueError(f"brand code collides with regular range: {self.value}")

    @classmethod
    def decode(cls, raw: str) -> "CategoryCode":
        if raw == "S":
            return SPECIAL
        code = int(raw)
        if code == 0:
            return UNKNOWN
        if 1 <= code <= 12:
            return _REGULAR[code]
        return cls(CategoryKind.BRAND, code)

    def encode(self) -> str:
        if self.kind is CategoryKind.SPECIAL:
            return "S"
        return str(self.value)

    @property
    def is_regular(self) -> bool:
        return self.kind is CategoryKind.REGULAR


UNKNOWN = CategoryCode(CategoryKind.UNKNOWN, 0)
SPECIAL = CategoryCode(CategoryKind.SPECIAL, 0)
_REGULAR = {c: CategoryCode(CategoryKind.REGULAR, c) for c in range(1, 13)}


def regular(code: int) -> CategoryCode:
    return _REGULAR[code]


Price = Union[int, float]


@dataclass(frozen=True, slots=True)
class ClickEvent:
    session_id: int
    timestamp: int  # ms since epoch, UTC
    item_id: int
    category: CategoryCode = UNKNOWN


@dataclass(frozen=True, slots=True)
class BuyEvent:
    session_id: int
    timestamp: int
    item_id: int
    price: Price
    quantity: int


@dataclass(frozen=True)
class Session:
    """Temporally ordered clicks of one session plus its purchases.

    ``buys`` keeps the raw buy rows (needed for item prices);
    ``bought_items`` may mention items that were never clicked.
    """

    session_id: int
    clicks: tuple[ClickEvent, ...] = ()
    bought_items: frozenset[int] = frozenset()
    buys: tuple[BuyEvent, ...] = ()

    @classmethod
    def build(
        cls,
        session_id: int,
        clicks: Iterable[ClickEvent] = (),
        buys: Iterable[BuyEvent] = (),
    ) -> "Session":
        buys = tuple(buys)
        return cls(
            session_id,
            sort_clicks(clicks),
            frozenset(b.item_id for b in buys),
            buys,
        )

    @property
    def label(self) -> Label:
        return session_label(self)

    def distinct_items(self) -> list[int]:
        """Distinct clicked items in order of first appearance."""
        return list(dict.fromkeys(c.item_id for c in self.clicks))


def sort_clicks(clicks: Iterable[ClickEvent]) -> tuple[ClickEvent, ...]:
    # sorted() is stable: equal timestamps keep input order
    return tuple(sorted(clicks, key=lambda c: c.timestamp))


def session_label(s: Session) -> Label:
    return Label.BUY if s.bought_items else Label.NON_BUY


@dataclass(frozen=True)
class DatasetStats:
    buy_sessions: int = 0
    non_buy_sessions: int = 0
    item_buy_session_pairs: int = 0
    item_click_session_pairs: int = 0
    distinct_items: int = 0

    @property
    def total_sessions(self) -> int:
        return self.buy_sessions + self.non_buy_sessions

    def as_lines(self) -> list[str]:
        return [
            f"buy_sessions={self.buy_sessions}",
            f"non_buy_sessions={self.non_buy_sessions}",
            f"item_buy_session_pairs={self.item_buy_session_pairs}",
            f"item_non_buy_session_pairs={self.item_click_session_pairs}",
            f"distinct_items={self.distinct_items}",
        ]


@dataclass(frozen=True)
class SolutionEntry:
    """One predicted buy session with its predicted item set.

    ``score`` is the session-stage confidence, used only for trimming; it is
    not part of the serialized format and is ignored by equality.
    """

    session_id: int
    items: frozenset[int]
    score: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if not self.items:
            raise ValueError(f"session {self.session_id}: empty item set")
        if not isinstance(self.items, frozenset):
            object.__setattr__(self, "items", frozenset(self.items))
