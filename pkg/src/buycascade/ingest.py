"""Streaming parsers, external sort and session assembly for clickstream logs.

File formats (no header line)::

    clicks / test:  sessionId,timestamp,itemId,category
    buys:           sessionId,timestamp,itemId,price,quantity

Timestamps are ``YYYY-MM-DDThh:mm:ss.SSSZ`` and are held as integer
milliseconds since the epoch (UTC).
"""

from __future__ import annotations

import datetime as dt
import enum
import heapq
import itertools
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, TextIO

from .errors import MalformedRow, NegativeQuantity, UnsortedInput
from .model import BuyEvent, CategoryCode, ClickEvent, Session

log = logging.getLogger(__name__)

DEFAULT_MEMORY_BUDGET = 256 * 2**20
# rough per-row cost on CPython: the buffered line plus its sort key while sorting
_ROW_OVERHEAD = 320


class SourceFile(enum.Enum):
    CLICKS = "clicks"
    BUYS = "buys"
    TEST = "test"


class MalformedPolicy(str, enum.Enum):
    RAISE = "raise"
    SKIP = "skip"


@dataclass(frozen=True)
class RawRow:
    line: str
    line_number: int
    source: SourceFile = SourceFile.CLICKS


@dataclass
class IngestCounters:
    rows: int = 0
    malformed: int = 0
    clickless_buy_sessions: int = 0


# -- timestamps ---------------------------------------------------------------

_EPOCH_ORDINAL = dt.date(1970, 1, 1).toordinal()
_DAY_MS = 86_400_000
_day_cache: dict[str, int] = {}


def parse_timestamp(text: str) -> int:
    if (
        len(text) != 24
        or text[4] != "-"
        or text[7] != "-"
        or text[10] != "T"
        or text[13] != ":"
        or text[16] != ":"
        or text[19] != "."
        or text[23] != "Z"
    ):
        raise ValueError(f"bad timestamp {text!r}")
    day = text[:10]
    base = _day_cache.get(day)
    if base is None:
        base = (dt.date.fromisoformat(day).toordinal() - _EPOCH_ORDINAL) * _DAY_MS
        _day_cache[day] = base
    hh, mm, ss, ms = text[11:13], text[14:16], text[17:19], text[20:23]
    if not (hh.isdigit() and mm.isdigit() and ss.isdigit() and ms.isdigit()):
        raise ValueError(f"bad timestamp {text!r}")
    h, m, s = int(hh), int(mm), int(ss)
    if h > 23 or m > 59 or s > 59:
        raise ValueError(f"bad timestamp {text!r}")
    return base + ((h * 60 + m) * 60 + s) * 1000 + int(ms)


def format_timestamp(ms: int) -> str:
    days, rem = divmod(ms, _DAY_MS)
    date = dt.date.fromordinal(_EPOCH_ORDINAL + days)
    secs, millis = divmod(rem, 1000)
    h, secs = divmod(secs, 3600)
    m, s = divmod(secs, 60)
    return f"{date.isoformat()}T{h:02d}:{m:02d}:{s:02d}.{millis:03d}Z"


# -- row parsers --------------------------------------------------------------


def _nonneg_int(text: str, what: str, row: RawRow) -> int:
    if not (text.isascii() and text.isdigit()):
        raise MalformedRow(row.line_number, f"{what} is not a non-negative integer: {text!r}")
    return int(text)


def _timestamp(text: str, row: RawRow) -> int:
    try:
        return parse_timestamp(text)
    except ValueError:
        raise MalformedRow(row.line_number, f"unparseable timestamp {text!r}") from None


def parse_click_row(row: RawRow) -> ClickEvent:
    fields = row.line.split(",")
    if len(fields) != 4:
        raise MalformedRow(row.line_number, f"expected 4 fields, got {len(fields)}")
    sid, ts, item, cat = fields
    try:
        category = CategoryCode.decode(cat)
    except ValueError:
        raise MalformedRow(row.line_number, f"bad category {cat!r}") from None
    return ClickEvent(
        _nonneg_int(sid, "sessionId", row),
        _timestamp(ts, row),
        _nonneg_int(item, "itemId", row),
        category,
    )


def _price(text: str, row: RawRow):
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise MalformedRow(row.line_number, f"bad price {text!r}") from None
    if not value >= 0:
        raise MalformedRow(row.line_number, f"negative price {text!r}")
    return value


def parse_buy_row(row: RawRow) -> BuyEvent:
    fields = row.line.split(",")
    if len(fields) != 5:
        raise MalformedRow(row.line_number, f"expected 5 fields, got {len(fields)}")
    sid, ts, item, price, qty = fields
    try:
        quantity = int(qty)
    except ValueError:
        raise MalformedRow(row.line_number, f"bad quantity {qty!r}") from None
    if quantity < 1:
        raise NegativeQuantity(row.line_number, f"quantity {quantity} < 1")
    return BuyEvent(
        _nonneg_int(sid, "sessionId", row),
        _timestamp(ts, row),
        _nonneg_int(item, "itemId", row),
        _price(price, row),
        quantity,
    )


def format_click_row(ev: ClickEvent) -> str:
    return f"{ev.session_id},{format_timestamp(ev.timestamp)},{ev.item_id},{ev.category.encode()}"


def format_buy_row(ev: BuyEvent) -> str:
    return (
        f"{ev.session_id},{format_timestamp(ev.timestamp)},{ev.item_id},"
        f"{ev.price},{ev.quantity}"
    )


_PARSERS: dict[SourceFile, Callable[[RawRow], object]] = {
    SourceFile.CLICKS: parse_click_row,
    SourceFile.TEST: parse_click_row,
    SourceFile.BUYS: parse_buy_row,
}


# -- streaming ----------------------------------------------------------------


def read_rows(path, source: SourceFile = SourceFile.CLICKS) -> Iterator[RawRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if line:
                yield RawRow(line, n, source)


def _parse_stream(rows: Iterable[RawRow], policy, counters: IngestCounters | None):
    policy = MalformedPolicy(policy)
    if counters is None:
        counters = IngestCounters()
    for row in rows:
        try:
            ev = _PARSERS[row.source](row)
        except MalformedRow:
            if policy is MalformedPolicy.RAISE:
                raise
            counters.malformed += 1
            continue
        counters.rows += 1
        yield row, ev


def iter_events(path, source: SourceFile, policy="raise", counters=None) -> Iterator:
    for _, ev in _parse_stream(read_rows(path, source), policy, counters):
        yield ev


def iter_clicks(path, policy="raise", counters=None) -> Iterator[ClickEvent]:
    return iter_events(path, SourceFile.CLICKS, policy, counters)


def iter_buys(path, policy="raise", counters=None) -> Iterator[BuyEvent]:
    return iter_events(path, SourceFile.BUYS, policy, counters)


def write_rows(path, events: Iterable, fmt: Callable) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ev in events:
            fh.write(fmt(ev))
            fh.write("\n")
            n += 1
    return n


def write_clicks(path, events: Iterable[ClickEvent]) -> int:
    return write_rows(path, events, format_click_row)


def write_buys(path, events: Iterable[BuyEvent]) -> int:
    return write_rows(path, events, format_buy_row)


# -- external sort ------------------------------------------------------------


@dataclass
class SortReport:
    rows: int = 0
    runs: int = 0


def _line_key(line: str) -> tuple[int, str]:
    # timestamps have a fixed-width format, so string order == time order
    i = line.index(",")
    return int(line[:i]), line[i + 1 : i + 25]


def _spill(buf: list[str], tmp_dir) -> TextIO:
    fh = tempfile.TemporaryFile("w+", encoding="utf-8", dir=tmp_dir, newline="\n")
    fh.writelines(line + "\n" for line in buf)
    fh.seek(0)
    return fh


def _read_run(fh: TextIO) -> Iterator[str]:
    for line in fh:
        yield line[:-1]


def sort_events(
    path,
    source: SourceFile = SourceFile.CLICKS,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    tmp_dir=None,
    policy="raise",
    counters: IngestCounters | None = None,
    report: SortReport | None = None,
) -> Iterator:
    """Yield parsed events of ``path`` ordered by (sessionId, timestamp).

    Rows are validated and buffered until ``memory_budget`` is reached, then
    each buffer is sorted and spilled as a run; runs are k-way merged. Both
    steps are stable, so equal keys keep their input order.
    """
    if report is None:
        report = SortReport()
    tmp_dir = tmp_dir or os.environ.get("BUYCASCADE_TMPDIR") or None
    parse = _PARSERS[source]
    runs: list[TextIO] = []
    buf: list[str] = []
    used = 0
    try:
        for row, _ in _parse_stream(read_rows(path, source), policy, counters):
            buf.append(row.line)
            used += len(row.line) + _ROW_OVERHEAD
            report.rows += 1
            if used >= memory_budget:
                buf.sort(key=_line_key)
                runs.append(_spill(buf, tmp_dir))
                buf, used = [], 0
        buf.sort(key=_line_key)
        if runs:
            if buf:
                runs.append(_spill(buf, tmp_dir))
                buf = []
            report.runs = len(runs)
            log.debug("merging %d runs of %s", len(runs), path)
            lines = heapq.merge(*(_read_run(fh) for fh in runs), key=_line_key)
        else:
            report.runs = 1 if buf else 0
            lines = iter(buf)
        for n, line in enumerate(lines, 1):
            yield parse(RawRow(line, n, source))
    finally:
        for fh in runs:
            fh.close()


# -- assembly -----------------------------------------------------------------


def _grouped(events: Iterable, what: str) -> Iterator[tuple[int, list]]:
    last = -1
    for sid, group in itertools.groupby(events, key=lambda e: e.session_id):
        if sid <= last:
            raise UnsortedInput(f"{what}: sessionId {sid} after {last}")
        last = sid
        yield sid, list(group)


def assemble_sessions(
    sorted_clicks: Iterable[ClickEvent],
    sorted_buys: Iterable[BuyEvent] = (),
    counters: IngestCounters | None = None,
) -> Iterator[Session]:
    """Merge-join click and buy streams (both sorted by sessionId) into Sessions.

    Buy rows without any click rows produce click-less sessions, counted in
    ``counters.clickless_buy_sessions``.
    """
    if counters is None:
        counters = IngestCounters()
    clicks = _grouped(sorted_clicks, "clicks")
    buys = _grouped(sorted_buys, "buys")
    c = next(clicks, None)
    b = next(buys, None)
    while c is not None or b is not None:
        if b is None or (c is not None and c[0] < b[0]):
            yield Session.build(c[0], c[1])
            c = next(clicks, None)
        elif c is None or b[0] < c[0]:
            counters.clickless_buy_sessions += 1
            yield Session.build(b[0], (), b[1])
            b = next(buys, None)
        else:
            yield Session.build(c[0], c[1], b[1])
            c = next(clicks, None)
            b = next(buys, None)


def load_sessions(
    clicks_path,
    buys_path=None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    tmp_dir=None,
    policy="raise",
    counters: IngestCounters | None = None,
    source: SourceFile = SourceFile.CLICKS,
) -> Iterator[Session]:
    """Sort both files externally and stream assembled sessions."""
    if counters is None:
        counters = IngestCounters()
    clicks = sort_events(clicks_path, source, memory_budget, tmp_dir, policy, counters)
    buys: Iterable[BuyEvent] = ()
    if buys_path is not None and Path(buys_path).exists():
        buys = sort_events(buys_path, SourceFile.BUYS, memory_budget, tmp_dir, policy, counters)
    elif buys_path is not None:
        raise FileNotFoundError(buys_path)
    return assemble_sessions(clicks, buys, counters)
