import math

import pytest
from hypothesis import given, settings, strategies as st

from buycascade.errors import MissingStats, NegativeDuration
from buycascade.model import SPECIAL, UNKNOWN, BuyEvent, ClickEvent, CategoryCode, CategoryKind, Session, regular
from buycascade.preprocess import (
    BUYS_PER_CLICK,
    StatsAccumulator,
    ItemStatsTable,
    compute_click_durations,
    compute_item_stats,
    invert_ratio,
    load_category_map,
    dump_category_map,
    resolve_categories,
)


def brand(v=2_000_000_001):
    return CategoryCode(CategoryKind.BRAND, v)


def c(item, cat, sid=1, t=0):
    return ClickEvent(sid, t, item, cat)


def test_category_majority():
    clicks = [c(9, regular(2)), c(9, regular(2)), c(9, regular(5)), c(9, SPECIAL), c(9, UNKNOWN)]
    assert resolve_categories(clicks) == {9: 2}


def test_category_tie_smallest():
    assert resolve_categories([c(9, regular(4)), c(9, regular(2))]) == {9: 2}


def test_category_unresolved():
    cats = resolve_categories([c(9, UNKNOWN), c(9, SPECIAL), c(9, brand())])
    assert 9 not in cats and cats.category_of(9) is None


code_st = st.one_of(st.integers(1, 12).map(regular), st.just(UNKNOWN), st.just(SPECIAL), st.just(brand()))


@given(st.lists(st.tuples(st.integers(0, 4), code_st), max_size=40), st.randoms())
def test_category_order_invariant(pairs, rnd):
    clicks = [c(i, k) for i, k in pairs]
    shuffled = clicks[:]
    rnd.shuffle(shuffled)
    cats = resolve_categories(clicks)
    assert cats == resolve_categories(shuffled)
    # oracle: brute-force argmax over 1..12
    for item in {i for i, _ in pairs}:
        counts = [sum(1 for i, k in pairs if i == item and k.is_regular and k.value == v) for v in range(13)]
        best = max(counts[1:])
        assert cats.get(item) == (counts.index(best, 1) if best else None)


def session(sid, times, items, bought=(), prices=()):
    clicks = tuple(ClickEvent(sid, t, i) for t, i in zip(times, items))
    buys = tuple(BuyEvent(sid, 10**9 + k, i, p, 1) for k, (i, p) in enumerate(zip(bought, prices or [0] * len(bought))))
    return Session.build(sid, clicks, buys)


def test_durations_example():
    d = compute_click_durations(session(1, [0, 10_000, 25_000], [5, 7, 5]))
    assert d.dwells == (10.0, 15.0, 0.0)
    assert d.item_durations == {5: 10.0, 7: 15.0}


def test_single_click_zero():
    assert compute_click_durations(session(1, [5], [1])).item_durations == {1: 0.0}


def test_negative_duration():
    s = Session(1, (ClickEvent(1, 10, 1), ClickEvent(1, 5, 2)))
    with pytest.raises(NegativeDuration):
        compute_click_durations(s)


@given(st.lists(st.tuples(st.integers(0, 10**7), st.integers(0, 5)), min_size=1, max_size=30))
def test_dwell_conservation(pairs):
    times, items = zip(*sorted(pairs))
    s = session(1, times, items)
    d = compute_click_durations(s)
    assert all(x >= 0 for x in d.dwells)
    span = (times[-1] - times[0]) / 1000.0
    assert math.isclose(sum(d.item_durations.values()), span, abs_tol=1e-6)
    assert math.isclose(sum(d.dwells), span, abs_tol=1e-6)


def test_stats_smoothing():
    # item 1 clicked in two sessions and bought in one; item 2 never bought; item 3 bought without clicks
    sessions = [
        session(1, [0, 4000], [1, 2], bought=[1], prices=[250]),
        session(2, [0, 1000, 3000], [1, 1, 2]),
        Session.build(3, (), (BuyEvent(3, 5, 3, 0, 1),)),
    ]
    t = compute_item_stats(sessions)
    assert (t[1].click_count, t[1].buy_count, t[1].ratio, t[1].price) == (2, 1, 2.0, 250.0)
    assert (t[2].click_count, t[2].buy_count, t[2].ratio, t[2].price) == (2, 10, 0.2, 1000.0)
    assert (t[3].click_count, t[3].buy_count, t[3].ratio) == (1, 1, 1.0)
    assert t[1].global_duration == 4.0 + 3.0 and t[2].global_duration == 0.0
    with pytest.raises(MissingStats):
        t[99]
    unseen = t.get(99)
    assert (unseen.click_count, unseen.buy_count, unseen.ratio, unseen.price) == (1, 10, 0.1, 1000.0)


def test_latest_price_wins():
    s = Session.build(1, (ClickEvent(1, 0, 4),), (BuyEvent(1, 10, 4, 300, 1), BuyEvent(1, 20, 4, 200, 1), BuyEvent(1, 30, 4, 0, 1)))
    assert compute_item_stats([s])[4].price == 200.0


def test_invert_ratio():
    t = compute_item_stats([session(1, [0], [1], bought=[1], prices=[5])])
    inv = invert_ratio(t)
    assert inv.ratio_direction == BUYS_PER_CLICK and inv[1].ratio == 1.0


def oracle_stats(sessions):
    """Direct recomputation with explicit loops (unsmoothed)."""
    items = {x.item_id for s in sessions for x in s.clicks} | {i for s in sessions for i in s.bought_items}
    out = {}
    for i in items:
        clicks = sum(1 for s in sessions if any(x.item_id == i for x in s.clicks))
        buys = sum(1 for s in sessions if i in s.bought_items)
        dur = 0.0
        for s in sessions:
            for k, x in enumerate(s.clicks):
                if x.item_id == i and k + 1 < len(s.clicks):
                    dur += (s.clicks[k + 1].timestamp - x.timestamp) / 1000.0
        ts = [x.timestamp for s in sessions for x in s.clicks if x.item_id == i]
        span = (max(ts) - min(ts)) / 1000.0 if ts else 0.0
        priced = [(b.timestamp, b.price) for s in sessions for b in s.buys if b.item_id == i and b.price > 0]
        price = max(priced)[1] if priced else 0
        out[i] = (clicks, buys, dur, span, price)
    return out


sessions_st = st.lists(
    st.tuples(
        st.lists(st.tuples(st.integers(0, 10**6), st.integers(0, 6)), min_size=1, max_size=8),
        st.lists(st.tuples(st.integers(0, 6), st.integers(0, 3)), max_size=3),
    ),
    max_size=50,
)


def build_sessions(layout):
    out = []
    for sid, (clicks, buys) in enumerate(layout):
        times, items = zip(*sorted(clicks))
        bevs = tuple(BuyEvent(sid, 10**7 + (k % 2), i, p * 100, 1) for k, (i, p) in enumerate(buys))
        out.append(Session.build(sid, tuple(ClickEvent(sid, t, i) for t, i in zip(times, items)), bevs))
    return out


@settings(max_examples=60, deadline=None)
@given(sessions_st)
def test_stats_match_oracle(layout):
    sessions = build_sessions(layout)
    table = compute_item_stats(sessions)
    for i, (clicks, buys, dur, span, price) in oracle_stats(sessions).items():
        got = table[i]
        assert got.click_count == (clicks or 1)
        assert got.buy_count == (buys or 10)
        assert got.ratio == (clicks or 1) / (buys or 10)
        assert got.price == float(price or 1000)
        assert math.isclose(got.global_duration, dur, abs_tol=1e-6)
        assert got.observation_span == span


@settings(max_examples=40, deadline=None)
@given(sessions_st, st.integers(0, 50), st.randoms())
def test_stats_merge_order_independent(layout, cut, rnd):
    sessions = build_sessions(layout)
    whole = compute_item_stats(sessions)
    shuffled = sessions[:]
    rnd.shuffle(shuffled)
    a, b = StatsAccumulator(), StatsAccumulator()
    for s in shuffled[:cut]:
        a.add(s)
    for s in shuffled[cut:]:
        b.add(s)
    merged = b.merge(a).finish()
    assert merged.items.keys() == whole.items.keys()
    for i in whole.items:
        x, y = merged[i], whole[i]
        assert (x.click_count, x.buy_count, x.ratio, x.price, x.observation_span) == (
            y.click_count, y.buy_count, y.ratio, y.price, y.observation_span)
        assert math.isclose(x.global_duration, y.global_duration, abs_tol=1e-6)


def test_csv_roundtrip(tmp_path):
    t = compute_item_stats(build_sessions([([(0, 1), (1234, 2)], [(1, 3)]), ([(7, 2)], [])]))
    t.dump_csv(tmp_path / "s.csv")
    assert ItemStatsTable.load_csv(tmp_path / "s.csv") == t
    dump_category_map({3: 1, 1: 12}, tmp_path / "c.csv")
    assert load_category_map(tmp_path / "c.csv") == {1: 12, 3: 1}


def test_same_timestamp_zero_dwell():
    assert compute_click_durations(session(1, [5, 5], [1, 2])).dwells == (0.0, 0.0)


def test_category_examples():
    clicks = [c(5, UNKNOWN), c(5, regular(3)), c(5, regular(3)), c(5, regular(5)),
              c(6, UNKNOWN), c(6, UNKNOWN), c(6, SPECIAL), c(7, regular(2)), c(7, regular(4))]
    assert resolve_categories(clicks) == {5: 3, 7: 2}
