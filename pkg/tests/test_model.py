import pytest
from hypothesis import given, strategies as st

from buycascade.model import (
    SPECIAL,
    UNKNOWN,
    CategoryCode,
    CategoryKind,
    ClickEvent,
    Label,
    Session,
    SolutionEntry,
    session_label,
    sort_clicks,
)


def test_label_buy():
    assert session_label(Session(1, (), frozenset({214821371}))) is Label.BUY


def test_label_non_buy():
    assert session_label(Session(1, (ClickEvent(1, 0, 3),))) is Label.NON_BUY


def test_label_clickless_buy():
    assert Session(1, (), frozenset({9})).label is Label.BUY


@pytest.mark.parametrize(
    "raw, kind, value",
    [("0", CategoryKind.UNKNOWN, 0), ("1", CategoryKind.REGULAR, 1), ("12", CategoryKind.REGULAR, 12),
     ("S", CategoryKind.SPECIAL, 0), ("13", CategoryKind.BRAND, 13), ("2053951883", CategoryKind.BRAND, 2053951883)],
)
def test_category_decode(raw, kind, value):
    code = CategoryCode.decode(raw)
    assert (code.kind, code.value) == (kind, value)
    assert code.encode() == raw


def test_category_invariants():
    with pytest.raises(ValueError):
        CategoryCode(CategoryKind.REGULAR, 13)
    with pytest.raises(ValueError):
        CategoryCode(CategoryKind.BRAND, 5)
    assert CategoryCode.decode("0") is UNKNOWN and CategoryCode.decode("S") is SPECIAL


clicks_st = st.lists(
    st.builds(ClickEvent, st.just(1), st.integers(0, 50), st.integers(0, 5)), max_size=20
)


@given(clicks_st)
def test_resort_idempotent(clicks):
    once = sort_clicks(clicks)
    assert sort_clicks(once) == once
    assert [c.timestamp for c in once] == sorted(c.timestamp for c in clicks)


@given(clicks_st)
def test_stable_tie_order(clicks):
    order = sort_clicks(clicks)
    for t in {c.timestamp for c in clicks}:
        assert [c for c in order if c.timestamp == t] == [c for c in clicks if c.timestamp == t]


@given(st.lists(st.sets(st.integers(0, 3), max_size=2), max_size=30))
def test_labels_partition(bought_sets):
    sessions = [Session(k, (), frozenset(b)) for k, b in enumerate(bought_sets)]
    buys = {s.session_id for s in sessions if s.label is Label.BUY}
    non = {s.session_id for s in sessions if s.label is Label.NON_BUY}
    assert buys.isdisjoint(non) and buys | non == {s.session_id for s in sessions}


def test_solution_entry_rejects_empty():
    with pytest.raises(ValueError):
        SolutionEntry(1, frozenset())
    assert SolutionEntry(1, {2}, score=0.1) == SolutionEntry(1, frozenset({2}), score=0.9)
