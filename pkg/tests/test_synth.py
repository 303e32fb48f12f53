import pytest

from buycascade.ingest import IngestCounters, iter_buys, iter_clicks, load_sessions
from buycascade.model import CategoryKind
from buycascade.preprocess import resolve_categories
from buycascade.synth import T0_MS, WINDOW_MS, SynthParams, generate, load_truth


@pytest.fixture(scope="module")
def seven(tmp_path_factory):
    d = tmp_path_factory.mktemp("seven")
    return generate(SynthParams(n_sessions=1000, buy_fraction=0.05, seed=7), d)


def test_buy_count_binomial(seven):
    sessions = list(load_sessions(seven.clicks, seven.buys))
    assert len(sessions) == 1000
    assert 30 <= sum(1 for s in sessions if s.bought_items) <= 70


def test_unknown_category_share(seven):
    clicks = list(iter_clicks(seven.clicks))
    share = sum(1 for c in clicks if c.category.kind is CategoryKind.UNKNOWN) / len(clicks)
    assert abs(share - 0.4) < 0.05
    assert all(T0_MS <= c.timestamp for c in clicks)
    assert max(s.timestamp for s in clicks) - T0_MS < WINDOW_MS + 86_400_000


def test_zero_malformed(seven):
    counters = IngestCounters()
    list(iter_clicks(seven.clicks, "skip", counters))
    list(iter_buys(seven.buys, "skip", counters))
    assert counters.malformed == 0 and counters.rows > 0


def test_byte_identical(tmp_path, seven):
    again = generate(SynthParams(n_sessions=1000, buy_fraction=0.05, seed=7), tmp_path)
    for a, b in ((seven.clicks, again.clicks), (seven.buys, again.buys), (seven.truth, again.truth)):
        assert a.read_bytes() == b.read_bytes()
    other = generate(SynthParams(n_sessions=1000, buy_fraction=0.05, seed=8), tmp_path / "o")
    assert other.clicks.read_bytes() != seven.clicks.read_bytes()


def test_categories_recoverable(seven):
    clicks = list(iter_clicks(seven.clicks))
    truth = load_truth(seven.truth)
    cats = resolve_categories(clicks)
    post_cutoff = {c.item_id for c in clicks if c.category.kind is not CategoryKind.UNKNOWN}
    assert post_cutoff
    assert all(cats[i] == truth[i] for i in post_cutoff)


def test_params_validated():
    with pytest.raises(ValueError):
        SynthParams(buy_fraction=1.5)
    with pytest.raises(ValueError):
        SynthParams(n_sessions=0)
    with pytest.raises(ValueError):
        SynthParams(n_categories=13)
