import pytest

from buycascade.ingest import load_sessions, parse_timestamp
from buycascade.model import BuyEvent, ClickEvent, Session, regular, UNKNOWN
from buycascade.preprocess import CategoryMap, ItemStats, ItemStatsTable
from buycascade.synth import SynthParams, generate

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<4} {'PASS' if ok else 'FAIL'}  {detail}")


def ts(text):
    return parse_timestamp(text)


@pytest.fixture
def session100():
    """Three clicks on Sunday 2014-06-01 (UTC); item 5 bought."""
    clicks = (
        ClickEvent(100, ts("2014-06-01T10:00:00.000Z"), 5, UNKNOWN),
        ClickEvent(100, ts("2014-06-01T10:00:10.000Z"), 7, regular(3)),
        ClickEvent(100, ts("2014-06-01T10:00:25.000Z"), 5, regular(3)),
    )
    buys = (BuyEvent(100, ts("2014-06-01T10:01:00.000Z"), 5, 100, 1),)
    return Session.build(100, clicks, buys)


@pytest.fixture
def stats100():
    return ItemStatsTable(
        {
            5: ItemStats(11, 2, 5.5, 100.0, 500.0, 1000.0),
            7: ItemStats(5, 10, 0.5, 50.0, 200.0, 3000.0),
        }
    )


@pytest.fixture
def cats100():
    return CategoryMap({5: 3, 7: 3})


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """3000-session synthetic corpus, assembled."""
    d = tmp_path_factory.mktemp("small")
    files = generate(SynthParams(n_sessions=3000, n_items=4000, seed=11), d)
    return files, list(load_sessions(files.clicks, files.buys))
