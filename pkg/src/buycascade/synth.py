"""Seeded synthetic clickstream generator writing the ingest file formats.

Sessions start uniformly over a six-month window and are numbered in time
order. Item draws follow a Zipf law. Before the missing-category cutoff every
click carries category 0. Afterwards clicks carry the item's true category;
special/brand codes only appear once an item has shown its true category at
least once, so every item seen after the cutoff is recoverable.

Purchases follow a logistic propensity in standardized session covariates
(mean log item popularity, log session duration, repeat clicks, mean item
appeal), with the intercept calibrated so the expected buy rate equals
``buy_fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import format_timestamp

T0_MS = 1396310400000  # 2014-04-01T00:00:00.000Z
WINDOW_MS = 183 * 86_400_000
ITEM_ID_BASE = 214_500_000
BRAND_BASE = 2_000_000_000


@dataclass(frozen=True)
class PropensityWeights:
    popularity: float = 2.0
    dwell: float = 0.8
    repeat: float = 0.8
    appeal: float = 1.2
    # item level, inside buy sessions
    item_appeal: float = 1.5
    item_dwell: float = 0.8
    item_repeat: float = 0.7
    item_intercept: float = -0.5


@dataclass(frozen=True)
class SynthParams:
    n_sessions: int = 1000
    buy_fraction: float = 0.05
    n_items: int = 2000
    n_categories: int = 12
    zipf_exponent: float = 0.8
    mean_clicks_per_session: float = 4.0
    missing_category_cutoff: float = 0.4
    repeat_probability: float = 0.3
    special_fraction: float = 0.05
    brand_fraction: float = 0.05
    missing_price_fraction: float = 0.05
    weights: PropensityWeights = PropensityWeights()
    seed: int = 0

    def __post_init__(self):
        for name in ("buy_fraction", "missing_category_cutoff", "repeat_probability",
                     "special_fraction", "brand_fraction", "missing_price_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.n_sessions < 1 or self.n_items < 1:
            raise ValueError("n_sessions and n_items must be >= 1")
        if not 1 <= self.n_categories <= 12:
            raise ValueError("n_categories must be in 1..12")
        if self.mean_clicks_per_session < 1:
            raise ValueError("mean_clicks_per_session must be >= 1")


@dataclass(frozen=True)
class SynthFiles:
    clicks: Path
    buys: Path
    truth: Path


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _zscore(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else np.zeros_like(x)


def _calibrate_intercept(z: np.ndarray, target: float) -> float:
    """Intercept b with mean(sigmoid(b + z)) == target (bisection)."""
    if target <= 0.0:
        return -np.inf
    if target >= 1.0:
        return np.inf
    lo, hi = -50.0, 50.0
    for _ in range(100):
        mid = (lo + hi) / 2
        if _sigmoid(mid + z).mean() < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def generate(params: SynthParams, out_dir, prefix: str = "") -> SynthFiles:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(params.seed)
    w = params.weights
    n_items = params.n_items

    # items: popularity by Zipf rank, random id order
    ranks = np.arange(1, n_items + 1, dtype=np.float64)
    popularity = ranks ** -params.zipf_exponent
    popularity /= popularity.sum()
    item_ids = ITEM_ID_BASE + rng.permutation(n_items)
    true_cat = rng.integers(1, params.n_categories + 1, size=n_items)
    appeal = rng.normal(size=n_items)
    price = np.round(np.exp(rng.normal(6.5, 1.0, size=n_items))).astype(np.int64) + 1
    log_pop = np.log(popularity)

    # sessions in time order
    n = params.n_sessions
    starts = np.sort(rng.integers(0, WINDOW_MS, size=n)) + T0_MS
    cutoff_ms = T0_MS + int(params.missing_category_cutoff * WINDOW_MS)
    n_clicks = 1 + rng.poisson(params.mean_clicks_per_session - 1, size=n)
    interest = rng.normal(size=n)

    sessions = []  # (items per click, timestamps)
    for k in range(n):
        m = int(n_clicks[k])
        fresh = rng.choice(n_items, size=m, p=popularity)
        seq = [int(fresh[0])]
        for j in range(1, m):
            if rng.random() < params.repeat_probability:
                seq.append(seq[int(rng.integers(0, len(seq)))])
            else:
                seq.append(int(fresh[j]))
        seq = np.array(seq)
        gaps = rng.exponential(40_000.0 * math.exp(0.5 * interest[k]), size=m) * np.exp(0.3 * appeal[seq])
        ts = starts[k] + np.concatenate([[0], np.cumsum(gaps[:-1])]).astype(np.int64)
        sessions.append((seq, ts))

    # session propensity
    mean_pop = np.array([log_pop[np.unique(seq)].mean() for seq, _ in sessions])
    log_dur = np.array([math.log1p((ts[-1] - ts[0]) / 1000.0) for _, ts in sessions])
    repeats = np.array([len(seq) - len(np.unique(seq)) for seq, _ in sessions], dtype=np.float64)
    mean_appeal = np.array([appeal[np.unique(seq)].mean() for seq, _ in sessions])
    z = (
        w.popularity * _zscore(mean_pop)
        + w.dwell * _zscore(log_dur)
        + w.repeat * _zscore(repeats)
        + w.appeal * _zscore(mean_appeal)
    )
    p_buy = _sigmoid(_calibrate_intercept(z, params.buy_fraction) + z)
    is_buy = rng.random(n) < p_buy

    revealed = np.zeros(n_items, dtype=bool)
    click_path = out_dir / f"{prefix}clicks.dat"
    buy_path = out_dir / f"{prefix}buys.dat"
    truth_path = out_dir / f"{prefix}items_truth.csv"
    with open(click_path, "w", newline="\n") as cf, open(buy_path, "w", newline="\n") as bf:
        for k, (seq, ts) in enumerate(sessions):
            sid = k + 1
            for item, t in zip(seq, ts):
                if t < cutoff_ms:
                    cat = "0"
                elif revealed[item]:
                    u = rng.random()
                    if u < params.special_fraction:
                        cat = "S"
                    elif u < params.special_fraction + params.brand_fraction:
                        cat = str(BRAND_BASE + int(rng.integers(0, 10_000)))
                    else:
                        cat = str(true_cat[item])
                else:
                    cat = str(true_cat[item])
                    revealed[item] = True
                cf.write(f"{sid},{format_timestamp(int(t))},{item_ids[item]},{cat}\n")
            if not is_buy[k]:
                continue
            distinct, counts = np.unique(seq, return_counts=True)
            dwell = np.zeros(len(distinct))
            click_dwell = np.append(np.diff(ts), 0) / 1000.0
            for j, item in enumerate(seq):
                dwell[np.searchsorted(distinct, item)] += click_dwell[j]
            logit = (
                w.item_intercept
                + w.item_appeal * appeal[distinct]
                + w.item_dwell * _zscore(np.log1p(dwell))
                + w.item_repeat * (counts > 1)
            )
            bought = rng.random(len(distinct)) < _sigmoid(logit)
            if not bought.any():
                bought[int(np.argmax(logit))] = True
            t_buy = int(ts[-1])
            for item in distinct[bought]:
                t_buy += int(rng.integers(1_000, 120_000))
                p = 0 if rng.random() < params.missing_price_fraction else int(price[item])
                q = 1 + int(rng.poisson(0.3))
                bf.write(f"{sid},{format_timestamp(t_buy)},{item_ids[item]},{p},{q}\n")

    with open(truth_path, "w", newline="\n") as tf:
        tf.write("itemId,trueCategory\n")
        for k in np.argsort(item_ids):
            tf.write(f"{item_ids[k]},{true_cat[k]}\n")
    return SynthFiles(click_path, buy_path, truth_path)


def load_truth(path) -> dict[int, int]:
    out = {}
    with open(path) as fh:
        next(fh)
        for line in fh:
            item, cat = line.strip().split(",")
            out[int(item)] = int(cat)
    return out
