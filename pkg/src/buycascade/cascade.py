"""Two-stage purchase prediction: a session classifier gates an item classifier."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import chain
from typing import Iterable, Sequence

import numpy as np

from .config import CascadeConfig
from .errors import ArityMismatch, DuplicateSession, InsufficientData, MalformedSolution, ModelFormatError
from .features import (
    FeatureMask,
    SessionThresholds,
    extract_session_features,
    get_mask,
    mask_matrix,
    recompute_thresholds,
    session_item_features,
    to_matrix,
)
from .learn import (
    BoostedEnsemble,
    BoostParams,
    Forest,
    ForestParams,
    LabeledDataset,
    adaboost_scores,
    forest_scores,
    model_from_dict,
    model_to_dict,
    NaiveBayes,
    naive_bayes_scores,
    resample,
    train_adaboost_m1,
    train_forest,
    train_naive_bayes,
)
from .learn.heuristic import heuristic_from_ratios, mean_ratio
from .learn.serialize import dump_document, load_document
from .model import Session, SolutionEntry
from .preprocess import CategoryMap, ItemStats, ItemStatsTable, compute_item_stats, resolve_categories

log = logging.getLogger(__name__)

MAX_SOLUTION_BYTES = 25 * 2**20

SESSION_STAGES = ("adaboost", "naive_bayes", "forest", "heuristic", "always")
ITEM_STAGES = ("forest", "naive_bayes", "heuristic", "all")


@dataclass
class CascadeModel:
    config: CascadeConfig
    stats: ItemStatsTable
    cats: CategoryMap
    thresholds: SessionThresholds
    session_classifier: object | None = None
    item_classifier: object | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def mask(self) -> FeatureMask:
        return get_mask(self.config.session_mask)


def _session_matrix(sessions: Sequence[Session], stats, thresholds) -> tuple[np.ndarray, np.ndarray]:
    return to_matrix([extract_session_features(s, stats, thresholds) for s in sessions])


def _learner_scores(model, X: np.ndarray) -> np.ndarray:
    if isinstance(model, BoostedEnsemble):
        return adaboost_scores(model, X)
    if isinstance(model, Forest):
        return forest_scores(model, X)
    if isinstance(model, NaiveBayes):
        return naive_bayes_scores(model, X)
    raise TypeError(f"not a learner: {type(model).__name__}")


def train_session_classifier(X: np.ndarray, y: np.ndarray, config: CascadeConfig):
    d = LabeledDataset(X, y)
    if config.session_stage in ("heuristic", "always"):
        return None
    if config.resample:
        size = config.resample_size or min(len(d), 2_000_000)
        d = resample(d, config.resample_fraction, size, config.seed)
    if config.session_stage == "adaboost":
        e = train_adaboost_m1(d, BoostParams(config.boost_rounds, config.stump_depth, 1, config.seed))
        e.cutoff = config.session_cutoff
        return e
    if config.session_stage == "naive_bayes":
        m = train_naive_bayes(d)
        m.cutoff = config.session_cutoff
        return m
    if config.session_stage == "forest":
        f = train_forest(d, _forest_params(config))
        f.cutoff = config.session_cutoff
        return f
    raise ValueError(f"unknown session stage {config.session_stage!r}")


def _forest_params(config: CascadeConfig) -> ForestParams:
    return ForestParams(
        config.n_trees,
        config.forest_max_depth or None,
        config.forest_min_leaf,
        config.feature_subset_size or None,
        config.seed,
        config.threads,
    )


def train_item_classifier(X: np.ndarray, y: np.ndarray, config: CascadeConfig):
    if config.item_stage in ("heuristic", "all"):
        return None
    d = LabeledDataset(X, y)
    if config.item_stage == "forest":
        f = train_forest(d, _forest_params(config))
        f.cutoff = config.item_cutoff
        return f
    if config.item_stage == "naive_bayes":
        m = train_naive_bayes(d)
        m.cutoff = config.item_cutoff
        return m
    raise ValueError(f"unknown item stage {config.item_stage!r}")


def train_cascade(
    train_sessions: Iterable[Session],
    config: CascadeConfig = CascadeConfig(),
    extra_category_clicks: Iterable = (),
) -> CascadeModel:
    """Fit statistics, categories and both classifiers on labeled sessions.

    ``extra_category_clicks`` (e.g. test clicks) only feed category
    resolution; item statistics never see them.
    """
    if config.session_stage not in SESSION_STAGES:
        raise ValueError(f"unknown session stage {config.session_stage!r}")
    if config.item_stage not in ITEM_STAGES:
        raise ValueError(f"unknown item stage {config.item_stage!r}")
    sessions = list(train_sessions)
    clicked = [s for s in sessions if s.clicks]
    buy_sessions = [s for s in clicked if s.bought_items]
    if not buy_sessions:
        raise InsufficientData("no buy session with clicks in the training data")

    t0 = time.perf_counter()
    cats = resolve_categories(chain((c for s in sessions for c in s.clicks), extra_category_clicks))
    stats = compute_item_stats(sessions, config.ratio_direction)
    thresholds = (
        recompute_thresholds(stats)
        if config.recompute_thresholds
        else SessionThresholds(config.ratio_threshold, config.buy_count_threshold)
    )
    model = CascadeModel(config, stats, cats, thresholds)
    model.timings["preprocess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    vectors = [v for s in buy_sessions for v in session_item_features(s, stats, cats)]
    Xi, yi = to_matrix(vectors)
    model.item_classifier = train_item_classifier(Xi, yi, config)
    model.timings["item_stage"] = time.perf_counter() - t0
    log.info("item stage: %d rows (%d bought)", len(yi), int(yi.sum()))

    t0 = time.perf_counter()
    if config.session_stage not in ("heuristic", "always"):
        Xs, ys = _session_matrix(clicked, stats, thresholds)
        model.session_classifier = train_session_classifier(mask_matrix(Xs, model.mask), ys, config)
    model.timings["session_stage"] = time.perf_counter() - t0
    return model


def score_sessions(model: CascadeModel, sessions: Sequence[Session]) -> tuple[np.ndarray, np.ndarray]:
    """(is_buy, score) per session from the first stage."""
    stage = model.config.session_stage
    if stage == "always":
        ones = np.ones(len(sessions))
        return ones.astype(bool), ones
    if stage == "heuristic":
        scores = np.array([mean_ratio(s, model.stats) for s in sessions])
        return scores > model.config.heuristic_threshold, scores
    if not len(sessions):
        return np.zeros(0, dtype=bool), np.zeros(0)
    X, _ = _session_matrix(sessions, model.stats, model.thresholds)
    mask = model.mask
    n_expected = getattr(model.session_classifier, "n_features", len(mask.indices))
    if len(mask.indices) != n_expected:
        raise ArityMismatch(
            f"mask {mask.name!r} selects {len(mask.indices)} features, model expects {n_expected}"
        )
    scores = _learner_scores(model.session_classifier, mask_matrix(X, mask))
    return scores >= model.config.session_cutoff, scores


def predict_items(model: CascadeModel, sessions: Sequence[Session], scores=None) -> list[SolutionEntry]:
    """Second stage only: an item set for every given session."""
    if scores is None:
        scores = np.ones(len(sessions))
    stage = model.config.item_stage
    out = []
    if stage in ("all", "heuristic"):
        for s, sc in zip(sessions, scores):
            items = s.distinct_items()
            if stage == "heuristic":
                ratios = {i: model.stats.get(i).ratio for i in items}
                items = heuristic_from_ratios(ratios, float("-inf"))[1]
            out.append(SolutionEntry(s.session_id, frozenset(items), float(sc)))
        return out
    per_session = [session_item_features(s, model.stats, model.cats) for s in sessions]
    flat = [v for vs in per_session for v in vs]
    if not flat:
        return out
    X, _ = to_matrix(flat)
    item_scores = _learner_scores(model.item_classifier, X)
    cutoff = model.config.item_cutoff
    k = 0
    for s, vs, sc in zip(sessions, per_session, scores):
        if not vs:
            continue
        block = item_scores[k : k + len(vs)]
        k += len(vs)
        chosen = [v.item_id for v, p in zip(vs, block) if p >= cutoff]
        if not chosen:
            chosen = [vs[int(np.argmax(block))].item_id]
        out.append(SolutionEntry(s.session_id, frozenset(chosen), float(sc)))
    return out


def predict(model: CascadeModel, test_sessions: Iterable[Session]) -> list[SolutionEntry]:
    """Sessions judged Buy, each with its predicted item set.

    When the item stage rejects every item of a Buy session, its single
    highest-scoring item is kept. Sessions without clicks are skipped.
    """
    sessions = [s for s in test_sessions if s.clicks]
    is_buy, scores = score_sessions(model, sessions)
    chosen = [s for s, b in zip(sessions, is_buy) if b]
    return predict_items(model, chosen, scores[is_buy])


# -- solution files -----------------------------------------------------------


def format_entry(e: SolutionEntry) -> str:
    return f"{e.session_id};{','.join(str(i) for i in sorted(e.items))}\n"


@dataclass(frozen=True)
class EmitReport:
    written: int
    dropped: int
    bytes: int


def emit_solution(entries: Iterable[SolutionEntry], path, max_bytes: int = MAX_SOLUTION_BYTES) -> EmitReport:
    """Write ``sessionId;item,item,...`` lines in ascending session order.

    If the file would exceed ``max_bytes``, the lowest-scoring sessions are
    dropped until it fits.
    """
    entries = list(entries)
    lines = {e.session_id: format_entry(e).encode("ascii") for e in entries}
    total = sum(len(b) for b in lines.values())
    dropped = set()
    if total > max_bytes:
        for e in sorted(entries, key=lambda e: (e.score, -e.session_id)):
            if total <= max_bytes:
                break
            dropped.add(e.session_id)
            total -= len(lines[e.session_id])
    with open(path, "wb") as fh:
        for sid in sorted(lines):
            if sid not in dropped:
                fh.write(lines[sid])
    return EmitReport(len(lines) - len(dropped), len(dropped), total)


def parse_solution(path) -> list[SolutionEntry]:
    out = []
    seen = set()
    with open(path, encoding="ascii") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            sid, sep, items = line.partition(";")
            try:
                if not sep or not items:
                    raise ValueError("missing item list")
                entry = SolutionEntry(int(sid), frozenset(int(i) for i in items.split(",")))
            except ValueError as exc:
                raise MalformedSolution(f"{path}:{n}: {exc}") from None
            if entry.session_id in seen:
                raise DuplicateSession(f"{path}:{n}: session {entry.session_id} repeated")
            seen.add(entry.session_id)
            out.append(entry)
    return out


# -- model files --------------------------------------------------------------


def save_cascade(model: CascadeModel, path) -> None:
    stats = model.stats
    dump_document(
        {
            "kind": "cascade",
            "config": model.config.to_mapping(),
            "thresholds": [model.thresholds.ratio, model.thresholds.buy_count],
            "ratio_direction": stats.ratio_direction,
            "stats": [
                [i, st.click_count, st.buy_count, st.ratio, st.price, st.global_duration, st.observation_span]
                for i, st in sorted(stats.items.items())
            ],
            "categories": sorted(model.cats.items()),
            "session_classifier": None
            if model.session_classifier is None
            else model_to_dict(model.session_classifier),
            "item_classifier": None if model.item_classifier is None else model_to_dict(model.item_classifier),
            "timings": model.timings,
        },
        path,
    )


def load_cascade(path) -> CascadeModel:
    doc = load_document(path)
    if doc.get("kind") != "cascade":
        raise ModelFormatError(f"{path}: not a cascade model")
    stats = ItemStatsTable(
        {int(r[0]): ItemStats(int(r[1]), int(r[2]), *map(float, r[3:])) for r in doc["stats"]},
        doc["ratio_direction"],
    )
    sc, ic = doc["session_classifier"], doc["item_classifier"]
    return CascadeModel(
        CascadeConfig.from_mapping(doc["config"]),
        stats,
        CategoryMap((int(i), int(c)) for i, c in doc["categories"]),
        SessionThresholds(*doc["thresholds"]),
        None if sc is None else model_from_dict(sc),
        None if ic is None else model_from_dict(ic),
        dict(doc.get("timings", {})),
    )
