"""AdaBoost.M1 over weighted decision trees (stumps by default)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateWeights, MissingClass
from .dataset import LabeledDataset, check_arity
from .tree import Tree, TreeParams, predict_tree_labels, train_tree

MIN_ERROR = 1e-10


@dataclass(frozen=True)
class BoostParams:
    rounds: int = 10
    max_depth: int = 1
    min_leaf: int = 1
    seed: int = 0


@dataclass
class BoostedEnsemble:
    learners: list[Tree]
    alphas: list[float]
    n_features: int
    cutoff: float = 0.5
    # training trace, not needed for prediction
    errors: list[float] = field(default_factory=list)
    weight_sums: list[float] = field(default_factory=list)
    stop_reason: str = "rounds"

    def to_dict(self) -> dict:
        return {
            "learners": [t.to_dict() for t in self.learners],
            "alphas": list(self.alphas),
            "n_features": self.n_features,
            "cutoff": self.cutoff,
            "errors": list(self.errors),
            "stop_reason": self.stop_reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostedEnsemble":
        return cls(
            [Tree.from_dict(t) for t in d["learners"]],
            [float(a) for a in d["alphas"]],
            int(d["n_features"]),
            float(d["cutoff"]),
            [float(e) for e in d.get("errors", [])],
            stop_reason=d.get("stop_reason", "rounds"),
        )


def train_adaboost_m1(d: LabeledDataset, params: BoostParams = BoostParams()) -> BoostedEnsemble:
    """AdaBoost.M1 with reweighting.

    Each round fits a weak learner to the current weights, takes its weighted
    error ``eps`` and weight ``alpha = ln((1 - eps) / eps)``, multiplies the
    weights of misclassified rows by ``exp(alpha)`` and renormalizes.
    Training stops early once ``eps >= 0.5`` or ``eps == 0``. A perfect round is
    kept with ``eps`` clamped to ``MIN_ERROR``. If the very first round already
    has ``eps >= 0.5`` its learner is kept with alpha 1, so the ensemble always
    has at least one member.
    """
    if len(d) < 2 or len(np.unique(d.y)) < 2:
        raise MissingClass("AdaBoost.M1 needs at least two rows of both classes")
    w = d.w / d.w.sum()
    tp = TreeParams(params.max_depth, params.min_leaf, 0, params.seed)
    ens = BoostedEnsemble([], [], d.n_features)
    for _ in range(params.rounds):
        t = train_tree(LabeledDataset(d.X, d.y, w), tp)
        miss = predict_tree_labels(t, d.X) != d.y
        eps = float(w[miss].sum())
        ens.errors.append(eps)
        if eps >= 0.5:
            if not ens.learners:
                ens.learners.append(t)
                ens.alphas.append(1.0)
            ens.stop_reason = "error>=0.5"
            break
        if eps <= 0.0:
            ens.learners.append(t)
            ens.alphas.append(math.log((1 - MIN_ERROR) / MIN_ERROR))
            ens.stop_reason = "error==0"
            break
        alpha = math.log((1 - eps) / eps)
        ens.learners.append(t)
        ens.alphas.append(alpha)
        w = np.where(miss, w * math.exp(alpha), w)
        total = w.sum()
        if not np.isfinite(total) or total <= 0 or np.any(w <= 0):
            raise DegenerateWeights(f"weight normalization failed (sum={total})")
        w = w / total
        ens.weight_sums.append(float(w.sum()))
    return ens


def adaboost_scores(e: BoostedEnsemble, X) -> np.ndarray:
    """Share of alpha mass voting Buy, in [0, 1]."""
    if not e.learners:
        raise ValueError("empty ensemble")
    X = check_arity(X, e.n_features)
    votes = np.zeros(len(X))
    for t, a in zip(e.learners, e.alphas):
        votes += a * predict_tree_labels(t, X)
    return votes / sum(e.alphas)


def predict_adaboost(e: BoostedEnsemble, X, cutoff: float | None = None):
    scores = adaboost_scores(e, X)
    cut = e.cutoff if cutoff is None else cutoff
    return (scores >= cut).astype(np.int8), scores


def training_error_bound(errors) -> float:
    """exp(-2 * sum(gamma_t^2)) with edge gamma_t = 0.5 - eps_t."""
    return math.exp(-2.0 * sum((0.5 - e) ** 2 for e in errors))
