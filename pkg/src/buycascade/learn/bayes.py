"""Gaussian naive Bayes, kept as the comparison baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, check_arity

VAR_FLOOR = 1e-9


@dataclass
class NaiveBayes:
    log_prior: np.ndarray  # (2,)
    mean: np.ndarray  # (2, F)
    var: np.ndarray  # (2, F)
    cutoff: float = 0.5

    @property
    def n_features(self) -> int:
        return self.mean.shape[1]

    def to_dict(self) -> dict:
        return {
            "log_prior": self.log_prior.tolist(),
            "mean": self.mean.tolist(),
            "var": self.var.tolist(),
            "cutoff": self.cutoff,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NaiveBayes":
        return cls(
            np.array(d["log_prior"], dtype=np.float64),
            np.array(d["mean"], dtype=np.float64),
            np.array(d["var"], dtype=np.float64),
            float(d["cutoff"]),
        )


def train_naive_bayes(d: LabeledDataset) -> NaiveBayes:
    d.require_rows()
    F = d.n_features
    mean = np.zeros((2, F))
    var = np.full((2, F), VAR_FLOOR)
    prior = np.zeros(2)
    for c in (0, 1):
        rows = d.y == c
        wc = d.w[rows]
        prior[c] = wc.sum()
        if not rows.any():
            continue
        mean[c] = np.average(d.X[rows], axis=0, weights=wc)
        var[c] = np.maximum(np.average((d.X[rows] - mean[c]) ** 2, axis=0, weights=wc), VAR_FLOOR)
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior / prior.sum())
    return NaiveBayes(log_prior, mean, var)


def _log_joint(m: NaiveBayes, X) -> np.ndarray:
    X = check_arity(X, m.n_features)
    out = np.empty((len(X), 2))
    for c in (0, 1):
        ll = -0.5 * (np.log(2 * np.pi * m.var[c]) + (X - m.mean[c]) ** 2 / m.var[c])
        out[:, c] = m.log_prior[c] + ll.sum(axis=1)
    return out


def naive_bayes_scores(m: NaiveBayes, X) -> np.ndarray:
    """Posterior P(Buy | x)."""
    lj = _log_joint(m, X)
    top = lj.max(axis=1, keepdims=True)
    p = np.exp(lj - top)
    return p[:, 1] / p.sum(axis=1)


def predict_naive_bayes(m: NaiveBayes, X, cutoff: float | None = None):
    scores = naive_bayes_scores(m, X)
    cut = m.cutoff if cutoff is None else cutoff
    return (scores >= cut).astype(np.int8), scores
