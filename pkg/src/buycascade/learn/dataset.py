from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ArityMismatch, EmptyDataset


@dataclass
class LabeledDataset:
    """Feature matrix with 0/1 labels (1 = Buy) and positive row weights."""

    X: np.ndarray
    y: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.y = np.asarray(self.y, dtype=np.int8)
        if self.w is None:
            self.w = np.ones(len(self.y), dtype=np.float64)
        self.w = np.asarray(self.w, dtype=np.float64)
        if not (len(self.X) == len(self.y) == len(self.w)):
            raise ValueError("rows, labels and weights differ in length")
        if np.any(self.w <= 0):
            raise ValueError("weights must be positive")
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 (NonBuy) or 1 (Buy)")

    def __len__(self):
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def require_rows(self) -> None:
        if len(self) == 0:
            raise EmptyDataset("dataset has no rows")

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.X[idx], self.y[idx], self.w[idx])


def check_arity(X: np.ndarray, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != n_features:
        raise ArityMismatch(f"expected {n_features} features, got {X.shape[1]}")
    return X
