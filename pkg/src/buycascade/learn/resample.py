from __future__ import annotations

import math

import numpy as np

from ..errors import MissingClass
from .dataset import LabeledDataset


def resample_indices(y, target_positive_fraction: float, output_size: int, seed: int = 0) -> np.ndarray:
    """Row indices drawn with replacement inside each class.

    ``floor(output_size * p)`` rows come from the Buy class and the rest from
    NonBuy; the result is ordered positives first.
    """
    if not 0.0 <= target_positive_fraction <= 1.0:
        raise ValueError("target_positive_fraction must be in [0, 1]")
    y = np.asarray(y)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    n_pos = math.floor(output_size * target_positive_fraction)
    n_neg = output_size - n_pos
    if (n_pos and not len(pos)) or (n_neg and not len(neg)):
        raise MissingClass("resampling needs rows of every requested class")
    rng = np.random.default_rng(seed)
    parts = [rng.choice(pos, n_pos) if n_pos else pos[:0], rng.choice(neg, n_neg) if n_neg else neg[:0]]
    return np.concatenate(parts)


def resample(
    d: LabeledDataset, target_positive_fraction: float = 0.5, output_size: int | None = None, seed: int = 0
) -> LabeledDataset:
    d.require_rows()
    if output_size is None:
        output_size = min(len(d), 2_000_000)
    idx = resample_indices(d.y, target_positive_fraction, output_size, seed)
    return LabeledDataset(d.X[idx], d.y[idx])
