"""Random forest: bootstrap-sampled CART trees with per-node feature subsets."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset, check_arity
from .tree import Tree, TreeParams, predict_tree, train_tree


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    feature_subset_size: int | None = None  # None -> floor(sqrt(F))
    seed: int = 0
    threads: int = 1


@dataclass
class Forest:
    trees: list[Tree]
    feature_subset_size: int
    seed: int
    cutoff: float = 0.5
    n_features: int = field(init=False)

    def __post_init__(self):
        if not self.trees:
            raise ValueError("forest needs at least one tree")
        self.n_features = self.trees[0].n_features

    def to_dict(self) -> dict:
        return {
            "feature_subset_size": self.feature_subset_size,
            "seed": self.seed,
            "cutoff": self.cutoff,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Forest":
        return cls([Tree.from_dict(t) for t in d["trees"]], d["feature_subset_size"], d["seed"], d["cutoff"])


def _grow(d: LabeledDataset, params: ForestParams, k: int, seed_seq) -> Tree:
    boot_seed, tree_seed = seed_seq.generate_state(2)
    rng = np.random.default_rng(boot_seed)
    idx = rng.integers(0, len(d), size=len(d))
    tp = TreeParams(params.max_depth, params.min_leaf, k, int(tree_seed))
    return train_tree(d.subset(idx), tp)


def train_forest(d: LabeledDataset, params: ForestParams = ForestParams()) -> Forest:
    d.require_rows()
    k = params.feature_subset_size
    if k is None:
        k = max(1, math.isqrt(d.n_features))
    # one child seed per tree, so results do not depend on thread scheduling
    children = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    if params.threads > 1:
        with ThreadPoolExecutor(params.threads) as ex:
            trees = list(ex.map(lambda s: _grow(d, params, k, s), children))
    else:
        trees = [_grow(d, params, k, s) for s in children]
    return Forest(trees, k, params.seed)


def forest_scores(f: Forest, X) -> np.ndarray:
    """Mean P(Buy) over the trees."""
    X = check_arity(X, f.n_features)
    total = np.zeros(len(X))
    for t in f.trees:
        total += predict_tree(t, X)[:, 1]
    return total / len(f.trees)


def predict_forest(f: Forest, X, cutoff: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores); Buy iff score >= cutoff."""
    scores = forest_scores(f, X)
    cut = f.cutoff if cutoff is None else cutoff
    return (scores >= cut).astype(np.int8), scores
