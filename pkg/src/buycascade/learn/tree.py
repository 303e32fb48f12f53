"""Weighted CART classification tree (Gini impurity, binary splits)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, check_arity

LEAF = -1


@dataclass(frozen=True)
class TreeParams:
    max_depth: int | None = None
    min_leaf: int = 1
    feature_subset_size: int = 0  # 0 -> all features
    seed: int = 0


@dataclass
class Tree:
    """Flat array tree. Node 0 is the root; ``feature == -1`` marks a leaf.

    ``value[k]`` is the (P(NonBuy), P(Buy)) distribution at node k.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for k in range(self.node_count):
            if self.feature[k] != LEAF:
                depth[self.left[k]] = depth[self.right[k]] = depth[k] + 1
        return int(depth.max())

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["value"], dtype=np.float64).reshape(-1, 2),
            int(d["n_features"]),
        )

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.n_features == other.n_features and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("feature", "threshold", "left", "right", "value")
        )


def _best_split(x, w, w1, min_leaf):
    """Best threshold on one feature column; returns (impurity, threshold) or None.

    Impurity is the weighted Gini sum of both children,
    ``2 * w1 * w0 / w`` per child.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cw = np.cumsum(w[order])
    cw1 = np.cumsum(w1[order])
    n = len(xs)
    lo, hi = min_leaf - 1, n - min_leaf  # split after position k, k in [lo, hi)
    if hi <= lo:
        return None
    k = np.arange(lo, hi)
    k = k[xs[k] < xs[k + 1]]
    if not len(k):
        return None
    W, W1 = cw[-1], cw1[-1]
    wl, wl1 = cw[k], cw1[k]
    wr, wr1 = W - wl, W1 - wl1
    with np.errstate(divide="ignore", invalid="ignore"):
        imp = np.where(wl > 0, 2 * wl1 * (wl - wl1) / wl, 0.0) + np.where(
            wr > 0, 2 * wr1 * (wr - wr1) / wr, 0.0
        )
    j = int(np.argmin(imp))
    a, b = xs[k[j]], xs[k[j] + 1]
    thr = a + (b - a) / 2.0
    if not a <= thr < b:
        thr = a
    return float(imp[j]), float(thr)


def train_tree(d: LabeledDataset, params: TreeParams = TreeParams()) -> Tree:
    d.require_rows()
    rng = np.random.default_rng(params.seed)
    X, y, w = d.X, d.y, d.w
    n_features = d.n_features
    k_features = params.feature_subset_size or n_features
    k_features = min(k_features, n_features)
    min_leaf = max(1, params.min_leaf)
    wy = w * y

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        W = w[idx].sum()
        p1 = wy[idx].sum() / W
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append((1.0 - p1, p1))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        p1 = value[node][1]
        if p1 == 0.0 or p1 == 1.0:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        if len(idx) < 2 * min_leaf:
            continue
        wn, w1n = w[idx], wy[idx]
        best = None
        candidates = rng.permutation(n_features)
        for pos, f in enumerate(candidates):
            if pos >= k_features and best is not None:
                break
            found = _best_split(X[idx, f], wn, w1n, min_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], found[1], int(f))
        if best is None:
            continue
        _, thr, f = best
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64).reshape(-1, 2),
        n_features,
    )


def apply_tree(t: Tree, X: np.ndarray) -> np.ndarray:
    """Leaf index reached by each row (x[f] <= threshold goes left)."""
    X = check_arity(X, t.n_features)
    node = np.zeros(len(X), dtype=np.int64)
    rows = np.arange(len(X))
    active = t.feature[node] != LEAF
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, t.feature[nd]] <= t.threshold[nd]
        node[r] = np.where(go_left, t.left[nd], t.right[nd])
        active = t.feature[node] != LEAF
    return node


def predict_tree(t: Tree, X: np.ndarray) -> np.ndarray:
    """Class distribution per row, shape (n, 2): [P(NonBuy), P(Buy)]."""
    return t.value[apply_tree(t, X)]


def predict_tree_labels(t: Tree, X: np.ndarray) -> np.ndarray:
    return (predict_tree(t, X)[:, 1] >= 0.5).astype(np.int8)
