"""Single regression tree, the building block for forests and boosting.

One engine covers both criteria: a split on (gradient, hessian) statistics
with leaf weight -G/(H+lambda).  Plain variance-reduction fitting is the
special case g = -w*y, h = w (leaf = weighted mean), lambda = gamma = 0.
Candidate thresholds are midpoints between consecutive distinct sorted
values; ties break toward the lower feature index, then lower threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TreeError(Exception):
    pass


@dataclass
class RegressionTree:
    feature: list[int] = field(default_factory=list)    # -1 marks a leaf
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)
    max_depth: int | None = None
    min_samples_leaf: int = 1
    feature_indices: list[int] | None = None  # forest subset, None = all

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise TreeError("expected a 2-d feature matrix")
        if self.feature_indices is not None:
            X = X[:, self.feature_indices]
        out = np.empty(X.shape[0])
        # Frontier walk: route whole index blocks per node instead of per row.
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if self.feature[node] < 0:
                out[idx] = self.value[node]
                continue
            goes_left = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[goes_left]))
            stack.append((self.right[node], idx[~goes_left]))
        return out

    def predict_slow(self, X: np.ndarray) -> np.ndarray:
        """Row-at-a-time root-to-leaf walk; the independent oracle for tests."""
        X = np.asarray(X, dtype=float)
        if self.feature_indices is not None:
            X = X[:, self.feature_indices]
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            node = 0
            while self.feature[node] >= 0:
                if row[self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[i] = self.value[node]
        return out

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "feature_indices": self.feature_indices,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(**d)


def _best_split(X, g, h, lam, gamma, min_leaf):
    """Return (gain, feature, threshold) of the best candidate, or None."""
    n = X.shape[0]
    G, H = g.sum(), h.sum()
    parent = G * G / (H + lam)
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        distinct = np.nonzero(xs[:-1] < xs[1:])[0]  # split after position k
        if distinct.size == 0:
            continue
        GL = np.cumsum(g[order])[distinct]
        HL = np.cumsum(h[order])[distinct]
        counts = distinct + 1
        valid = (counts >= min_leaf) & (n - counts >= min_leaf)
        if not valid.any():
            continue
        GR, HR = G - GL, H - HL
        gains = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent) - gamma
        gains = np.where(valid, gains, -np.inf)
        k = int(np.argmax(gains))  # first max = lowest threshold
        gain = float(gains[k])
        # Strict > keeps the lower feature index on exact gain ties.
        if best is None or gain > best[0]:
            pos = distinct[k]
            best = (gain, j, float((xs[pos] + xs[pos + 1]) / 2.0))
    if best is None:
        return None
    # Guard against fp noise masquerading as gain on constant targets.
    if best[0] <= 1e-12 * (abs(parent) + 1.0):
        return None
    return best


def fit_tree_gradients(
    X: np.ndarray,
    gradients: np.ndarray,
    hessians: np.ndarray,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    lam: float = 0.0,
    gamma: float = 0.0,
) -> tuple[RegressionTree, np.ndarray]:
    """Greedy tree on (g, h) stats; also returns each row's leaf value."""
    X = np.asarray(X, dtype=float)
    g = np.asarray(gradients, dtype=float)
    h = np.asarray(hessians, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TreeError("empty training input")
    if min_samples_leaf < 1:
        raise TreeError("min_samples_leaf must be >= 1")

    tree = RegressionTree(max_depth=max_depth, min_samples_leaf=min_samples_leaf)
    row_values = np.empty(X.shape[0])

    def add_node():
        tree.feature.append(-1)
        tree.threshold.append(0.0)
        tree.left.append(-1)
        tree.right.append(-1)
        tree.value.append(0.0)
        return tree.n_nodes - 1

    def build(idx, depth):
        node = add_node()
        sub_g, sub_h = g[idx], h[idx]
        split = None
        depth_ok = max_depth is None or depth < max_depth
        if depth_ok and idx.size >= 2 * min_samples_leaf:
            split = _best_split(X[idx], sub_g, sub_h, lam, gamma, min_samples_leaf)
        if split is None:
            weight = -sub_g.sum() / (sub_h.sum() + lam)
            tree.value[node] = float(weight)
            row_values[idx] = weight
            return node
        _, feat, thr = split
        tree.feature[node] = feat
        tree.threshold[node] = thr
        goes_left = X[idx, feat] <= thr
        tree.left[node] = build(idx[goes_left], depth + 1)
        tree.right[node] = build(idx[~goes_left], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return tree, row_values


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
) -> RegressionTree:
    """Variance-reduction regression tree; leaves hold (weighted) target means."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    tree, _ = fit_tree_gradients(
        X, -w * y, w, max_depth=max_depth, min_samples_leaf=min_samples_leaf
    )
    return tree
