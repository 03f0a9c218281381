"""Random forest regressor: bagged variance-reduction trees on feature subsets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tree import RegressionTree, TreeError, fit_tree


@dataclass
class ForestModel:
    trees: list[RegressionTree]
    n_trees: int
    feature_fraction: float
    seed: int

    kind = "forest"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "feature_fraction": self.feature_fraction,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            [RegressionTree.from_dict(t) for t in d["trees"]],
            int(d["n_trees"]),
            float(d["feature_fraction"]),
            int(d["seed"]),
        )


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 100,
    feature_fraction: float = 0.7,
    seed: int = 0,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    bootstrap: bool = True,
) -> ForestModel:
    """Fit ``n_trees`` trees, each on a bootstrap sample over a feature subset.

    Tree i draws from its own generator seeded ``seed + i`` so a parallel fit
    would produce the same model.  ``bootstrap=False`` is a test hook that
    trains every tree on the full sample.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < 2:
        raise TreeError("forest needs at least 2 rows")
    if not 0.0 < feature_fraction <= 1.0:
        raise TreeError("feature_fraction must be in (0, 1]")

    n, d = X.shape
    k = max(1, round(feature_fraction * d))
    trees = []
    for i in range(n_trees):
        rng = np.random.default_rng(seed + i)
        rows = rng.integers(0, n, n) if bootstrap else np.arange(n)
        cols = sorted(rng.permutation(d)[:k].tolist())
        tree = fit_tree(
            X[np.ix_(rows, cols)],
            y[rows],
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
        )
        tree.feature_indices = cols
        trees.append(tree)
    return ForestModel(trees, n_trees, feature_fraction, seed)
