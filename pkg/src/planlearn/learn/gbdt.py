"""Gradient-boosted regression trees with second-order squared-loss boosting.

Per round the residual gradients are g = yhat - y with constant hessian
h = 1; leaves carry w = -G/(H + lambda) and splits use the gain

    1/2 * [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma

accepting only positive-gain splits.  With gamma = 0 and learning rate in
(0, 1] the training MSE is non-increasing round over round.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tree import RegressionTree, TreeError, fit_tree_gradients


@dataclass(frozen=True)
class GbdtConfig:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    lam: float = 1.0
    gamma: float = 0.0
    min_samples_leaf: int = 1


@dataclass
class GbdtModel:
    base_score: float
    trees: list[RegressionTree]
    learning_rate: float
    lam: float
    gamma: float
    max_depth: int
    n_rounds: int
    train_mse: list[float] = field(default_factory=list, repr=False)

    kind = "gbdt"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        pred = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            pred += self.learning_rate * tree.predict(X)
        return pred

    def to_dict(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "lam": self.lam,
            "gamma": self.gamma,
            "max_depth": self.max_depth,
            "n_rounds": self.n_rounds,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbdtModel":
        return cls(
            base_score=float(d["base_score"]),
            trees=[RegressionTree.from_dict(t) for t in d["trees"]],
            learning_rate=float(d["learning_rate"]),
            lam=float(d["lam"]),
            gamma=float(d["gamma"]),
            max_depth=int(d["max_depth"]),
            n_rounds=int(d["n_rounds"]),
        )


def fit_gbdt(X: np.ndarray, y: np.ndarray, config: GbdtConfig = GbdtConfig()) -> GbdtModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TreeError("empty training input")
    if not 0.0 <= config.learning_rate <= 1.0:
        raise TreeError("learning_rate must be in [0, 1]")

    base = float(y.mean())
    pred = np.full(y.shape, base)
    hessians = np.ones_like(y)
    model = GbdtModel(
        base_score=base,
        trees=[],
        learning_rate=config.learning_rate,
        lam=config.lam,
        gamma=config.gamma,
        max_depth=config.max_depth,
        n_rounds=config.n_rounds,
    )
    for _ in range(config.n_rounds):
        tree, leaf_values = fit_tree_gradients(
            X,
            pred - y,
            hessians,
            max_depth=config.max_depth,
            min_samples_leaf=config.min_samples_leaf,
            lam=config.lam,
            gamma=config.gamma,
        )
        pred = pred + config.learning_rate * leaf_values
        model.trees.append(tree)
        model.train_mse.append(float(np.mean((pred - y) ** 2)))
    return model
