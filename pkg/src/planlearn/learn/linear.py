"""Ridge linear regression solved by the normal equations (bias unpenalized)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class LinearFitError(Exception):
    pass


SINGULAR_FALLBACK_LAMBDA = 1e-8


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    ridge_lambda: float
    column_names: list[str] = field(default_factory=list)

    kind = "linear"

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weights.size:
            raise LinearFitError(
                f"feature width mismatch: expected {self.weights.size}, got {X.shape[1]}"
            )
        return X @ self.weights + self.bias

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "ridge_lambda": self.ridge_lambda,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        return cls(np.array(d["weights"], dtype=float), float(d["bias"]),
                   float(d["ridge_lambda"]))


def fit_linear(X: np.ndarray, y: np.ndarray, ridge_lambda: float = 0.0,
               column_names: list[str] | None = None) -> LinearModel:
    """Minimize sum (y - Xw - b)^2 + lambda * ||w||^2.

    lambda = 0 is allowed; a failed Cholesky factorization (singular normal
    matrix, e.g. duplicated columns) falls back to lambda = 1e-8.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise LinearFitError("empty training input")
    if X.shape[1] == 0:
        raise LinearFitError("zero-width feature matrix")

    n, d = X.shape
    A = np.hstack([X, np.ones((n, 1))])
    M = A.T @ A
    b = A.T @ y
    penalty = np.ones(d + 1)
    penalty[-1] = 0.0  # never penalize the bias

    effective = ridge_lambda
    try:
        sol = _cholesky_solve(M + effective * np.diag(penalty), b)
    except np.linalg.LinAlgError:
        effective = max(ridge_lambda, SINGULAR_FALLBACK_LAMBDA)
        sol = _cholesky_solve(M + effective * np.diag(penalty), b)

    return LinearModel(
        weights=sol[:-1],
        bias=float(sol[-1]),
        ridge_lambda=ridge_lambda,
        column_names=list(column_names or []),
    )


def _cholesky_solve(M, b):
    L = np.linalg.cholesky(M)  # raises LinAlgError when M is not SPD
    z = np.linalg.solve(L, b)
    return np.linalg.solve(L.T, z)
