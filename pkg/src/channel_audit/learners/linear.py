"""L2-regularized logistic regression fit by iteratively reweighted least
squares (Newton steps on the penalized log-likelihood).

Features are standardized internally — the scaling is part of the model
state — so convergence does not depend on raw feature magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["LogisticRegression"]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LogisticRegression:
    """Binary logistic regression; ``l2`` penalizes weights, not the bias."""

    l2: float = 1.0
    max_iter: int = 100
    tol: float = 1e-8
    coef: Optional[np.ndarray] = field(default=None, repr=False)
    bias: float = 0.0
    feature_mean: Optional[np.ndarray] = field(default=None, repr=False)
    feature_scale: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, d = X.shape
        self.feature_mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        self.feature_scale = scale
        Z = (X - self.feature_mean) / scale

        beta = np.zeros(d + 1)  # bias first
        design = np.column_stack([np.ones(n), Z])
        penalty = np.full(d + 1, self.l2)
        penalty[0] = 0.0
        for _ in range(self.max_iter):
            p = _sigmoid(design @ beta)
            w = np.clip(p * (1.0 - p), 1e-12, None)
            gradient = design.T @ (y - p) - penalty * beta
            hessian = (design * w[:, None]).T @ design + np.diag(penalty)
            step = np.linalg.solve(hessian, gradient)
            beta = beta + step
            if np.max(np.abs(step)) < self.tol:
                break
        self.bias = float(beta[0])
        self.coef = beta[1:]
        return self

    def predict_proba(self, X) -> np.ndarray:
        if self.coef is None:
            raise ValueError("model is not fitted")
        X = np.asarray(X, dtype=float)
        Z = (X - self.feature_mean) / self.feature_scale
        p1 = _sigmoid(Z @ self.coef + self.bias)
        return np.column_stack([1.0 - p1, p1])

    def get_state(self) -> dict:
        return {
            "l2": self.l2,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "bias": self.bias,
            "coef": [float(c) for c in self.coef],
            "feature_mean": [float(m) for m in self.feature_mean],
            "feature_scale": [float(s) for s in self.feature_scale],
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogisticRegression":
        model = cls(l2=state["l2"], max_iter=state["max_iter"], tol=state["tol"])
        model.bias = state["bias"]
        model.coef = np.asarray(state["coef"], dtype=float)
        model.feature_mean = np.asarray(state["feature_mean"], dtype=float)
        model.feature_scale = np.asarray(state["feature_scale"], dtype=float)
        return model
