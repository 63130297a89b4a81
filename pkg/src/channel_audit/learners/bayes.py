"""Gaussian naive Bayes on numeric features.

Per-class feature means and variances with a variance floor proportional
to the largest feature variance, log-space posterior accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["GaussianNaiveBayes"]


@dataclass
class GaussianNaiveBayes:
    var_smoothing: float = 1e-9
    class_log_prior: Optional[np.ndarray] = field(default=None, repr=False)
    means: Optional[np.ndarray] = field(default=None, repr=False)  # (2, d)
    variances: Optional[np.ndarray] = field(default=None, repr=False)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        counts = np.bincount(y, minlength=2).astype(float)
        self.class_log_prior = np.log(counts / counts.sum())
        self.means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
        floor = self.var_smoothing * float(X.var(axis=0).max())
        self.variances = (
            np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + max(floor, 1e-300)
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        if self.means is None:
            raise ValueError("model is not fitted")
        X = np.asarray(X, dtype=float)
        joint = np.empty((len(X), 2))
        for c in (0, 1):
            log_likelihood = -0.5 * (
                np.log(2.0 * np.pi * self.variances[c])
                + (X - self.means[c]) ** 2 / self.variances[c]
            ).sum(axis=1)
            joint[:, c] = self.class_log_prior[c] + log_likelihood
        joint -= joint.max(axis=1, keepdims=True)
        probs = np.exp(joint)
        probs /= probs.sum(axis=1, keepdims=True)
        return probs

    def get_state(self) -> dict:
        return {
            "var_smoothing": self.var_smoothing,
            "class_log_prior": [float(v) for v in self.class_log_prior],
            "means": [[float(v) for v in row] for row in self.means],
            "variances": [[float(v) for v in row] for row in self.variances],
        }

    @classmethod
    def from_state(cls, state: dict) -> "GaussianNaiveBayes":
        model = cls(var_smoothing=state["var_smoothing"])
        model.class_log_prior = np.asarray(state["class_log_prior"], dtype=float)
        model.means = np.asarray(state["means"], dtype=float)
        model.variances = np.asarray(state["variances"], dtype=float)
        return model
