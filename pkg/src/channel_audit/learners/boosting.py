"""Additive logistic boosting (LogitBoost) with depth-limited regression
trees as the weak learner.

Each round fits a weighted least-squares tree to the Newton working
response z = (y* - p) / (p(1-p)) with weights w = p(1-p), then takes a
half-step in function space.  A step-halving guard keeps the training
negative log-likelihood non-increasing round over round; a round that
cannot improve the loss is dropped and training stops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .trees import DecisionTree

__all__ = ["LogitBoost"]

_Z_MAX = 4.0
_W_FLOOR = 2e-5


def _probabilities(half_log_odds: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-2.0 * np.clip(half_log_odds, -250, 250)))


def _negative_log_likelihood(half_log_odds: np.ndarray, y: np.ndarray) -> float:
    signs = 2.0 * y - 1.0
    margins = np.clip(-2.0 * signs * half_log_odds, -700, 700)
    return float(np.log1p(np.exp(margins)).sum())


@dataclass
class LogitBoost:
    """Boosted regression trees; deterministic, no randomness used."""

    rounds: int = 50
    tree_depth: int = 3
    learning_rate: float = 1.0
    min_samples_leaf: int = 1
    trees: list = field(default_factory=list, repr=False)
    steps: list = field(default_factory=list, repr=False)
    loss_curve: list = field(default_factory=list, repr=False)
    n_features: int = 0

    def __post_init__(self) -> None:
        if self.rounds < 1 or self.tree_depth < 1:
            raise ValueError("rounds and tree_depth must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = len(y)
        self.n_features = X.shape[1]
        self.trees, self.steps = [], []
        half_log_odds = np.zeros(n)
        loss = _negative_log_likelihood(half_log_odds, y)
        self.loss_curve = [loss]
        for _ in range(self.rounds):
            p = _probabilities(half_log_odds)
            w = np.clip(p * (1.0 - p), _W_FLOOR, None)
            z = np.clip((y - p) / w, -_Z_MAX, _Z_MAX)
            tree = DecisionTree(
                criterion="mse",
                max_depth=self.tree_depth,
                min_samples_leaf=self.min_samples_leaf,
            )
            tree.fit(X, z, sample_weight=w)
            prediction = tree.predict_value(X)
            step = 0.5 * self.learning_rate
            accepted = False
            for _ in range(12):  # step halving keeps the loss monotone
                trial = half_log_odds + step * prediction
                trial_loss = _negative_log_likelihood(trial, y)
                if trial_loss <= loss:
                    half_log_odds, loss, accepted = trial, trial_loss, True
                    break
                step *= 0.5
            if not accepted:
                break  # no usable descent left; stop boosting
            self.trees.append(tree)
            self.steps.append(step)
            self.loss_curve.append(loss)
        if not self.trees:
            raise ValueError("boosting made no progress on the training data")
        return self

    def decision_function(self, X) -> np.ndarray:
        if not self.trees:
            raise ValueError("model is not fitted")
        X = np.asarray(X, dtype=float)
        half_log_odds = np.zeros(len(X))
        for tree, step in zip(self.trees, self.steps):
            half_log_odds += step * tree.predict_value(X)
        return half_log_odds

    def predict_proba(self, X) -> np.ndarray:
        p1 = _probabilities(self.decision_function(X))
        return np.column_stack([1.0 - p1, p1])

    def get_state(self) -> dict:
        return {
            "rounds": self.rounds,
            "tree_depth": self.tree_depth,
            "learning_rate": self.learning_rate,
            "min_samples_leaf": self.min_samples_leaf,
            "n_features": self.n_features,
            "trees": [tree.get_state() for tree in self.trees],
            "steps": [float(s) for s in self.steps],
            "loss_curve": [float(v) for v in self.loss_curve],
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogitBoost":
        model = cls(
            rounds=state["rounds"],
            tree_depth=state["tree_depth"],
            learning_rate=state["learning_rate"],
            min_samples_leaf=state["min_samples_leaf"],
        )
        model.n_features = state["n_features"]
        model.trees = [DecisionTree.from_state(s) for s in state["trees"]]
        model.steps = list(state["steps"])
        model.loss_curve = list(state["loss_curve"])
        return model
