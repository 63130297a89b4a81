"""Random forest: bootstrap-bagged CART trees with per-split feature
subsampling, class probability = mean of member tree probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .trees import DecisionTree

__all__ = ["RandomForest"]


@dataclass
class RandomForest:
    """Bagged Gini trees; deterministic given ``seed``.

    ``max_features=None`` means sqrt(#features) per split, the bagging
    default for classification.
    """

    n_trees: int = 100
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    max_features: Optional[int] = None
    seed: int = 0
    trees: list = field(default_factory=list, repr=False)
    n_features: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        per_split = (
            self.max_features
            if self.max_features is not None
            else max(1, int(math.sqrt(d)))
        )
        self.n_features = d
        self.trees = []
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        for seq in seeds:
            rng = np.random.default_rng(seq)
            weights = np.bincount(rng.integers(0, n, n), minlength=n).astype(float)
            tree = DecisionTree(
                criterion="gini",
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
                max_features=per_split,
            )
            tree.fit(X, y, sample_weight=weights, rng=rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        if not self.trees:
            raise ValueError("forest is not fitted")
        X = np.asarray(X, dtype=float)
        p1 = np.mean([tree.predict_value(X) for tree in self.trees], axis=0)
        return np.column_stack([1.0 - p1, p1])

    def feature_importances(self) -> np.ndarray:
        if not self.trees:
            raise ValueError("forest is not fitted")
        return np.mean([tree.feature_importances() for tree in self.trees], axis=0)

    def get_state(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "max_features": self.max_features,
            "seed": self.seed,
            "n_features": self.n_features,
            "trees": [tree.get_state() for tree in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomForest":
        forest = cls(
            n_trees=state["n_trees"],
            max_depth=state["max_depth"],
            min_samples_leaf=state["min_samples_leaf"],
            max_features=state["max_features"],
            seed=state["seed"],
        )
        forest.n_features = state["n_features"]
        forest.trees = [DecisionTree.from_state(s) for s in state["trees"]]
        return forest
