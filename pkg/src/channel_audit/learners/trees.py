"""CART decision trees grown on numpy arrays.

One implementation serves two roles: Gini-impurity classification trees
(the random-forest member) and weighted least-squares regression trees
(the boosting weak learner).  Trees store flat arrays instead of node
objects so prediction is a vectorized index chase and serialization is a
plain dict of lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["DecisionTree"]

_LEAF = -1


@dataclass
class DecisionTree:
    """Binary CART tree.

    ``criterion`` is "gini" (leaf value = weighted fraction of class 1) or
    "mse" (leaf value = weighted mean of the regression target).
    ``max_features`` activates per-split feature subsampling, which requires
    the ``rng`` argument of :meth:`fit`.
    """

    criterion: str = "gini"
    max_depth: Optional[int] = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_features: Optional[int] = None

    # flat node arrays, filled by fit()
    feature: list = field(default_factory=list, repr=False)
    threshold: list = field(default_factory=list, repr=False)
    left: list = field(default_factory=list, repr=False)
    right: list = field(default_factory=list, repr=False)
    value: list = field(default_factory=list, repr=False)
    n_features: int = 0

    def __post_init__(self) -> None:
        if self.criterion not in ("gini", "mse"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.min_samples_split < 2 or self.min_samples_leaf < 1:
            raise ValueError("invalid minimum node sizes")

    # -- training ----------------------------------------------------------

    def fit(self, X, y, sample_weight=None, rng: Optional[np.random.Generator] = None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
            raise ValueError("X must be 2D and aligned with non-empty y")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("training data must be finite")
        if sample_weight is None:
            sample_weight = np.ones(len(y))
        else:
            sample_weight = np.asarray(sample_weight, dtype=float)
            if np.any(sample_weight < 0) or sample_weight.sum() <= 0:
                raise ValueError("sample weights must be >= 0 with positive total")
        if self.max_features is not None and rng is None:
            raise ValueError("feature subsampling requires an rng")
        self.n_features = X.shape[1]
        self.feature, self.threshold = [], []
        self.left, self.right, self.value = [], [], []

        # Iterative depth-first growth over index arrays.  Zero-weight rows
        # carry no information and would create weightless nodes, so they
        # never enter the root index set.
        stack = [(np.flatnonzero(sample_weight > 0), 0, None, "left")]
        while stack:
            indices, depth, parent, side = stack.pop()
            node_id = self._new_node(y[indices], sample_weight[indices])
            if parent is not None:
                (self.left if side == "left" else self.right)[parent] = node_id
            split = self._best_split(X, y, sample_weight, indices, depth, rng)
            if split is None:
                continue
            feature_idx, threshold_value, left_mask = split
            self.feature[node_id] = feature_idx
            self.threshold[node_id] = threshold_value
            stack.append((indices[~left_mask], depth + 1, node_id, "right"))
            stack.append((indices[left_mask], depth + 1, node_id, "left"))
        return self

    def _new_node(self, y_node: np.ndarray, w_node: np.ndarray) -> int:
        # weighted mean: P(class 1) under gini, regression mean under mse
        leaf = float((w_node * y_node).sum() / w_node.sum())
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(leaf)
        return len(self.feature) - 1

    def _candidate_features(self, rng: Optional[np.random.Generator]) -> np.ndarray:
        if self.max_features is None or self.max_features >= self.n_features:
            return np.arange(self.n_features)
        return rng.choice(self.n_features, size=self.max_features, replace=False)

    def _best_split(self, X, y, w, indices, depth, rng):
        n_node = len(indices)
        if n_node < self.min_samples_split:
            return None
        if self.max_depth is not None and depth >= self.max_depth:
            return None
        y_node = y[indices]
        if self.criterion == "gini" and (y_node[0] == y_node).all():
            return None  # pure node
        w_node = w[indices]
        best = None  # (score, feature, threshold)
        for feature_idx in self._candidate_features(rng):
            column = X[indices, feature_idx]
            order = np.argsort(column, kind="stable")
            xs = column[order]
            boundaries = np.flatnonzero(xs[1:] != xs[:-1]) + 1
            if len(boundaries) == 0:
                continue
            if self.min_samples_leaf > 1:
                boundaries = boundaries[
                    (boundaries >= self.min_samples_leaf)
                    & (boundaries <= n_node - self.min_samples_leaf)
                ]
                if len(boundaries) == 0:
                    continue
            ws = w_node[order]
            zs = y_node[order] * ws
            cum_w = np.cumsum(ws)
            cum_z = np.cumsum(zs)
            total_w = cum_w[-1]
            total_z = cum_z[-1]
            left_w = cum_w[boundaries - 1]
            left_z = cum_z[boundaries - 1]
            right_w = total_w - left_w
            right_z = total_z - left_z
            with np.errstate(divide="ignore", invalid="ignore"):
                if self.criterion == "gini":
                    # weighted sum of child Gini impurities (lower is better)
                    p_left = left_z / left_w
                    p_right = right_z / right_w
                    score = 2.0 * (
                        left_w * p_left * (1.0 - p_left)
                        + right_w * p_right * (1.0 - p_right)
                    )
                else:
                    # negative of the variance reduction surrogate
                    score = -(left_z**2 / left_w + right_z**2 / right_w)
            pos = int(np.argmin(score))
            candidate = float(score[pos])
            if best is None or candidate < best[0] - 1e-15:
                boundary = boundaries[pos]
                threshold_value = 0.5 * (xs[boundary - 1] + xs[boundary])
                if threshold_value <= xs[boundary - 1]:  # guard float collapse
                    threshold_value = xs[boundary]
                best = (candidate, int(feature_idx), float(threshold_value))
        if best is None:
            return None
        score, feature_idx, threshold_value = best
        w_total = w_node.sum()
        if self.criterion == "gini":
            p_node = (w_node * y_node).sum() / w_total
            parent_score = 2.0 * w_total * p_node * (1.0 - p_node)
        else:
            parent_score = -((w_node * y_node).sum() ** 2 / w_total)
        if score >= parent_score - 1e-12 * (1.0 + abs(parent_score)):
            return None  # no criterion decrease
        left_mask = X[indices, feature_idx] < threshold_value
        if not left_mask.any() or left_mask.all():
            return None
        return feature_idx, threshold_value, left_mask

    # -- prediction ----------------------------------------------------------

    def predict_value(self, X) -> np.ndarray:
        """Leaf value per row: P(class 1) for gini trees, mean for mse trees."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError("X shape does not match the trained tree")
        if not self.feature:
            raise ValueError("tree is not fitted")
        node = np.zeros(len(X), dtype=int)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        active = feature[node] != _LEAF
        while active.any():
            rows = np.flatnonzero(active)
            nodes = node[rows]
            goes_left = X[rows, feature[nodes]] < threshold[nodes]
            node[rows] = np.where(goes_left, left[nodes], right[nodes])
            active = feature[node] != _LEAF
        return np.asarray(self.value)[node]

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def feature_importances(self) -> np.ndarray:
        """Split-count importance per feature, normalized to sum to 1."""
        counts = np.zeros(self.n_features)
        for f in self.feature:
            if f != _LEAF:
                counts[f] += 1
        total = counts.sum()
        return counts / total if total else counts

    # -- serialization -------------------------------------------------------

    def get_state(self) -> dict:
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "max_features": self.max_features,
            "n_features": self.n_features,
            "feature": list(map(int, self.feature)),
            "threshold": [float(t) for t in self.threshold],
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_state(cls, state: dict) -> "DecisionTree":
        tree = cls(
            criterion=state["criterion"],
            max_depth=state["max_depth"],
            min_samples_split=state["min_samples_split"],
            min_samples_leaf=state["min_samples_leaf"],
            max_features=state["max_features"],
        )
        tree.n_features = state["n_features"]
        tree.feature = list(state["feature"])
        tree.threshold = list(state["threshold"])
        tree.left = list(state["left"])
        tree.right = list(state["right"])
        tree.value = list(state["value"])
        return tree
