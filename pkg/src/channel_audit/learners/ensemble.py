"""Average-probability ensemble: the prediction is the exact arithmetic
mean of the member models' predicted probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["AverageProbabilityEnsemble"]


@dataclass
class AverageProbabilityEnsemble:
    """Members are (kind, fitted estimator) pairs; fitting is done upstream."""

    members: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.members:
            return
        if len({kind for kind, _ in self.members}) != len(self.members):
            raise ValueError("duplicate member kinds in ensemble")

    def predict_proba(self, X) -> np.ndarray:
        if not self.members:
            raise ValueError("ensemble has no members")
        total = None
        for _, estimator in self.members:
            probs = estimator.predict_proba(X)
            total = probs if total is None else total + probs
        return total / len(self.members)

    def get_state(self) -> dict:
        # estimator states are embedded by kind; reconstruction happens in
        # base.py which knows the estimator registry
        return {"member_kinds": [kind for kind, _ in self.members]}
