"""Single-hidden-layer neural network (input x hidden x 2).

tanh hidden activation, softmax output, cross-entropy loss with optional
L2 weight decay, full-batch Adam updates.  The gradient computation lives
in a pure function so it can be checked against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["MLPClassifier", "loss_and_gradients", "init_params"]


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


def init_params(n_features: int, hidden: int, rng: np.random.Generator) -> dict:
    """Scaled-normal initialization; biases start at zero."""
    return {
        "W1": rng.normal(0.0, 1.0 / np.sqrt(n_features), size=(n_features, hidden)),
        "b1": np.zeros(hidden),
        "W2": rng.normal(0.0, 1.0 / np.sqrt(hidden), size=(hidden, 2)),
        "b2": np.zeros(2),
    }


def loss_and_gradients(params: dict, X, y, l2: float = 0.0) -> tuple[float, dict]:
    """Mean cross-entropy (+ 0.5*l2*||W||^2) and its exact gradients."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n = len(X)
    hidden_pre = X @ params["W1"] + params["b1"]
    hidden = np.tanh(hidden_pre)
    logits = hidden @ params["W2"] + params["b2"]
    probs = _softmax(logits)
    eps = 1e-12
    loss = float(-np.log(probs[np.arange(n), y] + eps).mean())
    loss += 0.5 * l2 * float((params["W1"] ** 2).sum() + (params["W2"] ** 2).sum())

    d_logits = probs.copy()
    d_logits[np.arange(n), y] -= 1.0
    d_logits /= n
    grads = {
        "W2": hidden.T @ d_logits + l2 * params["W2"],
        "b2": d_logits.sum(axis=0),
    }
    d_hidden = (d_logits @ params["W2"].T) * (1.0 - hidden**2)
    grads["W1"] = X.T @ d_hidden + l2 * params["W1"]
    grads["b1"] = d_hidden.sum(axis=0)
    return loss, grads


@dataclass
class MLPClassifier:
    """Deterministic full-batch Adam training given ``seed``."""

    hidden: int = 128
    epochs: int = 200
    learning_rate: float = 0.01
    l2: float = 1e-4
    seed: int = 0
    params: Optional[dict] = field(default=None, repr=False)
    feature_mean: Optional[np.ndarray] = field(default=None, repr=False)
    feature_scale: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.hidden < 1 or self.epochs < 1:
            raise ValueError("hidden and epochs must be >= 1")

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.feature_mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        self.feature_scale = scale
        Z = (X - self.feature_mean) / scale

        rng = np.random.default_rng(self.seed)
        params = init_params(X.shape[1], self.hidden, rng)
        moment1 = {k: np.zeros_like(v) for k, v in params.items()}
        moment2 = {k: np.zeros_like(v) for k, v in params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        for step in range(1, self.epochs + 1):
            _, grads = loss_and_gradients(params, Z, y, self.l2)
            for key in params:
                moment1[key] = beta1 * moment1[key] + (1 - beta1) * grads[key]
                moment2[key] = beta2 * moment2[key] + (1 - beta2) * grads[key] ** 2
                m_hat = moment1[key] / (1 - beta1**step)
                v_hat = moment2[key] / (1 - beta2**step)
                params[key] = params[key] - self.learning_rate * m_hat / (
                    np.sqrt(v_hat) + eps
                )
        self.params = params
        return self

    def predict_proba(self, X) -> np.ndarray:
        if self.params is None:
            raise ValueError("model is not fitted")
        X = np.asarray(X, dtype=float)
        Z = (X - self.feature_mean) / self.feature_scale
        hidden = np.tanh(Z @ self.params["W1"] + self.params["b1"])
        return _softmax(hidden @ self.params["W2"] + self.params["b2"])

    def get_state(self) -> dict:
        return {
            "hidden": self.hidden,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "seed": self.seed,
            "params": {k: v.tolist() for k, v in self.params.items()},
            "feature_mean": self.feature_mean.tolist(),
            "feature_scale": self.feature_scale.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "MLPClassifier":
        model = cls(
            hidden=state["hidden"],
            epochs=state["epochs"],
            learning_rate=state["learning_rate"],
            l2=state["l2"],
            seed=state["seed"],
        )
        model.params = {k: np.asarray(v, dtype=float) for k, v in state["params"].items()}
        model.feature_mean = np.asarray(state["feature_mean"], dtype=float)
        model.feature_scale = np.asarray(state["feature_scale"], dtype=float)
        return model
