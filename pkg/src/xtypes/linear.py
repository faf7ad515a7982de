"""Binary logistic regression trained by deterministic mini-batch gradient
descent.  Shared by the cluster matcher, the per-type rankers, the score
fusion layer, and the coarse-category classifier.

Determinism contract: same inputs and seed give bitwise-identical weights.
All shuffling goes through a generator seeded per fit; no global RNG state
is touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EPOCHS = 30
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_L2 = 1e-4
# Small batches move rare-token weights much further per epoch than large
# averaged batches do under the fixed epoch budget.
DEFAULT_BATCH_SIZE = 8


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    l2: float = DEFAULT_L2
    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = 13

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    losses: tuple[float, ...] = ()

    def decision(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features, dtype=np.float64) @ self.weights + self.bias

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision(features))

    def to_dict(self) -> dict:
        return {"weights": [float(w) for w in self.weights], "bias": float(self.bias)}

    @classmethod
    def from_dict(cls, payload: dict) -> "LinearModel":
        return cls(
            weights=np.array(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
        )


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    """Overflow-safe logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    expz = np.exp(z[~positive])
    out[~positive] = expz / (1.0 + expz)
    if out.ndim == 0:
        return float(out)
    return out


def logistic_loss(
    features: np.ndarray, labels: np.ndarray, weights: np.ndarray, bias: float, l2: float
) -> float:
    """Mean negative log-likelihood plus L2 penalty, computed via
    logaddexp so large margins cannot overflow."""
    z = features @ weights + bias
    nll = np.logaddexp(0.0, z) - labels * z
    return float(np.mean(nll) + 0.5 * l2 * float(weights @ weights))


def fit_binary_logistic(
    features: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig = TrainConfig(),
    nonnegative: np.ndarray | None = None,
) -> LinearModel:
    """Fit weights on {0,1} labels.

    Learning rate decays as 1/sqrt(epoch).  When ``nonnegative`` marks
    coordinates, those weights are clipped at zero after every batch
    (projected gradient descent).
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if features.ndim != 2:
        raise ValueError("features must be 2-dimensional")
    if labels.shape != (features.shape[0],):
        raise ValueError("labels must align with feature rows")
    if features.shape[0] == 0:
        raise ValueError("cannot fit on an empty dataset")
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise ValueError("labels must be 0 or 1")

    n, dim = features.shape
    weights = np.zeros(dim, dtype=np.float64)
    bias = 0.0
    rng = np.random.default_rng(config.seed)
    losses = []
    for epoch in range(config.epochs):
        lr = config.learning_rate / np.sqrt(epoch + 1.0)
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            x = features[batch]
            y = labels[batch]
            error = sigmoid(x @ weights + bias) - y
            grad_w = x.T @ error / batch.size + config.l2 * weights
            grad_b = float(np.mean(error))
            weights -= lr * grad_w
            bias -= lr * grad_b
            if nonnegative is not None:
                weights[nonnegative] = np.maximum(weights[nonnegative], 0.0)
        losses.append(logistic_loss(features, labels, weights, bias, config.l2))
    return LinearModel(weights=weights, bias=bias, losses=tuple(losses))
