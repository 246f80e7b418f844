"""L2-regularised logistic regression trained by full-batch gradient descent.

Standardisation lives inside the model: fit estimates per-feature mean and
scale on the training matrix and predict applies them, so callers always
pass raw feature values. The intercept is never regularised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_RATE_CLIP = 1e-6


@dataclass
class LogisticModel:
    weights: np.ndarray
    intercept: float
    mean: np.ndarray
    scale: np.ndarray
    n_epochs_run: int
    final_grad_norm: float
    degenerate: bool = False
    feature_names: list[str] = field(default_factory=list)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        Xs = (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
        return Xs @ self.weights + self.intercept

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        m = self.decision_function(X)
        out = np.empty_like(m)
        pos = m >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
        e = np.exp(m[~pos])
        out[~pos] = e / (1.0 + e)
        return out

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "logistic",
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "mean": [float(v) for v in self.mean],
            "scale": [float(v) for v in self.scale],
            "n_epochs_run": self.n_epochs_run,
            "final_grad_norm": float(self.final_grad_norm),
            "degenerate": self.degenerate,
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LogisticModel":
        if obj.get("schema_version") != 1 or obj.get("kind") != "logistic":
            raise ValueError("not a version-1 logistic model record")
        return cls(
            weights=np.array([float(w) for w in obj["weights"]], dtype=np.float64),
            intercept=float(obj["intercept"]),
            mean=np.array([float(v) for v in obj["mean"]], dtype=np.float64),
            scale=np.array([float(v) for v in obj["scale"]], dtype=np.float64),
            n_epochs_run=int(obj["n_epochs_run"]),
            final_grad_norm=float(obj["final_grad_norm"]),
            degenerate=bool(obj["degenerate"]),
            feature_names=list(obj.get("feature_names", [])),
        )


def logistic_loss_and_grad(
    weights: np.ndarray,
    intercept: float,
    X: np.ndarray,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood plus 0.5*l2*||w||^2, with its gradient.

    X is used as given; callers standardise beforehand. Returns
    (loss, grad_weights, grad_intercept).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    margin = X @ weights + intercept
    # log(1 + e^m) - y*m, computed stably for both signs of m
    loss = float(np.mean(np.logaddexp(0.0, margin) - y * margin))
    loss += 0.5 * l2 * float(weights @ weights)
    p = np.empty_like(margin)
    pos = margin >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-margin[pos]))
    e = np.exp(margin[~pos])
    p[~pos] = e / (1.0 + e)
    residual = p - y
    grad_w = X.T @ residual / n + l2 * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 1e-4,
    learning_rate: float = 0.5,
    max_epochs: int = 5000,
    tol: float = 1e-6,
    feature_names: list[str] | None = None,
) -> LogisticModel:
    """Fit by gradient descent from a zero start until the gradient norm
    drops below tol or max_epochs is reached.

    A single-class input yields a degenerate model: zero weights and an
    intercept at the logit of the clipped base rate.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one row per label")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    names = list(feature_names) if feature_names is not None else []
    if names and len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match X columns")

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)

    rate = float(np.clip(np.mean(y), _RATE_CLIP, 1.0 - _RATE_CLIP))
    base_logit = float(np.log(rate / (1.0 - rate)))
    if len(np.unique(y)) < 2:
        return LogisticModel(
            weights=np.zeros(X.shape[1]),
            intercept=base_logit,
            mean=mean,
            scale=scale,
            n_epochs_run=0,
            final_grad_norm=0.0,
            degenerate=True,
            feature_names=names,
        )

    Xs = (X - mean) / scale
    yf = y.astype(np.float64)
    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    grad_norm = float("inf")
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        loss, gw, gb = logistic_loss_and_grad(w, b, Xs, yf, l2)
        if not np.isfinite(loss):
            raise FloatingPointError("logistic loss diverged to a non-finite value")
        grad_norm = float(np.sqrt(gw @ gw + gb * gb))
        if grad_norm < tol:
            break
        w -= learning_rate * gw
        b -= learning_rate * gb
    return LogisticModel(
        weights=w,
        intercept=b,
        mean=mean,
        scale=scale,
        n_epochs_run=epoch,
        final_grad_norm=grad_norm,
        degenerate=False,
        feature_names=names,
    )
