"""Three interchangeable regression learners behind one fit/predict contract.

* ``linear`` — exact least squares via the normal equations with a small
  ridge term for rank-deficient safety (one-hot blocks are often collinear).
* ``mlp`` — one sigmoid hidden layer trained by full-batch gradient descent
  on squared error; the learning rate halves whenever a step would increase
  the loss, so the training loss is non-increasing by construction.
* ``svr`` — linear epsilon-insensitive support vector regression trained by
  deterministic subgradient descent with the same step-halving rule.

The MLP and SVR standardise inputs and target internally and fold the
scaling back out (SVR) or store it (MLP); feature encoding stays unscaled.
All training is deterministic for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    ColumnMismatchError,
    DimensionMismatchError,
    EmptyTrainingSetError,
    NotLinearError,
)
from .structured import FeatureMatrix

REGRESSOR_KINDS = ("linear", "mlp", "svr")

_DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "linear": {"ridge_lambda": 1e-8, "intercept": True},
    "mlp": {"hidden_size": None, "epochs": 500, "learning_rate": 0.01},
    "svr": {"c": 1.0, "epsilon": None, "epochs": 2000, "learning_rate": 0.5},
}

_MIN_LEARNING_RATE = 1e-14


@dataclass(frozen=True)
class RegressorSpec:
    """Which learner to train, with kind-specific hyperparameters."""

    kind: str
    hyperparameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in REGRESSOR_KINDS:
            raise ValueError(f"unknown regressor kind: {self.kind!r}")
        unknown = set(self.hyperparameters) - set(_DEFAULT_HYPERPARAMETERS[self.kind])
        if unknown:
            raise ValueError(
                f"invalid hyperparameters for {self.kind}: {', '.join(sorted(unknown))}"
            )

    def resolved(self) -> dict[str, Any]:
        merged = dict(_DEFAULT_HYPERPARAMETERS[self.kind])
        merged.update(self.hyperparameters)
        return merged


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Least-squares fit exposing one weight per input column."""

    column_names: tuple[str, ...]
    weights: np.ndarray
    intercept: float

    kind = "linear"

    def predict_values(self, values: np.ndarray) -> np.ndarray:
        return values @ self.weights + self.intercept

    def to_params(self) -> dict[str, Any]:
        return {
            "columns": list(self.column_names),
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> "LinearModel":
        return cls(
            column_names=tuple(params["columns"]),
            weights=np.asarray(params["weights"], dtype=np.float64),
            intercept=float(params["intercept"]),
        )


@dataclass(frozen=True, eq=False)
class MLPModel:
    """One-hidden-layer perceptron with internal standardisation."""

    column_names: tuple[str, ...]
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float

    kind = "mlp"

    def predict_values(self, values: np.ndarray) -> np.ndarray:
        scaled = (values - self.x_mean) / self.x_std
        hidden = _sigmoid(scaled @ self.w1 + self.b1)
        return self.y_mean + self.y_std * (hidden @ self.w2 + self.b2)

    def to_params(self) -> dict[str, Any]:
        return {
            "columns": list(self.column_names),
            "hidden_size": int(self.w1.shape[1]),
            "w1": [[float(v) for v in row] for row in self.w1],
            "b1": [float(v) for v in self.b1],
            "w2": [float(v) for v in self.w2],
            "b2": float(self.b2),
            "x_mean": [float(v) for v in self.x_mean],
            "x_std": [float(v) for v in self.x_std],
            "y_mean": float(self.y_mean),
            "y_std": float(self.y_std),
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> "MLPModel":
        return cls(
            column_names=tuple(params["columns"]),
            w1=np.asarray(params["w1"], dtype=np.float64).reshape(
                len(params["columns"]), params["hidden_size"]
            ),
            b1=np.asarray(params["b1"], dtype=np.float64),
            w2=np.asarray(params["w2"], dtype=np.float64),
            b2=float(params["b2"]),
            x_mean=np.asarray(params["x_mean"], dtype=np.float64),
            x_std=np.asarray(params["x_std"], dtype=np.float64),
            y_mean=float(params["y_mean"]),
            y_std=float(params["y_std"]),
        )


@dataclass(frozen=True, eq=False)
class SVRModel:
    """Linear SVR; scaling used during training is folded into the weights."""

    column_names: tuple[str, ...]
    weights: np.ndarray
    intercept: float

    kind = "svr"

    def predict_values(self, values: np.ndarray) -> np.ndarray:
        return values @ self.weights + self.intercept

    def to_params(self) -> dict[str, Any]:
        return {
            "columns": list(self.column_names),
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
        }

    @classmethod
    def from_params(cls, params: dict[str, Any]) -> "SVRModel":
        return cls(
            column_names=tuple(params["columns"]),
            weights=np.asarray(params["weights"], dtype=np.float64),
            intercept=float(params["intercept"]),
        )


FittedRegressor = LinearModel | MLPModel | SVRModel

_MODEL_CLASSES = {"linear": LinearModel, "mlp": MLPModel, "svr": SVRModel}


def fitted_from_params(kind: str, params: dict[str, Any]) -> FittedRegressor:
    if kind not in _MODEL_CLASSES:
        raise ValueError(f"unknown regressor kind: {kind!r}")
    return _MODEL_CLASSES[kind].from_params(params)


def fit(spec: RegressorSpec, X: FeatureMatrix, y: np.ndarray) -> FittedRegressor:
    """Train the learner named by ``spec`` on the matrix and target."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise DimensionMismatchError(f"target must be 1-D, got shape {y.shape}")
    if X.n_rows != y.shape[0]:
        raise DimensionMismatchError(
            f"matrix has {X.n_rows} rows but target has {y.shape[0]} entries"
        )
    if X.n_rows == 0:
        raise EmptyTrainingSetError("cannot fit on zero rows")
    if y.size and not np.all(np.isfinite(y)):
        raise ValueError("target contains NaN or infinite entries")

    params = spec.resolved()
    if spec.kind == "linear":
        weights, intercept = _solve_ridge(
            X.values, y, float(params["ridge_lambda"]), bool(params["intercept"])
        )
        return LinearModel(X.column_names, weights, intercept)
    if spec.kind == "mlp":
        return _fit_mlp(X, y, params, spec.seed)
    return _fit_svr(X, y, params)


def predict(model: FittedRegressor, X: FeatureMatrix) -> np.ndarray:
    """Apply a fitted model; the matrix columns must match training columns."""
    if tuple(X.column_names) != tuple(model.column_names):
        raise ColumnMismatchError(
            f"expected columns {list(model.column_names)}, got {list(X.column_names)}"
        )
    if X.n_rows == 0:
        return np.zeros(0, dtype=np.float64)
    return model.predict_values(X.values)


def linear_weights(model: FittedRegressor) -> tuple[dict[str, float], float]:
    """Per-column weights and the intercept of a linear model."""
    if model.kind != "linear":
        raise NotLinearError(f"weights are only exposed for linear models, got {model.kind}")
    weights = {name: float(w) for name, w in zip(model.column_names, model.weights)}
    return weights, float(model.intercept)


# ---------------------------------------------------------------------------
# linear: normal equations with a ridge term
# ---------------------------------------------------------------------------


def _solve_ridge(
    values: np.ndarray, y: np.ndarray, ridge_lambda: float, intercept: bool
) -> tuple[np.ndarray, float]:
    """Minimise ||Xw + b - y||^2 + lambda ||w||^2 (intercept unpenalised).

    With the intercept free, the optimum satisfies b = mean(y) - mean(x) . w,
    which reduces the problem to ridge on centred data. The symmetric
    eigensolver keeps exactly collinear one-hot blocks finite and
    deterministic; zero eigenvalues fall back to the minimum-norm solution.
    """
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")
    n, d = values.shape
    if d == 0:
        b = float(np.mean(y)) if intercept else 0.0
        return np.zeros(0, dtype=np.float64), b
    if intercept:
        x_mean = values.mean(axis=0)
        y_mean = float(np.mean(y))
        centred = values - x_mean
        target = y - y_mean
    else:
        centred = values
        target = y
    gram = centred.T @ centred
    rhs = centred.T @ target
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    denominator = eigenvalues + ridge_lambda
    projected = eigenvectors.T @ rhs
    scaled = np.divide(
        projected,
        denominator,
        out=np.zeros_like(projected),
        where=denominator > 0,
    )
    weights = eigenvectors @ scaled
    b = float(y_mean - x_mean @ weights) if intercept else 0.0
    return weights, b


# ---------------------------------------------------------------------------
# mlp: one sigmoid hidden layer, full-batch gradient descent
# ---------------------------------------------------------------------------


def _sigmoid(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return np.where(z >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))


def default_hidden_size(n_inputs: int) -> int:
    return math.ceil((n_inputs + 1) / 2)


def mlp_parameter_count(n_inputs: int, hidden_size: int) -> int:
    return n_inputs * hidden_size + hidden_size + hidden_size + 1


def _unpack(theta: np.ndarray, n_inputs: int, hidden_size: int):
    offset = n_inputs * hidden_size
    w1 = theta[:offset].reshape(n_inputs, hidden_size)
    b1 = theta[offset : offset + hidden_size]
    w2 = theta[offset + hidden_size : offset + 2 * hidden_size]
    b2 = theta[-1]
    return w1, b1, w2, b2


def mlp_forward(theta: np.ndarray, X: np.ndarray, hidden_size: int) -> np.ndarray:
    """Network output for a flat parameter vector; used by loss and tests."""
    w1, b1, w2, b2 = _unpack(theta, X.shape[1], hidden_size)
    return _sigmoid(X @ w1 + b1) @ w2 + b2


def mlp_loss(theta: np.ndarray, X: np.ndarray, y: np.ndarray, hidden_size: int) -> float:
    residual = mlp_forward(theta, X, hidden_size) - y
    return float(np.mean(residual * residual))


def mlp_loss_and_gradient(
    theta: np.ndarray, X: np.ndarray, y: np.ndarray, hidden_size: int
) -> tuple[float, np.ndarray]:
    """Mean squared error and its analytic gradient w.r.t. ``theta``."""
    n = X.shape[0]
    w1, b1, w2, _ = _unpack(theta, X.shape[1], hidden_size)
    z1 = X @ w1 + b1
    a1 = _sigmoid(z1)
    out = a1 @ w2 + theta[-1]
    residual = out - y
    loss = float(np.mean(residual * residual))

    d_out = (2.0 / n) * residual
    g_w2 = a1.T @ d_out
    g_b2 = float(np.sum(d_out))
    d_a1 = np.outer(d_out, w2)
    d_z1 = d_a1 * a1 * (1.0 - a1)
    g_w1 = X.T @ d_z1
    g_b1 = d_z1.sum(axis=0)
    gradient = np.concatenate([g_w1.ravel(), g_b1, g_w2, [g_b2]])
    return loss, gradient


def _standardise(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return (values - mean) / std, mean, std


def _fit_mlp(X: FeatureMatrix, y: np.ndarray, params: dict[str, Any], seed: int) -> MLPModel:
    hidden_size = params["hidden_size"]
    if hidden_size is None:
        hidden_size = default_hidden_size(X.n_columns)
    hidden_size = int(hidden_size)
    epochs = int(params["epochs"])
    learning_rate = float(params["learning_rate"])
    if hidden_size < 1 or epochs < 1 or learning_rate <= 0:
        raise ValueError("mlp hyperparameters out of range")

    scaled_x, x_mean, x_std = _standardise(X.values)
    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    if y_std == 0.0:
        y_std = 1.0
    scaled_y = (y - y_mean) / y_std

    rng = np.random.default_rng(seed)
    n_inputs = X.n_columns
    theta = np.concatenate(
        [
            rng.normal(0.0, 1.0 / math.sqrt(max(n_inputs, 1)), n_inputs * hidden_size),
            np.zeros(hidden_size),
            rng.normal(0.0, 1.0 / math.sqrt(hidden_size), hidden_size),
            np.zeros(1),
        ]
    )

    loss_current = mlp_loss(theta, scaled_x, scaled_y, hidden_size)
    for _ in range(epochs):
        _, gradient = mlp_loss_and_gradient(theta, scaled_x, scaled_y, hidden_size)
        while True:
            candidate = theta - learning_rate * gradient
            loss_candidate = mlp_loss(candidate, scaled_x, scaled_y, hidden_size)
            if loss_candidate <= loss_current:
                theta = candidate
                loss_current = loss_candidate
                break
            learning_rate *= 0.5
            if learning_rate < _MIN_LEARNING_RATE:
                break
        if learning_rate < _MIN_LEARNING_RATE:
            break

    w1, b1, w2, b2 = _unpack(theta, n_inputs, hidden_size)
    return MLPModel(
        column_names=X.column_names,
        w1=w1.copy(),
        b1=b1.copy(),
        w2=w2.copy(),
        b2=float(b2),
        x_mean=x_mean,
        x_std=x_std,
        y_mean=y_mean,
        y_std=y_std,
    )


# ---------------------------------------------------------------------------
# svr: linear epsilon-insensitive loss, deterministic subgradient descent
# ---------------------------------------------------------------------------


def svr_objective(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, c: float, epsilon: float
) -> float:
    """0.5 ||w||^2 + C * sum(hinge) rescaled by 1/(C n) for stable step sizes."""
    n = X.shape[0]
    residual = y - X @ w - b
    hinge = np.maximum(0.0, np.abs(residual) - epsilon)
    return float((w @ w) / (2.0 * c * n) + np.mean(hinge))


def _fit_svr(X: FeatureMatrix, y: np.ndarray, params: dict[str, Any]) -> SVRModel:
    c = float(params["c"])
    epochs = int(params["epochs"])
    learning_rate = float(params["learning_rate"])
    if c <= 0 or epochs < 1 or learning_rate <= 0:
        raise ValueError("svr hyperparameters out of range")
    epsilon = params["epsilon"]
    if epsilon is None:
        epsilon = 0.1 * float(np.std(y))
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")

    scaled_x, x_mean, x_std = _standardise(X.values)
    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    if y_std == 0.0:
        y_std = 1.0
    scaled_y = (y - y_mean) / y_std
    scaled_epsilon = epsilon / y_std

    n = X.n_rows
    w = np.zeros(X.n_columns, dtype=np.float64)
    b = 0.0
    max_rate = learning_rate
    objective = svr_objective(w, b, scaled_x, scaled_y, c, scaled_epsilon)
    for _ in range(epochs):
        residual = scaled_y - scaled_x @ w - b
        active = np.sign(residual) * (np.abs(residual) > scaled_epsilon)
        g_w = w / (c * n) - (scaled_x.T @ active) / n
        g_b = -float(np.mean(active))
        while True:
            w_new = w - learning_rate * g_w
            b_new = b - learning_rate * g_b
            objective_new = svr_objective(w_new, b_new, scaled_x, scaled_y, c, scaled_epsilon)
            if objective_new <= objective:
                w, b, objective = w_new, b_new, objective_new
                # Let the step recover after halvings; cap at the configured rate.
                learning_rate = min(learning_rate * 1.2, max_rate)
                break
            learning_rate *= 0.5
            if learning_rate < _MIN_LEARNING_RATE:
                break
        if learning_rate < _MIN_LEARNING_RATE:
            break

    # Fold the standardisation into original-coordinate weights.
    weights = y_std * w / x_std
    intercept = y_mean + y_std * b - float(weights @ x_mean)
    return SVRModel(X.column_names, weights, intercept)
