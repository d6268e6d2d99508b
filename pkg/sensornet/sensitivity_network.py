"""
Feedforward surrogate N -> y for extrapolating sensitivity metrics.

A 1 -> 64 -> 32 -> 1 network with ReLU hidden layers and identity output,
written directly in numpy with analytic backpropagation and a full-batch Adam
optimizer. Inputs are min-max scaled over the training range and targets
standardized; both sets of constants live in the model so predictions come
back in physical units. Separate models are trained for even and odd N.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import orjson
from pydantic import BaseModel, Field

from .errors import ConfigurationError, InsufficientDataError, NumericalFailure, PersistenceError
from .ground_state_metrology import Parity

logger = logging.getLogger(__name__)

LAYER_SIZES = (1, 64, 32, 1)


class TargetKind(str, Enum):
    DN = "dn"
    QFI = "qfi"


class TrainConfig(BaseModel):
    """Full-batch Adam settings"""
    epochs: int = Field(default=4000, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    seed: int = Field(default=0, ge=0)


@dataclass
class Normalization:
    """Min-max input scaling and target standardization"""
    x_min: float = 0.0
    x_span: float = 1.0
    y_mean: float = 0.0
    y_std: float = 1.0

    @classmethod
    def fit(cls, xs: np.ndarray, ys: np.ndarray) -> "Normalization":
        span = float(xs.max() - xs.min())
        std = float(ys.std())
        return cls(
            x_min=float(xs.min()),
            x_span=span if span > 0 else 1.0,
            y_mean=float(ys.mean()),
            y_std=std if std > 1e-12 else 1.0,
        )

    def scale_x(self, xs: np.ndarray) -> np.ndarray:
        return (xs - self.x_min) / self.x_span

    def scale_y(self, ys: np.ndarray) -> np.ndarray:
        return (ys - self.y_mean) / self.y_std

    def unscale_y(self, ys: np.ndarray) -> np.ndarray:
        return ys * self.y_std + self.y_mean


@dataclass
class AdamState:
    step: int
    first_moments: List[np.ndarray]
    second_moments: List[np.ndarray]

    @classmethod
    def zeros_like(cls, parameters: List[np.ndarray]) -> "AdamState":
        return cls(
            step=0,
            first_moments=[np.zeros_like(p) for p in parameters],
            second_moments=[np.zeros_like(p) for p in parameters],
        )


@dataclass
class MlpModel:
    """Weights (fan_in x fan_out), biases, normalization and metadata"""
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    parity: Parity
    target: TargetKind
    seed: int
    normalization: Normalization = field(default_factory=Normalization)
    optimizer: Optional[AdamState] = None

    @property
    def parameters(self) -> List[np.ndarray]:
        """Flat parameter list: W1, b1, W2, b2, W3, b3"""
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def to_dict(self) -> Dict:
        return {
            "layer_sizes": list(LAYER_SIZES),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "normalization": vars(self.normalization),
            "parity": self.parity.value,
            "target": self.target.value,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "MlpModel":
        if tuple(data.get("layer_sizes", ())) != LAYER_SIZES:
            raise ConfigurationError(f"Unsupported layer sizes {data.get('layer_sizes')}")
        model = cls(
            weights=[np.asarray(w, dtype=float) for w in data["weights"]],
            biases=[np.asarray(b, dtype=float) for b in data["biases"]],
            parity=Parity(data["parity"]),
            target=TargetKind(data["target"]),
            seed=int(data["seed"]),
            normalization=Normalization(**data["normalization"]),
        )
        for w, b, (fan_in, fan_out) in zip(model.weights, model.biases, zip(LAYER_SIZES, LAYER_SIZES[1:])):
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise ConfigurationError("Model arrays do not match the 1-64-32-1 layout")
        return model


def init_model(parity: Union[Parity, str], target: Union[TargetKind, str], seed: int) -> MlpModel:
    """Uniform(+-sqrt(1/fan_in)) weights, zero biases"""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(LAYER_SIZES, LAYER_SIZES[1:]):
        bound = np.sqrt(1.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, parity=Parity(parity), target=TargetKind(target), seed=seed)


def _forward_pass(model: MlpModel, inputs: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Pre-activations and activations for a column of scaled inputs"""
    activations = [inputs.reshape(-1, 1)]
    pre_activations = []
    last = len(model.weights) - 1
    for index, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = activations[-1] @ w + b
        pre_activations.append(z)
        activations.append(z if index == last else np.maximum(z, 0.0))
    return pre_activations, activations


def forward(model: MlpModel, x: float) -> float:
    """Prediction in physical units for a single size"""
    scaled = model.normalization.scale_x(np.array([float(x)]))
    _, activations = _forward_pass(model, scaled)
    return float(model.normalization.unscale_y(activations[-1][0, 0]))


def loss_and_gradients(model: MlpModel, inputs: np.ndarray, targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """Scaled-space MSE and its gradients, ordered like model.parameters"""
    pre_activations, activations = _forward_pass(model, inputs)
    targets = targets.reshape(-1, 1)
    residual = activations[-1] - targets
    loss = float(np.mean(residual ** 2))

    delta = 2.0 * residual / residual.shape[0]
    gradients: List[np.ndarray] = []
    for index in reversed(range(len(model.weights))):
        gradients.append(delta.sum(axis=0))
        gradients.append(activations[index].T @ delta)
        if index > 0:
            delta = (delta @ model.weights[index].T) * (pre_activations[index - 1] > 0)
    gradients.reverse()
    return loss, gradients


def adam_step(model: MlpModel, gradients: List[np.ndarray], cfg: TrainConfig) -> None:
    state = model.optimizer
    state.step += 1
    correction1 = 1.0 - cfg.beta1 ** state.step
    correction2 = 1.0 - cfg.beta2 ** state.step
    for parameter, gradient, m, v in zip(model.parameters, gradients, state.first_moments, state.second_moments):
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * gradient
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * gradient ** 2
        parameter -= cfg.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + cfg.epsilon)


def check_parity(Ns: np.ndarray, parity: Parity) -> None:
    if parity is Parity.ALL:
        return
    wanted = 0 if parity is Parity.EVEN else 1
    wrong = [int(N) for N in Ns if int(N) % 2 != wanted]
    if wrong:
        raise ConfigurationError(f"Sizes {wrong} do not have {parity.value} parity")


def split_by_parity(data: Sequence[Tuple[float, float]], parity: Union[Parity, str]) -> List[Tuple[float, float]]:
    parity = Parity(parity)
    if parity is Parity.ALL:
        return list(data)
    wanted = 0 if parity is Parity.EVEN else 1
    return [(N, y) for N, y in data if int(N) % 2 == wanted]


def train(
    data: Sequence[Tuple[float, float]],
    cfg: TrainConfig,
    parity: Union[Parity, str],
    target: Union[TargetKind, str],
) -> Tuple[MlpModel, List[float]]:
    """Fit the network to (N, y) pairs for exactly cfg.epochs full-batch Adam steps.

    The returned loss history is the mean squared error in physical units.
    """
    parity = Parity(parity)
    if len(data) < 2:
        raise InsufficientDataError(f"Training needs at least 2 points, got {len(data)}")
    Ns = np.array([float(N) for N, _ in data])
    ys = np.array([float(y) for _, y in data])
    check_parity(Ns, parity)
    if not (np.all(np.isfinite(Ns)) and np.all(np.isfinite(ys))):
        raise ConfigurationError("Training data contains non-finite values")

    model = init_model(parity, target, cfg.seed)
    model.normalization = Normalization.fit(Ns, ys)
    model.optimizer = AdamState.zeros_like(model.parameters)

    inputs = model.normalization.scale_x(Ns)
    targets = model.normalization.scale_y(ys)
    unit_scale = model.normalization.y_std ** 2

    history: List[float] = []
    for epoch in range(cfg.epochs):
        loss, gradients = loss_and_gradients(model, inputs, targets)
        if not np.isfinite(loss):
            raise NumericalFailure(f"Training loss became non-finite at epoch {epoch}")
        history.append(loss * unit_scale)
        adam_step(model, gradients, cfg)

    logger.info(
        f"Trained {parity.value}-N {TargetKind(target).value} model on {len(data)} points: "
        f"final MSE {history[-1]:.3e} after {cfg.epochs} epochs"
    )
    return model, history


def predict_series(model: MlpModel, Ns: Sequence[float]) -> List[Tuple[float, float]]:
    """(N, prediction) pairs"""
    if len(Ns) == 0:
        return []
    scaled = model.normalization.scale_x(np.asarray(Ns, dtype=float))
    _, activations = _forward_pass(model, scaled)
    predictions = model.normalization.unscale_y(activations[-1][:, 0])
    return [(float(N), float(y)) for N, y in zip(Ns, predictions)]


def gradient_check(model: MlpModel, inputs: np.ndarray, targets: np.ndarray, step: float = 1e-5) -> float:
    """Largest relative error between analytic and central-difference gradients"""
    _, analytic = loss_and_gradients(model, inputs, targets)
    worst = 0.0
    for parameter, gradient in zip(model.parameters, analytic):
        for index in np.ndindex(parameter.shape):
            original = parameter[index]
            parameter[index] = original + step
            upper, _ = loss_and_gradients(model, inputs, targets)
            parameter[index] = original - step
            lower, _ = loss_and_gradients(model, inputs, targets)
            parameter[index] = original
            numeric = (upper - lower) / (2 * step)
            scale = max(abs(numeric), abs(gradient[index]), 1e-6)
            worst = max(worst, abs(numeric - gradient[index]) / scale)
    return worst


def save_model(model: MlpModel, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.write_bytes(orjson.dumps(model.to_dict(), option=orjson.OPT_INDENT_2))
    except OSError as e:
        raise PersistenceError(f"Failed to write model ({e})", path) from e


def load_model(path: Union[str, Path]) -> MlpModel:
    path = Path(path)
    try:
        return MlpModel.from_dict(orjson.loads(path.read_bytes()))
    except OSError as e:
        raise PersistenceError(f"Failed to read model ({e})", path) from e
    except (orjson.JSONDecodeError, KeyError) as e:
        raise ConfigurationError(f"Model file is malformed: {path}") from e
