"""Prediction, gradients, and Adam training of the quantum network.

Two independent gradient routes exist on purpose: the parameter-shift
rule evaluates the circuit through the plain statevector simulator and
serves as the oracle; the adjoint engine is the fast path used by
``train``.  Their agreement (1e-8 absolute) is asserted in the tests.

The loss is the mean absolute error, optimized directly through its sign
subgradient; the subgradient at yhat == y is defined as 0, so training is
NaN-free.
"""

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import adjoint
from .circuit import AnsatzConfig, ParameterVector, assemble, init_parameters
from .statevector import apply_circuit, expval_z, zero_state


def predict(x, config: AnsatzConfig, params: ParameterVector) -> float:
    """Readout-weighted sum of per-qubit <Z> plus bias, via the simulator."""
    params.validate(config)
    spec = assemble(x, config, params)
    state = apply_circuit(zero_state(config.n_qubits), spec.gates)
    z = np.array([expval_z(state, q) for q in range(config.n_qubits)])
    return float(params.readout_weights @ z + params.readout_bias)


def loss_mae(predictions, targets) -> float:
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape or predictions.size == 0:
        raise ValueError("predictions and targets must be equal-length and non-empty")
    return float(np.mean(np.abs(predictions - targets)))


def _z_expectations(x, config, params) -> np.ndarray:
    spec = assemble(x, config, params)
    state = apply_circuit(zero_state(config.n_qubits), spec.gates)
    return np.array([expval_z(state, q) for q in range(config.n_qubits)])


def parameter_shift_gradient(x, config: AnsatzConfig, params: ParameterVector, target: float) -> np.ndarray:
    """Gradient of |predict(x) - target| via +-pi/2 shifts (oracle route).

    Returns the flat layout [quantum..., readout_weights..., bias].  Each
    trainable gate is a single Pauli rotation, so the shift rule is exact:
    d<Z>/d(angle) = (<Z>(+pi/2) - <Z>(-pi/2)) / 2.  Readout gradients are
    analytic.  The subgradient at yhat == target is zero.
    """
    params.validate(config)
    n = config.n_qubits
    nq = config.n_quantum_params
    z = _z_expectations(x, config, params)
    yhat = float(params.readout_weights @ z + params.readout_bias)
    grad = np.zeros(nq + n + 1)
    resid = yhat - target
    if resid == 0.0:
        return grad
    sign = 1.0 if resid > 0.0 else -1.0
    w = params.readout_weights
    for k in range(nq):
        shifted = params.quantum.copy()
        shifted[k] += math.pi / 2
        z_plus = _z_expectations(x, config, ParameterVector(shifted, w, params.readout_bias))
        shifted[k] -= math.pi
        z_minus = _z_expectations(x, config, ParameterVector(shifted, w, params.readout_bias))
        grad[k] = sign * float(w @ (z_plus - z_minus)) / 2.0
    grad[nq : nq + n] = sign * z
    grad[-1] = sign
    return grad


def adjoint_gradient(x, config: AnsatzConfig, params: ParameterVector, target: float) -> np.ndarray:
    """Same contract as parameter_shift_gradient, via the adjoint engine."""
    plan = adjoint.prepare(config, params)
    yhat, z, gq = adjoint.gradient_sample(plan, x, target)
    n = config.n_qubits
    grad = np.zeros(config.n_quantum_params + n + 1)
    grad[: config.n_quantum_params] = gq
    resid = yhat - target
    if resid != 0.0:
        sign = 1.0 if resid > 0.0 else -1.0
        grad[config.n_quantum_params : config.n_quantum_params + n] = sign * z
        grad[-1] = sign
    return grad


@dataclass
class AdamState:
    """First/second moment estimates plus hyperparameters."""

    t: int
    m: np.ndarray
    v: np.ndarray
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def init(cls, n_params: int, learning_rate: float = 0.05) -> "AdamState":
        return cls(t=0, m=np.zeros(n_params), v=np.zeros(n_params), learning_rate=learning_rate)


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray):
    """One bias-corrected Adam update; returns (new state, new params)."""
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError("parameter/gradient/moment shapes must match")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new_params = params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    new_state = AdamState(
        t=t, m=m, v=v,
        learning_rate=state.learning_rate, beta1=state.beta1,
        beta2=state.beta2, eps=state.eps,
    )
    return new_state, new_params


@dataclass
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 0.05
    seed: int = 0
    validation_months: int = 6

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.validation_months < 0:
            raise ValueError("validation_months must be >= 0")


@dataclass
class RunResult:
    """One seeded training run, in the shape the report code consumes."""

    config: dict
    seed: int
    train_mae: List[float]
    val_mae: List[float]
    test_predictions: np.ndarray
    wall_seconds: float
    param_count: int
    final_params: Optional[np.ndarray] = field(default=None, repr=False)


def train(X_train, y_train, X_test, config: AnsatzConfig, train_cfg: TrainConfig,
          destandardize=None) -> RunResult:
    """Full-batch Adam on standardized data.

    The last ``validation_months`` rows of the training partition are held
    out of the gradient batch and only monitored.  Per-epoch MAEs are
    recorded before each update, so entry 0 is the loss of the freshly
    initialized model.  Test predictions are mapped back to original units
    through ``destandardize`` when given.
    """
    X_train = np.asarray(X_train, dtype=float)
    y_train = np.asarray(y_train, dtype=float)
    X_test = np.asarray(X_test, dtype=float)
    v = train_cfg.validation_months
    if X_train.shape[0] - v < 1:
        raise ValueError(
            f"validation_months={v} leaves no rows to fit on "
            f"({X_train.shape[0]} training rows)"
        )
    X_fit, y_fit = X_train[: X_train.shape[0] - v], y_train[: X_train.shape[0] - v]
    X_val, y_val = X_train[X_train.shape[0] - v :], y_train[X_train.shape[0] - v :]

    t0 = time.perf_counter()
    rng = np.random.default_rng(train_cfg.seed)
    params = init_parameters(config, rng)
    flat = params.flatten()
    adam = AdamState.init(flat.shape[0], train_cfg.learning_rate)

    train_curve = []
    val_curve = []
    for epoch in range(train_cfg.epochs):
        params = ParameterVector.unflatten(config, flat)
        plan = adjoint.prepare(config, params)
        preds, grad = adjoint.batch_gradient(plan, X_fit, y_fit)
        epoch_loss = loss_mae(preds, y_fit)
        if not math.isfinite(epoch_loss):
            raise RuntimeError(
                f"training aborted: non-finite loss {epoch_loss} at epoch {epoch} "
                f"(seed {train_cfg.seed})"
            )
        train_curve.append(epoch_loss)
        if v > 0:
            val_curve.append(loss_mae(adjoint.batch_predict(plan, X_val), y_val))
        else:
            val_curve.append(0.0)
        adam, flat = adam_step(adam, flat, grad)

    params = ParameterVector.unflatten(config, flat)
    plan = adjoint.prepare(config, params)
    test_pred_std = adjoint.batch_predict(plan, X_test) if X_test.shape[0] else np.empty(0)
    test_pred = destandardize(test_pred_std) if destandardize is not None else test_pred_std

    from .circuit import parameter_count

    return RunResult(
        config={
            "model": "qnn",
            "n_qubits": config.n_qubits,
            "n_layers": config.n_layers,
            "topology": config.topology.value,
            "epochs": train_cfg.epochs,
            "learning_rate": train_cfg.learning_rate,
        },
        seed=train_cfg.seed,
        train_mae=train_curve,
        val_mae=val_curve,
        test_predictions=np.asarray(test_pred, dtype=float),
        wall_seconds=time.perf_counter() - t0,
        param_count=parameter_count(config),
        final_params=flat,
    )
