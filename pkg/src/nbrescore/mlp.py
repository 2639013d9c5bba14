"""From-scratch feedforward binary comparator.

ReLU hidden layers, a single sigmoid output unit, binary cross-entropy
loss, plain mini-batch gradient descent.  Everything is float64 and
deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

BCE_EPS = 1e-12


@dataclass(frozen=True)
class MlpSpec:
    input_dim: int
    hidden_dims: tuple[int, ...] = (32, 16)

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if not self.hidden_dims or any(d < 1 for d in self.hidden_dims):
            raise ValueError("need at least one hidden layer of positive size")

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, 1)


@dataclass
class MlpParams:
    spec: MlpSpec
    weights: list  # weights[k]: (layer_dims[k], layer_dims[k+1])
    biases: list  # biases[k]: (layer_dims[k+1],)

    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "MlpParams":
        return MlpParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("learning_rate, batch_size and epochs must be positive")


def init_mlp(spec: MlpSpec, seed: int) -> MlpParams:
    """Glorot-uniform weights (|w| <= sqrt(6/(fan_in+fan_out))), zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    dims = spec.layer_dims
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(spec, weights, biases)


def sigmoid(z):
    # numerically stable in both tails
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_batch(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Outputs in (0,1) for a (n, input_dim) batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.spec.input_dim:
        raise ValueError(f"expected (n, {params.spec.input_dim}) input, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature values")
    a = x
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        a = sigmoid(z) if k == last else np.maximum(z, 0.0)
    return a[:, 0]


def forward(params: MlpParams, features) -> float:
    return float(forward_batch(params, np.asarray(features, dtype=np.float64)[None, :])[0])


def bce_loss(v: float, label: int) -> float:
    """-[y ln v + (1-y) ln(1-v)] with v clamped to [eps, 1-eps]."""
    v = min(max(v, BCE_EPS), 1.0 - BCE_EPS)
    return -(label * math.log(v) + (1 - label) * math.log(1.0 - v))


def _forward_cached(params, x):
    acts = [x]
    zs = []
    last = len(params.weights) - 1
    a = x
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        zs.append(z)
        a = sigmoid(z) if k == last else np.maximum(z, 0.0)
        acts.append(a)
    return zs, acts


def _backward(params, x, y):
    """Mean-BCE gradients over a batch.  Returns (grads_w, grads_b, mean_loss)."""
    n = x.shape[0]
    zs, acts = _forward_cached(params, x)
    v = acts[-1][:, 0]
    vc = np.clip(v, BCE_EPS, 1.0 - BCE_EPS)
    loss = float(np.mean(-(y * np.log(vc) + (1 - y) * np.log(1.0 - vc))))

    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    # d(mean BCE)/dz at the output: (v - y) / n, with the clamp's dead zone honored
    dz = ((vc - y) * np.where((v > BCE_EPS) & (v < 1.0 - BCE_EPS), 1.0, 0.0) / n)[:, None]
    for k in range(len(params.weights) - 1, -1, -1):
        grads_w[k] = acts[k].T @ dz
        grads_b[k] = dz.sum(axis=0)
        if k > 0:
            da = dz @ params.weights[k].T
            dz = da * (zs[k - 1] > 0)
    return grads_w, grads_b, loss


def train(samples, spec: MlpSpec, config: TrainConfig):
    """Mini-batch gradient descent on the mean BCE of labeled pair samples.

    `samples` is an iterable of PairSample (all labeled) or an (X, y) pair
    of arrays.  Returns (params, per-epoch mean-loss list).
    """
    if isinstance(samples, tuple):
        x, y = samples
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
    else:
        rows, labels = [], []
        for s in samples:
            if s.label is None:
                raise ValueError("unlabeled sample in training stream")
            rows.append(s.features)
            labels.append(s.label)
        if not rows:
            raise ValueError("empty sample set")
        x = np.asarray(rows, dtype=np.float64)
        y = np.asarray(labels, dtype=np.float64)
    if x.shape[0] == 0:
        raise ValueError("empty sample set")
    if x.shape[1] != spec.input_dim:
        raise ValueError(f"feature dim {x.shape[1]} != spec input_dim {spec.input_dim}")

    params = init_mlp(spec, config.seed)
    rng = np.random.default_rng(config.seed + 1)
    n = x.shape[0]
    curve = []
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            gw, gb, loss = _backward(params, x[idx], y[idx])
            for k in range(len(params.weights)):
                params.weights[k] -= config.learning_rate * gw[k]
                params.biases[k] -= config.learning_rate * gb[k]
            epoch_loss += loss * len(idx)
        curve.append(epoch_loss / n)
    return params, curve


def grad_check(params: MlpParams, features, label: int, epsilon: float = 1e-5) -> float:
    """Max relative error between analytic gradients and central differences
    of the single-sample BCE loss, across every parameter.

    A parameter of layer k only enters the loss through that layer's
    pre-activation, and for a single sample perturbing W[a, b] by +-eps
    shifts z[b] by exactly +-eps * input[a] (the rest of z is untouched).
    All perturbations of one layer are therefore evaluated as one batched
    pass through the remaining layers instead of one full forward pass per
    parameter.
    """
    x = np.asarray(features, dtype=np.float64)[None, :]
    y = np.array([float(label)])
    gw, gb, _ = _backward(params, x, y)
    zs, acts = _forward_cached(params, x)
    last = len(params.weights) - 1

    def tail_losses(k, z_batch):
        a = sigmoid(z_batch) if k == last else np.maximum(z_batch, 0.0)
        for kk in range(k + 1, last + 1):
            z = a @ params.weights[kk] + params.biases[kk]
            a = sigmoid(z) if kk == last else np.maximum(z, 0.0)
        v = np.clip(a[:, 0], BCE_EPS, 1.0 - BCE_EPS)
        return -(label * np.log(v) + (1 - label) * np.log(1.0 - v))

    worst = 0.0
    for k in range(last + 1):
        a_prev = acts[k][0]
        z = zs[k][0]
        n_in, n_out = params.weights[k].shape
        # weight entries in ravel order, then the biases
        deltas = np.concatenate([np.repeat(a_prev, n_out), np.ones(n_out)]) * epsilon
        cols = np.concatenate([np.tile(np.arange(n_out), n_in), np.arange(n_out)])
        rows = np.arange(deltas.size)
        z_up = np.tile(z, (deltas.size, 1))
        z_down = z_up.copy()
        z_up[rows, cols] += deltas
        z_down[rows, cols] -= deltas
        numeric = (tail_losses(k, z_up) - tail_losses(k, z_down)) / (2.0 * epsilon)
        analytic = np.concatenate([gw[k].ravel(), gb[k]])
        # the 1e-6 floor keeps float64 noise in the difference quotient
        # (~1e-12 absolute) from registering on near-zero gradient entries
        denom = np.maximum(np.maximum(np.abs(numeric), np.abs(analytic)), 1e-6)
        worst = max(worst, float(np.max(np.abs(numeric - analytic) / denom)))
    return worst


MODEL_MAGIC = "nbrescore-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


def save_model(params: MlpParams, config_fingerprint: str) -> str:
    """Versioned text blob; weights as hex floats so the round trip is exact."""
    lines = [
        f"{MODEL_MAGIC} v{MODEL_VERSION}",
        f"config {config_fingerprint}",
        "dims " + " ".join(str(d) for d in params.spec.layer_dims),
    ]
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        lines.append(f"W {k} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(float(v).hex() for v in row))
        lines.append(f"b {k} {b.shape[0]}")
        lines.append(" ".join(float(v).hex() for v in b))
    return "\n".join(lines) + "\n"


def load_model(blob: str):
    """Inverse of save_model.  Returns (MlpParams, config_fingerprint)."""
    lines = blob.splitlines()
    if not lines or not lines[0].startswith(MODEL_MAGIC):
        raise ModelFormatError("not a model blob")
    version = lines[0].split()[-1]
    if version != f"v{MODEL_VERSION}":
        raise ModelFormatError(f"unsupported model version {version}")
    if len(lines) < 3 or not lines[1].startswith("config ") or not lines[2].startswith("dims "):
        raise ModelFormatError("missing config/dims header")
    fingerprint = lines[1][len("config ") :]
    dims = tuple(int(d) for d in lines[2].split()[1:])
    if len(dims) < 3 or dims[-1] != 1:
        raise ModelFormatError(f"bad layer dims {dims}")
    spec = MlpSpec(input_dim=dims[0], hidden_dims=dims[1:-1])

    weights, biases = [], []
    pos = 3
    try:
        for k, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
            header = lines[pos].split()
            if header[:2] != ["W", str(k)] or (int(header[2]), int(header[3])) != (fan_in, fan_out):
                raise ModelFormatError(f"shape inconsistency at layer {k}")
            pos += 1
            rows = []
            for _ in range(fan_in):
                row = [float.fromhex(v) for v in lines[pos].split()]
                if len(row) != fan_out:
                    raise ModelFormatError(f"shape inconsistency at layer {k}")
                rows.append(row)
                pos += 1
            weights.append(np.array(rows))
            header = lines[pos].split()
            if header[:2] != ["b", str(k)] or int(header[2]) != fan_out:
                raise ModelFormatError(f"shape inconsistency at layer {k} bias")
            pos += 1
            bias = [float.fromhex(v) for v in lines[pos].split()]
            if len(bias) != fan_out:
                raise ModelFormatError(f"shape inconsistency at layer {k} bias")
            biases.append(np.array(bias))
            pos += 1
    except (IndexError, ValueError, OverflowError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"corrupted model blob: {exc}") from None
    if not all(np.all(np.isfinite(w)) for w in weights):
        raise ModelFormatError("non-finite weights")
    return MlpParams(spec, weights, biases), fingerprint
