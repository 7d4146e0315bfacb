"""Small dense-network core in numpy: forward, backprop, Adam, running input normalization.

Inputs are batched row-wise, shape (batch, features); a 1-D input is treated
as a batch of one and the output is returned 1-D as well.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("relu", "tanh", "linear")


class NonFiniteError(FloatingPointError):
    """A loss or gradient became NaN/inf; carries a short diagnostic."""


@dataclass(frozen=True)
class MlpSpec:
    layer_sizes: tuple[int, ...]
    hidden_activation: str = "relu"
    output_activation: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        if len(self.layer_sizes) < 2:
            raise ValueError("an MLP needs at least an input and an output layer")
        if min(self.layer_sizes) < 1:
            raise ValueError("layer sizes must be >= 1")
        if self.hidden_activation != "relu":
            raise ValueError("hidden activation must be relu")
        if self.output_activation not in ("tanh", "linear"):
            raise ValueError("output activation must be tanh or linear")

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def activation(self, layer: int) -> str:
        return self.output_activation if layer == self.n_layers - 1 else self.hidden_activation


@dataclass
class MlpWeights:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    # bumped by every in-place update; forward caches remember it
    version: int = 0

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> MlpWeights:
        return MlpWeights([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params()])

    def set_flat(self, vec: np.ndarray) -> None:
        i = 0
        for p in self.params():
            p[...] = vec[i: i + p.size].reshape(p.shape)
            i += p.size

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.params())


def init_weights(spec: MlpSpec, rng: np.random.Generator, final_scale: float = 1.0) -> MlpWeights:
    """Uniform +-1/sqrt(fan_in) init; the last layer is additionally multiplied by ``final_scale``."""
    ws, bs = [], []
    for i, (n_in, n_out) in enumerate(zip(spec.layer_sizes[:-1], spec.layer_sizes[1:])):
        bound = 1.0 / np.sqrt(n_in)
        w = rng.uniform(-bound, bound, size=(n_in, n_out))
        b = rng.uniform(-bound, bound, size=n_out)
        if i == spec.n_layers - 1:
            w *= final_scale
            b *= final_scale
        ws.append(w)
        bs.append(b)
    return MlpWeights(ws, bs)


def zero_weights(spec: MlpSpec) -> MlpWeights:
    sizes = spec.layer_sizes
    return MlpWeights([np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])],
                      [np.zeros(b) for b in sizes[1:]])


@dataclass
class ForwardCache:
    inputs: list[np.ndarray]
    outputs: list[np.ndarray]
    weights_key: tuple[int, int]
    squeeze: bool


def _check_shapes(w: MlpWeights, spec: MlpSpec) -> None:
    if len(w.weights) != spec.n_layers:
        raise ValueError("weights do not match the network spec")
    for i, (W, b) in enumerate(zip(w.weights, w.biases)):
        if W.shape != (spec.layer_sizes[i], spec.layer_sizes[i + 1]) or b.shape != (spec.layer_sizes[i + 1],):
            raise ValueError(f"layer {i} has shape {W.shape}, expected "
                             f"{(spec.layer_sizes[i], spec.layer_sizes[i + 1])}")


def forward(w: MlpWeights, spec: MlpSpec, x):
    """Returns (output, cache); the cache feeds :func:`backward`."""
    _check_shapes(w, spec)
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.shape[-1] != spec.layer_sizes[0]:
        raise ValueError(f"input has {h.shape[-1]} features, network expects {spec.layer_sizes[0]}")
    inputs, outputs = [], []
    for i, (W, b) in enumerate(zip(w.weights, w.biases)):
        inputs.append(h)
        z = h @ W + b
        act = spec.activation(i)
        if act == "relu":
            h = np.maximum(z, 0.0)
        elif act == "tanh":
            h = np.tanh(z)
        else:
            h = z
        outputs.append(h)
    cache = ForwardCache(inputs, outputs, (id(w), w.version), squeeze)
    return (h[0] if squeeze else h), cache


def backward(w: MlpWeights, spec: MlpSpec, cache: ForwardCache, output_grad):
    """Backprop ``output_grad`` (dL/d output, same shape as the output).

    Returns (param_grads, input_grad) where param_grads is an MlpWeights of
    gradients summed over the batch.
    """
    if cache.weights_key != (id(w), w.version) or len(cache.inputs) != spec.n_layers:
        raise ValueError("stale cache: weights changed or belong to another network")
    g = np.asarray(output_grad, dtype=float)
    if cache.squeeze:
        g = g[None, :]
    if g.shape != cache.outputs[-1].shape:
        raise ValueError("output_grad shape does not match the forward output")
    gws = [None] * spec.n_layers
    gbs = [None] * spec.n_layers
    for i in reversed(range(spec.n_layers)):
        out = cache.outputs[i]
        act = spec.activation(i)
        if act == "relu":
            g = g * (out > 0.0)
        elif act == "tanh":
            g = g * (1.0 - out * out)
        gws[i] = cache.inputs[i].T @ g
        gbs[i] = g.sum(axis=0)
        g = g @ w.weights[i].T
    return MlpWeights(gws, gbs), (g[0] if cache.squeeze else g)


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_weights(cls, w: MlpWeights, lr: float = 1e-4, **kw) -> AdamState:
        return cls(lr=lr, m=[np.zeros_like(p) for p in w.params()],
                   v=[np.zeros_like(p) for p in w.params()], **kw)


def adam_step(w: MlpWeights, grads: MlpWeights, st: AdamState) -> None:
    """In-place bias-corrected Adam descent step on ``w`` (and ``st``).

    A non-finite gradient leaves weights and state untouched and raises
    :class:`NonFiniteError`.
    """
    params, gparams = w.params(), grads.params()
    if len(params) != len(gparams) or any(p.shape != g.shape for p, g in zip(params, gparams)):
        raise ValueError("gradient shapes do not match the weights")
    for i, g in enumerate(gparams):
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient in parameter block {i} at Adam step {st.step + 1}")
    st.step += 1
    c1 = 1.0 - st.beta1 ** st.step
    c2 = 1.0 - st.beta2 ** st.step
    for p, g, m, v in zip(params, gparams, st.m, st.v):
        m *= st.beta1
        m += (1.0 - st.beta1) * g
        v *= st.beta2
        v += (1.0 - st.beta2) * g * g
        p -= st.lr * (m / c1) / (np.sqrt(v / c2) + st.eps)
    w.version += 1


def hard_sync(target: MlpWeights, online: MlpWeights) -> MlpWeights:
    """Copy ``online`` into ``target`` in place (no aliasing) and return it."""
    for t, o in zip(target.params(), online.params()):
        if t.shape != o.shape:
            raise ValueError("target and online networks differ in shape")
        t[...] = o
    target.version += 1
    return target


def soft_or_hard_sync(target: MlpWeights, online: MlpWeights, mode: str = "hard") -> MlpWeights:
    if mode != "hard":
        raise ValueError("only hard target sync is supported")
    return hard_sync(target, online)


@dataclass
class Normalizer:
    """Running per-feature mean/variance (Chan et al. parallel update)."""

    mean: np.ndarray
    var: np.ndarray
    count: float = 0.0
    eps: float = 1e-2

    @classmethod
    def create(cls, dim: int) -> Normalizer:
        return cls(np.zeros(dim), np.ones(dim), 0.0)

    def update(self, x) -> None:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        n = x.shape[0]
        b_mean = x.mean(axis=0)
        b_var = x.var(axis=0)
        if self.count == 0:
            self.mean, self.var, self.count = b_mean, b_var, float(n)
            return
        total = self.count + n
        delta = b_mean - self.mean
        m2 = self.var * self.count + b_var * n + delta * delta * self.count * n / total
        self.mean = self.mean + delta * n / total
        self.var = m2 / total
        self.count = total

    def __call__(self, x):
        # eps floors the std so constant features do not blow up
        return (np.asarray(x, dtype=float) - self.mean) / np.sqrt(self.var + self.eps ** 2)

    def copy(self) -> Normalizer:
        return copy.deepcopy(self)
