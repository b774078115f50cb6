"""Dense feed-forward networks with hand-written backprop and Adam.

Everything is float64 numpy. Weight matrices are stored ``(out, in)`` so a
layer computes ``W @ x + b``; batched inputs are ``(batch, in)`` and use the
transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class Gradients(list):
    """Per-parameter gradients that are views into one flat buffer."""

    def __init__(self, flat: np.ndarray, views):
        super().__init__(views)
        self.flat = flat


def _flat_views(flat: np.ndarray, layer_dims) -> tuple[list[np.ndarray], list[np.ndarray]]:
    weights, biases = [], []
    pos = 0
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        weights.append(flat[pos : pos + fan_out * fan_in].reshape(fan_out, fan_in))
        pos += fan_out * fan_in
        biases.append(flat[pos : pos + fan_out])
        pos += fan_out
    return weights, biases


def n_params(layer_dims) -> int:
    return sum(o * i + o for i, o in zip(layer_dims[:-1], layer_dims[1:]))


@dataclass
class Mlp:
    """Rectifier hidden layers, identity output.

    All parameters live in ``flat``; ``weights`` and ``biases`` are views into it.
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.layer_dims = [int(d) for d in self.layer_dims]
        if len(self.layer_dims) < 3:
            raise ValueError("an Mlp needs at least one hidden layer")
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("number of weight/bias arrays does not match layer_dims")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if np.shape(w) != (self.layer_dims[i + 1], self.layer_dims[i]):
                raise ValueError(f"layer {i}: weight shape {np.shape(w)} does not match dims")
            if np.shape(b) != (self.layer_dims[i + 1],):
                raise ValueError(f"layer {i}: bias shape {np.shape(b)} does not match dims")
        self.flat = np.empty(n_params(self.layer_dims))
        weights, biases = _flat_views(self.flat, self.layer_dims)
        for dst, src in zip(weights + biases, list(self.weights) + list(self.biases)):
            dst[...] = src
        self.weights, self.biases = weights, biases

    @property
    def n_inputs(self) -> int:
        return self.layer_dims[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_dims[-1]

    def params(self) -> list[np.ndarray]:
        """Parameters in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "Mlp":
        return Mlp(list(self.layer_dims), self.weights, self.biases)

    def load_from(self, other: "Mlp") -> None:
        """Overwrite this network's parameters in place with ``other``'s."""
        if other.layer_dims != self.layer_dims:
            raise ValueError("topology mismatch")
        self.flat[...] = other.flat


@dataclass
class ForwardTrace:
    output: np.ndarray
    last_hidden: np.ndarray
    # pre[i] / post[i] belong to layer i; post[-1] is the output itself.
    inputs: np.ndarray
    pre: list[np.ndarray]
    post: list[np.ndarray]


def mlp_init(layer_dims, seed) -> Mlp:
    """He-normal weights (std sqrt(2 / fan_in)), zero biases.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    dims = [int(d) for d in layer_dims]
    if not dims:
        raise ValueError("layer_dims is empty")
    if any(d < 1 for d in dims):
        raise ValueError(f"all layer dims must be >= 1, got {dims}")
    if len(dims) < 3:
        raise ValueError("an Mlp needs at least one hidden layer")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(dims, weights, biases)


def mlp_forward(net: Mlp, x) -> ForwardTrace:
    """Forward pass for a single vector ``(in,)`` or a batch ``(batch, in)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.n_inputs:
        raise ValueError(f"expected input of length {net.n_inputs}, got {x.shape[-1]}")
    pre, post = [], []
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = h @ w.T + b
        h = a if i == last else np.maximum(a, 0.0)
        pre.append(a)
        post.append(h)
    return ForwardTrace(output=h, last_hidden=post[-2], inputs=x, pre=pre, post=post)


def predict(net: Mlp, x) -> np.ndarray:
    """Output only; skips keeping the per-layer trace."""
    h = np.asarray(x, dtype=np.float64)
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w.T + b
        if i != last:
            np.maximum(h, 0.0, out=h)
    return h


def backprop(net: Mlp, trace: ForwardTrace, grad_output: np.ndarray) -> Gradients:
    """Gradients of a scalar loss given dLoss/dOutput for a batched trace.

    Returned in ``net.params()`` order.
    """
    flat = np.empty_like(net.flat)
    gw, gb = _flat_views(flat, net.layer_dims)
    delta = grad_output
    for i in range(len(net.weights) - 1, -1, -1):
        below = trace.inputs if i == 0 else trace.post[i - 1]
        np.matmul(delta.T, below, out=gw[i])
        delta.sum(axis=0, out=gb[i])
        if i > 0:
            delta = (delta @ net.weights[i]) * (trace.pre[i - 1] > 0.0)
    views = []
    for w, b in zip(gw, gb):
        views.extend((w, b))
    return Gradients(flat, views)


def mlp_backward(net: Mlp, inputs, actions, targets) -> tuple[list[np.ndarray], float]:
    """MSE on the selected output unit of each sample.

    loss = mean_i (net(x_i)[a_i] - y_i)^2
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.float64)
    if actions.size and (actions.min() < 0 or actions.max() >= net.n_outputs):
        raise IndexError(f"action index out of range for {net.n_outputs} outputs")
    trace = mlp_forward(net, inputs)
    rows = np.arange(len(inputs))
    err = trace.output[rows, actions] - targets
    loss = float(np.mean(err**2))
    grad_out = np.zeros_like(trace.output)
    grad_out[rows, actions] = 2.0 * err / len(inputs)
    return backprop(net, trace, grad_out), loss


def mlp_backward_full(net: Mlp, inputs, targets) -> tuple[list[np.ndarray], float]:
    """MSE over every output unit: loss = mean_i ||net(x_i) - y_i||^2 / n_out."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    trace = mlp_forward(net, inputs)
    err = trace.output - targets
    loss = float(np.mean(err**2))
    grad_out = 2.0 * err / err.size
    return backprop(net, trace, grad_out), loss


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray | None = None
    v: np.ndarray | None = None

    @classmethod
    def for_net(cls, net: Mlp, **kwargs) -> "AdamState":
        return cls(m=np.zeros_like(net.flat), v=np.zeros_like(net.flat), **kwargs)


def adam_step(state: AdamState, net: Mlp, grads) -> Mlp:
    """In-place bias-corrected Adam update of ``net``; returns ``net``."""
    params = net.params()
    if len(grads) != len(params):
        raise ValueError("gradient list does not match parameter list")
    for p, g in zip(params, grads):
        if np.shape(g) != p.shape:
            raise ValueError(f"gradient shape {np.shape(g)} != parameter shape {p.shape}")
    g = grads.flat if isinstance(grads, Gradients) else np.concatenate([np.ravel(x) for x in grads])
    if state.m is None:
        state.m = np.zeros_like(net.flat)
        state.v = np.zeros_like(net.flat)
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    step_size = state.lr * np.sqrt(1.0 - b2**t) / (1.0 - b1**t)
    # eps is applied to the bias-corrected second moment, as in the usual form
    eps_hat = state.eps * np.sqrt(1.0 - b2**t)
    m, v = state.m, state.v
    m *= b1
    m += (1.0 - b1) * g
    v *= b2
    v += (1.0 - b2) * (g * g)
    net.flat -= step_size * m / (np.sqrt(v) + eps_hat)
    return net
