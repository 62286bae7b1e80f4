"""Encoders, stable activations, and the full-batch optimizer.

Losses in this package are deterministic functions of parameters, so
training is plain gradient descent with a backtracking line search rather
than anything stochastic. Both encoder families (lookup tables for finite
spaces, small MLPs for coordinate inputs) expose their parameters as one
flat vector so the optimizer and the finite-difference gradient checker
need no knowledge of parameter structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import Stream

__all__ = [
    "sigmoid",
    "k_sigmoid",
    "log_sigmoid",
    "log_one_minus_sigmoid",
    "softplus",
    "softmax",
    "cross_entropy",
    "guarded_log",
    "EmbeddingTable",
    "MlpEncoder",
    "forward",
    "grad_check",
    "OptimizerConfig",
    "minimize",
    "DivergenceError",
]

INIT_SCALE = 0.1


class DivergenceError(RuntimeError):
    """Raised when the line search cannot find any descent step."""


def sigmoid(z):
    """Logistic function, stable for large |z| in either direction."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def k_sigmoid(z, k: float):
    """Shifted logistic 1 / (1 + k e^(-z)); k = 1 recovers sigmoid.

    Computed as sigmoid(z - log k), which is exact: the two expressions
    agree as real functions and the shifted form inherits sigmoid's
    stability.
    """
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    return sigmoid(np.asarray(z, dtype=float) - np.log(k))


def log_sigmoid(z):
    """log sigmoid(z) = -log(1 + e^(-z)), safe for z very negative."""
    return -np.logaddexp(0.0, -np.asarray(z, dtype=float))


def log_one_minus_sigmoid(z):
    """log(1 - sigmoid(z)) = -log(1 + e^z), safe for z very positive."""
    return -np.logaddexp(0.0, np.asarray(z, dtype=float))


def softplus(z):
    """log(1 + e^z) without overflow; equals -log sigmoid(-z)."""
    return np.logaddexp(0.0, np.asarray(z, dtype=float))


def softmax(z):
    """Softmax over the last axis with max subtraction.

    Subtracting the max leaves the result unchanged mathematically and
    keeps every exponent non-positive, so no overflow is possible.
    """
    z = np.asarray(z, dtype=float)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def guarded_log(x):
    """Logarithm that refuses exact zeros and floors denormals.

    An exact zero reaching a loss means the model assigns zero probability
    to an observed event; that is an input error, not a numeric edge case,
    so it raises instead of returning -inf.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr == 0.0):
        raise ValueError("log of exact zero: an observed event has probability 0")
    if np.any(arr < 0.0):
        raise ValueError("log of negative value")
    out = np.log(np.maximum(arr, 1e-300))
    return out if out.ndim else float(out)


def cross_entropy(true_class: int, probs) -> float:
    """-log probs[true_class] for a validated probability vector."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"probs must be a vector, got shape {p.shape}")
    if np.any(p < 0.0):
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    if not 0 <= true_class < p.shape[0]:
        raise IndexError(f"class {true_class} out of range for {p.shape[0]} classes")
    return float(-guarded_log(p[true_class]))


@dataclass
class EmbeddingTable:
    """One d-dimensional row per item of a finite space."""

    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {self.rows.shape}")
        if not np.isfinite(self.rows).all():
            raise ValueError("embedding rows contain non-finite values")

    @property
    def n_items(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def random(cls, n_items: int, dim: int, seed: int) -> "EmbeddingTable":
        stream = Stream(seed)
        rows = stream.uniform(n_items * dim, -INIT_SCALE, INIT_SCALE)
        return cls(rows.reshape(n_items, dim))

    def flat(self) -> np.ndarray:
        return self.rows.reshape(-1).copy()

    def with_flat(self, params: np.ndarray) -> "EmbeddingTable":
        return EmbeddingTable(np.asarray(params, float).reshape(self.rows.shape))


class MlpEncoder:
    """Fully connected network with ramp (max(0, .)) hidden layers and a linear head.

    Parameters live in `weights` / `biases` lists but are read and written
    as one flat vector through `flat` / `set_flat`, matching the calling
    convention of `minimize` and `grad_check`. The ramp is piecewise
    linear, so finite-difference checks agree with the analytic gradient
    everywhere except exactly at a kink.
    """

    def __init__(self, sizes: tuple, seed: int = 0):
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError(f"need at least input and output sizes, got {sizes}")
        self.sizes = sizes
        stream = Stream(seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = stream.uniform(fan_out * fan_in, -INIT_SCALE, INIT_SCALE)
            self.weights.append(w.reshape(fan_out, fan_in))
            self.biases.append(stream.uniform(fan_out, -INIT_SCALE, INIT_SCALE))

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.reshape(-1))
            parts.append(b)
        return np.concatenate(parts)

    def set_flat(self, params: np.ndarray) -> None:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {params.shape}")
        pos = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = params[pos : pos + w.size].reshape(w.shape).copy()
            pos += w.size
            self.biases[i] = params[pos : pos + b.size].copy()
            pos += b.size

    def forward_batch(self, x: np.ndarray):
        """Outputs and per-layer activations for a batch of row vectors."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.T + b
            if i < last:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return h, acts

    def backward_batch(self, acts, grad_out: np.ndarray) -> np.ndarray:
        """Flat parameter gradient given upstream d(loss)/d(output)."""
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        g = np.atleast_2d(np.asarray(grad_out, dtype=float))
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = g.T @ acts[i]
            grads_b[i] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.weights[i]) * (acts[i] > 0.0)
        parts = []
        for gw, gb in zip(grads_w, grads_b):
            parts.append(gw.reshape(-1))
            parts.append(gb)
        return np.concatenate(parts)


def forward(encoder, x) -> np.ndarray:
    """Evaluate an encoder at one input.

    An EmbeddingTable expects an integer item index; an MlpEncoder expects
    a coordinate vector.
    """
    if isinstance(encoder, EmbeddingTable):
        i = int(x)
        if not 0 <= i < encoder.n_items:
            raise IndexError(f"item index {i} out of range for {encoder.n_items} items")
        return encoder.rows[i].copy()
    if isinstance(encoder, MlpEncoder):
        out, _ = encoder.forward_batch(np.asarray(x, dtype=float))
        return out[0]
    raise TypeError(f"cannot encode with {type(encoder).__name__}")


def grad_check(fun, params: np.ndarray, epsilon: float = 1e-5) -> float:
    """Largest relative gap between analytic and central-difference gradients.

    ``fun(params)`` must return ``(loss, grad)``. Each coordinate is
    perturbed by +/- epsilon; the per-coordinate relative error divides by
    max(1, |analytic|) so near-zero components are compared absolutely.
    """
    params = np.asarray(params, dtype=float)
    _, grad = fun(params)
    grad = np.asarray(grad, dtype=float)
    if grad.shape != params.shape:
        raise ValueError(f"gradient shape {grad.shape} != params shape {params.shape}")
    worst = 0.0
    for i in range(params.shape[0]):
        bumped = params.copy()
        bumped[i] = params[i] + epsilon
        up, _ = fun(bumped)
        bumped[i] = params[i] - epsilon
        down, _ = fun(bumped)
        numeric = (up - down) / (2.0 * epsilon)
        err = abs(grad[i] - numeric) / max(1.0, abs(grad[i]))
        worst = max(worst, err)
    return worst


@dataclass
class OptimizerConfig:
    """Settings for `minimize`; defaults suit the package's small problems."""

    step_size: float = 1.0
    max_iter: int = 2000
    tol: float = 1e-10
    seed: int = 0
    armijo_c: float = 1e-4
    min_step: float = 1e-18
    extra: dict = field(default_factory=dict)


def minimize(fun, x0: np.ndarray, config: OptimizerConfig | None = None):
    """Full-batch gradient descent with Armijo backtracking.

    Each iteration halves the step until the Armijo sufficient-decrease
    test passes, then doubles the accepted step for the next iteration so
    the search adapts in both directions. The returned trace of accepted
    losses is monotone nonincreasing by construction. Stops when the
    gradient norm falls below ``tol``; raises DivergenceError if no step
    down to ``min_step`` decreases the loss.

    Returns
    -------
    (x, trace)
        Final parameters and the array of loss values at each accepted
        iterate, starting with the initial loss.
    """
    cfg = config or OptimizerConfig()
    x = np.asarray(x0, dtype=float).copy()
    loss, grad = fun(x)
    if not np.isfinite(loss):
        raise ValueError(f"initial loss is not finite: {loss!r}")
    trace = [float(loss)]
    step = cfg.step_size
    for _ in range(cfg.max_iter):
        gnorm2 = float(np.dot(grad, grad))
        if np.sqrt(gnorm2) <= cfg.tol:
            break
        accepted = False
        while step >= cfg.min_step:
            candidate = x - step * grad
            cand_loss, cand_grad = fun(candidate)
            if np.isfinite(cand_loss) and cand_loss <= loss - cfg.armijo_c * step * gnorm2:
                x, loss, grad = candidate, cand_loss, cand_grad
                trace.append(float(loss))
                step *= 2.0
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise DivergenceError(
                f"line search failed at loss {loss!r}: no step above "
                f"{cfg.min_step:g} decreases it"
            )
    return x, np.asarray(trace)
