"""One-hidden-layer perceptrons with hand-written backprop, and Adam."""

from __future__ import annotations

import numpy as np


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


class DimensionMismatch(ValueError):
    pass


class MLP:
    """``in -> hidden (ReLU) -> out``, batch-first.

    Weights start uniform in +-1/sqrt(fan_in), as do biases.
    """

    names = ("W1", "b1", "W2", "b2")

    def __init__(self, n_in: int, n_hidden: int, n_out: int, rng: np.random.Generator | None = None):
        self.n_in, self.n_hidden, self.n_out = n_in, n_hidden, n_out
        rng = rng if rng is not None else np.random.default_rng()
        a1, a2 = 1 / np.sqrt(n_in), 1 / np.sqrt(n_hidden)
        self.params = {
            "W1": rng.uniform(-a1, a1, (n_hidden, n_in)),
            "b1": rng.uniform(-a1, a1, n_hidden),
            "W2": rng.uniform(-a2, a2, (n_out, n_hidden)),
            "b2": rng.uniform(-a2, a2, n_out),
        }

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        """Returns outputs and the cache needed by :meth:`backward`."""
        if x.shape[-1] != self.n_in:
            raise DimensionMismatch(f"input has {x.shape[-1]} features, net expects {self.n_in}")
        p = self.params
        z1 = x @ p["W1"].T + p["b1"]
        h = np.maximum(z1, 0.0)
        return h @ p["W2"].T + p["b2"], (x, z1, h)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, dy: np.ndarray, cache: tuple) -> dict[str, np.ndarray]:
        x, z1, h = cache
        p = self.params
        if dy.ndim == 1:
            dy, x, z1, h = dy[None], x[None], z1[None], h[None]
        dz1 = (dy @ p["W2"]) * (z1 > 0)
        return {
            "W1": dz1.T @ x,
            "b1": dz1.sum(axis=0),
            "W2": dy.T @ h,
            "b2": dy.sum(axis=0),
        }

    def copy(self) -> "MLP":
        new = MLP.__new__(MLP)
        new.n_in, new.n_hidden, new.n_out = self.n_in, self.n_hidden, self.n_out
        new.params = {k: v.copy() for k, v in self.params.items()}
        return new

    def flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in self.names])

    def set_flat(self, v: np.ndarray):
        i = 0
        for k in self.names:
            a = self.params[k]
            a[...] = v[i:i + a.size].reshape(a.shape)
            i += a.size


def flatten(grads: dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([grads[k].ravel() for k in MLP.names])


class Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.lr, self.eps = lr, eps
        self.b1, self.b2 = betas
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]):
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            self.params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
