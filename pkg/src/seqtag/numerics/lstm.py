"""LSTM cell: forward step, backward step, and unrolled sequence helpers.

Gate order in the stacked weights is (input, forget, cell candidate, output).
Inputs may be single vectors ``(D,)`` or batches ``(B, D)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import DTYPE, glorot_uniform, sigmoid


@dataclass
class LstmCellParams:
    W: np.ndarray  # (4H, D)
    U: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    def __post_init__(self):
        four_h = self.U.shape[0]
        if four_h % 4 or self.U.shape != (four_h, four_h // 4):
            raise ValueError(f"recurrent weights must be (4H, H), got {self.U.shape}")
        if self.W.ndim != 2 or self.W.shape[0] != four_h:
            raise ValueError(f"input weights must be (4H, D), got {self.W.shape}")
        if self.b.shape != (four_h,):
            raise ValueError(f"bias must be (4H,), got {self.b.shape}")

    @property
    def hidden_size(self) -> int:
        return self.U.shape[1]

    @property
    def input_size(self) -> int:
        return self.W.shape[1]

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int) -> "LstmCellParams":
        h4 = 4 * hidden_size
        return cls(np.zeros((h4, input_size)), np.zeros((h4, hidden_size)), np.zeros(h4))

    @classmethod
    def init(cls, rng: np.random.Generator, input_size: int, hidden_size: int) -> "LstmCellParams":
        """Glorot-uniform weights per gate block, zero biases, forget bias +1."""
        H = hidden_size
        W = np.concatenate([glorot_uniform(rng, (H, input_size)) for _ in range(4)])
        U = np.concatenate([glorot_uniform(rng, (H, H)) for _ in range(4)])
        b = np.zeros(4 * H)
        b[H:2 * H] = 1.0
        return cls(W, U, b)

    def as_dict(self, prefix: str) -> dict[str, np.ndarray]:
        return {f"{prefix}.W": self.W, f"{prefix}.U": self.U, f"{prefix}.b": self.b}

    @classmethod
    def from_dict(cls, params, prefix: str) -> "LstmCellParams":
        return cls(params[f"{prefix}.W"], params[f"{prefix}.U"], params[f"{prefix}.b"])


class LstmCache(NamedTuple):
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    tanh_c: np.ndarray


def _gates(z: np.ndarray, H: int):
    i = sigmoid(z[..., :H])
    f = sigmoid(z[..., H:2 * H])
    g = np.tanh(z[..., 2 * H:3 * H])
    o = sigmoid(z[..., 3 * H:])
    return i, f, g, o


def _check_shapes(params: LstmCellParams, x, h_prev, c_prev):
    H, D = params.hidden_size, params.input_size
    if x.shape[-1] != D:
        raise ValueError(f"input has size {x.shape[-1]}, cell expects {D}")
    if h_prev.shape[-1] != H or c_prev.shape[-1] != H:
        raise ValueError(f"state size must be {H}")
    if h_prev.shape != c_prev.shape or h_prev.shape[:-1] != x.shape[:-1]:
        raise ValueError("batch shapes of x, h_prev and c_prev disagree")


def lstm_cell_forward(params: LstmCellParams, x, h_prev, c_prev):
    """One step; returns ``(h, c, cache)``."""
    x = np.asarray(x, dtype=DTYPE)
    h_prev = np.asarray(h_prev, dtype=DTYPE)
    c_prev = np.asarray(c_prev, dtype=DTYPE)
    _check_shapes(params, x, h_prev, c_prev)
    z = x @ params.W.T + h_prev @ params.U.T + params.b
    return _finish_step(z, h_prev, c_prev, x, params.hidden_size)


def _finish_step(z, h_prev, c_prev, x, H):
    i, f, g, o = _gates(z, H)
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    return h, c, LstmCache(x, h_prev, c_prev, i, f, g, o, tanh_c)


def lstm_cell_step(params: LstmCellParams, x, h_prev, c_prev):
    h, c, _ = lstm_cell_forward(params, x, h_prev, c_prev)
    return h, c


def _preact_grad(cache: LstmCache, grad_h, grad_c):
    i, f, g, o, tanh_c = cache.i, cache.f, cache.g, cache.o, cache.tanh_c
    do = grad_h * tanh_c
    dc = grad_c + grad_h * o * (1.0 - tanh_c * tanh_c)
    dz = np.concatenate([
        dc * g * i * (1.0 - i),
        dc * cache.c_prev * f * (1.0 - f),
        dc * i * (1.0 - g * g),
        do * o * (1.0 - o),
    ], axis=-1)
    return dz, dc * f


def lstm_cell_backward(params: LstmCellParams, cache: LstmCache, grad_h, grad_c):
    """Backpropagate one step.

    Returns ``(grad_params, grad_x, grad_h_prev, grad_c_prev)``; batched
    caches have their parameter gradients summed over the batch.
    """
    grad_h = np.asarray(grad_h, dtype=DTYPE)
    grad_c = np.asarray(grad_c, dtype=DTYPE)
    if grad_h.shape != cache.h_prev.shape or grad_c.shape != cache.c_prev.shape:
        raise ValueError("upstream gradient shape does not match the cached state")
    dz, grad_c_prev = _preact_grad(cache, grad_h, grad_c)
    dz2 = dz.reshape(-1, dz.shape[-1])
    grads = LstmCellParams(
        dz2.T @ cache.x.reshape(-1, cache.x.shape[-1]),
        dz2.T @ cache.h_prev.reshape(-1, cache.h_prev.shape[-1]),
        dz2.sum(axis=0),
    )
    return grads, dz @ params.W, dz @ params.U, grad_c_prev


def lstm_sequence_forward(params: LstmCellParams, xs, h0=None, c0=None):
    """Unroll over the leading axis of ``xs`` (``(T, D)`` or ``(T, B, D)``).

    Returns ``(hs, (h_T, c_T), caches)`` with ``hs`` shaped ``(T, ..., H)``.
    """
    xs = np.asarray(xs, dtype=DTYPE)
    H = params.hidden_size
    if xs.shape[-1] != params.input_size:
        raise ValueError(f"input has size {xs.shape[-1]}, cell expects {params.input_size}")
    state_shape = xs.shape[1:-1] + (H,)
    h = np.zeros(state_shape) if h0 is None else np.asarray(h0, dtype=DTYPE)
    c = np.zeros(state_shape) if c0 is None else np.asarray(c0, dtype=DTYPE)
    pre = xs @ params.W.T + params.b
    UT = params.U.T
    hs = np.empty(xs.shape[:-1] + (H,))
    caches = []
    for t in range(xs.shape[0]):
        h, c, cache = _finish_step(pre[t] + h @ UT, h, c, xs[t], H)
        hs[t] = h
        caches.append(cache)
    return hs, (h, c), caches


def lstm_sequence_backward(params: LstmCellParams, caches, grad_hs, grad_h_last=None,
                           grad_c_last=None):
    """Backpropagation through time over cached steps.

    Returns ``(grad_params, grad_xs, grad_h0, grad_c0)``.
    """
    grad_hs = np.asarray(grad_hs, dtype=DTYPE)
    T = len(caches)
    state_shape = grad_hs.shape[1:]
    dh = np.zeros(state_shape) if grad_h_last is None else np.array(grad_h_last, dtype=DTYPE)
    dc = np.zeros(state_shape) if grad_c_last is None else np.array(grad_c_last, dtype=DTYPE)
    dzs = np.empty(grad_hs.shape[:-1] + (4 * params.hidden_size,))
    U = params.U
    for t in range(T - 1, -1, -1):
        dz, dc = _preact_grad(caches[t], dh + grad_hs[t], dc)
        dzs[t] = dz
        dh = dz @ U
    xs = np.stack([c.x for c in caches])
    h_prevs = np.stack([c.h_prev for c in caches])
    dz2 = dzs.reshape(-1, dzs.shape[-1])
    grads = LstmCellParams(
        dz2.T @ xs.reshape(-1, xs.shape[-1]),
        dz2.T @ h_prevs.reshape(-1, h_prevs.shape[-1]),
        dz2.sum(axis=0),
    )
    return grads, dzs @ params.W, dh, dc


def lstm_run(params: LstmCellParams, xs, h0: Optional[np.ndarray] = None,
             c0: Optional[np.ndarray] = None) -> np.ndarray:
    """Hidden states only; no cache is kept."""
    hs, _, _ = lstm_sequence_forward(params, xs, h0, c0)
    return hs
