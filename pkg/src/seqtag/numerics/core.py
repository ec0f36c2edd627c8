"""Dense kernels shared by the learning modules.

All arrays are float64. Random streams come from numpy's PCG64 generator;
per-component children are derived from a root seed and a component name so
adding a component never perturbs the streams of the others.
"""

from __future__ import annotations

import zlib
from typing import Mapping, MutableMapping

import numpy as np
from scipy.special import expit

DTYPE = np.float64


def make_rng(seed: int, component: str | None = None) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``component`` selects a deterministic child stream."""
    if component is None:
        return np.random.Generator(np.random.PCG64(seed))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(component.encode("utf-8")),))
    return np.random.Generator(np.random.PCG64(ss))


def logsumexp(v, axis=None):
    """Max-shifted log-sum-exp. Empty input raises ``ValueError``."""
    v = np.asarray(v, dtype=DTYPE)
    if v.size == 0:
        raise ValueError("logsumexp of empty vector")
    m = np.max(v, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(v - m_safe), axis=axis, keepdims=True)) + m_safe
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)


def sigmoid(x):
    return expit(np.asarray(x, dtype=DTYPE))


def log_sigmoid(x):
    x = np.asarray(x, dtype=DTYPE)
    return -np.logaddexp(0.0, -x)


def softmax(x, axis=-1):
    x = np.asarray(x, dtype=DTYPE)
    z = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


def dropout_mask(shape, p: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted-dropout mask: zeros with probability ``p``, survivors ``1/(1-p)``."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if p == 0.0:
        return np.ones(shape, dtype=DTYPE)
    keep = rng.random(shape) >= p
    return keep / (1.0 - p)


def dropout_apply(v, p: float, rng: np.random.Generator, training: bool) -> np.ndarray:
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    v = np.asarray(v, dtype=DTYPE)
    if not training or p == 0.0:
        return v
    return v * dropout_mask(v.shape, p, rng)


def sgd_update(params: MutableMapping[str, np.ndarray], grads: Mapping[str, np.ndarray], lr: float) -> None:
    """In-place ``w -= lr * g`` for every gradient present in ``grads``."""
    for name, g in grads.items():
        w = params[name]
        if w.shape != g.shape:
            raise ValueError(f"{name}: parameter shape {w.shape} != gradient shape {g.shape}")
        w -= lr * g


def grad_norm(grads: Mapping[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_grad_norm(grads: MutableMapping[str, np.ndarray], max_norm: float) -> float:
    """Rescale ``grads`` in place so their global L2 norm is at most ``max_norm``."""
    norm = grad_norm(grads)
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= scale
    return norm


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    fan_out, fan_in = shape
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def check_finite(name: str, arr) -> None:
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"non-finite values in {name}")
