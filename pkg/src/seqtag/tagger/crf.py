"""Linear-chain CRF with virtual START/STOP states.

The transition matrix is ``(L+2, L+2)`` indexed ``[from, to]``; row ``L`` is
START and column ``L+1`` is STOP. Moves into START and out of STOP are fixed
at ``-inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..numerics import glorot_uniform, logsumexp

NEG_INF = -np.inf


@dataclass
class CrfParams:
    transitions: np.ndarray   # (L+2, L+2)
    W: np.ndarray             # (L, in_dim) emission projection
    b: np.ndarray             # (L,)

    @property
    def num_labels(self) -> int:
        return self.W.shape[0]

    @classmethod
    def init(cls, rng: np.random.Generator, num_labels: int, in_dim: int,
             allowed: np.ndarray | None = None) -> "CrfParams":
        trans = np.zeros((num_labels + 2, num_labels + 2))
        apply_structural_mask(trans, allowed)
        return cls(trans, glorot_uniform(rng, (num_labels, in_dim)), np.zeros(num_labels))

    def emissions(self, features: np.ndarray) -> np.ndarray:
        return features @ self.W.T + self.b


def apply_structural_mask(trans: np.ndarray, allowed: np.ndarray | None = None) -> np.ndarray:
    """Force ``-inf`` into START and out of STOP, plus wherever ``allowed`` is False."""
    L = trans.shape[0] - 2
    trans[:, L] = NEG_INF
    trans[L + 1, :] = NEG_INF
    if allowed is not None:
        trans[~allowed] = NEG_INF
    return trans


TransitionsLike = Union[CrfParams, np.ndarray]


def _trans(crf: TransitionsLike) -> np.ndarray:
    return crf.transitions if isinstance(crf, CrfParams) else np.asarray(crf, dtype=np.float64)


def _check(trans: np.ndarray, emissions: np.ndarray) -> int:
    if emissions.ndim != 2 or emissions.shape[0] < 1:
        raise ValueError("emissions must be a non-empty (T, L) matrix")
    L = emissions.shape[1]
    if trans.shape != (L + 2, L + 2):
        raise ValueError(f"transitions must be {(L + 2, L + 2)} for {L} labels, got {trans.shape}")
    return L


def crf_sequence_score(crf: TransitionsLike, emissions, labels: Sequence[int]) -> float:
    trans = _trans(crf)
    emissions = np.asarray(emissions, dtype=np.float64)
    L = _check(trans, emissions)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != emissions.shape[0]:
        raise ValueError("need one label per position")
    if labels.min() < 0 or labels.max() >= L:
        raise ValueError("label index out of range")
    START, STOP = L, L + 1
    score = trans[START, labels[0]] + trans[labels[-1], STOP]
    score += emissions[np.arange(len(labels)), labels].sum()
    score += trans[labels[:-1], labels[1:]].sum()
    return float(score)


def _forward(trans: np.ndarray, emissions: np.ndarray) -> np.ndarray:
    T, L = emissions.shape
    inner = trans[:L, :L]
    alpha = np.empty((T, L))
    alpha[0] = trans[L, :L] + emissions[0]
    for t in range(1, T):
        alpha[t] = logsumexp(alpha[t - 1][:, None] + inner, axis=0) + emissions[t]
    return alpha


def _backward(trans: np.ndarray, emissions: np.ndarray) -> np.ndarray:
    T, L = emissions.shape
    inner = trans[:L, :L]
    beta = np.empty((T, L))
    beta[T - 1] = trans[:L, L + 1]
    for t in range(T - 2, -1, -1):
        beta[t] = logsumexp(inner + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def crf_log_partition(crf: TransitionsLike, emissions) -> float:
    trans = _trans(crf)
    emissions = np.asarray(emissions, dtype=np.float64)
    L = _check(trans, emissions)
    alpha = _forward(trans, emissions)
    return logsumexp(alpha[-1] + trans[:L, L + 1])


def crf_marginals(crf: TransitionsLike, emissions):
    """Return ``(log_Z, unary (T, L), pairwise (T-1, L, L))`` posterior marginals."""
    trans = _trans(crf)
    emissions = np.asarray(emissions, dtype=np.float64)
    L = _check(trans, emissions)
    alpha = _forward(trans, emissions)
    beta = _backward(trans, emissions)
    log_z = logsumexp(alpha[-1] + trans[:L, L + 1])
    unary = np.exp(alpha + beta - log_z)
    pair = np.exp(alpha[:-1, :, None] + trans[None, :L, :L]
                  + (emissions[1:] + beta[1:])[:, None, :] - log_z)
    return log_z, unary, pair


def crf_nll_and_gradients(crf: TransitionsLike, emissions, gold: Sequence[int]):
    """Negative log-likelihood of ``gold`` with gradients w.r.t. emissions and transitions."""
    trans = _trans(crf)
    emissions = np.asarray(emissions, dtype=np.float64)
    L = _check(trans, emissions)
    gold = np.asarray(gold, dtype=np.int64)
    log_z, unary, pair = crf_marginals(trans, emissions)
    loss = log_z - crf_sequence_score(trans, emissions, gold)
    T = len(gold)

    grad_em = unary.copy()
    grad_em[np.arange(T), gold] -= 1.0

    grad_tr = np.zeros_like(trans)
    grad_tr[:L, :L] = pair.sum(axis=0)
    np.add.at(grad_tr, (gold[:-1], gold[1:]), -1.0)
    grad_tr[L, :L] = unary[0]
    grad_tr[L, gold[0]] -= 1.0
    grad_tr[:L, L + 1] = unary[-1]
    grad_tr[gold[-1], L + 1] -= 1.0
    return max(float(loss), 0.0), grad_em, grad_tr


def viterbi_decode(crf: TransitionsLike, emissions) -> tuple[list[int], float]:
    """Highest-scoring labeling; ties go to the lowest label index."""
    trans = _trans(crf)
    emissions = np.asarray(emissions, dtype=np.float64)
    L = _check(trans, emissions)
    T = emissions.shape[0]
    inner = trans[:L, :L]
    delta = trans[L, :L] + emissions[0]
    back = np.zeros((T, L), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + inner
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(L)] + emissions[t]
    final = delta + trans[:L, L + 1]
    best = int(np.argmax(final))
    path = [best]
    for t in range(T - 1, 0, -1):
        best = int(back[t, best])
        path.append(best)
    path.reverse()
    return path, crf_sequence_score(trans, emissions, path)
