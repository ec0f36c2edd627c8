"""Single-layer bidirectional LSTM over a sentence of token vectors."""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from ..numerics import LstmCellParams, dropout_mask, lstm_sequence_backward, lstm_sequence_forward


class BiLstmCache(NamedTuple):
    in_mask: Optional[np.ndarray]
    out_mask: Optional[np.ndarray]
    fwd_caches: list
    bwd_caches: list
    hidden: int


def bilstm_encode(fwd: LstmCellParams, bwd: LstmCellParams, embeddings: np.ndarray,
                  dropout: float = 0.0, rng: Optional[np.random.Generator] = None,
                  training: bool = False) -> tuple[np.ndarray, BiLstmCache]:
    """Encode ``(T, D)`` inputs to ``(T, 2H)``: forward states, then backward states.

    Both directions start from zero state. In training mode dropout masks the
    inputs and the concatenated outputs.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("need a non-empty (T, D) sentence")
    if x.shape[1] != fwd.input_size or x.shape[1] != bwd.input_size:
        raise ValueError(f"embedding size {x.shape[1]} does not match BiLSTM input size {fwd.input_size}")
    use_dropout = training and dropout > 0.0
    in_mask = out_mask = None
    if use_dropout:
        if rng is None:
            raise ValueError("training with dropout needs an rng")
        in_mask = dropout_mask(x.shape, dropout, rng)
        x = x * in_mask
    hf, _, cf = lstm_sequence_forward(fwd, x)
    hb_rev, _, cb = lstm_sequence_forward(bwd, x[::-1])
    out = np.concatenate([hf, hb_rev[::-1]], axis=1)
    if use_dropout:
        out_mask = dropout_mask(out.shape, dropout, rng)
        out = out * out_mask
    return out, BiLstmCache(in_mask, out_mask, cf, cb, fwd.hidden_size)


def bilstm_backward(fwd: LstmCellParams, bwd: LstmCellParams, cache: BiLstmCache, grad_out: np.ndarray):
    """Returns ``(grad_fwd, grad_bwd, grad_embeddings)``."""
    g = np.asarray(grad_out, dtype=np.float64)
    if cache.out_mask is not None:
        g = g * cache.out_mask
    H = cache.hidden
    gf, dxf, _, _ = lstm_sequence_backward(fwd, cache.fwd_caches, g[:, :H])
    gb, dxb_rev, _, _ = lstm_sequence_backward(bwd, cache.bwd_caches, g[::-1, H:])
    dx = dxf + dxb_rev[::-1]
    if cache.in_mask is not None:
        dx = dx * cache.in_mask
    return gf, gb, dx
