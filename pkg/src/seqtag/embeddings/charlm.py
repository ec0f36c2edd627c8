"""Character-level LSTM language models and contextual string embeddings.

Training text is consumed as lines; each line is framed as
``BOS + chars + EOS`` (reversed first for the backward model) and the frames
are concatenated into one stream. The stream is cut into equal character
ranges ("splits"); the last split is held out for validation and the learning
rate is annealed split-wise on validation loss.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ..corpus.document import Token
from ..numerics import (
    LstmCellParams,
    PlateauScheduler,
    SgdConfig,
    clip_grad_norm,
    dropout_mask,
    logsumexp,
    lstm_sequence_backward,
    lstm_sequence_forward,
    make_rng,
    sgd_update,
)
from ..serialization import load_container, save_container

log = logging.getLogger(__name__)

CHARLM_FORMAT = "seqtag-charlm/1"
UNK, BOS, EOS = "<unk>", "<s>", "</s>"


class CharVocab:
    """Characters above a frequency floor plus reserved UNK/BOS/EOS (indices 0, 1, 2)."""

    def __init__(self, chars: Sequence[str]):
        self.items = [UNK, BOS, EOS] + [c for c in chars if c not in (UNK, BOS, EOS)]
        self.index = {c: i for i, c in enumerate(self.items)}

    UNK_ID, BOS_ID, EOS_ID = 0, 1, 2

    @classmethod
    def build(cls, texts: Iterable[str], min_freq: int = 5) -> "CharVocab":
        counts: Counter[str] = Counter()
        for t in texts:
            counts.update(t)
        return cls(sorted(c for c, n in counts.items() if n >= min_freq))

    def __len__(self) -> int:
        return len(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, CharVocab) and self.items == other.items

    def encode(self, text: str) -> np.ndarray:
        get = self.index.get
        return np.fromiter((get(c, 0) for c in text), dtype=np.int64, count=len(text))

    def decode(self, ids: Iterable[int]) -> str:
        return "".join(self.items[i] for i in ids)


@dataclass(frozen=True)
class CharLmConfig:
    hidden_size: int = 64
    embed_dim: int = 16
    seq_len: int = 50
    batch_size: int = 16
    n_splits: int = 10
    epochs: int = 1
    learning_rate: float = 20.0
    anneal_factor: float = 0.5
    patience: int = 10
    min_lr: float = 1e-3
    clip: float = 0.25
    dropout: float = 0.0
    min_char_freq: int = 5
    seed: int = 0

    @classmethod
    def preset(cls, name: str, **overrides) -> "CharLmConfig":
        if name == "desk":
            base = cls()
        elif name == "large":
            base = cls(hidden_size=2048, embed_dim=100, seq_len=300, batch_size=256,
                       n_splits=1500, patience=100, dropout=0.1)
        else:
            raise ValueError(f"unknown preset {name!r}")
        return replace(base, **overrides)


@dataclass
class CharLmModel:
    direction: str
    vocab: CharVocab
    params: dict[str, np.ndarray]
    config: CharLmConfig = field(default_factory=CharLmConfig)
    history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"direction must be forward or backward, got {self.direction!r}")
        V, E = self.params["emb"].shape
        if V != len(self.vocab):
            raise ValueError("embedding rows do not match vocabulary size")
        if self.params["lstm.W"].shape[1] != E:
            raise ValueError("LSTM input size does not match embedding size")
        if self.params["proj.W"].shape != (V, self.hidden_size):
            raise ValueError("projection must be (V, H)")

    @property
    def hidden_size(self) -> int:
        return self.params["lstm.U"].shape[1]

    @property
    def lstm(self) -> LstmCellParams:
        return LstmCellParams.from_dict(self.params, "lstm")

    @classmethod
    def init(cls, direction: str, vocab: CharVocab, config: CharLmConfig,
             rng: Optional[np.random.Generator] = None) -> "CharLmModel":
        rng = rng or make_rng(config.seed, f"charlm.{direction}")
        V, E, H = len(vocab), config.embed_dim, config.hidden_size
        params = {"emb": rng.uniform(-0.1, 0.1, size=(V, E))}
        params.update(LstmCellParams.init(rng, E, H).as_dict("lstm"))
        params["proj.W"] = rng.uniform(-0.1, 0.1, size=(V, H))
        params["proj.b"] = np.zeros(V)
        return cls(direction, vocab, params, config)

    def frame(self, text: str) -> np.ndarray:
        """Encode ``text`` as ``BOS + chars`` in this model's reading order."""
        body = text[::-1] if self.direction == "backward" else text
        return np.concatenate([[CharVocab.BOS_ID], self.vocab.encode(body)])

    def hidden_states(self, text: str) -> np.ndarray:
        """States after each framed input: row 0 follows BOS, row k the k-th char read."""
        ids = self.frame(text)
        hs, _, _ = lstm_sequence_forward(self.lstm, self.params["emb"][ids])
        return hs

    def next_char_log_probs(self, text: str) -> np.ndarray:
        hs = self.hidden_states(text)
        logits = hs @ self.params["proj.W"].T + self.params["proj.b"]
        return logits - logsumexp(logits, axis=-1)[:, None]

    def loss(self, text: str) -> float:
        """Mean next-character negative log-likelihood (nats/char), EOS included."""
        ids = np.concatenate([self.frame(text), [CharVocab.EOS_ID]])
        logp = self.next_char_log_probs(text)
        return float(-np.mean(logp[np.arange(len(ids) - 1), ids[1:]]))

    def stream_loss(self, stream: np.ndarray, batch_size: int) -> float:
        rows = _batchify(stream, batch_size)
        if rows.shape[1] < 2:
            rows = stream[None, :]
        loss, _, _ = _window_loss(self.params, rows[:, :-1], rows[:, 1:], None, None, None)
        return loss

    def to_arrays(self) -> tuple[dict, dict[str, np.ndarray]]:
        meta = {"direction": self.direction, "vocab": self.vocab.items[3:],
                "config": asdict(self.config), "history": list(self.history)}
        return meta, dict(self.params)

    @classmethod
    def from_arrays(cls, meta: dict, arrays: dict[str, np.ndarray]) -> "CharLmModel":
        return cls(meta["direction"], CharVocab(meta["vocab"]), {k: np.array(v) for k, v in arrays.items()},
                   CharLmConfig(**meta["config"]), list(meta.get("history", [])))

    def save(self, path: str | Path) -> None:
        meta, arrays = self.to_arrays()
        save_container(path, CHARLM_FORMAT, meta, arrays)

    @classmethod
    def load(cls, path: str | Path) -> "CharLmModel":
        _, meta, arrays = load_container(path, CHARLM_FORMAT)
        return cls.from_arrays(meta, arrays)


def build_stream(lines: Iterable[str], vocab: CharVocab, direction: str) -> np.ndarray:
    parts = []
    for line in lines:
        body = line[::-1] if direction == "backward" else line
        parts.append(np.concatenate([[CharVocab.BOS_ID], vocab.encode(body), [CharVocab.EOS_ID]]))
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts).astype(np.int64)


def _batchify(stream: np.ndarray, batch_size: int) -> np.ndarray:
    width = len(stream) // batch_size
    return stream[: width * batch_size].reshape(batch_size, width)


def _window_loss(params, inputs, targets, h0, c0, masks, want_grads: bool = False):
    """Mean cross-entropy over a ``(B, S)`` window; optionally the gradients."""
    lstm = LstmCellParams.from_dict(params, "lstm")
    x = params["emb"][inputs.T]                       # (S, B, E)
    if masks is not None:
        x = x * masks[0]
    hs, (hT, cT), caches = lstm_sequence_forward(lstm, x, h0, c0)
    hs_d = hs * masks[1] if masks is not None else hs
    logits = hs_d @ params["proj.W"].T + params["proj.b"]   # (S, B, V)
    lse = logsumexp(logits, axis=-1)
    tgt = targets.T
    picked = np.take_along_axis(logits, tgt[..., None], axis=-1)[..., 0]
    n = tgt.size
    loss = float(np.sum(lse - picked) / n)
    if not want_grads:
        return loss, (hT, cT), None
    dlogits = np.exp(logits - lse[..., None])
    np.put_along_axis(dlogits, tgt[..., None], np.take_along_axis(dlogits, tgt[..., None], axis=-1) - 1.0, axis=-1)
    dlogits /= n
    V = logits.shape[-1]
    grads = {
        "proj.W": dlogits.reshape(-1, V).T @ hs_d.reshape(-1, hs_d.shape[-1]),
        "proj.b": dlogits.reshape(-1, V).sum(axis=0),
    }
    dhs = dlogits @ params["proj.W"]
    if masks is not None:
        dhs = dhs * masks[1]
    g_lstm, dx, _, _ = lstm_sequence_backward(lstm, caches, dhs)
    grads.update(g_lstm.as_dict("lstm"))
    if masks is not None:
        dx = dx * masks[0]
    demb = np.zeros_like(params["emb"])
    np.add.at(demb, inputs.T.reshape(-1), dx.reshape(-1, dx.shape[-1]))
    grads["emb"] = demb
    return loss, (hT, cT), grads


def train_char_lm(lines: Iterable[str], direction: str = "forward",
                  config: CharLmConfig = CharLmConfig(),
                  vocab: Optional[CharVocab] = None) -> CharLmModel:
    """Train a next-character LM with truncated BPTT.

    Hidden state is carried across ``seq_len`` windows within a split and
    reset between splits. Validation loss on the held-out split after every
    training split drives the plateau scheduler.
    """
    lines = [l for l in lines if l]
    if not lines:
        raise ValueError("empty training corpus")
    vocab = vocab or CharVocab.build(lines, config.min_char_freq)
    if len(vocab) - 3 < 2:
        raise ValueError("degenerate character vocabulary (fewer than two characters)")
    if config.n_splits < 2:
        raise ValueError("need at least two splits (one is held out for validation)")
    rng = make_rng(config.seed, f"charlm.{direction}")
    model = CharLmModel.init(direction, vocab, config, rng)
    stream = build_stream(lines, vocab, direction)
    bounds = np.linspace(0, len(stream), config.n_splits + 1).astype(int)
    splits = [stream[bounds[i]:bounds[i + 1]] for i in range(config.n_splits)]
    train_splits, valid = splits[:-1], splits[-1]
    if len(valid) < 2:
        raise ValueError("corpus too small for the requested number of splits")

    sched = PlateauScheduler(SgdConfig(config.learning_rate, config.anneal_factor,
                                       config.patience, config.min_lr), higher_is_better=False)
    params = model.params
    H, E = config.hidden_size, config.embed_dim
    for epoch in range(config.epochs):
        for split_idx, split in enumerate(train_splits):
            rows = _batchify(split, min(config.batch_size, max(1, len(split) // 2)))
            h = c = None
            for t in range(0, rows.shape[1] - 1, config.seq_len):
                inputs = rows[:, t:t + config.seq_len]
                targets = rows[:, t + 1:t + 1 + config.seq_len]
                inputs = inputs[:, :targets.shape[1]]
                if inputs.shape[1] == 0:
                    break
                masks = None
                if config.dropout > 0:
                    S, B = inputs.shape[1], inputs.shape[0]
                    masks = (dropout_mask((S, B, E), config.dropout, rng),
                             dropout_mask((S, B, H), config.dropout, rng))
                _, (h, c), grads = _window_loss(params, inputs, targets, h, c, masks, want_grads=True)
                clip_grad_norm(grads, config.clip)
                sgd_update(params, grads, sched.lr)
            val = model.stream_loss(valid, config.batch_size)
            model.history.append(val)
            lr, improved = sched.report(val)
            log.info("%s LM epoch %d split %d: validation loss %.4f (lr %.4g%s)", direction,
                     epoch + 1, split_idx + 1, val, lr, "" if improved else ", no improvement")
    return model


def extract_flair_embeddings(fwd: CharLmModel, bwd: CharLmModel, sentence_text: str,
                             tokens: Sequence[Token]) -> np.ndarray:
    """Per-token ``[forward state after last char ; backward state after first char]``.

    Token offsets are relative to ``sentence_text``.
    """
    if fwd.direction != "forward" or bwd.direction != "backward":
        raise ValueError("need one forward and one backward model")
    if fwd.vocab != bwd.vocab:
        raise ValueError("forward and backward models must share a character vocabulary")
    n = len(sentence_text)
    for tok in tokens:
        if not 0 <= tok.start < tok.end <= n:
            raise ValueError(f"token ({tok.start}, {tok.end}) outside sentence of length {n}")
    if not tokens:
        return np.zeros((0, fwd.hidden_size + bwd.hidden_size))
    hf = fwd.hidden_states(sentence_text)
    hb = bwd.hidden_states(sentence_text)
    ends = np.array([t.end for t in tokens])
    starts = np.array([t.start for t in tokens])
    return np.concatenate([hf[ends], hb[n - starts]], axis=1)
