"""Skip-gram word vectors with hashed character n-grams and negative sampling.

A word's input representation is the mean of its own vector (if in
vocabulary) and the vectors of the character n-grams of ``<word>``, hashed
with 32-bit FNV-1a into ``buckets`` slots. Only buckets reached by
vocabulary words are materialised; every other bucket is an implicit zero
vector.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ..numerics import log_sigmoid, make_rng, sigmoid
from ..serialization import load_container, save_container

log = logging.getLogger(__name__)

SKIPGRAM_FORMAT = "seqtag-skipgram/1"

_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


def fnv1a_32(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFF
    return h


def char_ngrams(word: str, minn: int = 3, maxn: int = 6) -> list[str]:
    """All n-grams of ``<word>`` with ``minn <= n <= maxn``, the full bracketed word excluded."""
    w = f"<{word}>"
    grams = []
    for n in range(minn, maxn + 1):
        for i in range(len(w) - n + 1):
            g = w[i:i + n]
            if g != w:
                grams.append(g)
    return grams


@dataclass(frozen=True)
class SkipgramConfig:
    dim: int = 200
    window: int = 5
    negatives: int = 10
    minn: int = 3
    maxn: int = 6
    buckets: int = 2 ** 18
    epochs: int = 5
    lr: float = 0.05
    min_count: int = 5
    seed: int = 0


@dataclass
class SkipgramModel:
    config: SkipgramConfig
    words: list[str]
    counts: list[int]
    bucket_ids: list[int]          # materialised bucket numbers, row order
    input_vectors: np.ndarray      # (len(words) + len(bucket_ids), dim)
    output_vectors: np.ndarray     # (len(words), dim)
    word_index: dict[str, int] = field(init=False)
    bucket_rows: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.word_index = {w: i for i, w in enumerate(self.words)}
        base = len(self.words)
        self.bucket_rows = {b: base + i for i, b in enumerate(self.bucket_ids)}
        if self.input_vectors.shape != (base + len(self.bucket_ids), self.config.dim):
            raise ValueError("input vector table has the wrong shape")
        if self.output_vectors.shape != (base, self.config.dim):
            raise ValueError("output vector table has the wrong shape")

    @property
    def dim(self) -> int:
        return self.config.dim

    def buckets_of(self, word: str) -> list[int]:
        cfg = self.config
        return [fnv1a_32(g.encode("utf-8")) % cfg.buckets for g in char_ngrams(word, cfg.minn, cfg.maxn)]

    def subword_rows(self, word: str) -> tuple[list[int], int]:
        """Materialised input rows composing ``word`` and the total component count."""
        rows = []
        total = 0
        idx = self.word_index.get(word)
        if idx is not None:
            rows.append(idx)
            total += 1
        for b in self.buckets_of(word):
            total += 1
            row = self.bucket_rows.get(b)
            if row is not None:
                rows.append(row)
        return rows, total

    def word_vector(self, word: str) -> np.ndarray:
        rows, total = self.subword_rows(word)
        if total == 0:
            return np.zeros(self.dim)
        return self.input_vectors[rows].sum(axis=0) / total

    def to_arrays(self) -> tuple[dict, dict[str, np.ndarray]]:
        meta = {"config": asdict(self.config), "words": self.words, "counts": self.counts,
                "bucket_ids": self.bucket_ids}
        return meta, {"input": self.input_vectors, "output": self.output_vectors}

    @classmethod
    def from_arrays(cls, meta: dict, arrays: dict[str, np.ndarray]) -> "SkipgramModel":
        return cls(SkipgramConfig(**meta["config"]), list(meta["words"]), list(meta["counts"]),
                   list(meta["bucket_ids"]), np.array(arrays["input"]), np.array(arrays["output"]))

    def save(self, path: str | Path) -> None:
        meta, arrays = self.to_arrays()
        save_container(path, SKIPGRAM_FORMAT, meta, arrays)

    @classmethod
    def load(cls, path: str | Path) -> "SkipgramModel":
        _, meta, arrays = load_container(path, SKIPGRAM_FORMAT)
        return cls.from_arrays(meta, arrays)


def word_vector(model: SkipgramModel, word: str) -> np.ndarray:
    return model.word_vector(word)


def pair_loss_and_grads(input_vectors: np.ndarray, output_vectors: np.ndarray, center_rows: Sequence[int],
                        n_components: int, context: int, negatives: Sequence[int]):
    """Negative-sampling loss for one (center, context) pair.

    ``loss = -log σ(u_ctx·v) - Σ_neg log σ(-u_neg·v)`` with ``v`` the mean of
    the center's ``n_components`` subword vectors (rows not listed are zero).
    Returns ``(loss, grad_input, grad_output)`` as dense arrays.
    """
    v = input_vectors[list(center_rows)].sum(axis=0) / n_components
    targets = np.concatenate([[context], np.asarray(negatives, dtype=np.int64)]).astype(np.int64)
    u = output_vectors[targets]
    scores = u @ v
    signs = np.ones(len(targets))
    signs[1:] = -1.0
    loss = float(-np.sum(log_sigmoid(signs * scores)))
    labels = np.zeros(len(targets))
    labels[0] = 1.0
    g = sigmoid(scores) - labels
    grad_in = np.zeros_like(input_vectors)
    grad_v = g @ u
    np.add.at(grad_in, list(center_rows), grad_v / n_components)
    grad_out = np.zeros_like(output_vectors)
    np.add.at(grad_out, targets, np.outer(g, v))
    return loss, grad_in, grad_out


def _negative_table(counts: Sequence[int]) -> np.ndarray:
    p = np.asarray(counts, dtype=np.float64) ** 0.75
    return p / p.sum()


def train_skipgram(sentences: Iterable[Sequence[str]], config: SkipgramConfig = SkipgramConfig(),
                   rng: Optional[np.random.Generator] = None) -> SkipgramModel:
    """Train skip-gram vectors on tokenized sentences with SGD and linear lr decay."""
    sentences = [list(s) for s in sentences]
    counter = Counter(w for s in sentences for w in s)
    n_tokens = sum(counter.values())
    if n_tokens <= config.window:
        raise ValueError(f"corpus has {n_tokens} tokens, not more than window {config.window}")
    vocab = sorted((w for w, n in counter.items() if n >= config.min_count), key=lambda w: (-counter[w], w))
    if len(vocab) < 2:
        raise ValueError("vocabulary needs at least two words above min_count")
    rng = rng or make_rng(config.seed, "skipgram")
    counts = [counter[w] for w in vocab]

    probe = SkipgramModel(config, vocab, counts, [], np.zeros((len(vocab), config.dim)),
                          np.zeros((len(vocab), config.dim)))
    bucket_ids = sorted({b for w in vocab for b in probe.buckets_of(w)})
    n_rows = len(vocab) + len(bucket_ids)
    inputs = rng.uniform(-1.0 / config.dim, 1.0 / config.dim, size=(n_rows, config.dim))
    model = SkipgramModel(config, vocab, counts, bucket_ids, inputs, np.zeros((len(vocab), config.dim)))

    index = model.word_index
    encoded = [[index[w] for w in s if w in index] for s in sentences]
    composition = [model.subword_rows(w) for w in vocab]
    neg_p = _negative_table(counts)
    total_steps = max(1, config.epochs * sum(len(s) for s in encoded))
    step = 0
    inp, out = model.input_vectors, model.output_vectors
    k = config.negatives
    for epoch in range(config.epochs):
        for sent in encoded:
            for pos, center in enumerate(sent):
                lr = config.lr * max(1.0 - step / total_steps, 1e-4)
                step += 1
                rows, n_comp = composition[center]
                rows = np.asarray(rows)
                reach = int(rng.integers(1, config.window + 1))
                lo, hi = max(0, pos - reach), min(len(sent), pos + reach + 1)
                for cpos in range(lo, hi):
                    if cpos == pos:
                        continue
                    ctx = sent[cpos]
                    negs = rng.choice(len(vocab), size=k, p=neg_p)
                    negs = negs[negs != ctx]
                    targets = np.concatenate([[ctx], negs])
                    v = inp[rows].sum(axis=0) / n_comp
                    u = out[targets]
                    labels = np.zeros(len(targets))
                    labels[0] = 1.0
                    g = sigmoid(u @ v) - labels
                    grad_v = g @ u
                    np.add.at(out, targets, -lr * np.outer(g, v))
                    np.add.at(inp, rows, -lr * grad_v / n_comp)
        log.info("skip-gram epoch %d/%d done", epoch + 1, config.epochs)
    return model


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))
