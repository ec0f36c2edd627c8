"""Pretrained word vectors in word2vec text format."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from ..corpus.formats import FormatError

log = logging.getLogger(__name__)


class WordVectors:
    """Read-only lookup table; unknown words map to a zero vector."""

    def __init__(self, words: list[str], matrix: np.ndarray):
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must have one row per word")
        self.words = list(words)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def lookup(self, word: str) -> np.ndarray:
        i = self.index.get(word)
        if i is None:
            log.debug("no pretrained vector for %r; using zeros", word)
            return np.zeros(self.dim)
        return self.matrix[i].copy()

    @classmethod
    def from_mapping(cls, table: Mapping[str, Iterable[float]]) -> "WordVectors":
        words = list(table)
        return cls(words, np.array([list(table[w]) for w in words], dtype=np.float64))


def load_word2vec_text(stream: Iterable[str]) -> WordVectors:
    """Parse ``count dim`` header then ``word v1 ... v_dim`` lines."""
    it = iter(stream)
    try:
        header = next(it)
    except StopIteration:
        raise FormatError("empty word2vec file", 1) from None
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(f"header must be 'count dim', got {header.strip()!r}", 1)
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"non-integer header {header.strip()!r}", 1) from None
    words, rows = [], []
    for lineno, raw in enumerate(it, 2):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.rstrip(" ").split(" ")
        if len(fields) != dim + 1:
            raise FormatError(f"expected {dim} values, got {len(fields) - 1}", lineno)
        try:
            rows.append([float(x) for x in fields[1:]])
        except ValueError:
            raise FormatError("non-numeric vector component", lineno) from None
        words.append(fields[0])
    if len(words) != count:
        log.warning("word2vec header announces %d vectors, found %d; using %d", count, len(words), len(words))
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return WordVectors(words, matrix)


def load_word2vec_file(path: str | Path) -> WordVectors:
    with open(path, encoding="utf-8") as fh:
        return load_word2vec_text(fh)


def write_word2vec_text(vectors: WordVectors, stream: IO[str]) -> None:
    stream.write(f"{len(vectors)} {vectors.dim}\n")
    for w, row in zip(vectors.words, vectors.matrix):
        stream.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")
