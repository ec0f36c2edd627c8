"""Embedding providers and their ordered concatenation."""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from ..corpus.document import Token
from .charlm import CharLmModel, extract_flair_embeddings
from .skipgram import SkipgramModel
from .vectors import WordVectors


class EmbeddingProvider(Protocol):
    kind: str
    dim: int

    def embed(self, sentence: str, tokens: Sequence[Token]) -> np.ndarray:
        """Return a ``(len(tokens), dim)`` matrix; token offsets index into ``sentence``."""

    def to_arrays(self) -> tuple[dict, dict[str, np.ndarray]]:
        ...


class FlairEmbeddings:
    kind = "flair"

    def __init__(self, forward: CharLmModel, backward: CharLmModel):
        if forward.vocab != backward.vocab:
            raise ValueError("forward and backward models must share a character vocabulary")
        self.forward = forward
        self.backward = backward
        self.dim = forward.hidden_size + backward.hidden_size

    def embed(self, sentence: str, tokens: Sequence[Token]) -> np.ndarray:
        return extract_flair_embeddings(self.forward, self.backward, sentence, tokens)

    def to_arrays(self):
        fmeta, farr = self.forward.to_arrays()
        bmeta, barr = self.backward.to_arrays()
        arrays = {f"fwd/{k}": v for k, v in farr.items()}
        arrays.update({f"bwd/{k}": v for k, v in barr.items()})
        return {"forward": fmeta, "backward": bmeta}, arrays

    @classmethod
    def from_arrays(cls, meta, arrays):
        fwd = CharLmModel.from_arrays(meta["forward"], {k[4:]: v for k, v in arrays.items() if k.startswith("fwd/")})
        bwd = CharLmModel.from_arrays(meta["backward"], {k[4:]: v for k, v in arrays.items() if k.startswith("bwd/")})
        return cls(fwd, bwd)


class SkipgramEmbeddings:
    kind = "skipgram"

    def __init__(self, model: SkipgramModel):
        self.model = model
        self.dim = model.dim

    def embed(self, sentence: str, tokens: Sequence[Token]) -> np.ndarray:
        if not tokens:
            return np.zeros((0, self.dim))
        return np.stack([self.model.word_vector(t.text) for t in tokens])

    def to_arrays(self):
        return self.model.to_arrays()

    @classmethod
    def from_arrays(cls, meta, arrays):
        return cls(SkipgramModel.from_arrays(meta, arrays))


class WordVectorEmbeddings:
    kind = "word2vec"

    def __init__(self, vectors: WordVectors):
        self.vectors = vectors
        self.dim = vectors.dim

    def embed(self, sentence: str, tokens: Sequence[Token]) -> np.ndarray:
        if not tokens:
            return np.zeros((0, self.dim))
        return np.stack([self.vectors.lookup(t.text) for t in tokens])

    def to_arrays(self):
        return {"words": self.vectors.words}, {"matrix": self.vectors.matrix}

    @classmethod
    def from_arrays(cls, meta, arrays):
        return cls(WordVectors(meta["words"], arrays["matrix"]))


PROVIDER_TYPES = {c.kind: c for c in (FlairEmbeddings, SkipgramEmbeddings, WordVectorEmbeddings)}


def stack_embeddings(providers: Sequence[EmbeddingProvider], sentence: str,
                     tokens: Sequence[Token]) -> np.ndarray:
    """Concatenate provider outputs per token, in provider order."""
    if not providers:
        raise ValueError("need at least one embedding provider")
    blocks = []
    for p in providers:
        block = np.asarray(p.embed(sentence, tokens), dtype=np.float64)
        if block.shape != (len(tokens), p.dim):
            raise ValueError(f"{p.kind} provider returned shape {block.shape}, expected {(len(tokens), p.dim)}")
        blocks.append(block)
    return np.concatenate(blocks, axis=1)


class EmbeddingStack:
    """Fixed-order list of providers; output width is the sum of their dims."""

    def __init__(self, providers: Sequence[EmbeddingProvider]):
        if not providers:
            raise ValueError("need at least one embedding provider")
        self.providers = list(providers)
        self.dim = sum(p.dim for p in self.providers)

    def embed(self, sentence: str, tokens: Sequence[Token]) -> np.ndarray:
        return stack_embeddings(self.providers, sentence, tokens)

    def to_arrays(self) -> tuple[list, dict[str, np.ndarray]]:
        metas, arrays = [], {}
        for i, p in enumerate(self.providers):
            meta, arr = p.to_arrays()
            metas.append({"kind": p.kind, "meta": meta})
            arrays.update({f"emb{i}/{k}": v for k, v in arr.items()})
        return metas, arrays

    @classmethod
    def from_arrays(cls, metas: list, arrays: dict[str, np.ndarray]) -> "EmbeddingStack":
        providers = []
        for i, entry in enumerate(metas):
            prefix = f"emb{i}/"
            sub = {k[len(prefix):]: v for k, v in arrays.items() if k.startswith(prefix)}
            providers.append(PROVIDER_TYPES[entry["kind"]].from_arrays(entry["meta"], sub))
        return cls(providers)
