"""BiLSTM-CRF tagger for one entity type."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from ..corpus.document import Document, EntitySpan, EntityType, IobesLabel, Token
from ..corpus.iobes import decode_iobes
from ..corpus.text import document_tokens, group_sentences, split_sentences, tokenize
from ..embeddings.stack import EmbeddingStack
from ..numerics import LstmCellParams, make_rng
from ..serialization import load_container, save_container
from .bilstm import bilstm_backward, bilstm_encode
from .crf import CrfParams, apply_structural_mask, crf_nll_and_gradients, viterbi_decode

MODEL_FORMAT = "seqtag-model/1"
PREFIXES = ("O", "B", "I", "E", "S")


class LabelScheme:
    """IOBES labels for one type: O, B-t, I-t, E-t, S-t (indices 0-4)."""

    def __init__(self, etype: EntityType):
        self.etype = etype
        self.labels = [IobesLabel("O")] + [IobesLabel(p, etype) for p in PREFIXES[1:]]
        self.index = {str(l): i for i, l in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def encode(self, labels: Sequence[IobesLabel]) -> list[int]:
        return [self.index[str(l)] for l in labels]

    def decode(self, ids: Sequence[int]) -> list[IobesLabel]:
        return [self.labels[i] for i in ids]

    def allowed_transitions(self) -> np.ndarray:
        """Boolean ``(L+2, L+2)`` matrix of well-formed IOBES moves (START row, STOP column)."""
        L = len(self.labels)
        START, STOP = L, L + 1
        ok = np.zeros((L + 2, L + 2), dtype=bool)
        opens = [PREFIXES.index(p) for p in ("O", "B", "S")]
        inside = [PREFIXES.index(p) for p in ("I", "E")]
        for frm in [PREFIXES.index(p) for p in ("O", "E", "S")] + [START]:
            ok[frm, opens] = True
            if frm != START:
                ok[frm, STOP] = True
        for frm in (PREFIXES.index("B"), PREFIXES.index("I")):
            ok[frm, inside] = True
        return ok


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    lr: float = 0.1
    dropout: float = 0.5
    patience: int = 3
    anneal_factor: float = 0.5
    min_lr: float = 1e-4
    hidden_size: int = 256
    clip: float = 5.0
    mask_invalid_transitions: bool = False
    stop_when_annealed: bool = True
    seed: int = 0
    init_checkpoint: Optional[str] = None

    def __post_init__(self):
        for name in ("epochs", "batch_size", "hidden_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.patience < 0:
            raise ValueError("patience must be non-negative")


class SentenceView(NamedTuple):
    """A sentence of a document: its text, document offset, and rebased tokens."""

    text: str
    offset: int
    tokens: list[Token]       # document offsets
    local_tokens: list[Token]  # offsets relative to ``text``


def document_sentences(doc: Union[Document, str]) -> list[SentenceView]:
    if isinstance(doc, str):
        text = doc
        tokens = tokenize(text, split_sentences(text))
    else:
        text = doc.text
        tokens = document_tokens(doc)
    views = []
    for sent in group_sentences(tokens):
        start, end = sent[0].start, sent[-1].end
        local = [Token(t.text, t.start - start, t.end - start, t.sentence_idx) for t in sent]
        views.append(SentenceView(text[start:end], start, sent, local))
    return views


@dataclass
class TaggerModel:
    etype: EntityType
    embeddings: EmbeddingStack
    params: dict[str, np.ndarray]
    config: TrainConfig = field(default_factory=TrainConfig)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scheme = LabelScheme(self.etype)
        D = self.embeddings.dim
        H = self.params["fwd.U"].shape[1]
        L = len(self.scheme)
        for d in ("fwd", "bwd"):
            if self.params[f"{d}.W"].shape != (4 * H, D):
                raise ValueError(f"{d} BiLSTM expects inputs of size {self.params[f'{d}.W'].shape[1]}, embeddings give {D}")
        if self.params["emit.W"].shape != (L, 2 * H) or self.params["trans"].shape != (L + 2, L + 2):
            raise ValueError("CRF parameter shapes disagree with the label scheme")

    @property
    def hidden_size(self) -> int:
        return self.params["fwd.U"].shape[1]

    @property
    def fwd(self) -> LstmCellParams:
        return LstmCellParams.from_dict(self.params, "fwd")

    @property
    def bwd(self) -> LstmCellParams:
        return LstmCellParams.from_dict(self.params, "bwd")

    @property
    def crf(self) -> CrfParams:
        return CrfParams(self.params["trans"], self.params["emit.W"], self.params["emit.b"])

    @classmethod
    def init(cls, embeddings: EmbeddingStack, etype: EntityType, config: TrainConfig,
             rng: Optional[np.random.Generator] = None) -> "TaggerModel":
        rng = rng or make_rng(config.seed, "tagger.init")
        D, H = embeddings.dim, config.hidden_size
        scheme = LabelScheme(etype)
        params = {}
        params.update(LstmCellParams.init(rng, D, H).as_dict("fwd"))
        params.update(LstmCellParams.init(rng, D, H).as_dict("bwd"))
        allowed = scheme.allowed_transitions() if config.mask_invalid_transitions else None
        crf = CrfParams.init(rng, len(scheme), 2 * H, allowed)
        params.update({"emit.W": crf.W, "emit.b": crf.b, "trans": crf.transitions})
        return cls(etype, embeddings, params, config)

    def enforce_mask(self) -> None:
        allowed = self.scheme.allowed_transitions() if self.config.mask_invalid_transitions else None
        apply_structural_mask(self.params["trans"], allowed)

    # -- per-sentence computations -------------------------------------------------

    def emissions(self, embs: np.ndarray, training: bool = False,
                  rng: Optional[np.random.Generator] = None):
        feats, cache = bilstm_encode(self.fwd, self.bwd, embs, self.config.dropout, rng, training)
        return feats @ self.params["emit.W"].T + self.params["emit.b"], feats, cache

    def sentence_loss(self, embs: np.ndarray, gold: Sequence[int], training: bool = False,
                      rng: Optional[np.random.Generator] = None):
        """CRF negative log-likelihood and gradients for all trainable parameters."""
        em, feats, cache = self.emissions(embs, training, rng)
        loss, g_em, g_tr = crf_nll_and_gradients(self.params["trans"], em, gold)
        grads = {"trans": g_tr, "emit.W": g_em.T @ feats, "emit.b": g_em.sum(axis=0)}
        g_feats = g_em @ self.params["emit.W"]
        gf, gb, _ = bilstm_backward(self.fwd, self.bwd, cache, g_feats)
        grads.update(gf.as_dict("fwd"))
        grads.update(gb.as_dict("bwd"))
        return loss, grads

    def decode_ids(self, embs: np.ndarray) -> list[int]:
        em, _, _ = self.emissions(embs)
        path, _ = viterbi_decode(self.params["trans"], em)
        return path

    def predict_sentence(self, view: SentenceView, full_text: str) -> list[EntitySpan]:
        if not view.tokens:
            return []
        embs = self.embeddings.embed(view.text, view.local_tokens)
        labels = self.scheme.decode(self.decode_ids(embs))
        return decode_iobes(labels, view.tokens, full_text)

    def predict_document(self, document: Union[Document, str]) -> list[EntitySpan]:
        text = document if isinstance(document, str) else document.text
        if not text.strip():
            return []
        spans = []
        for view in document_sentences(document):
            spans.extend(self.predict_sentence(view, text))
        return spans

    # -- persistence ---------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        emb_meta, emb_arrays = self.embeddings.to_arrays()
        meta = {
            "entity_type": self.etype.value,
            "labels": [str(l) for l in self.scheme.labels],
            "config": asdict(self.config),
            "embeddings": emb_meta,
            "training": self.meta,
        }
        arrays = {f"tagger/{k}": v for k, v in sorted(self.params.items())}
        arrays.update(emb_arrays)
        save_container(path, MODEL_FORMAT, meta, arrays)

    @classmethod
    def load(cls, path: str | Path) -> "TaggerModel":
        _, meta, arrays = load_container(path, MODEL_FORMAT)
        etype = EntityType.parse(meta["entity_type"])
        if meta["labels"] != [str(l) for l in LabelScheme(etype).labels]:
            raise ValueError("checkpoint label order does not match this version's label scheme")
        stack = EmbeddingStack.from_arrays(meta["embeddings"],
                                           {k: v for k, v in arrays.items() if not k.startswith("tagger/")})
        params = {k[len("tagger/"):]: np.array(v) for k, v in arrays.items() if k.startswith("tagger/")}
        return cls(etype, stack, params, TrainConfig(**meta["config"]), meta.get("training", {}))


def predict_document(model: TaggerModel, document: Union[Document, str]) -> list[EntitySpan]:
    return model.predict_document(document)
