"""Minibatch SGD training with dev-based model selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..corpus.document import Document, EntitySpan, EntityType
from ..corpus.iobes import decode_iobes, encode_iobes, resolve_overlaps
from ..corpus.splits import SourcedDocument
from ..embeddings.stack import EmbeddingStack
from ..eval.matching import MatchMode, match_spans, prf1
from ..numerics import PlateauScheduler, SgdConfig, clip_grad_norm, make_rng, sgd_update
from .crf import crf_log_partition, crf_sequence_score
from .model import TaggerModel, TrainConfig, document_sentences

log = logging.getLogger(__name__)

DocsLike = Iterable[Union[Document, SourcedDocument]]


@dataclass
class PreparedSentence:
    doc_id: str
    embeddings: np.ndarray
    gold: list[int]
    tokens: list


@dataclass
class PreparedDoc:
    doc: Document
    gold: list[EntitySpan]
    sentences: list[PreparedSentence]


def _documents(docs: DocsLike) -> list[Document]:
    return [d.document if isinstance(d, SourcedDocument) else d for d in docs]


def prepare_documents(docs: DocsLike, etype: EntityType, model: TaggerModel) -> list[PreparedDoc]:
    """Segment, label and embed every sentence once; embeddings stay frozen."""
    prepared = []
    for doc in _documents(docs):
        gold = resolve_overlaps(doc.spans_of(etype))
        sentences = []
        for view in document_sentences(doc):
            lo, hi = view.offset, view.offset + len(view.text)
            inside = [g for g in gold if g.start < hi and g.end > lo]
            labels = encode_iobes(view.tokens, inside, etype)
            embs = model.embeddings.embed(view.text, view.local_tokens)
            sentences.append(PreparedSentence(doc.id, embs, model.scheme.encode(labels), view.tokens))
        prepared.append(PreparedDoc(doc, doc.spans_of(etype), sentences))
    return prepared


def evaluate_prepared(model: TaggerModel, docs: Sequence[PreparedDoc]) -> tuple[float, float]:
    """Exact-boundary micro F1 and mean sentence NLL over prepared documents."""
    tp = fp = fn = 0
    total_loss = 0.0
    n = 0
    for pd in docs:
        pred = []
        for s in pd.sentences:
            ids = model.decode_ids(s.embeddings)
            pred.extend(decode_iobes(model.scheme.decode(ids), s.tokens, pd.doc.text))
            loss, _ = _loss_only(model, s)
            total_loss += loss
            n += 1
        m = match_spans(pd.gold, pred, MatchMode.Exact)
        tp, fp, fn = tp + m.tp, fp + m.fp, fn + m.fn
    return prf1(tp, fp, fn)[2], total_loss / max(n, 1)


def _loss_only(model: TaggerModel, s: PreparedSentence):
    em, _, _ = model.emissions(s.embeddings)
    return crf_log_partition(model.params["trans"], em) - crf_sequence_score(model.params["trans"], em, s.gold), None


def _load_init(config: TrainConfig, embeddings: Optional[EmbeddingStack], etype: EntityType) -> TaggerModel:
    base = TaggerModel.load(config.init_checkpoint)
    stack = embeddings or base.embeddings
    if stack.dim != base.embeddings.dim:
        raise ValueError(f"checkpoint expects {base.embeddings.dim}-dim embeddings, stack gives {stack.dim}")
    if base.hidden_size != config.hidden_size:
        raise ValueError(f"checkpoint hidden size {base.hidden_size} != configured {config.hidden_size}")
    if base.etype != etype:
        log.warning("initialising a %s tagger from a %s checkpoint", etype.value, base.etype.value)
    params = {k: v.copy() for k, v in base.params.items()}
    model = TaggerModel(etype, stack, params, config)
    model.enforce_mask()
    return model


def train_tagger(train_set: DocsLike, dev_set: DocsLike, etype: EntityType,
                 config: TrainConfig = TrainConfig(), embeddings: Optional[EmbeddingStack] = None,
                 callback=None) -> TaggerModel:
    """Train a BiLSTM-CRF for ``etype`` and return the best-on-dev parameters.

    Sentences are shuffled each epoch and grouped into batches of
    ``batch_size``; per-sentence gradients are summed and divided by the batch
    size. After each epoch dev exact-span micro F1 drives the plateau
    scheduler and model selection (dev NLL when dev has no entities).
    ``callback(epoch, record, model)`` is invoked after every epoch.
    """
    if config.init_checkpoint:
        model = _load_init(config, embeddings, etype)
    else:
        if embeddings is None:
            raise ValueError("need an embedding stack (or an init checkpoint carrying one)")
        model = TaggerModel.init(embeddings, etype, config)

    train_docs = prepare_documents(train_set, etype, model)
    dev_docs = prepare_documents(dev_set, etype, model)
    sentences = [s for d in train_docs for s in d.sentences]
    if not sentences or not dev_docs:
        raise ValueError("training and dev sets must both be non-empty")
    dev_has_entities = any(d.gold for d in dev_docs)
    if not dev_has_entities:
        log.warning("dev set has no %s entities; selecting on dev loss", etype.value)

    sched = PlateauScheduler(SgdConfig(config.lr, config.anneal_factor, config.patience, config.min_lr),
                             higher_is_better=dev_has_entities)
    shuffle_rng = make_rng(config.seed, "tagger.shuffle")
    dropout_rng = make_rng(config.seed, "tagger.dropout")
    best_params = {k: v.copy() for k, v in model.params.items()}
    best = None
    history = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(sentences))
        epoch_loss = 0.0
        lr = sched.lr
        for lo in range(0, len(order), config.batch_size):
            batch = order[lo:lo + config.batch_size]
            acc: dict[str, np.ndarray] = {k: np.zeros_like(v) for k, v in model.params.items()}
            for idx in batch:
                s = sentences[idx]
                loss, grads = model.sentence_loss(s.embeddings, s.gold, training=True, rng=dropout_rng)
                epoch_loss += loss
                for k, g in grads.items():
                    acc[k] += g
            for g in acc.values():
                g /= len(batch)
            acc["trans"][~np.isfinite(model.params["trans"])] = 0.0
            clip_grad_norm(acc, config.clip)
            sgd_update(model.params, acc, lr)

        dev_f1, dev_loss = evaluate_prepared(model, dev_docs)
        metric = dev_f1 if dev_has_entities else dev_loss
        new_lr, improved = sched.report(metric)
        record = {"epoch": epoch, "train_loss": epoch_loss / len(sentences), "dev_f1": dev_f1,
                  "dev_loss": dev_loss, "lr": lr, "improved": improved}
        history.append(record)
        log.info("epoch %d: train loss %.4f, dev F1 %.4f, dev loss %.4f, lr %.4g%s", epoch,
                 record["train_loss"], dev_f1, dev_loss, lr, " *" if improved else "")
        if improved:
            best = (epoch, metric, dev_f1)
            best_params = {k: v.copy() for k, v in model.params.items()}
        if callback is not None:
            callback(epoch, record, model)
        if config.stop_when_annealed and sched.exhausted:
            log.info("learning rate annealed to the floor without improvement; stopping")
            break

    model.params = best_params
    model.meta = {"seed": config.seed, "best_epoch": best[0], "best_dev_f1": best[2],
                  "selection_metric": "dev_f1" if dev_has_entities else "dev_loss",
                  "epochs_run": len(history), "history": history}
    return model
