"""Offset-based span matching and micro precision/recall/F1."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from ..corpus.document import Corpus, Document, EntitySpan, EntityType


class MatchMode(enum.Enum):
    Exact = "exact"
    OneCharTolerance = "tolerant"
    AnyOverlap = "overlap"

    @classmethod
    def parse(cls, name: str) -> "MatchMode":
        for m in cls:
            if name in (m.value, m.name):
                return m
        raise ValueError(f"unknown match mode {name!r} (expected exact, tolerant or overlap)")


def _exact(g: EntitySpan, p: EntitySpan) -> bool:
    return g.start == p.start and g.end == p.end


def _one_off(g: EntitySpan, p: EntitySpan) -> bool:
    # exactly one boundary shifted by exactly one character
    return ((g.start == p.start and abs(g.end - p.end) == 1)
            or (g.end == p.end and abs(g.start - p.start) == 1))


def _overlaps(g: EntitySpan, p: EntitySpan) -> bool:
    return p.start < g.end and g.start < p.end


# Matching runs in tiers; a looser mode only adds tiers, so counts are monotone.
_TIERS = {
    MatchMode.Exact: (_exact,),
    MatchMode.OneCharTolerance: (_exact, _one_off),
    MatchMode.AnyOverlap: (_exact, _one_off, _overlaps),
}


class MatchResult(NamedTuple):
    tp: int
    fp: int
    fn: int
    pairs: list[tuple[EntitySpan, EntitySpan]]


def match_spans(gold: Sequence[EntitySpan], pred: Sequence[EntitySpan],
                mode: MatchMode = MatchMode.Exact) -> MatchResult:
    """Greedy one-to-one matching.

    Each tier (exact, then one-character tolerance, then any overlap, as far
    as ``mode`` allows) walks unmatched gold spans left to right and pairs
    each with the leftmost unmatched prediction satisfying the tier's test.
    Spans are only paired with spans of the same entity type.
    """
    order = lambda s: (s.start, s.end)
    golds = sorted(gold, key=order)
    preds = sorted(pred, key=order)
    gold_used = [False] * len(golds)
    pred_used = [False] * len(preds)
    pairs = []
    for test in _TIERS[mode]:
        for gi, g in enumerate(golds):
            if gold_used[gi]:
                continue
            for pi, p in enumerate(preds):
                if pred_used[pi] or p.etype != g.etype:
                    continue
                limit = g.end - 1 if test is _overlaps else g.start + 1
                if p.start > limit:
                    break
                if test(g, p):
                    gold_used[gi] = pred_used[pi] = True
                    pairs.append((g, p))
                    break
    tp = len(pairs)
    return MatchResult(tp, len(preds) - tp, len(golds) - tp, pairs)


def prf1(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class EvalResult:
    corpus: str
    etype: EntityType
    mode: MatchMode
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return prf1(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return prf1(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return prf1(self.tp, self.fp, self.fn)[2]


DocumentsLike = Union[Corpus, Iterable[Document]]


def evaluate_corpus(gold: DocumentsLike, predictions: Mapping[str, Sequence[EntitySpan]],
                    mode: MatchMode = MatchMode.Exact, corpus_name: Optional[str] = None,
                    entity_types: Optional[Iterable[EntityType]] = None) -> dict[EntityType, EvalResult]:
    """Micro-averaged results per entity type; counts are pooled over documents."""
    if isinstance(gold, Corpus):
        docs = gold.documents
        name = corpus_name or gold.name
        annotated = set(gold.entity_types_annotated)
    else:
        docs = list(gold)
        name = corpus_name or "corpus"
        annotated = {s.etype for d in docs for s in d.annotations}
    known = {d.id for d in docs}
    unknown = sorted(set(predictions) - known)
    if unknown:
        raise ValueError(f"predictions for unknown document ids: {unknown[:5]}")
    if entity_types is None:
        types = annotated | {s.etype for spans in predictions.values() for s in spans}
    else:
        types = set(entity_types)
    results = {t: EvalResult(name, t, mode) for t in sorted(types, key=lambda t: t.value)}
    for doc in docs:
        pred = predictions.get(doc.id, [])
        for t, res in results.items():
            m = match_spans(doc.spans_of(t), [s for s in pred if s.etype == t], mode)
            res.tp += m.tp
            res.fp += m.fp
            res.fn += m.fn
    return results
