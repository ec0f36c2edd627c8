"""Training/validation set construction and corpus statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from .document import Corpus, Document, EntityType, Split
from .text import document_tokens

AssignmentKey = Union[str, tuple[str, str]]


class SourcedDocument(NamedTuple):
    corpus: str
    document: Document


class SplitSets(NamedTuple):
    train: list[SourcedDocument]
    dev: list[SourcedDocument]


def _normalize_assignments(assignments) -> dict[AssignmentKey, Split]:
    pairs = assignments.items() if isinstance(assignments, Mapping) else assignments
    out: dict[AssignmentKey, Split] = {}
    for key, value in pairs:
        split = value if isinstance(value, Split) else Split(str(value).lower())
        if key in out:
            raise ValueError(f"document {key!r} assigned more than once")
        out[key] = split
    return out


def build_splits(corpora: Iterable[Corpus], assignments=None) -> SplitSets:
    """Union train+test documents into the training set and dev documents into validation.

    ``assignments`` maps a document id, or a ``(corpus, id)`` pair, to a split;
    it may also be an iterable of such pairs. Without it each document's own
    ``split`` field is used.
    """
    table = _normalize_assignments(assignments) if assignments is not None else None
    train: list[SourcedDocument] = []
    dev: list[SourcedDocument] = []
    for corpus in corpora:
        for doc in corpus.documents:
            if table is None:
                split = doc.split
            else:
                qualified = table.get((corpus.name, doc.id))
                plain = table.get(doc.id)
                if qualified is not None and plain is not None and qualified != plain:
                    raise ValueError(f"document {corpus.name}/{doc.id} assigned to both {plain.value} and {qualified.value}")
                split = qualified or plain or Split.Unassigned
            if split is Split.Unassigned:
                raise ValueError(f"document {corpus.name}/{doc.id} has no split assignment")
            item = SourcedDocument(corpus.name, doc if doc.split is split else replace(doc, split=split))
            (dev if split is Split.Dev else train).append(item)
    return SplitSets(train, dev)


def corpora_for_type(corpora: Iterable[Corpus], etype: EntityType) -> list[Corpus]:
    """Only corpora annotating ``etype`` contribute to that type's model."""
    return [c for c in corpora if etype in c.entity_types_annotated]


@dataclass
class CorpusStats:
    documents: int = 0
    sentences: int = 0
    tokens: int = 0
    annotations: dict[EntityType, int] = field(default_factory=lambda: {t: 0 for t in EntityType})

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.documents + other.documents,
            self.sentences + other.sentences,
            self.tokens + other.tokens,
            {t: self.annotations[t] + other.annotations[t] for t in EntityType},
        )

    def rows(self) -> list[tuple[str, int]]:
        rows = [("documents", self.documents), ("sentences", self.sentences), ("tokens", self.tokens)]
        rows.extend((f"annotations[{t.value}]", self.annotations[t]) for t in EntityType)
        return rows

    def render(self, title: Optional[str] = None) -> str:
        rows = self.rows()
        width = max(len(k) for k, _ in rows)
        lines = [title] if title else []
        lines.extend(f"{k:<{width}}  {v:>10d}" for k, v in rows)
        return "\n".join(lines)


def document_stats(doc: Document) -> CorpusStats:
    tokens = document_tokens(doc)
    counts = Counter(s.etype for s in doc.annotations)
    return CorpusStats(
        documents=1,
        sentences=len({t.sentence_idx for t in tokens}),
        tokens=len(tokens),
        annotations={t: counts.get(t, 0) for t in EntityType},
    )


def corpus_stats(corpus: Corpus) -> CorpusStats:
    total = CorpusStats()
    for doc in corpus.documents:
        total = total + document_stats(doc)
    return total
