"""Core document types: entity types, spans, tokens, IOBES labels, corpora."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional


class EntityType(enum.Enum):
    CellLine = "CellLine"
    Chemical = "Chemical"
    Disease = "Disease"
    Gene = "Gene"
    Species = "Species"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str, aliases: Optional[Mapping[str, "EntityType"]] = None) -> "EntityType":
        """Parse a type name, consulting ``aliases`` first.

        Raises ``ValueError`` for names that are neither canonical nor aliased.
        """
        if aliases and name in aliases:
            return aliases[name]
        try:
            return cls(name)
        except ValueError:
            pass
        folded = name.replace("_", "").replace(" ", "").lower()
        for member in cls:
            if member.value.lower() == folded:
                return member
        raise ValueError(f"unknown entity type {name!r}")


class Split(enum.Enum):
    Train = "train"
    Dev = "dev"
    Test = "test"
    Unassigned = "unassigned"


@dataclass(frozen=True)
class EntitySpan:
    """A typed character span, end-exclusive, in Unicode code points."""

    start: int
    end: int
    etype: EntityType
    surface: str = ""

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span offsets ({self.start}, {self.end})")

    @property
    def key(self) -> tuple[int, int, EntityType]:
        return (self.start, self.end, self.etype)

    @classmethod
    def from_text(cls, text: str, start: int, end: int, etype: EntityType) -> "EntitySpan":
        if end > len(text):
            raise ValueError(f"span ({start}, {end}) exceeds text length {len(text)}")
        return cls(start, end, etype, text[start:end])


def span_sort_key(span: EntitySpan) -> tuple[int, int, str]:
    return (span.start, span.end, span.etype.value)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int
    sentence_idx: int = 0

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty token")
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid token offsets ({self.start}, {self.end})")


@dataclass(frozen=True)
class IobesLabel:
    prefix: str
    etype: Optional[EntityType] = None

    PREFIXES = ("O", "B", "I", "E", "S")

    def __post_init__(self):
        if self.prefix not in self.PREFIXES:
            raise ValueError(f"bad IOBES prefix {self.prefix!r}")
        if (self.prefix == "O") != (self.etype is None):
            raise ValueError("O labels carry no type; all others need one")

    def __str__(self) -> str:
        return "O" if self.etype is None else f"{self.prefix}-{self.etype.value}"

    @classmethod
    def parse(cls, text: str, aliases: Optional[Mapping[str, EntityType]] = None) -> "IobesLabel":
        if text == "O":
            return cls("O")
        prefix, sep, name = text.partition("-")
        if not sep or prefix not in cls.PREFIXES or prefix == "O":
            raise ValueError(f"unknown label {text!r}")
        return cls(prefix, EntityType.parse(name, aliases))


OUTSIDE = IobesLabel("O")


@dataclass
class Document:
    """A text with character-offset annotations.

    ``tokens`` is optional; when absent it is derived by the rule-based
    segmenter (see :func:`seqtag.corpus.text.document_tokens`).
    """

    id: str
    text: str
    annotations: list[EntitySpan] = field(default_factory=list)
    split: Split = Split.Unassigned
    tokens: Optional[list[Token]] = None

    def __post_init__(self):
        seen = set()
        cleaned = []
        for span in sorted(self.annotations, key=span_sort_key):
            if span.end > len(self.text):
                raise ValueError(f"{self.id}: annotation ({span.start}, {span.end}) outside text")
            if span.key in seen:
                continue
            seen.add(span.key)
            surface = self.text[span.start:span.end]
            if not span.surface:
                span = EntitySpan(span.start, span.end, span.etype, surface)
            elif span.surface != surface:
                raise ValueError(f"{self.id}: surface {span.surface!r} != text slice {surface!r}")
            cleaned.append(span)
        self.annotations = cleaned

    def spans_of(self, etype: EntityType) -> list[EntitySpan]:
        return [s for s in self.annotations if s.etype == etype]


@dataclass
class Corpus:
    name: str
    documents: list[Document] = field(default_factory=list)
    entity_types_annotated: set[EntityType] = field(default_factory=set)

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"corpus {self.name!r}: duplicate document ids {dupes}")
        if not self.entity_types_annotated:
            self.entity_types_annotated = {s.etype for d in self.documents for s in d.annotations}

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @classmethod
    def from_documents(cls, name: str, documents: Iterable[Document],
                       entity_types: Optional[Iterable[EntityType]] = None) -> "Corpus":
        return cls(name, list(documents), set(entity_types or ()))
