"""Readers and writers for PubTator, CoNLL and the harmonized JSONL format."""

from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, TextIO

from .document import Corpus, Document, EntitySpan, EntityType, IobesLabel, Split, Token
from .iobes import decode_iobes, encode_iobes
from .text import document_tokens, group_sentences

log = logging.getLogger(__name__)

DEFAULT_TYPE_ALIASES: dict[str, EntityType] = {
    "Gene/Protein": EntityType.Gene,
    "GeneOrGeneProduct": EntityType.Gene,
    "Gene_or_gene_product": EntityType.Gene,
    "Protein": EntityType.Gene,
    "DNA": EntityType.Gene,
    "RNA": EntityType.Gene,
    "DiseaseOrPhenotypicFeature": EntityType.Disease,
    "DiseaseClass": EntityType.Disease,
    "SpecificDisease": EntityType.Disease,
    "Modifier": EntityType.Disease,
    "CompositeMention": EntityType.Disease,
    "ChemicalEntity": EntityType.Chemical,
    "Simple_chemical": EntityType.Chemical,
    "Drug": EntityType.Chemical,
    "Organism": EntityType.Species,
    "OrganismTaxon": EntityType.Species,
    "Taxon": EntityType.Species,
    "Cell_line": EntityType.CellLine,
    "Cell line": EntityType.CellLine,
}


_TEXT_LINE = re.compile(r"^([^|\t]+)\|([ta])\|(.*)$")


class FormatError(ValueError):
    """Malformed input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def load_type_aliases(stream: TextIO) -> dict[str, EntityType]:
    """Parse a ``alias = Type`` table; blank lines and ``#`` comments allowed."""
    aliases: dict[str, EntityType] = {}
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"expected key=value, got {line!r}", lineno)
        try:
            aliases[key.strip()] = EntityType.parse(value.strip())
        except ValueError as err:
            raise FormatError(str(err), lineno) from None
    return aliases


def _resolve_type(name: str, aliases: Mapping[str, EntityType]) -> Optional[EntityType]:
    try:
        return EntityType.parse(name, aliases)
    except ValueError:
        return None


def parse_pubtator(stream: Iterable[str],
                   aliases: Optional[Mapping[str, EntityType]] = None) -> list[Document]:
    """Parse PubTator records (title, abstract and tab-separated annotation lines).

    Document text is ``title + "\\n" + abstract``. Annotations with unknown
    types or whose mention disagrees with the text slice are skipped with a
    warning.
    """
    aliases = DEFAULT_TYPE_ALIASES if aliases is None else {**DEFAULT_TYPE_ALIASES, **aliases}
    docs: list[Document] = []
    records: dict[str, dict] = {}
    order: list[str] = []

    def record(pmid: str) -> dict:
        if pmid not in records:
            records[pmid] = {"title": None, "abstract": None, "anns": []}
            order.append(pmid)
        return records[pmid]

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        text_line = _TEXT_LINE.match(line)
        if text_line is None and "\t" in line:
            fields = line.split("\t")
            if len(fields) < 5:
                raise FormatError(f"annotation line needs 5 tab-separated fields, got {len(fields)}", lineno)
            pmid, start, end, mention, etype = fields[:5]
            try:
                start_i, end_i = int(start), int(end)
            except ValueError:
                raise FormatError(f"non-integer offsets {start!r}, {end!r}", lineno) from None
            record(pmid)["anns"].append((start_i, end_i, mention, etype, lineno))
            continue
        if text_line is None:
            raise FormatError(f"unrecognised PubTator line {line!r}", lineno)
        pmid, kind, body = text_line.groups()
        rec = record(pmid)
        slot = "title" if kind == "t" else "abstract"
        if rec[slot] is not None:
            raise FormatError(f"duplicate {slot} for document {pmid}", lineno)
        rec[slot] = body

    for pmid in order:
        rec = records[pmid]
        if rec["title"] is None:
            raise FormatError(f"document {pmid} has no title line")
        text = rec["title"] + "\n" + (rec["abstract"] or "")
        spans = []
        for start, end, mention, etype_name, lineno in rec["anns"]:
            etype = _resolve_type(etype_name, aliases)
            if etype is None:
                log.warning("line %d: unknown entity type %r; skipped", lineno, etype_name)
                continue
            if not (0 <= start < end <= len(text)) or text[start:end] != mention:
                log.warning("line %d: mention %r does not match text at (%d, %d); skipped",
                            lineno, mention, start, end)
                continue
            spans.append(EntitySpan(start, end, etype, mention))
        docs.append(Document(pmid, text, spans))
    return docs


def parse_conll(stream: Iterable[str], scheme: str = "IOBES",
                aliases: Optional[Mapping[str, EntityType]] = None) -> list[Document]:
    """Parse ``token<TAB>label`` lines into documents.

    Tokens are joined with single spaces, sentences with newlines, so that
    re-segmenting the text keeps sentence boundaries. ``-DOCSTART-`` lines
    start a new document; an optional second field that is not a label is
    used as the document id.
    """
    scheme = scheme.upper()
    if scheme not in ("IOB2", "IOBES"):
        raise ValueError(f"unsupported scheme {scheme!r}")
    allowed = {"B", "I"} if scheme == "IOB2" else {"B", "I", "E", "S"}
    aliases = DEFAULT_TYPE_ALIASES if aliases is None else {**DEFAULT_TYPE_ALIASES, **aliases}

    docs: list[Document] = []
    state = {"id": None, "sentences": [], "current": []}

    def end_sentence():
        if state["current"]:
            state["sentences"].append(state["current"])
            state["current"] = []

    def end_document():
        end_sentence()
        if state["sentences"]:
            doc_id = state["id"] if state["id"] is not None else str(len(docs))
            docs.append(_conll_document(doc_id, state["sentences"], scheme))
        state["id"] = None
        state["sentences"] = []

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            end_sentence()
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if fields[0] == "-DOCSTART-":
            end_document()
            if len(fields) > 1 and fields[1] not in ("O", "-X-"):
                state["id"] = fields[1]
            continue
        if len(fields) < 2:
            raise FormatError(f"expected token and label, got {line!r}", lineno)
        token, label_text = fields[0], fields[-1]
        try:
            label = IobesLabel.parse(label_text, aliases)
        except ValueError:
            raise FormatError(f"unknown label {label_text!r}", lineno) from None
        if label.prefix != "O" and label.prefix not in allowed:
            raise FormatError(f"label {label_text!r} not valid in {scheme}", lineno)
        state["current"].append((token, label))
    end_document()
    return docs


def _conll_document(doc_id: str, sentences: list[list[tuple[str, IobesLabel]]], scheme: str) -> Document:
    pieces = []
    tokens: list[Token] = []
    labels: list[IobesLabel] = []
    pos = 0
    for s_idx, sentence in enumerate(sentences):
        if s_idx:
            pieces.append("\n")
            pos += 1
        for t_idx, (tok, label) in enumerate(sentence):
            if t_idx:
                pieces.append(" ")
                pos += 1
            tokens.append(Token(tok, pos, pos + len(tok), s_idx))
            labels.append(label)
            pieces.append(tok)
            pos += len(tok)
    text = "".join(pieces)
    if scheme == "IOB2":
        labels = iob2_to_iobes(labels)
    spans = []
    lo = 0
    for sent in group_sentences(tokens):
        spans.extend(decode_iobes(labels[lo:lo + len(sent)], sent, text))
        lo += len(sent)
    return Document(doc_id, text, spans, tokens=tokens)


def iob2_to_iobes(labels: list[IobesLabel]) -> list[IobesLabel]:
    out = []
    for i, lab in enumerate(labels):
        if lab.prefix == "O":
            out.append(lab)
            continue
        nxt = labels[i + 1] if i + 1 < len(labels) else None
        continues = nxt is not None and nxt.prefix == "I" and nxt.etype == lab.etype
        if lab.prefix == "B":
            out.append(lab if continues else IobesLabel("S", lab.etype))
        else:
            out.append(lab if continues else IobesLabel("E", lab.etype))
    return out


def write_conll(document: Document, etype: EntityType, stream: IO[str]) -> None:
    tokens = document_tokens(document)
    labels = iter(encode_iobes(tokens, document.spans_of(etype), etype))
    for s_idx, sentence in enumerate(group_sentences(tokens)):
        if s_idx:
            stream.write("\n")
        for tok in sentence:
            stream.write(f"{tok.text}\t{next(labels)}\n")


def write_conll_corpus(documents: Iterable[Document], etype: EntityType, stream: IO[str]) -> None:
    for i, doc in enumerate(documents):
        if i:
            stream.write("\n")
        stream.write(f"-DOCSTART-\t{doc.id}\n\n")
        write_conll(doc, etype, stream)


def document_to_json(doc: Document) -> dict:
    if doc.split is Split.Unassigned:
        raise ValueError(f"document {doc.id!r} has no split assignment")
    return {
        "id": doc.id,
        "text": doc.text,
        "split": doc.split.value,
        "annotations": [
            {"start": s.start, "end": s.end, "type": s.etype.value, "text": s.surface}
            for s in doc.annotations
        ],
    }


def write_jsonl(documents: Iterable[Document], stream: IO[str]) -> None:
    for doc in documents:
        stream.write(json.dumps(document_to_json(doc), ensure_ascii=False) + "\n")


def spans_from_json(text: Optional[str], items: list[dict], lineno: int) -> list[EntitySpan]:
    spans = []
    for ann in items:
        try:
            span = EntitySpan(int(ann["start"]), int(ann["end"]), EntityType.parse(ann["type"]),
                              ann.get("text", ""))
        except (KeyError, ValueError, TypeError) as err:
            raise FormatError(f"bad annotation {ann!r}: {err}", lineno) from None
        if text is not None and (span.end > len(text) or text[span.start:span.end] != span.surface):
            raise FormatError(f"annotation {ann!r} does not match document text", lineno)
        spans.append(span)
    return spans


def read_jsonl(stream: Iterable[str]) -> list[Document]:
    docs = []
    for lineno, raw in enumerate(stream, 1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            doc_id, text, split = obj["id"], obj["text"], Split(obj["split"])
        except (json.JSONDecodeError, KeyError, ValueError) as err:
            raise FormatError(f"invalid harmonized record: {err}", lineno) from None
        if split is Split.Unassigned:
            raise FormatError("split must be train, dev or test", lineno)
        docs.append(Document(doc_id, text, spans_from_json(text, obj.get("annotations", []), lineno), split))
    return docs


def load_jsonl_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return Corpus(path.stem, read_jsonl(fh))
