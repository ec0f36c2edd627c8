"""Deterministic rule-based sentence splitting and tokenization.

Sentence boundaries fall after ``.``, ``?`` or ``!`` when followed by
whitespace and then an uppercase letter or a digit, unless the word carrying
the period is a known abbreviation or a single-letter initial (``E. Coli``).
Line breaks always end a sentence.

Tokens are whitespace-separated chunks with brackets split off everywhere and
leading/trailing punctuation split off one character at a time. Hyphens,
slashes and digits inside a chunk stay attached (``IL-2``, ``p53/p21``).
"""

from __future__ import annotations

import re
import unicodedata

from .document import Document, Token

ABBREVIATIONS = frozenset({
    "al.", "approx.", "ca.", "cf.", "Dr.", "e.g.", "Eq.", "Eqs.", "et al.", "etc.",
    "Fig.", "Figs.", "i.e.", "Inc.", "Ltd.", "Mr.", "Mrs.", "No.", "Nos.", "Prof.",
    "Ref.", "Refs.", "resp.", "sp.", "spp.", "St.", "Tab.", "vol.", "vs.", "var.",
})

BRACKETS = frozenset("()[]{}")
_BRACKET_RE = re.compile(r"([()\[\]{}])")
_CHUNK_RE = re.compile(r"\S+")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _is_abbreviation(text: str, period: int) -> bool:
    start = period
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:period + 1]
    if word in ABBREVIATIONS:
        return True
    # single-letter initials such as genus abbreviations
    return len(word) == 2 and word[0].isalpha()


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Return ``(start, end)`` sentence spans, trimmed of surrounding whitespace."""
    cuts = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch == "\n":
            cuts.append(i)
        elif ch in ".?!" and i + 1 < n and text[i + 1].isspace():
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j == n:
                continue
            nxt = text[j]
            if not (nxt.isupper() or nxt.isdigit()):
                continue
            if ch == "." and _is_abbreviation(text, i):
                continue
            cuts.append(i + 1)

    spans = []
    prev = 0
    for cut in cuts + [n]:
        start, end = prev, cut
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            spans.append((start, end))
        prev = cut
    return spans


def _split_chunk(chunk: str, offset: int) -> list[tuple[str, int]]:
    pieces = []
    pos = offset
    for part in _BRACKET_RE.split(chunk):
        if not part:
            continue
        if part in BRACKETS:
            pieces.append((part, pos))
            pos += 1
            continue
        lo, hi = 0, len(part)
        lead, trail = [], []
        while lo < hi and _is_punct(part[lo]):
            lead.append((part[lo], pos + lo))
            lo += 1
        while hi > lo and _is_punct(part[hi - 1]):
            trail.append((part[hi - 1], pos + hi - 1))
            hi -= 1
        pieces.extend(lead)
        if lo < hi:
            pieces.append((part[lo:hi], pos + lo))
        pieces.extend(reversed(trail))
        pos += len(part)
    return pieces


def tokenize(text: str, sentence_spans: list[tuple[int, int]]) -> list[Token]:
    tokens = []
    for sent_idx, (s_start, s_end) in enumerate(sentence_spans):
        for m in _CHUNK_RE.finditer(text, s_start, s_end):
            for piece, start in _split_chunk(m.group(), m.start()):
                tokens.append(Token(piece, start, start + len(piece), sent_idx))
    return tokens


def document_tokens(doc: Document) -> list[Token]:
    """The document's stored tokens, or a fresh segmentation of its text."""
    if doc.tokens is not None:
        return doc.tokens
    return tokenize(doc.text, split_sentences(doc.text))


def group_sentences(tokens: list[Token]) -> list[list[Token]]:
    sentences: list[list[Token]] = []
    current = None
    for tok in tokens:
        if tok.sentence_idx != current:
            sentences.append([])
            current = tok.sentence_idx
        sentences[-1].append(tok)
    return sentences
