"""Conversion between character-offset spans and per-token IOBES labels."""

from __future__ import annotations

import logging
from typing import Sequence

from .document import OUTSIDE, EntitySpan, EntityType, IobesLabel, Token, span_sort_key

log = logging.getLogger(__name__)


def resolve_overlaps(spans: Sequence[EntitySpan]) -> list[EntitySpan]:
    """Keep the longest (then leftmost) of any overlapping spans."""
    ranked = sorted(spans, key=lambda s: (-(s.end - s.start), s.start, s.end))
    kept: list[EntitySpan] = []
    for span in ranked:
        if any(span.start < k.end and k.start < span.end for k in kept):
            log.warning("dropping overlapping annotation %r", span)
            continue
        kept.append(span)
    return sorted(kept, key=span_sort_key)


def _covering_tokens(tokens: Sequence[Token], span: EntitySpan) -> list[int]:
    return [i for i, t in enumerate(tokens) if t.start < span.end and span.start < t.end]


def encode_iobes(tokens: Sequence[Token], annotations: Sequence[EntitySpan], etype: EntityType,
                 strict: bool = False) -> list[IobesLabel]:
    """Label each token with O/B/I/E/S for ``etype``.

    Spans not aligned to token boundaries are snapped outward to the covering
    tokens (or dropped when ``strict``). Spans touching no token are skipped.
    Spans of other types are ignored.
    """
    labels = [OUTSIDE] * len(tokens)
    for span in annotations:
        if span.etype != etype:
            continue
        idx = _covering_tokens(tokens, span)
        if not idx:
            log.warning("annotation %r overlaps no token; skipped", span)
            continue
        first, last = idx[0], idx[-1]
        if tokens[first].start != span.start or tokens[last].end != span.end:
            if strict:
                log.warning("annotation %r not token-aligned; dropped (strict)", span)
                continue
            log.warning("annotation %r not token-aligned; snapped to (%d, %d)",
                        span, tokens[first].start, tokens[last].end)
        if any(labels[i] is not OUTSIDE for i in range(first, last + 1)):
            log.warning("annotation %r collides with an earlier one after snapping; skipped", span)
            continue
        if first == last:
            labels[first] = IobesLabel("S", etype)
        else:
            labels[first] = IobesLabel("B", etype)
            for i in range(first + 1, last):
                labels[i] = IobesLabel("I", etype)
            labels[last] = IobesLabel("E", etype)
    return labels


def decode_iobes(labels: Sequence[IobesLabel], tokens: Sequence[Token],
                 text: str | None = None) -> list[EntitySpan]:
    """Turn labels back into spans, repairing malformed sequences leniently.

    Repair rules: an ``I`` or ``E`` with no open entity of its type opens one;
    a ``B`` or ``I`` not followed by a continuation closes at its own token; a
    type change closes the open entity. ``text`` (when given) fills surfaces.
    """
    if len(labels) != len(tokens):
        raise ValueError(f"{len(labels)} labels for {len(tokens)} tokens")
    spans: list[EntitySpan] = []
    open_start = None
    open_type = None
    open_end = None

    def close():
        nonlocal open_start, open_type, open_end
        if open_start is not None:
            surface = text[open_start:open_end] if text is not None else ""
            spans.append(EntitySpan(open_start, open_end, open_type, surface))
        open_start = open_type = open_end = None

    for label, tok in zip(labels, tokens):
        p, t = label.prefix, label.etype
        if p == "O":
            close()
        elif p == "S":
            close()
            open_start, open_end, open_type = tok.start, tok.end, t
            close()
        elif p == "B":
            close()
            open_start, open_end, open_type = tok.start, tok.end, t
        else:  # I or E
            if open_start is None or open_type != t:
                close()
                open_start, open_type = tok.start, t
            open_end = tok.end
            if p == "E":
                close()
    close()
    return spans
