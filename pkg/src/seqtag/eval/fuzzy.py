"""Re-anchoring entity strings in the original text by edit distance."""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..corpus.document import EntitySpan


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


class Alignment(NamedTuple):
    start: int
    end: int
    distance: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def _window_distances(query: np.ndarray, codes: np.ndarray, k: int) -> np.ndarray:
    """Edit distance from ``query`` to every length-``k`` window of ``codes``."""
    windows = sliding_window_view(codes, k)          # (S, k)
    S = windows.shape[0]
    prev = np.broadcast_to(np.arange(k + 1), (S, k + 1)).copy()
    for i, q in enumerate(query, 1):
        cur = np.empty_like(prev)
        cur[:, 0] = i
        sub = prev[:, :-1] + (windows != q)
        dele = prev[:, 1:] + 1
        best = np.minimum(sub, dele)
        for j in range(1, k + 1):
            cur[:, j] = np.minimum(best[:, j - 1], cur[:, j - 1] + 1)
        prev = cur
    return prev[:, k]


def _exact_occurrences(needle: str, text: str) -> list[int]:
    hits = []
    i = text.find(needle)
    while i != -1:
        hits.append(i)
        i = text.find(needle, i + 1)
    return hits


def _cuts(text: str, start: int, end: int) -> int:
    """How many window edges split an alphanumeric run."""
    left = start > 0 and text[start - 1].isalnum() and text[start].isalnum()
    right = end < len(text) and text[end - 1].isalnum() and text[end].isalnum()
    return int(left) + int(right)


def fuzzy_align_scored(entity: str, text: str, search_hint: Optional[int] = None,
                       max_distance: float = 0.3, slack: int = 2) -> Optional[Alignment]:
    """Best window of ``text`` for ``entity``; see :func:`fuzzy_align`."""
    if not entity:
        raise ValueError("entity string must be non-empty")
    hint = 0 if search_hint is None else search_hint
    hits = _exact_occurrences(entity, text)
    if hits:
        start = min(hits, key=lambda s: (abs(s - hint), s))
        return Alignment(start, start + len(entity), 0)

    m = len(entity)
    budget = int(np.floor(max_distance * m + 1e-9))
    if budget < 1 or not text:
        return None
    codes = np.fromiter(map(ord, text), dtype=np.int64, count=len(text))
    query = np.fromiter(map(ord, entity), dtype=np.int64, count=m)
    best: Optional[tuple] = None
    for k in range(max(1, m - slack), min(len(text), m + slack) + 1):
        dist = _window_distances(query, codes, k)
        starts = np.arange(len(dist))
        key_d = dist.min()
        if key_d > budget or (best is not None and key_d > best[0]):
            continue
        for s in starts[dist == key_d]:
            s = int(s)
            cand = (int(key_d), abs(s - hint), _cuts(text, s, s + k), k < m, abs(k - m), s, k)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    d, _, _, _, _, s, k = best
    return Alignment(s, s + k, d)


def fuzzy_align(entity: str, text: str, search_hint: Optional[int] = None,
                max_distance: float = 0.3, slack: int = 2) -> Optional[tuple[int, int]]:
    """Locate ``entity`` in ``text``, tolerating small edits.

    Exact occurrences win (nearest to ``search_hint``, then leftmost).
    Otherwise every window whose length is within ``slack`` of the entity's is
    scored by edit distance; ties prefer windows nearer the hint, then windows
    that do not split a word, then windows at least as long as the entity
    (predictions lose characters), then closer in length, then leftmost. Returns ``None`` when the best distance divided
    by ``len(entity)`` exceeds ``max_distance``.
    """
    hit = fuzzy_align_scored(entity, text, search_hint, max_distance, slack)
    return None if hit is None else hit.span


def realign_spans(text: str, spans: Sequence[EntitySpan]) -> tuple[list[EntitySpan], int]:
    """Move spans whose surface disagrees with ``text`` onto their best fuzzy window.

    Returns the corrected spans and how many were moved. Spans that do not
    align are kept at their offsets when those fit in ``text`` and dropped
    otherwise.
    """
    out, moved = [], 0
    for s in spans:
        fits = s.end <= len(text)
        if fits and (not s.surface or text[s.start:s.end] == s.surface):
            out.append(EntitySpan(s.start, s.end, s.etype, text[s.start:s.end]))
            continue
        hit = fuzzy_align(s.surface, text, s.start) if s.surface else None
        if hit is not None:
            out.append(EntitySpan(hit[0], hit[1], s.etype, text[hit[0]:hit[1]]))
            moved += 1
        elif fits:
            out.append(EntitySpan(s.start, s.end, s.etype, text[s.start:s.end]))
    return out, moved
