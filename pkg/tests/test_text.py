import pytest

from seqtag.corpus import Document, EntitySpan, EntityType, Token, document_tokens, group_sentences
from seqtag.corpus import split_sentences, tokenize


def toks(text):
    return [(t.text, t.start, t.end) for t in tokenize(text, split_sentences(text))]


@pytest.mark.parametrize("text,expected", [
    ("", []),
    ("A cat. B dog.", [(0, 6), (7, 13)]),
    ("E. coli grows.", [(0, 14)]),
    ("Dr. Smith saw it. Then left!", [(0, 17), (18, 28)]),
    ("no terminal punctuation", [(0, 23)]),
    ("   ", []),
])
def test_split_sentences(text, expected):
    assert split_sentences(text) == expected


def test_newline_always_ends_a_sentence():
    assert split_sentences("first line\nsecond line") == [(0, 10), (11, 22)]


def test_tokenize_examples():
    assert toks("IL-2 binds.") == [("IL-2", 0, 4), ("binds", 5, 10), (".", 10, 11)]
    assert toks("x") == [("x", 0, 1)]
    assert toks("a  b") == [("a", 0, 1), ("b", 3, 4)]


def test_tokenize_keeps_internal_hyphens_and_decimals():
    got = [t for t, _, _ in toks("The (BRCA1) gene; p53-deficient cells, 3.5 mM.")]
    assert got == ["The", "(", "BRCA1", ")", "gene", ";", "p53-deficient", "cells", ",", "3.5", "mM", "."]


def test_token_offsets_slice_the_text():
    text = "Ménière disease (MD), α-synuclein; 25(OH)D3 levels.\nNext  sentence here."
    for tok in tokenize(text, split_sentences(text)):
        assert text[tok.start:tok.end] == tok.text
        assert not any(ch.isspace() for ch in tok.text)


def test_sentence_index_increases():
    text = "Ab cd. Ef gh. Ij kl."
    tokens = tokenize(text, split_sentences(text))
    assert [t.sentence_idx for t in tokens] == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert [len(s) for s in group_sentences(tokens)] == [3, 3, 3]


def test_document_tokens_prefers_stored_tokens():
    stored = [Token("BRCA1 site", 0, 10, 0)]
    doc = Document("d", "BRCA1 site", [EntitySpan(0, 5, EntityType.Gene)], tokens=stored)
    assert document_tokens(doc) == stored
    assert [t.text for t in document_tokens(Document("d", "BRCA1 site"))] == ["BRCA1", "site"]
