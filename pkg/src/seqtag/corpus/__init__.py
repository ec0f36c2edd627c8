"""Documents, segmentation, IOBES conversion, corpus formats and splits."""

from .document import (
    OUTSIDE,
    Corpus,
    Document,
    EntitySpan,
    EntityType,
    IobesLabel,
    Split,
    Token,
)
from .formats import (
    DEFAULT_TYPE_ALIASES,
    FormatError,
    load_jsonl_corpus,
    load_type_aliases,
    parse_conll,
    parse_pubtator,
    read_jsonl,
    write_conll,
    write_conll_corpus,
    write_jsonl,
)
from .iobes import decode_iobes, encode_iobes, resolve_overlaps
from .splits import CorpusStats, SourcedDocument, SplitSets, build_splits, corpora_for_type, corpus_stats
from .text import document_tokens, group_sentences, split_sentences, tokenize

__all__ = [
    "OUTSIDE", "Corpus", "CorpusStats", "DEFAULT_TYPE_ALIASES", "Document", "EntitySpan",
    "EntityType", "FormatError", "IobesLabel", "SourcedDocument", "Split", "SplitSets", "Token",
    "build_splits", "corpora_for_type", "corpus_stats", "decode_iobes", "document_tokens",
    "encode_iobes", "group_sentences", "load_jsonl_corpus", "load_type_aliases", "parse_conll",
    "parse_pubtator", "read_jsonl", "resolve_overlaps", "split_sentences", "tokenize",
    "write_conll", "write_conll_corpus", "write_jsonl",
]
