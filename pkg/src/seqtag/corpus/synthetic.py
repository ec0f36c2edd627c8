"""Small templated corpora for smoke tests, overfitting runs and demos.

Sentences are built from fixed templates with slot fillers drawn from
disjoint name pools, so every entity offset is known by construction.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from ..numerics import make_rng
from .document import Corpus, Document, EntitySpan, EntityType, Split

GENE_POOL = [
    "BRCA1", "TP53", "EGFR", "KRAS", "MYC", "PTEN", "CDK4", "BCL2", "ATM", "RB1",
    "VEGFA", "ERBB2", "JAK2", "STAT3", "NOTCH1", "SOX2", "GATA3", "FOXP3", "IL6", "TNF",
    "MDM2", "CDH1", "SMAD4", "APC", "MLH1", "NRAS", "BRAF", "ALK", "RET", "KIT",
]
TISSUE_POOL = ["liver", "lung", "breast", "colon", "kidney", "skin", "brain", "blood"]

TEMPLATES = [
    "{g} binds {g} in {t} cells.",
    "Expression of {g} was reduced in {t} tissue.",
    "We observed that {g} regulates {g} and {g}.",
    "Mutations in {g} are frequent in {t} tumours.",
    "Loss of {g} increases proliferation.",
    "Samples were collected from the {t} of each patient.",
    "No changes were detected in the {t} samples.",
]


def _fill(template: str, rng: np.random.Generator, genes: Sequence[str],
          etype: EntityType, offset: int) -> tuple[str, list[EntitySpan]]:
    out, spans = [], []
    pos = offset
    rest = template
    while rest:
        i = rest.find("{")
        if i < 0:
            out.append(rest)
            break
        out.append(rest[:i])
        pos += i
        slot = rest[i + 1]
        word = genes[int(rng.integers(len(genes)))] if slot == "g" else TISSUE_POOL[int(rng.integers(len(TISSUE_POOL)))]
        if slot == "g":
            spans.append(EntitySpan(pos, pos + len(word), etype, word))
        out.append(word)
        pos += len(word)
        rest = rest[i + 3:]
    return "".join(out), spans


def make_corpus(name: str, n_sentences: int, seed: int, genes: Sequence[str] = GENE_POOL,
                sentences_per_doc: int = 3, etype: EntityType = EntityType.Gene,
                split: Split = Split.Train) -> Corpus:
    """``n_sentences`` templated sentences grouped into documents, one per line."""
    rng = make_rng(seed, f"synthetic.{name}")
    docs = []
    for d in range(0, n_sentences, sentences_per_doc):
        parts, spans, offset = [], [], 0
        for _ in range(min(sentences_per_doc, n_sentences - d)):
            text, s = _fill(TEMPLATES[int(rng.integers(len(TEMPLATES)))], rng, genes, etype, offset)
            parts.append(text)
            spans.extend(s)
            offset += len(text) + 1
        docs.append(Document(f"{name}-{d // sentences_per_doc:03d}", "\n".join(parts), spans, split))
    return Corpus(name, docs, {etype})


def overfit_corpus(seed: int = 0) -> Corpus:
    """The 30-sentence corpus used for train-on-train overfitting checks."""
    return make_corpus("overfit", 30, seed)


class PairedFixture(NamedTuple):
    source: Corpus      # related corpus used to pretrain a checkpoint
    source_dev: Corpus
    target_train: Corpus
    target_dev: Corpus


def paired_fixture(seed: int = 0) -> PairedFixture:
    """A related source corpus and a small target task sharing templates.

    Source and target draw gene names from disjoint halves of the pool, so a
    pretrained model must transfer through context rather than memorise names.
    """
    half = len(GENE_POOL) // 2
    src, tgt = GENE_POOL[:half], GENE_POOL[half:]
    return PairedFixture(
        make_corpus("source", 60, seed, src),
        make_corpus("source-dev", 12, seed + 1, src, split=Split.Dev),
        make_corpus("target", 6, seed + 2, tgt),
        make_corpus("target-dev", 15, seed + 3, tgt, split=Split.Dev),
    )
