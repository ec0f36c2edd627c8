from pathlib import Path

import numpy as np
import pytest

from seqtag.corpus import EntityType, document_tokens
from seqtag.corpus.synthetic import overfit_corpus
from seqtag.embeddings import EmbeddingStack, SkipgramConfig, SkipgramEmbeddings, train_skipgram
from seqtag.tagger import TrainConfig, train_tagger

FIXTURES = Path(__file__).parent / "fixtures"

# small enough to train in a few seconds, large enough to memorise the corpus
OVERFIT_TAGGER = dict(hidden_size=16, batch_size=4, lr=0.5, dropout=0.0, patience=10)
OVERFIT_SKIPGRAM = SkipgramConfig(dim=16, epochs=20, min_count=1, window=2, negatives=5, lr=0.1)


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def overfit():
    return overfit_corpus()


@pytest.fixture(scope="session")
def overfit_stack(overfit):
    sents = [[t.text for t in document_tokens(d)] for d in overfit]
    return EmbeddingStack([SkipgramEmbeddings(train_skipgram(sents, OVERFIT_SKIPGRAM))])


@pytest.fixture(scope="session")
def overfit_model(overfit, overfit_stack):
    cfg = TrainConfig(epochs=40, seed=0, **OVERFIT_TAGGER)
    return train_tagger(overfit, overfit, EntityType.Gene, cfg, overfit_stack)
