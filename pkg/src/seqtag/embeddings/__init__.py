"""Contextual string embeddings, subword skip-gram vectors, pretrained vectors, stacking."""

from .charlm import (
    CharLmConfig,
    CharLmModel,
    CharVocab,
    build_stream,
    extract_flair_embeddings,
    train_char_lm,
)
from .skipgram import (
    SkipgramConfig,
    SkipgramModel,
    char_ngrams,
    cosine,
    fnv1a_32,
    pair_loss_and_grads,
    train_skipgram,
    word_vector,
)
from .stack import (
    EmbeddingStack,
    FlairEmbeddings,
    SkipgramEmbeddings,
    WordVectorEmbeddings,
    stack_embeddings,
)
from .vectors import WordVectors, load_word2vec_file, load_word2vec_text, write_word2vec_text
