"""
Character language models and subword skip-gram vectors
=======================================================

A tiny forward/backward character LM pair turns each token into the hidden
states around it. Skip-gram vectors compose words from hashed character
n-grams, so unseen spellings still get vectors.
"""

import numpy as np

from seqtag.corpus import split_sentences, tokenize
from seqtag.embeddings import (
    CharLmConfig,
    CharVocab,
    EmbeddingStack,
    FlairEmbeddings,
    SkipgramConfig,
    SkipgramEmbeddings,
    cosine,
    train_char_lm,
    train_skipgram,
)
from seqtag.corpus.synthetic import make_corpus

corpus = make_corpus("demo", 120, seed=1)
lines = [line for doc in corpus for line in doc.text.split("\n")]

# small batches and a gentle learning rate suit a corpus of a few thousand characters
cfg = CharLmConfig(hidden_size=32, embed_dim=8, seq_len=25, batch_size=4, n_splits=5, epochs=8,
                   learning_rate=2.0, min_char_freq=1, seed=0)
vocab = CharVocab.build(lines, cfg.min_char_freq)   # one vocabulary for both directions
fwd = train_char_lm(lines, "forward", cfg, vocab)
bwd = train_char_lm(lines, "backward", cfg, vocab)
print("forward validation nats/char, every 4th split:", np.round(fwd.history[::4], 2))

def words(text):
    return tokenize(text, split_sentences(text))

sentences = [[t.text for t in words(line)] for line in lines]
sg = train_skipgram(sentences, SkipgramConfig(dim=24, epochs=5, min_count=1, window=2, negatives=5, lr=0.1))
# vectors from a small corpus share a large common component; compare after centring
mean = np.mean([sg.word_vector(w) for w in sg.words], axis=0)
for a, b in [("BRCA1", "TP53"), ("BRCA1", "liver"), ("tissue", "tissues")]:
    print(f"cos({a}, {b}) = {cosine(sg.word_vector(a) - mean, sg.word_vector(b) - mean):+.3f}")

stack = EmbeddingStack([FlairEmbeddings(fwd, bwd), SkipgramEmbeddings(sg)])
sentence = "Loss of PTEN increases proliferation."
vectors = stack.embed(sentence, words(sentence))
print("stacked vectors:", vectors.shape, "=", fwd.hidden_size, "+", bwd.hidden_size, "+", sg.dim)
