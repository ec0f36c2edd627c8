"""
Training a BiLSTM-CRF and warm-starting it
==========================================

A tagger trained on one synthetic corpus is used as the starting point for a
small target corpus whose gene names it has never seen. Dev F1 is printed per
epoch for a cold start and a warm start.
"""

from pathlib import Path
import tempfile

from seqtag.corpus import EntityType, document_tokens
from seqtag.corpus.synthetic import paired_fixture
from seqtag.embeddings import EmbeddingStack, SkipgramConfig, SkipgramEmbeddings, train_skipgram
from seqtag.tagger import TrainConfig, train_tagger

fx = paired_fixture(seed=0)
tokens = [[t.text for t in document_tokens(d)] for c in fx for d in c]
stack = EmbeddingStack([SkipgramEmbeddings(train_skipgram(
    tokens, SkipgramConfig(dim=16, epochs=10, min_count=1, window=2, negatives=5, lr=0.1)))])

# desk-sized settings; the defaults (hidden 256, dropout 0.5) are much slower
small = dict(hidden_size=16, batch_size=4, lr=0.5, dropout=0.0, patience=10, stop_when_annealed=False, seed=0)
source = train_tagger(fx.source, fx.source_dev, EntityType.Gene, TrainConfig(epochs=30, **small), stack)
print(f"source model: best dev F1 {source.meta['best_dev_f1']:.3f} at epoch {source.meta['best_epoch']}")

with tempfile.TemporaryDirectory() as tmp:
    ckpt = Path(tmp) / "source.model"
    source.save(ckpt)
    cold = train_tagger(fx.target_train, fx.target_dev, EntityType.Gene, TrainConfig(epochs=10, **small), stack)
    warm = train_tagger(fx.target_train, fx.target_dev, EntityType.Gene,
                        TrainConfig(epochs=10, init_checkpoint=str(ckpt), **small), stack)

print("epoch  cold   warm")
for c, w in zip(cold.meta["history"], warm.meta["history"]):
    print(f"{c['epoch']:>5}  {c['dev_f1']:.3f}  {w['dev_f1']:.3f}")

doc = fx.target_dev.documents[0]
print(doc.text.split("\n")[0])
print([s.surface for s in warm.predict_document(doc)])
