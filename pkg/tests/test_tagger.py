import logging
from dataclasses import replace

import numpy as np
import pytest

from conftest import OVERFIT_TAGGER
from seqtag.corpus import Corpus, Document, EntitySpan, EntityType, Split
from seqtag.eval import MatchMode, evaluate_corpus
from seqtag.numerics import grad_check
from seqtag.tagger import LabelScheme, TaggerModel, TrainConfig, document_sentences, predict_document, train_tagger

G = EntityType.Gene


def test_config_defaults_and_validation():
    cfg = TrainConfig()
    assert (cfg.epochs, cfg.batch_size, cfg.lr, cfg.dropout, cfg.patience, cfg.hidden_size) == (200, 32, 0.1, 0.5, 3, 256)
    with pytest.raises(ValueError):
        TrainConfig(dropout=1.0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_label_scheme():
    s = LabelScheme(G)
    assert [str(l) for l in s.labels] == ["O", "B-Gene", "I-Gene", "E-Gene", "S-Gene"]
    ok = s.allowed_transitions()
    assert ok[5, 1] and not ok[5, 2]      # START -> B allowed, START -> I not
    assert ok[1, 3] and not ok[1, 0]      # B -> E allowed, B -> O not
    assert ok[4, 6] and not ok[2, 6]      # S -> STOP allowed, I -> STOP not


def test_full_sentence_gradient(overfit_stack):
    cfg = TrainConfig(hidden_size=4, dropout=0.0, seed=1)
    model = TaggerModel.init(overfit_stack, G, cfg)
    view = document_sentences("BRCA1 binds TP53")[0]
    embs = overfit_stack.embed(view.text, view.local_tokens)
    gold = [4, 0, 4]

    def loss_fn(p):
        model.params = p
        return model.sentence_loss(embs, gold)

    report = grad_check(loss_fn, dict(model.params), max_coords=25, rng=np.random.default_rng(0))
    assert report.passed, report.render()


def test_overfit_reaches_perfect_training_f1(overfit, overfit_model):
    assert overfit_model.meta["best_dev_f1"] == 1.0
    preds = {d.id: overfit_model.predict_document(d) for d in overfit}
    res = evaluate_corpus(overfit, preds, MatchMode.Exact, [G])[G]
    assert res.f1 == 1.0


def test_memorised_sentence_gives_training_spans(overfit, overfit_model):
    doc = overfit.documents[0]
    spans = predict_document(overfit_model, doc)
    assert [(s.start, s.end) for s in spans] == [(s.start, s.end) for s in doc.annotations]
    assert all(s.surface == doc.text[s.start:s.end] for s in spans)


def test_empty_input_predicts_nothing(overfit_model):
    assert overfit_model.predict_document("") == []
    assert overfit_model.predict_document("   \n ") == []
    assert overfit_model.predict_document(Document("e", "")) == []


def test_training_is_deterministic(tmp_path, overfit, overfit_stack):
    cfg = TrainConfig(epochs=3, seed=4, **OVERFIT_TAGGER)
    a = train_tagger(overfit, overfit, G, cfg, overfit_stack)
    b = train_tagger(overfit, overfit, G, cfg, overfit_stack)
    a.save(tmp_path / "a.model")
    b.save(tmp_path / "b.model")
    assert (tmp_path / "a.model").read_bytes() == (tmp_path / "b.model").read_bytes()
    c = train_tagger(overfit, overfit, G, replace(cfg, seed=5), overfit_stack)
    assert not np.array_equal(a.params["fwd.W"], c.params["fwd.W"])


def test_checkpoint_round_trip(tmp_path, overfit, overfit_model):
    path = tmp_path / "m.model"
    overfit_model.save(path)
    back = TaggerModel.load(path)
    assert back.etype is G and back.config == overfit_model.config
    assert back.meta["best_dev_f1"] == 1.0
    doc = overfit.documents[3]
    assert back.predict_document(doc) == overfit_model.predict_document(doc)


def test_init_from_checkpoint_converges_sooner(tmp_path, overfit, overfit_model):
    path = tmp_path / "init.model"
    overfit_model.save(path)
    first_perfect = lambda m: next(r["epoch"] for r in m.meta["history"] if r["dev_f1"] == 1.0)
    cfg = TrainConfig(epochs=40, seed=0, init_checkpoint=str(path), **OVERFIT_TAGGER)
    warm = train_tagger(overfit, overfit, G, cfg)
    assert first_perfect(warm) < first_perfect(overfit_model)


def test_init_checkpoint_dimension_mismatch(tmp_path, overfit, overfit_model):
    path = tmp_path / "init.model"
    overfit_model.save(path)
    cfg = TrainConfig(epochs=1, init_checkpoint=str(path), **{**OVERFIT_TAGGER, "hidden_size": 8})
    with pytest.raises(ValueError, match="hidden size"):
        train_tagger(overfit, overfit, G, cfg)


def test_stack_dimension_mismatch(overfit_model, overfit_stack):
    from seqtag.embeddings import EmbeddingStack, WordVectorEmbeddings, WordVectors
    other = EmbeddingStack([WordVectorEmbeddings(WordVectors(["a"], np.zeros((1, 3))))])
    with pytest.raises(ValueError, match="embeddings give 3"):
        TaggerModel(G, other, overfit_model.params, overfit_model.config)


def test_dev_without_entities_selects_on_loss(caplog, overfit, overfit_stack):
    dev = [Document("plain", "Nothing to see here.", split=Split.Dev)]
    cfg = TrainConfig(epochs=2, seed=0, **OVERFIT_TAGGER)
    with caplog.at_level(logging.WARNING):
        model = train_tagger(overfit, dev, G, cfg, overfit_stack)
    assert "no Gene entities" in caplog.text
    assert model.meta["selection_metric"] == "dev_loss"


def test_empty_sets_rejected(overfit, overfit_stack):
    with pytest.raises(ValueError, match="non-empty"):
        train_tagger(overfit, [], G, TrainConfig(epochs=1, **OVERFIT_TAGGER), overfit_stack)
    with pytest.raises(ValueError, match="embedding stack"):
        train_tagger(overfit, overfit, G, TrainConfig(epochs=1))


def test_masked_transitions_stay_masked(overfit, overfit_stack):
    cfg = TrainConfig(epochs=2, seed=0, mask_invalid_transitions=True, **OVERFIT_TAGGER)
    model = train_tagger(overfit, overfit, G, cfg, overfit_stack)
    assert np.isneginf(model.params["trans"][5, 2])
    assert np.isfinite(model.params["trans"][5, 1])
