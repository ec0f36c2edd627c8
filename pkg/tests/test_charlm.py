import math

import numpy as np
import pytest

from seqtag.corpus import Token
from seqtag.embeddings import CharLmConfig, CharLmModel, CharVocab, build_stream, extract_flair_embeddings, train_char_lm

TINY = CharLmConfig(hidden_size=8, embed_dim=4, seq_len=20, batch_size=4, n_splits=4, min_char_freq=1)


def test_vocab_reserves_specials_and_floors_rare_chars():
    v = CharVocab.build(["aaaaab", "aaaaa"], min_freq=5)
    assert v.items == ["<unk>", "<s>", "</s>", "a"]
    np.testing.assert_array_equal(v.encode("ab"), [3, 0])


def test_zero_projection_scores_ln_v(rng):
    chars = "abcdefgh"
    vocab = CharVocab(list(chars))
    model = CharLmModel.init("forward", vocab, TINY, rng)
    model.params["proj.W"][:] = 0.0
    text = "".join(rng.choice(list(chars), size=200))
    assert model.loss(text) == pytest.approx(math.log(len(vocab)), abs=1e-12)


def test_next_char_distribution_normalised(rng):
    model = CharLmModel.init("backward", CharVocab(list("xyz")), TINY, rng)
    p = np.exp(model.next_char_log_probs("xyzzy"))
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)


def test_period_two_text_is_learned():
    cfg = CharLmConfig(hidden_size=16, embed_dim=4, seq_len=50, batch_size=8, n_splits=6, min_char_freq=1)
    model = train_char_lm(["ab" * 5000], "forward", cfg)
    assert len(model.history) == 5
    assert model.history[-1] < 0.1


def test_training_is_deterministic():
    lines = ["the cat sat on the mat"] * 20
    a = train_char_lm(lines, "forward", TINY)
    b = train_char_lm(lines, "forward", TINY)
    for k in a.params:
        np.testing.assert_array_equal(a.params[k], b.params[k])
    assert a.history == b.history


def test_training_errors():
    with pytest.raises(ValueError, match="empty"):
        train_char_lm([""], "forward", TINY)
    with pytest.raises(ValueError, match="degenerate"):
        train_char_lm(["aaaa"], "forward", TINY)
    with pytest.raises(ValueError, match="direction"):
        CharLmModel.init("sideways", CharVocab(list("ab")), TINY)


def test_backward_stream_is_reversed():
    v = CharVocab(list("ab"))
    np.testing.assert_array_equal(build_stream(["ab"], v, "backward"), [1, 4, 3, 2])


@pytest.fixture(scope="module")
def pair():
    vocab = CharVocab(list("abcdefghijklmnopqrstuvwxyz "))
    rng = np.random.default_rng(3)
    return (CharLmModel.init("forward", vocab, TINY, rng), CharLmModel.init("backward", vocab, TINY, rng))


def toks(text):
    out, pos = [], 0
    for w in text.split(" "):
        out.append(Token(w, pos, pos + len(w)))
        pos += len(w) + 1
    return out


def test_flair_shape_and_determinism(pair):
    fwd, bwd = pair
    text = "gene binds dna"
    a = extract_flair_embeddings(fwd, bwd, text, toks(text))
    assert a.shape == (3, 16)
    np.testing.assert_array_equal(a, extract_flair_embeddings(fwd, bwd, text, toks(text)))


def test_flair_positions(pair):
    fwd, bwd = pair
    text = "ab cd"
    vec = extract_flair_embeddings(fwd, bwd, text, toks(text))
    # forward state after "ab"; backward state after reading "dc ba" up to "a"
    np.testing.assert_allclose(vec[0, :8], fwd.hidden_states("ab")[-1], atol=1e-14)
    np.testing.assert_allclose(vec[0, 8:], bwd.hidden_states(text)[-1], atol=1e-14)
    np.testing.assert_allclose(vec[1, 8:], bwd.hidden_states("cd")[-1], atol=1e-14)


def test_flair_prefix_and_suffix_properties(pair):
    fwd, bwd = pair
    a, b = "gene binds dna", "gene binds rna strongly"
    ea, eb = (extract_flair_embeddings(fwd, bwd, t, toks(t)) for t in (a, b))
    np.testing.assert_array_equal(ea[:2, :8], eb[:2, :8])
    c, d = "my gene binds", "our other gene binds"
    ec, ed = (extract_flair_embeddings(fwd, bwd, t, toks(t)) for t in (c, d))
    np.testing.assert_array_equal(ec[-2:, 8:], ed[-2:, 8:])


def test_flair_rejects_bad_offsets(pair):
    fwd, bwd = pair
    with pytest.raises(ValueError, match="outside"):
        extract_flair_embeddings(fwd, bwd, "ab", [Token("abc", 0, 3)])
    with pytest.raises(ValueError, match="forward"):
        extract_flair_embeddings(bwd, fwd, "ab", [])


def test_save_load_round_trip(tmp_path, pair):
    fwd, _ = pair
    fwd.save(tmp_path / "f.model")
    back = CharLmModel.load(tmp_path / "f.model")
    assert back.vocab == fwd.vocab and back.config == fwd.config
    np.testing.assert_array_equal(back.hidden_states("probe text"), fwd.hidden_states("probe text"))
