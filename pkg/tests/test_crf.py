import math

import numpy as np
import pytest

from crf_oracle import brute_best, brute_log_partition, brute_unary, direct_score, random_instance
from seqtag.numerics import grad_check
from seqtag.tagger import (
    CrfParams,
    LabelScheme,
    apply_structural_mask,
    crf_log_partition,
    crf_marginals,
    crf_nll_and_gradients,
    crf_sequence_score,
    viterbi_decode,
)
from seqtag.corpus import EntityType


def zero_trans(L):
    return np.zeros((L + 2, L + 2))


def test_all_zero_scores_are_zero():
    assert crf_sequence_score(zero_trans(3), np.zeros((4, 3)), [0, 2, 1, 1]) == 0.0


def test_single_token_score():
    trans = zero_trans(2)
    trans[2, 1] = 0.3      # START -> 1
    trans[1, 3] = -0.7     # 1 -> STOP
    em = np.array([[5.0, 2.0]])
    assert crf_sequence_score(trans, em, [1]) == pytest.approx(0.3 + 2.0 - 0.7)


def test_score_matches_direct_summation(rng):
    trans, em = random_instance(rng, 4, 5)
    y = [3, 0, 4, 4]
    assert crf_sequence_score(trans, em, y) == pytest.approx(direct_score(trans, em, y), abs=1e-12)


def test_score_errors():
    with pytest.raises(ValueError, match="out of range"):
        crf_sequence_score(zero_trans(2), np.zeros((1, 2)), [2])
    with pytest.raises(ValueError, match="one label"):
        crf_sequence_score(zero_trans(2), np.zeros((2, 2)), [0])


def test_uniform_partition():
    assert crf_log_partition(zero_trans(2), np.zeros((3, 2))) == pytest.approx(3 * math.log(2), abs=1e-12)
    assert crf_log_partition(zero_trans(2), np.zeros((3, 2))) == pytest.approx(2.0794, abs=1e-4)


def test_single_position_partition(rng):
    trans, em = random_instance(rng, 1, 4)
    L = 4
    expected = np.logaddexp.reduce(trans[L, :L] + em[0] + trans[:L, L + 1])
    assert crf_log_partition(trans, em) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("T,L", [(1, 1), (2, 3), (3, 4), (5, 2), (4, 4), (5, 3)])
def test_partition_matches_enumeration(rng, T, L):
    for _ in range(5):
        trans, em = random_instance(rng, T, L, scale=2.0)
        assert crf_log_partition(trans, em) == pytest.approx(brute_log_partition(trans, em), abs=1e-8)


def test_marginals_match_enumeration_and_normalise(rng):
    trans, em = random_instance(rng, 4, 3)
    _, unary, pair = crf_marginals(trans, em)
    np.testing.assert_allclose(unary, brute_unary(trans, em), atol=1e-10)
    np.testing.assert_allclose(unary.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(pair.sum(axis=(1, 2)), 1.0, atol=1e-12)
    np.testing.assert_allclose(pair.sum(axis=2), unary[:-1], atol=1e-12)


def test_nll_gradients_match_finite_differences(rng):
    trans, em = random_instance(rng, 4, 3)
    gold = [2, 0, 0, 1]

    def loss_fn(p):
        loss, g_em, g_tr = crf_nll_and_gradients(p["trans"], p["em"], gold)
        return loss, {"em": g_em, "trans": g_tr}

    report = grad_check(loss_fn, {"trans": trans, "em": em})
    assert report.max_rel_error <= 1e-6, report.render()


def test_nll_nonnegative_and_vanishes_for_a_dominant_gold_path():
    em = np.full((3, 3), -50.0)
    gold = [1, 2, 0]
    em[np.arange(3), gold] = 50.0
    loss, g_em, _ = crf_nll_and_gradients(zero_trans(3), em, gold)
    assert 0.0 <= loss < 1e-12
    assert np.abs(g_em).max() < 1e-12


@pytest.mark.parametrize("T,L", [(1, 3), (3, 3), (5, 4), (4, 2)])
def test_viterbi_matches_enumeration(rng, T, L):
    for _ in range(5):
        trans, em = random_instance(rng, T, L)
        path, score = viterbi_decode(trans, em)
        best, best_score = brute_best(trans, em)
        assert path == best
        assert score == pytest.approx(best_score, abs=1e-10)


def test_viterbi_ties_go_to_lowest_index():
    path, score = viterbi_decode(zero_trans(3), np.zeros((3, 3)))
    assert path == [0, 0, 0] and score == 0.0


def test_viterbi_follows_transitions_over_emissions():
    trans = zero_trans(2)
    trans[0, 0] = -10.0
    em = np.array([[1.0, 0.0], [1.0, 0.5]])
    assert viterbi_decode(trans, em)[0] == [0, 1]


def test_structural_mask_respected():
    scheme = LabelScheme(EntityType.Gene)
    trans = apply_structural_mask(np.zeros((7, 7)), scheme.allowed_transitions())
    assert np.isneginf(trans[:, 5]).all() and np.isneginf(trans[6, :]).all()
    # emissions prefer the ill-formed O, I-Gene, O
    em = np.array([[1.0, 0, 0, 0, 0], [0, 0, 1.0, 0, 0], [1.0, 0, 0, 0, 0]])
    path, _ = viterbi_decode(trans, em)
    assert path != [0, 2, 0]
    assert np.isfinite(crf_log_partition(trans, em))
    pair = crf_marginals(trans, em)[2]
    assert pair[0, 0, 2] == 0.0 and pair[1, 2, 0] == 0.0


def test_crf_params_init_masks():
    crf = CrfParams.init(np.random.default_rng(0), 5, 8)
    assert crf.transitions.shape == (7, 7)
    assert np.isneginf(crf.transitions[0, 5]) and np.isneginf(crf.transitions[6, 0])
    assert crf.emissions(np.ones((2, 8))).shape == (2, 5)


def test_shape_checks():
    with pytest.raises(ValueError, match="transitions must be"):
        crf_log_partition(np.zeros((4, 4)), np.zeros((2, 3)))
    with pytest.raises(ValueError, match="non-empty"):
        crf_log_partition(zero_trans(2), np.zeros((0, 2)))
