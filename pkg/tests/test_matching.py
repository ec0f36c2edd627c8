import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqtag.corpus import Corpus, Document, EntitySpan, EntityType, load_jsonl_corpus
from seqtag.eval import MatchMode, evaluate_corpus, match_spans, prf1, read_predictions

G = EntityType.Gene
EXACT, TOL, OVER = MatchMode.Exact, MatchMode.OneCharTolerance, MatchMode.AnyOverlap


def span(a, b, t=G):
    return EntitySpan(a, b, t)


def counts(gold, pred, mode):
    m = match_spans(gold, pred, mode)
    return m.tp, m.fp, m.fn


@pytest.mark.parametrize("mode", list(MatchMode))
def test_identical_spans_match_in_every_mode(mode):
    assert counts([span(10, 20)], [span(10, 20)], mode) == (1, 0, 0)


def test_one_character_tolerance():
    assert counts([span(10, 20)], [span(11, 20)], TOL) == (1, 0, 0)
    assert counts([span(10, 20)], [span(10, 19)], TOL) == (1, 0, 0)
    assert counts([span(10, 20)], [span(11, 20)], EXACT) == (0, 1, 1)


def test_two_characters_off_needs_overlap():
    assert counts([span(10, 20)], [span(12, 20)], TOL) == (0, 1, 1)
    assert counts([span(10, 20)], [span(12, 20)], OVER) == (1, 0, 0)


def test_both_boundaries_off_by_one_is_not_tolerated():
    assert counts([span(10, 20)], [span(11, 21)], TOL) == (0, 1, 1)


def test_exact_match_is_preferred_over_earlier_tolerant_one():
    gold = [span(10, 20), span(21, 30)]
    pred = [span(10, 21), span(10, 20)]
    m = match_spans(gold, pred, TOL)
    assert (m.tp, m.fp, m.fn) == (1, 1, 1)
    assert (m.pairs[0][1].start, m.pairs[0][1].end) == (10, 20)


def test_types_must_agree():
    assert counts([span(0, 5, G)], [span(0, 5, EntityType.Disease)], OVER) == (0, 1, 1)


def test_duplicate_predictions_are_distinct_candidates():
    assert counts([span(0, 5)], [span(0, 5), span(0, 5)], EXACT) == (1, 1, 0)


def test_prf1_examples():
    assert prf1(1, 0, 0) == (1.0, 1.0, 1.0)
    assert prf1(0, 5, 7) == (0.0, 0.0, 0.0)
    p, r, f = prf1(3, 1, 2)
    assert (p, r) == (0.75, 0.6)
    assert f == pytest.approx(0.666667, abs=1e-6)
    with pytest.raises(ValueError):
        prf1(-1, 0, 0)


FIXTURE_COUNTS = {
    EXACT: {"Gene": (1, 4, 3), "Disease": (0, 1, 2), "Chemical": (1, 2, 1)},
    TOL: {"Gene": (3, 2, 1), "Disease": (0, 1, 2), "Chemical": (2, 1, 0)},
    OVER: {"Gene": (4, 1, 0), "Disease": (1, 0, 1), "Chemical": (2, 1, 0)},
}


@pytest.fixture(scope="module")
def eval_fixture():
    from conftest import FIXTURES
    gold = load_jsonl_corpus(FIXTURES / "eval_gold.jsonl")
    with open(FIXTURES / "eval_pred.jsonl", encoding="utf-8") as fh:
        return gold, read_predictions(fh)


@pytest.mark.parametrize("mode", list(MatchMode))
def test_fixture_hand_counts(eval_fixture, mode):
    gold, preds = eval_fixture
    res = evaluate_corpus(gold, preds, mode)
    got = {t.value: (r.tp, r.fp, r.fn) for t, r in res.items()}
    assert got == FIXTURE_COUNTS[mode]


def test_evaluate_corpus_examples():
    docs = [Document("a", "BRCA1 and TP53", [span(0, 5), span(10, 14)]),
            Document("b", "EGFR here", [span(0, 4)])]
    c = Corpus("c", docs)
    assert evaluate_corpus(c, {"a": docs[0].annotations, "b": docs[1].annotations})[G].f1 == 1.0
    empty = evaluate_corpus(c, {})[G]
    assert (empty.precision, empty.recall, empty.fn) == (0.0, 0.0, 3)
    res = evaluate_corpus(c, {"a": [span(0, 5), span(4, 9)], "b": [span(0, 4)]})[G]
    assert (res.tp, res.fp, res.fn) == (2, 1, 1)
    assert res.precision == pytest.approx(2 / 3) and res.recall == pytest.approx(2 / 3)
    with pytest.raises(ValueError, match="unknown document"):
        evaluate_corpus(c, {"zz": []})


@st.composite
def span_lists(draw):
    def one():
        a = draw(st.integers(0, 40))
        return span(a, a + draw(st.integers(1, 8)))
    return [one() for _ in range(draw(st.integers(0, 6)))], [one() for _ in range(draw(st.integers(0, 6)))]


@settings(max_examples=400, deadline=None)
@given(span_lists())
def test_monotone_and_conserving(case):
    gold, pred = case
    tps = []
    for mode in (EXACT, TOL, OVER):
        tp, fp, fn = counts(gold, pred, mode)
        assert tp + fn == len(gold) and tp + fp == len(pred)
        tps.append(tp)
    assert tps[0] <= tps[1] <= tps[2]


@settings(max_examples=200, deadline=None)
@given(span_lists())
def test_self_match_is_perfect(case):
    gold, _ = case
    for mode in MatchMode:
        assert counts(gold, gold, mode)[1:] == (0, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_f1_is_harmonic_mean(tp, fp, fn):
    p, r, f = prf1(tp, fp, fn)
    expected = 0.0 if tp == 0 else 2 * tp / (2 * tp + fp + fn)
    assert f == pytest.approx(expected, abs=1e-12)


def test_mode_parse():
    assert MatchMode.parse("tolerant") is TOL
    assert MatchMode.parse("AnyOverlap") is OVER
    with pytest.raises(ValueError):
        MatchMode.parse("fuzzy")
