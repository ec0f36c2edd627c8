"""Offset-based NER evaluation: span matching modes, micro P/R/F1, fuzzy
re-alignment, result reports and published-score comparison."""

from .fuzzy import Alignment, fuzzy_align, fuzzy_align_scored, levenshtein, realign_spans
from .matching import EvalResult, MatchMode, MatchResult, evaluate_corpus, match_spans, prf1
from .report import (
    ComparisonRow,
    ReferenceScores,
    compare_to_reference,
    comparison_table,
    read_predictions,
    read_results_csv,
    results_table,
    write_comparison_csv,
    write_predictions,
    write_results_csv,
)
