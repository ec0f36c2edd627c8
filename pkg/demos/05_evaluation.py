"""
Scoring predictions under three matching modes
==============================================

Exact spans, spans off by one character at one end, and any overlap. Then a
prediction whose text lost a non-ascii letter is re-anchored by edit distance.
"""

from seqtag.corpus import Document, EntitySpan, EntityType
from seqtag.eval import (
    EvalResult,
    MatchMode,
    ReferenceScores,
    compare_to_reference,
    comparison_table,
    evaluate_corpus,
    fuzzy_align,
    results_table,
)

G = EntityType.Gene
text = "BRCA1 and TP53 regulate MDM2 in breast cells."
gold = Document("d", text, [EntitySpan(0, 5, G), EntitySpan(10, 14, G), EntitySpan(24, 28, G)])
pred = [EntitySpan(0, 5, G),    # exact
        EntitySpan(10, 13, G),  # loses the last character
        EntitySpan(22, 28, G)]  # starts two characters early

results = [evaluate_corpus([gold], {"d": pred}, mode, "demo")[G] for mode in MatchMode]
print(results_table(results))

# offsets computed on a text where the beta was dropped
damaged = "Serum TGF-1 levels"
original = "Serum TGF-β1 levels"
print(fuzzy_align(damaged[6:11], original, search_hint=6), repr(original[6:12]))

ref = ReferenceScores.load()
mine = [EvalResult("CRAFT", EntityType.Chemical, MatchMode.Exact, tp=60, fp=30, fn=25)]
print(comparison_table(compare_to_reference(mine, ref, tools=["HUNER", "HunFlair"])))
