"""
Linear-chain CRF inference, checked by brute force
==================================================

The forward algorithm and Viterbi are compared with explicit enumeration of
every labeling of a short sequence, then the NLL gradient is checked with
central differences.
"""

import itertools

import numpy as np

from seqtag.numerics import grad_check, logsumexp
from seqtag.tagger import crf_log_partition, crf_nll_and_gradients, crf_sequence_score, viterbi_decode

rng = np.random.default_rng(0)
T, L = 4, 3
emissions = rng.normal(size=(T, L))
trans = rng.normal(size=(L + 2, L + 2))
trans[:, L] = -np.inf      # nothing moves into START
trans[L + 1, :] = -np.inf  # nothing leaves STOP

scores = {y: crf_sequence_score(trans, emissions, y) for y in itertools.product(range(L), repeat=T)}
print("forward algorithm :", crf_log_partition(trans, emissions))
print("enumeration       :", logsumexp(list(scores.values())))

path, best = viterbi_decode(trans, emissions)
print("viterbi           :", path, round(best, 6))
print("argmax            :", list(max(scores, key=scores.get)))

gold = [0, 2, 2, 1]
def loss(p):
    nll, g_em, g_tr = crf_nll_and_gradients(p["trans"], p["em"], gold)
    return nll, {"em": g_em, "trans": g_tr}

# -inf entries are skipped by the checker
print(grad_check(loss, {"trans": trans.copy(), "em": emissions.copy()}).render())
