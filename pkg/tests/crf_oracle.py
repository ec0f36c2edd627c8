"""Exhaustive reference computations for small linear-chain CRFs."""

import itertools
import math

import numpy as np


def direct_score(trans, em, labels):
    L = em.shape[1]
    s = trans[L, labels[0]] + trans[labels[-1], L + 1]
    for t, y in enumerate(labels):
        s += em[t, y]
        if t:
            s += trans[labels[t - 1], y]
    return s


def all_labelings(T, L):
    return itertools.product(range(L), repeat=T)


def brute_log_partition(trans, em):
    T, L = em.shape
    scores = [direct_score(trans, em, y) for y in all_labelings(T, L)]
    m = max(scores)
    return m + math.log(sum(math.exp(s - m) for s in scores))


def brute_best(trans, em):
    """Best labeling; lexicographically smallest among exact ties."""
    T, L = em.shape
    best, arg = -math.inf, None
    for y in all_labelings(T, L):
        s = direct_score(trans, em, y)
        if s > best:
            best, arg = s, list(y)
    return arg, best


def brute_unary(trans, em):
    T, L = em.shape
    log_z = brute_log_partition(trans, em)
    out = np.zeros((T, L))
    for y in all_labelings(T, L):
        p = math.exp(direct_score(trans, em, y) - log_z)
        for t, lab in enumerate(y):
            out[t, lab] += p
    return out


def random_instance(rng, T, L, scale=1.0):
    trans = rng.normal(0, scale, (L + 2, L + 2))
    trans[:, L] = -np.inf
    trans[L + 1, :] = -np.inf
    return trans, rng.normal(0, scale, (T, L))
