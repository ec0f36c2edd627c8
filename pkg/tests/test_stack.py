import numpy as np
import pytest

from seqtag.corpus import Token
from seqtag.embeddings import EmbeddingStack, WordVectorEmbeddings, WordVectors, stack_embeddings

TOKENS = [Token("a", 0, 1), Token("b", 2, 3)]


def provider(dim, offset):
    return WordVectorEmbeddings(WordVectors(["a", "b"], np.arange(2 * dim, dtype=float).reshape(2, dim) + offset))


def test_single_provider_is_identity():
    p = provider(3, 0)
    np.testing.assert_array_equal(stack_embeddings([p], "a b", TOKENS), p.embed("a b", TOKENS))


def test_dimensions_add():
    out = EmbeddingStack([provider(4, 0), provider(6, 100)]).embed("a b", TOKENS)
    assert out.shape == (2, 10)


def test_order_permutes_blocks():
    a, b = provider(2, 0), provider(3, 100)
    ab = stack_embeddings([a, b], "a b", TOKENS)
    ba = stack_embeddings([b, a], "a b", TOKENS)
    np.testing.assert_array_equal(ab[:, :2], ba[:, 3:])
    np.testing.assert_array_equal(np.sort(ab, axis=1), np.sort(ba, axis=1))


def test_bad_provider_shape_is_rejected():
    p = provider(2, 0)
    p.dim = 5
    with pytest.raises(ValueError, match="shape"):
        stack_embeddings([p], "a b", TOKENS)
    with pytest.raises(ValueError):
        EmbeddingStack([])


def test_stack_array_round_trip(overfit_stack):
    metas, arrays = overfit_stack.to_arrays()
    back = EmbeddingStack.from_arrays(metas, arrays)
    assert back.dim == overfit_stack.dim
    np.testing.assert_array_equal(back.embed("a b", TOKENS), overfit_stack.embed("a b", TOKENS))
