import numpy as np
import pytest

from seqtag.numerics import LstmCellParams, grad_check
from seqtag.tagger import bilstm_backward, bilstm_encode
from test_lstm import random_params, scalar_step


def test_output_shape(rng):
    f, b = random_params(rng, 3, 4), random_params(rng, 3, 4)
    out, _ = bilstm_encode(f, b, rng.normal(size=(5, 3)))
    assert out.shape == (5, 8)


def test_reversal_symmetry(rng):
    """Swapping the two cells and reversing the input swaps and reverses the halves."""
    f, b = random_params(rng, 3, 2), random_params(rng, 3, 2)
    x = rng.normal(size=(4, 3))
    out, _ = bilstm_encode(f, b, x)
    rev, _ = bilstm_encode(b, f, x[::-1])
    np.testing.assert_allclose(rev[::-1, :2], out[:, 2:], atol=1e-14)
    np.testing.assert_allclose(rev[::-1, 2:], out[:, :2], atol=1e-14)


def test_two_token_scalar_oracle(rng):
    f, b = random_params(rng, 2, 2), random_params(rng, 2, 2)
    x = rng.normal(size=(2, 2))
    zero = np.zeros(2)
    hf1, cf1 = scalar_step(f, x[0], zero, zero)
    hf2, _ = scalar_step(f, x[1], hf1, cf1)
    hb2, cb2 = scalar_step(b, x[1], zero, zero)
    hb1, _ = scalar_step(b, x[0], hb2, cb2)
    out, _ = bilstm_encode(f, b, x)
    np.testing.assert_allclose(out, [np.r_[hf1, hb1], np.r_[hf2, hb2]], atol=1e-12)


def test_dropout_only_in_training(rng):
    f, b = random_params(rng, 3, 2), random_params(rng, 3, 2)
    x = rng.normal(size=(3, 3))
    plain, _ = bilstm_encode(f, b, x)
    eval_out, _ = bilstm_encode(f, b, x, dropout=0.5, rng=rng, training=False)
    np.testing.assert_array_equal(plain, eval_out)
    train_out, cache = bilstm_encode(f, b, x, dropout=0.5, rng=np.random.default_rng(1), training=True)
    assert cache.in_mask is not None and not np.array_equal(plain, train_out)


def test_backward_finite_differences(rng):
    D, H, T = 3, 2, 4
    weights = rng.normal(size=(T, 2 * H))
    masks_rng_seed = 5

    def loss_fn(p):
        f, b = LstmCellParams.from_dict(p, "f"), LstmCellParams.from_dict(p, "b")
        out, cache = bilstm_encode(f, b, p["x"], 0.3, np.random.default_rng(masks_rng_seed), True)
        gf, gb, gx = bilstm_backward(f, b, cache, weights)
        return float(np.sum(weights * out)), {**gf.as_dict("f"), **gb.as_dict("b"), "x": gx}

    params = {**random_params(rng, D, H).as_dict("f"), **random_params(rng, D, H).as_dict("b"),
              "x": rng.normal(size=(T, D))}
    report = grad_check(loss_fn, params)
    assert report.max_rel_error <= 1e-6, report.render()


def test_errors(rng):
    f = random_params(rng, 3, 2)
    with pytest.raises(ValueError, match="non-empty"):
        bilstm_encode(f, f, np.zeros((0, 3)))
    with pytest.raises(ValueError, match="does not match"):
        bilstm_encode(f, f, np.zeros((2, 4)))
