import math

import numpy as np
import pytest

from quantseq.errors import LabelError, ParameterError, ShapeError
from quantseq.neural import (
    Adam,
    DenseParams,
    DropoutConfig,
    LstmParams,
    adam_step,
    bce_grad,
    bce_loss,
    dense_sigmoid,
    head_backward,
    head_forward,
    init_dense_params,
    init_lstm_params,
    lstm_forward,
)


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def reference_lstm(features, params):
    """Scalar-loop recurrence, independent of the vectorized implementation."""
    hidden = params.hidden_dim
    input_dim = params.input_dim
    h = [0.0] * hidden
    c = [0.0] * hidden
    for x in features:
        v = list(x) + h
        new_h, new_c = [], []
        for j in range(hidden):
            zi = sum(params.w_i[j][m] * v[m] for m in range(input_dim + hidden)) + params.b_i[j]
            zf = sum(params.w_f[j][m] * v[m] for m in range(input_dim + hidden)) + params.b_f[j]
            zg = sum(params.w_g[j][m] * v[m] for m in range(input_dim + hidden)) + params.b_g[j]
            zo = sum(params.w_o[j][m] * v[m] for m in range(input_dim + hidden)) + params.b_o[j]
            i, f, g, o = sigmoid(zi), sigmoid(zf), math.tanh(zg), sigmoid(zo)
            cc = f * c[j] + i * g
            new_c.append(cc)
            new_h.append(o * math.tanh(cc))
        h, c = new_h, new_c
    return np.array(h)


def small_params(seed=0, input_dim=1, hidden=3):
    rng = np.random.default_rng(seed)
    return init_lstm_params(input_dim, hidden, rng), init_dense_params(hidden, rng)


class TestLstmForward:
    def test_zero_params_give_zero_hidden(self):
        lstm = LstmParams(
            *(np.zeros((3, 4)) for _ in range(4)), *(np.zeros(3) for _ in range(4))
        )
        out, _ = lstm_forward(np.ones((5, 1)), lstm, DropoutConfig(rate=0.5, train=False))
        np.testing.assert_allclose(out, np.zeros(3))

    def test_matches_scalar_reference(self):
        lstm, _ = small_params(seed=1, hidden=3)
        rng = np.random.default_rng(2)
        features = rng.normal(size=(4, 1))
        out, _ = lstm_forward(features, lstm, DropoutConfig(rate=0.0, train=False))
        np.testing.assert_allclose(out, reference_lstm(features, lstm), atol=1e-12)

    def test_empty_sequence_rejected(self):
        lstm, _ = small_params()
        with pytest.raises(ShapeError):
            lstm_forward(np.zeros((0, 1)), lstm, DropoutConfig(train=False))

    def test_eval_mode_is_deterministic_without_rng(self):
        lstm, _ = small_params(seed=3)
        features = np.linspace(-1, 1, 6).reshape(-1, 1)
        a, _ = lstm_forward(features, lstm, DropoutConfig(rate=0.5, train=False))
        b, _ = lstm_forward(features, lstm, DropoutConfig(rate=0.5, train=False))
        np.testing.assert_array_equal(a, b)

    def test_train_dropout_needs_rng(self):
        lstm, _ = small_params()
        with pytest.raises(ParameterError):
            lstm_forward(np.ones((2, 1)), lstm, DropoutConfig(rate=0.5, train=True))

    def test_forget_bias_initialized_to_one(self):
        lstm, _ = small_params(seed=9, hidden=7)
        np.testing.assert_allclose(lstm.b_f, np.ones(7))

    def test_dropout_inverted_scaling_expectation(self):
        # averaged over many masks, train-mode output matches eval output
        lstm, _ = small_params(seed=4, hidden=8)
        rng = np.random.default_rng(5)
        features = rng.normal(size=(3, 1))
        eval_out, _ = lstm_forward(features, lstm, DropoutConfig(rate=0.5, train=False))
        total = np.zeros(8)
        mask_rng = np.random.default_rng(6)
        n = 10000
        for _ in range(n):
            out, _ = lstm_forward(features, lstm, DropoutConfig(rate=0.5, train=True), mask_rng)
            total += out
        mean = total / n
        assert np.linalg.norm(mean - eval_out) <= 0.02 * np.linalg.norm(eval_out)


class TestDenseSigmoid:
    def test_zero_weights_give_half(self):
        assert dense_sigmoid(np.ones(4), DenseParams(np.zeros(4), np.zeros(1))) == pytest.approx(0.5)

    def test_large_logit_saturates(self):
        p = dense_sigmoid(np.ones(2), DenseParams(np.array([50.0, 50.0]), np.zeros(1)))
        assert p > 1 - 1e-12

    def test_matches_scalar_recompute(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            h = rng.normal(size=5)
            w = rng.normal(size=5)
            b = rng.normal()
            got = dense_sigmoid(h, DenseParams(w, np.array([b])))
            assert got == pytest.approx(sigmoid(float(w @ h + b)), abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            dense_sigmoid(np.ones(3), DenseParams(np.zeros(4), np.zeros(1)))


class TestBce:
    def test_confident_correct_is_tiny(self):
        assert bce_loss(1 - 1e-9, 1) < 1e-6

    def test_half_is_log_two(self):
        assert bce_loss(0.5, 0) == pytest.approx(math.log(2.0))
        assert bce_loss(0.5, 1) == pytest.approx(math.log(2.0))

    def test_gradient_closed_form(self):
        # d/dp of -log(p) at p=0.25 is -4
        assert bce_grad(0.25, 1) == pytest.approx(-4.0)
        assert bce_grad(0.75, 0) == pytest.approx(4.0)

    def test_bad_label(self):
        with pytest.raises(LabelError):
            bce_loss(0.5, 2)
        with pytest.raises(LabelError):
            bce_grad(0.5, -1)

    def test_midpoint_dominates_correct_side(self):
        # loss at p=0.5 exceeds the loss anywhere on the label's side
        for y in (0, 1):
            for margin in (0.05, 0.2, 0.35):
                p = margin if y == 0 else 1.0 - margin
                assert bce_loss(0.5, y) > bce_loss(p, y)


class TestHeadBackward:
    @pytest.mark.parametrize("train", [False, True])
    def test_gradients_match_finite_difference(self, train):
        lstm, dense = small_params(seed=11, hidden=4)
        rng = np.random.default_rng(12)
        features = rng.normal(size=(3, 1))
        label = 1
        dropout = DropoutConfig(rate=0.5 if train else 0.0, train=train)

        def run(l, d, mask_seed=99):
            p, cache = head_forward(features, l, d, dropout, np.random.default_rng(mask_seed))
            return p, cache

        p, cache = run(lstm, dense)
        grads = head_backward(cache, bce_grad(p, label), lstm)

        def loss_with(l, d):
            p2, _ = run(l, d)
            return bce_loss(p2, label)

        step = 1e-6
        # spot-check one entry of every parameter array
        for name in ("w_i", "w_f", "w_g", "w_o", "b_i", "b_f", "b_g", "b_o"):
            arr = getattr(lstm, name)
            idx = (0, 1) if arr.ndim == 2 else (0,)
            bumped = LstmParams(**{
                k: getattr(lstm, k).copy() for k in
                ("w_i", "w_f", "w_g", "w_o", "b_i", "b_f", "b_g", "b_o")
            })
            getattr(bumped, name)[idx] += step
            hi = loss_with(bumped, dense)
            getattr(bumped, name)[idx] -= 2 * step
            lo = loss_with(bumped, dense)
            fd = (hi - lo) / (2 * step)
            got = getattr(grads.lstm, name)[idx]
            assert got == pytest.approx(fd, abs=1e-4), name

        bumped_dense = DenseParams(dense.weights.copy(), dense.bias.copy())
        bumped_dense.weights[2] += step
        hi = loss_with(lstm, bumped_dense)
        bumped_dense.weights[2] -= 2 * step
        lo = loss_with(lstm, bumped_dense)
        assert grads.dense.weights[2] == pytest.approx((hi - lo) / (2 * step), abs=1e-4)

    def test_feature_gradients_match_finite_difference(self):
        lstm, dense = small_params(seed=13, hidden=4)
        rng = np.random.default_rng(14)
        features = rng.normal(size=(4, 1))
        dropout = DropoutConfig(rate=0.0, train=False)
        p, cache = head_forward(features, lstm, dense, dropout)
        grads = head_backward(cache, bce_grad(p, 0), lstm)
        step = 1e-6
        for t in range(4):
            bumped = features.copy()
            bumped[t, 0] += step
            hi_p, _ = head_forward(bumped, lstm, dense, dropout)
            bumped[t, 0] -= 2 * step
            lo_p, _ = head_forward(bumped, lstm, dense, dropout)
            fd = (bce_loss(hi_p, 0) - bce_loss(lo_p, 0)) / (2 * step)
            assert grads.features[t, 0] == pytest.approx(fd, abs=1e-4)

    def test_zero_upstream_gives_zero_gradients(self):
        lstm, dense = small_params(seed=15)
        p, cache = head_forward(np.ones((2, 1)), lstm, dense, DropoutConfig(train=False))
        grads = head_backward(cache, 0.0, lstm)
        assert np.allclose(grads.lstm.w_i, 0) and np.allclose(grads.features, 0)
        assert np.allclose(grads.dense.weights, 0)

    def test_dropped_units_block_gradient(self):
        lstm, dense = small_params(seed=16, hidden=6)
        rng = np.random.default_rng(17)
        p, cache = head_forward(
            np.ones((2, 1)), lstm, dense, DropoutConfig(rate=0.5, train=True), rng
        )
        grads = head_backward(cache, 1.0, lstm)
        dropped = cache.lstm.mask == 0.0
        assert dropped.any()
        # gradient of dense weights for dropped units is exactly zero
        assert np.allclose(grads.dense.weights[dropped], 0.0)


class TestAdam:
    def test_zero_gradient_keeps_params(self):
        p = np.array([1.0, -2.0])
        m = np.zeros(2)
        v = np.zeros(2)
        p2, m2, v2 = adam_step(p, np.zeros(2), m, v, 1)
        np.testing.assert_allclose(p2, p)

    def test_first_step_moves_by_lr_sign(self):
        # bias correction makes m_hat = g and v_hat = g^2 at t=1
        p = np.zeros(3)
        g = np.array([0.5, -2.0, 1e-3])
        p2, _, _ = adam_step(p, g, np.zeros(3), np.zeros(3), 1, lr=0.01)
        np.testing.assert_allclose(p2, -0.01 * np.sign(g), rtol=1e-4)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            adam_step(np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), 1)

    def test_step_counter_positive(self):
        with pytest.raises(ParameterError):
            adam_step(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros(1), 0)

    def test_optimizer_deterministic(self):
        params = [np.ones(3), np.zeros(2)]
        grads = [np.array([0.1, -0.2, 0.3]), np.array([1.0, -1.0])]
        outs = []
        for _ in range(2):
            opt = Adam([1e-2, 1e-3])
            p = [a.copy() for a in params]
            for _ in range(5):
                p = opt.step(p, grads)
            outs.append(p)
        for a, b in zip(*outs):
            np.testing.assert_array_equal(a, b)
