import logging
import math

import numpy as np
import pytest

from ocrlab import nn
from ocrlab.errors import ConfigurationError, UsageError
from oracles import blstm_scalar, check_layer, check_network, conv_loop, pool_loop

RNG = np.random.default_rng(1234)


# --- conv -------------------------------------------------------------------


def test_conv_zero_weights_gives_bias():
    out = nn.conv2d(np.ones((1, 1, 1)), np.zeros((3, 3, 1, 2)), np.array([0.5, 2.0]))
    assert out.shape == (1, 1, 2)
    np.testing.assert_array_equal(out[0, 0], [0.5, 2.0])


def test_conv_identity_kernel():
    x = RNG.uniform(size=(4, 6, 1))
    w = np.zeros((3, 3, 1, 1))
    w[1, 1, 0, 0] = 1.0
    np.testing.assert_array_equal(nn.conv2d(x, w, np.zeros(1)), x)


def test_conv_matches_loop_oracle():
    x = RNG.normal(size=(5, 7, 2))
    w = RNG.normal(size=(3, 3, 2, 4))
    b = RNG.normal(size=4)
    np.testing.assert_allclose(nn.conv2d(x, w, b), conv_loop(x, w, b), rtol=0, atol=1e-12)
    np.testing.assert_allclose(nn.conv2d(x, w, b, relu=False), conv_loop(x, w, b, relu=False),
                               rtol=0, atol=1e-12)


def test_conv_channel_mismatch():
    with pytest.raises(ConfigurationError):
        nn.conv2d(np.zeros((3, 3, 2)), np.zeros((3, 3, 1, 4)), np.zeros(4))


# --- pooling ----------------------------------------------------------------


def test_pool_single_window():
    out, _ = nn.maxpool(np.array([[1.0, 2.0], [3.0, 4.0]])[:, :, None], (2, 2))
    assert out[:, :, 0].tolist() == [[4.0]]


def test_pool_rowwise_pairs():
    x = np.array([[1.0, 5.0, 2.0, 0.0], [7.0, 3.0, -1.0, -2.0]])[:, :, None]
    out, _ = nn.maxpool(x, (1, 2))
    assert out[:, :, 0].tolist() == [[5.0, 2.0], [7.0, -1.0]]


@pytest.mark.parametrize("kernel", [(2, 2), (1, 2), (2, 1), (1, 1)])
def test_pool_matches_loop_oracle(kernel):
    x = RNG.normal(size=(5, 5, 3))
    out, _ = nn.maxpool(x, kernel)
    np.testing.assert_array_equal(out, pool_loop(x, *kernel))


def test_pool_rejects_large_kernel():
    with pytest.raises(ConfigurationError):
        nn.maxpool(np.zeros((4, 4, 1)), (3, 2))


# --- blstm ------------------------------------------------------------------


def _lstm_weights(f, n, scale=1.0):
    return (RNG.normal(scale=scale, size=(2, f, 4 * n)), RNG.normal(scale=scale, size=(2, n, 4 * n)),
            RNG.normal(scale=scale, size=(2, 4 * n)))


def test_blstm_zero_weights_zero_output():
    x = RNG.normal(size=(5, 3))
    out = nn.blstm(x, np.zeros((2, 3, 8)), np.zeros((2, 2, 8)), np.zeros((2, 8)))
    assert out.shape == (5, 4)
    assert not out.any()


def test_blstm_single_step():
    wx, wh, b = _lstm_weights(3, 2)
    x = RNG.normal(size=(1, 3))
    out = nn.blstm(x, wx, wh, b)
    assert out.shape == (1, 4)
    np.testing.assert_allclose(out, blstm_scalar(x, wx, wh, b), atol=1e-12, rtol=0)


def test_blstm_matches_scalar_recurrence():
    wx, wh, b = _lstm_weights(3, 2)
    x = RNG.normal(size=(4, 3))
    np.testing.assert_allclose(nn.blstm(x, wx, wh, b), blstm_scalar(x, wx, wh, b), atol=1e-12, rtol=0)


# --- dropout ----------------------------------------------------------------


def test_dropout_rate_zero_is_identity():
    x = RNG.normal(size=(4, 5))
    y, mask = nn.dropout_forward(x, 0.0, rng=3)
    np.testing.assert_array_equal(y, x)
    assert mask.all()


def test_dropout_seeded_mask_repeats():
    x = np.ones((50, 20))
    _, m1 = nn.dropout_forward(x, 0.5, rng=9)
    _, m2 = nn.dropout_forward(x, 0.5, rng=9)
    np.testing.assert_array_equal(m1, m2)


def test_dropout_survivor_fraction_and_scale():
    x = np.ones(10**5)
    y, mask = nn.dropout_forward(x, 0.5, rng=0)
    assert abs(mask.mean() - 0.5) <= 0.01
    assert set(np.unique(y)) <= {0.0, 2.0}


@pytest.mark.parametrize("rate", [1.0, 1.5, -0.1])
def test_dropout_rejects_bad_rate(rate):
    with pytest.raises(ConfigurationError):
        nn.dropout_forward(np.ones(3), rate)
    with pytest.raises(ConfigurationError):
        nn.LayerSpec("dropout", rate=rate)


def test_dropout_layer_identity_at_inference():
    layer = nn.Dropout(0.5)
    x = RNG.normal(size=(3, 4))
    np.testing.assert_array_equal(layer.forward(x), x)
    np.testing.assert_array_equal(layer.backward(x), x)


# --- softmax ----------------------------------------------------------------


def test_softmax_zero_row_uniform():
    np.testing.assert_allclose(nn.softmax(np.zeros((2, 5))), np.full((2, 5), 0.2))


def test_softmax_shift_invariance():
    z = RNG.normal(size=(3, 4))
    np.testing.assert_allclose(nn.softmax(z + 17.0), nn.softmax(z), atol=1e-15)


def test_softmax_matches_direct_oracle():
    z = RNG.normal(size=(3, 4))
    direct = np.exp(z) / np.exp(z).sum(axis=1, keepdims=True)
    np.testing.assert_allclose(nn.softmax(z), direct, atol=1e-12, rtol=0)
    x, w, b = RNG.normal(size=(3, 2)), RNG.normal(size=(2, 4)), RNG.normal(size=4)
    np.testing.assert_allclose(nn.project_softmax(x, w, b), nn.softmax(x @ w + b), atol=1e-15)


def test_softmax_extreme_logits_finite():
    p = nn.softmax(np.array([[1e4, -1e4, 0.0]]))
    assert np.isfinite(p).all()
    assert abs(p.sum() - 1.0) <= 1e-9


# --- backward ---------------------------------------------------------------


def test_zero_upstream_gives_zero_gradients():
    net = nn.Network(nn.network_spec(3, scale=0.1), 5, height=8, seed=0)
    img = RNG.uniform(size=(8, 12))
    logits = net.forward(img)
    grads, dimg = net.backward(np.zeros_like(logits))
    assert all(not g.any() for g in grads.values())
    assert not dimg.any()


def test_projection_gradient_is_outer_product_pattern():
    layer = nn.Projection(3, 2, RNG)
    x = RNG.normal(size=(4, 3))
    layer.forward(x)
    layer.backward(np.ones((4, 2)))
    # d sum(xW + b) / dW[i, j] = sum_t x[t, i]
    np.testing.assert_allclose(layer.grads["w"], np.repeat(x.sum(axis=0)[:, None], 2, axis=1))
    np.testing.assert_allclose(layer.grads["b"], [4.0, 4.0])


def test_backward_without_forward_raises():
    with pytest.raises(UsageError):
        nn.Projection(3, 2, RNG).backward(np.ones((1, 2)))
    net = nn.Network(nn.network_spec(1, scale=0.05), 3, height=8)
    with pytest.raises(UsageError):
        net.backward(np.zeros((4, 3)))


@pytest.mark.parametrize("kind", ["conv", "maxpool", "blstm", "dropout", "projection"])
def test_layer_gradients_match_finite_differences(kind):
    assert check_layer(kind) <= 1e-3


@pytest.mark.parametrize("network_id", range(1, 8))
def test_network_gradients_match_finite_differences(network_id):
    assert check_network(network_id) <= 1e-3


# --- network specs ----------------------------------------------------------

TABLE = {
    1: "LSTM 100",
    2: "CNN 40 3x3, Pool 2x2, LSTM 100",
    3: "CNN 40 3x3, Pool 2x2, CNN 60 3x3, Pool 2x2, LSTM 100",
    4: "CNN 40 3x3, Pool 2x2, CNN 60 3x3, Pool 1x2, LSTM 100",
    5: "CNN 40 3x3, Pool 2x2, CNN 60 3x3, Pool 2x2, LSTM 100, CTC no merge repeated",
    6: "CNN 40 3x3, Pool 2x2, CNN 60 3x3, Pool 2x2, LSTM 100, Dropout",
    7: "CNN 40 3x3, Pool 2x2, CNN 60 3x3, Pool 2x2, LSTM 200, Dropout",
}
FACTORS = {1: 1, 2: 2, 3: 4, 4: 2, 5: 4, 6: 4, 7: 4}


@pytest.mark.parametrize("network_id", range(1, 8))
def test_network_table_rows(network_id):
    spec = nn.network_spec(network_id)
    assert spec.describe() == TABLE[network_id]
    assert spec.merge_repeated == (network_id != 5)
    assert spec.time_downsampling == FACTORS[network_id]
    assert nn.NetworkSpec.from_json(spec.to_json()) == spec


def test_unknown_network_id():
    with pytest.raises(ConfigurationError):
        nn.network_spec(8)


@pytest.mark.parametrize("network_id", range(1, 8))
def test_shape_law(network_id):
    spec = nn.network_spec(network_id, scale=0.05)
    net = nn.Network(spec, 6, height=8, seed=1)
    for width in (1, 2, 3, 5, 8, 13):
        out = net.forward(RNG.uniform(size=(8, width)))
        assert out.shape == (math.ceil(width / FACTORS[network_id]), 6)
        assert spec.output_frames(width) == out.shape[0]
        p = nn.softmax(out)
        assert np.isfinite(p).all()
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-9)


def test_wrong_image_height():
    net = nn.Network(nn.network_spec(1, scale=0.05), 3, height=8)
    with pytest.raises(ConfigurationError):
        net.forward(np.zeros((9, 4)))


def test_set_weights_validates_layout():
    net = nn.Network(nn.network_spec(2, scale=0.05), 3, height=8)
    w = net.get_weights()
    w.pop(next(iter(w)))
    with pytest.raises(ConfigurationError):
        net.set_weights(w)


def test_init_conventions():
    net = nn.Network(nn.network_spec(7, scale=0.1), 5, height=8, seed=0)
    for name, arr in net.params.items():
        if name.endswith(".b") and "blstm" not in name:
            assert not arr.any()
    lstm = next(layer for layer in net.layers if isinstance(layer, nn.BLSTM))
    n = lstm.params["wh"].shape[1]
    assert (lstm.params["b"][:, n : 2 * n] == 1.0).all()
    assert not lstm.params["b"][:, :n].any()
    conv = net.layers[0].params["w"]
    limit = math.sqrt(6.0 / (9 * 1 + 9 * conv.shape[3]))
    assert np.abs(conv).max() <= limit


# --- determinism ------------------------------------------------------------


def test_determinism_forward_and_update():
    img = RNG.uniform(size=(8, 11))
    results = []
    for _ in range(2):
        net = nn.Network(nn.network_spec(6, scale=0.1), 4, height=8, seed=5)
        opt = nn.Adam(net.params)
        logits = net.forward(img, training=True, rng=np.random.default_rng(3))
        grads, _ = net.backward(np.ones_like(logits))
        opt.step(grads)
        results.append((logits, net.get_weights()))
    np.testing.assert_array_equal(results[0][0], results[1][0])
    for k in results[0][1]:
        np.testing.assert_array_equal(results[0][1][k], results[1][1][k])


# --- adam -------------------------------------------------------------------


def test_adam_zero_gradient_fixed_point():
    p = {"w": RNG.normal(size=5)}
    before = p["w"].copy()
    opt = nn.Adam(p)
    assert opt.step({"w": np.zeros(5)})
    np.testing.assert_array_equal(p["w"], before)
    assert opt.step_count == 1


def test_adam_first_step_closed_form():
    p = {"w": np.array([1.0])}
    nn.Adam(p, lr=0.001).step({"w": np.array([2.0])})
    assert p["w"][0] == pytest.approx(1.0 - 0.001 * 2.0 / (2.0 + 1e-8), abs=1e-15)
    assert p["w"][0] == pytest.approx(0.999, abs=1e-10)


def test_adam_constant_gradient_asymptote():
    p = {"w": np.array([0.0, 0.0])}
    opt = nn.Adam(p, lr=0.01)
    g = {"w": np.array([3.0, -0.5])}
    for _ in range(500):
        before = p["w"].copy()
        opt.step(g)
    np.testing.assert_allclose(p["w"] - before, [-0.01, 0.01], rtol=1e-6)
    assert opt.step_count == 500
    assert opt.m["w"].shape == opt.v["w"].shape == p["w"].shape


def test_adam_skips_non_finite(caplog):
    p = {"w": np.ones(3)}
    opt = nn.Adam(p)
    with caplog.at_level(logging.WARNING):
        assert not opt.step({"w": np.array([1.0, np.nan, 0.0])})
    np.testing.assert_array_equal(p["w"], 1.0)
    assert opt.skipped == 1 and opt.step_count == 0
    assert "non-finite" in caplog.text
    assert opt.step({"w": np.ones(3)})
    assert opt.step_count == 1


def test_adam_shape_mismatch():
    opt = nn.Adam({"w": np.ones(3)})
    with pytest.raises(ConfigurationError):
        opt.step({"w": np.ones(4)})


def test_layer_spec_validation():
    with pytest.raises(ConfigurationError):
        nn.LayerSpec("conv", filters=4, kernel=(5, 5))
    with pytest.raises(ConfigurationError):
        nn.LayerSpec("maxpool", kernel=(3, 1))
    with pytest.raises(ConfigurationError):
        nn.LayerSpec("pooling")
