"""Dense neural-network layers with exact reverse-mode gradients.

Just enough machinery to express CNN-LSTM line recognizers: 3x3 convolution
with ReLU, max pooling, bidirectional LSTM, inverted dropout and a softmax
output head, plus an Adam optimizer.

Layout conventions (all float64, row-major):

* images are ``H x W x C``; the width axis is the time axis
* sequences are ``T x F``; an image becomes a sequence by treating every
  column as one frame with ``F = H * C`` features
"""

import json
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, UsageError

log = logging.getLogger(__name__)

__all__ = [
    "conv2d",
    "maxpool",
    "blstm",
    "dropout_forward",
    "softmax",
    "project_softmax",
    "LayerSpec",
    "NetworkSpec",
    "network_spec",
    "Network",
    "Adam",
]


def glorot_uniform(rng, shape, fan_in, fan_out):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def sigmoid(z):
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * z))


# ---------------------------------------------------------------------------
# functional forward ops


def _im2col(x):
    h, w, c = x.shape
    xp = np.pad(x, ((1, 1), (1, 1), (0, 0)))
    win = sliding_window_view(xp, (3, 3), axis=(0, 1))  # H, W, C, 3, 3
    return win.transpose(0, 1, 3, 4, 2).reshape(h * w, 9 * c)


def conv2d(x, weights, bias, relu=True):
    """3x3 convolution, stride 1, zero padding 1, followed by ReLU.

    Parameters
    ----------
    x : ndarray, shape (H, W, Cin)
    weights : ndarray, shape (3, 3, Cin, Cout)
    bias : ndarray, shape (Cout,)

    Returns
    -------
    ndarray, shape (H, W, Cout)
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or min(x.shape) < 1:
        raise ConfigurationError(f"conv2d expects a non-empty HxWxC input, got {x.shape}")
    if weights.shape[:3] != (3, 3, x.shape[2]):
        raise ConfigurationError(
            f"conv2d weights {weights.shape} do not match {x.shape[2]} input channels"
        )
    h, w, _ = x.shape
    cout = weights.shape[3]
    z = _im2col(x) @ weights.reshape(-1, cout) + bias
    z = z.reshape(h, w, cout)
    return np.maximum(z, 0.0) if relu else z


def maxpool(x, kernel):
    """Max pooling with stride equal to ``kernel = (kh, kw)``.

    Ragged bottom/right edges form partial windows that take the max over the
    cells present. Returns the pooled tensor and, per output cell, the flat
    index of the winning cell inside its ``kh * kw`` window.
    """
    kh, kw = kernel
    if kh not in (1, 2) or kw not in (1, 2):
        raise ConfigurationError(f"pool kernel extents must be 1 or 2, got {kernel}")
    x = np.asarray(x, dtype=np.float64)
    h, w, c = x.shape
    ho, wo = -(-h // kh), -(-w // kw)
    xp = np.pad(x, ((0, ho * kh - h), (0, wo * kw - w), (0, 0)), constant_values=-np.inf)
    win = xp.reshape(ho, kh, wo, kw, c).transpose(0, 2, 4, 1, 3).reshape(ho, wo, c, kh * kw)
    arg = win.argmax(axis=-1)
    out = np.take_along_axis(win, arg[..., None], axis=-1)[..., 0]
    return out, arg


def _maxpool_backward(dy, arg, kernel, in_shape):
    kh, kw = kernel
    h, w, c = in_shape
    ho, wo = dy.shape[:2]
    dwin = np.zeros((ho, wo, c, kh * kw))
    np.put_along_axis(dwin, arg[..., None], dy[..., None], axis=-1)
    dxp = dwin.reshape(ho, wo, c, kh, kw).transpose(0, 3, 1, 4, 2).reshape(ho * kh, wo * kw, c)
    return dxp[:h, :w]


def _lstm_scan(xs, wx, wh, b):
    """Run both directions at once. ``xs`` is (2, T, F), direction 1 pre-reversed."""
    n = wh.shape[1]
    t_len = xs.shape[1]
    pre = np.matmul(xs, wx) + b[:, None, :]
    gates = np.empty_like(pre)
    cs = np.empty((2, t_len, n))
    hs = np.empty((2, t_len, n))
    h = np.zeros((2, n))
    c = np.zeros((2, n))
    for t in range(t_len):
        z = pre[:, t] + np.matmul(h[:, None, :], wh)[:, 0]
        g = gates[:, t]
        g[:, : 3 * n] = sigmoid(z[:, : 3 * n])
        g[:, 3 * n :] = np.tanh(z[:, 3 * n :])
        c = g[:, n : 2 * n] * c + g[:, :n] * g[:, 3 * n :]
        h = g[:, 2 * n : 3 * n] * np.tanh(c)
        cs[:, t] = c
        hs[:, t] = h
    return gates, cs, hs


def blstm(x, wx, wh, b):
    """Bidirectional LSTM over a ``T x F`` sequence.

    Weights are stacked per direction: ``wx`` is (2, F, 4N), ``wh`` is
    (2, N, 4N), ``b`` is (2, 4N), with gate blocks ordered input, forget,
    output, cell candidate. Returns ``T x 2N``: forward half then backward half.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] != wx.shape[1]:
        raise ConfigurationError(f"blstm input {x.shape} does not match weights {wx.shape}")
    xs = np.stack([x, x[::-1]])
    _, _, hs = _lstm_scan(xs, wx, wh, b)
    return np.concatenate([hs[0], hs[1][::-1]], axis=1)


def dropout_forward(x, rate=0.5, rng=None):
    """Inverted dropout: zero each element with probability ``rate``, scale survivors.

    ``rng`` may be a seed or a ``numpy.random.Generator``. Returns the output and
    the 0/1 keep mask.
    """
    if not 0.0 <= rate < 1.0:
        raise ConfigurationError(f"dropout rate must lie in [0, 1), got {rate}")
    rng = np.random.default_rng(rng)
    mask = (rng.random(np.shape(x)) >= rate).astype(np.float64)
    return x * mask / (1.0 - rate), mask


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def project_softmax(x, weights, bias):
    """Affine projection of a ``T x F`` sequence to ``C`` classes, then row softmax."""
    return softmax(np.asarray(x, dtype=np.float64) @ weights + bias)


# ---------------------------------------------------------------------------
# layers with cached activations


class Layer:
    kind = "layer"

    def __init__(self):
        self.params = {}
        self.grads = {}
        self._cache = None

    def _take_cache(self):
        if self._cache is None:
            raise UsageError(f"{self.kind}: backward called without a prior forward pass")
        cache, self._cache = self._cache, None
        return cache


class Conv2D(Layer):
    kind = "conv"

    def __init__(self, cin, cout, rng):
        super().__init__()
        self.params = {
            "w": glorot_uniform(rng, (3, 3, cin, cout), 9 * cin, 9 * cout),
            "b": np.zeros(cout),
        }

    def forward(self, x, training=False, rng=None):
        w, b = self.params["w"], self.params["b"]
        if x.shape[2] != w.shape[2]:
            raise ConfigurationError(f"conv expects {w.shape[2]} channels, got {x.shape[2]}")
        cols = _im2col(x)
        y = np.maximum(cols @ w.reshape(-1, w.shape[3]) + b, 0.0)
        self._cache = (cols, y, x.shape)
        return y.reshape(x.shape[0], x.shape[1], -1)

    def backward(self, dy):
        cols, y, (h, w_, cin) = self._take_cache()
        wt = self.params["w"]
        dz = dy.reshape(h * w_, -1) * (y > 0)
        self.grads = {"w": (cols.T @ dz).reshape(wt.shape), "b": dz.sum(axis=0)}
        dcols = (dz @ wt.reshape(-1, wt.shape[3]).T).reshape(h, w_, 3, 3, cin)
        dxp = np.zeros((h + 2, w_ + 2, cin))
        for i in range(3):
            for j in range(3):
                dxp[i : i + h, j : j + w_] += dcols[:, :, i, j]
        return dxp[1:-1, 1:-1]


class MaxPool(Layer):
    kind = "maxpool"

    def __init__(self, kernel):
        super().__init__()
        self.kernel = tuple(kernel)

    def forward(self, x, training=False, rng=None):
        y, arg = maxpool(x, self.kernel)
        self._cache = (arg, x.shape)
        return y

    def backward(self, dy):
        arg, shape = self._take_cache()
        return _maxpool_backward(dy, arg, self.kernel, shape)


class ToSequence(Layer):
    """``H x W x C`` image to ``W x (H*C)`` sequence."""

    kind = "to_sequence"

    def forward(self, x, training=False, rng=None):
        self._cache = x.shape
        return x.transpose(1, 0, 2).reshape(x.shape[1], -1)

    def backward(self, dy):
        h, w, c = self._take_cache()
        return dy.reshape(w, h, c).transpose(1, 0, 2)


class BLSTM(Layer):
    kind = "blstm"

    def __init__(self, n_in, hidden, rng):
        super().__init__()
        n = hidden
        b = np.zeros((2, 4 * n))
        b[:, n : 2 * n] = 1.0
        self.params = {
            "wx": glorot_uniform(rng, (2, n_in, 4 * n), n_in, 4 * n),
            "wh": glorot_uniform(rng, (2, n, 4 * n), n, 4 * n),
            "b": b,
        }

    def forward(self, x, training=False, rng=None):
        wx, wh, b = self.params["wx"], self.params["wh"], self.params["b"]
        if x.shape[1] != wx.shape[1]:
            raise ConfigurationError(f"blstm expects {wx.shape[1]} features, got {x.shape[1]}")
        xs = np.stack([x, x[::-1]])
        gates, cs, hs = _lstm_scan(xs, wx, wh, b)
        self._cache = (xs, gates, cs, hs)
        return np.concatenate([hs[0], hs[1][::-1]], axis=1)

    def backward(self, dy):
        xs, gates, cs, hs = self._take_cache()
        wx, wh = self.params["wx"], self.params["wh"]
        n = wh.shape[1]
        t_len = xs.shape[1]
        dhs = np.stack([dy[:, :n], dy[::-1, n:]])
        tanh_c = np.tanh(cs)
        dz_all = np.empty_like(gates)
        dh_next = np.zeros((2, n))
        dc_next = np.zeros((2, n))
        whT = wh.transpose(0, 2, 1)
        zero = np.zeros((2, n))
        for t in range(t_len - 1, -1, -1):
            g = gates[:, t]
            gi, gf, go, gg = g[:, :n], g[:, n : 2 * n], g[:, 2 * n : 3 * n], g[:, 3 * n :]
            c_prev = cs[:, t - 1] if t > 0 else zero
            dh = dhs[:, t] + dh_next
            tc = tanh_c[:, t]
            dc = dh * go * (1.0 - tc * tc) + dc_next
            dz = dz_all[:, t]
            dz[:, :n] = dc * gg * gi * (1.0 - gi)
            dz[:, n : 2 * n] = dc * c_prev * gf * (1.0 - gf)
            dz[:, 2 * n : 3 * n] = dh * tc * go * (1.0 - go)
            dz[:, 3 * n :] = dc * gi * (1.0 - gg * gg)
            dc_next = dc * gf
            dh_next = np.matmul(dz[:, None, :], whT)[:, 0]
        h_prev = np.concatenate([np.zeros((2, 1, n)), hs[:, :-1]], axis=1)
        self.grads = {
            "wx": np.matmul(xs.transpose(0, 2, 1), dz_all),
            "wh": np.matmul(h_prev.transpose(0, 2, 1), dz_all),
            "b": dz_all.sum(axis=1),
        }
        dxs = np.matmul(dz_all, wx.transpose(0, 2, 1))
        return dxs[0] + dxs[1][::-1]


class Dropout(Layer):
    kind = "dropout"

    def __init__(self, rate):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ConfigurationError(f"dropout rate must lie in [0, 1), got {rate}")
        self.rate = rate

    def forward(self, x, training=False, rng=None):
        if not training:
            self._cache = False
            return x
        y, mask = dropout_forward(x, self.rate, rng)
        self._cache = mask
        return y

    def backward(self, dy):
        mask = self._take_cache()
        if mask is False:
            return dy
        return dy * mask / (1.0 - self.rate)


class Projection(Layer):
    """Affine map to class logits; the softmax lives in the loss/decoder."""

    kind = "projection"

    def __init__(self, n_in, n_classes, rng):
        super().__init__()
        self.params = {
            "w": glorot_uniform(rng, (n_in, n_classes), n_in, n_classes),
            "b": np.zeros(n_classes),
        }

    def forward(self, x, training=False, rng=None):
        self._cache = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, dy):
        x = self._take_cache()
        self.grads = {"w": x.T @ dy, "b": dy.sum(axis=0)}
        return dy @ self.params["w"].T


# ---------------------------------------------------------------------------
# network descriptions


LAYER_KINDS = ("conv", "maxpool", "blstm", "dropout")


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network description.

    ``kernel`` is given in tensor axes ``(kh, kw)``; for pooling the width
    extent ``kw`` is the time-axis stride.
    """

    kind: str
    filters: int = 0
    kernel: tuple = (3, 3)
    hidden: int = 0
    rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kernel", tuple(self.kernel))
        if self.kind not in LAYER_KINDS:
            raise ConfigurationError(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv" and (self.kernel != (3, 3) or self.filters < 1):
            raise ConfigurationError("conv layers use a 3x3 kernel and at least one filter")
        if self.kind == "maxpool" and not all(k in (1, 2) for k in self.kernel):
            raise ConfigurationError(f"pool kernel extents must be 1 or 2, got {self.kernel}")
        if self.kind == "blstm" and self.hidden < 1:
            raise ConfigurationError("blstm needs at least one hidden unit")
        if not 0.0 <= self.rate < 1.0:
            raise ConfigurationError(f"dropout rate must lie in [0, 1), got {self.rate}")

    def describe(self):
        if self.kind == "conv":
            return f"CNN {self.filters} 3x3"
        if self.kind == "maxpool":
            # time extent first: "Pool 1x2" halves the height only
            return f"Pool {self.kernel[1]}x{self.kernel[0]}"
        if self.kind == "blstm":
            return f"LSTM {self.hidden}"
        return "Dropout"


@dataclass(frozen=True)
class NetworkSpec:
    network_id: int
    layers: tuple
    merge_repeated: bool = True

    @property
    def time_downsampling(self):
        f = 1
        for layer in self.layers:
            if layer.kind == "maxpool":
                f *= layer.kernel[1]
        return f

    def output_frames(self, width):
        t = width
        for layer in self.layers:
            if layer.kind == "maxpool":
                t = -(-t // layer.kernel[1])
        return t

    def describe(self):
        text = ", ".join(layer.describe() for layer in self.layers)
        if not self.merge_repeated:
            text += ", CTC no merge repeated"
        return text

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        layers = tuple(LayerSpec(**layer) for layer in d["layers"])
        return cls(d["network_id"], layers, d["merge_repeated"])


def network_spec(network_id, scale=1.0):
    """Expand a network id 1-7 into its layer list.

    ``scale`` multiplies filter and hidden counts (minimum 1) to get toy-sized
    versions with the same structure.
    """

    def s(n):
        return max(1, int(round(n * scale)))

    conv40 = LayerSpec("conv", filters=s(40))
    conv60 = LayerSpec("conv", filters=s(60))
    pool22 = LayerSpec("maxpool", kernel=(2, 2))
    pool12 = LayerSpec("maxpool", kernel=(2, 1))  # halves height only
    lstm100 = LayerSpec("blstm", hidden=s(100))
    drop = LayerSpec("dropout", rate=0.5)
    deep = (conv40, pool22, conv60, pool22)
    table = {
        1: (lstm100,),
        2: (conv40, pool22, lstm100),
        3: deep + (lstm100,),
        4: (conv40, pool22, conv60, pool12, lstm100),
        5: deep + (lstm100,),
        6: deep + (lstm100, drop),
        7: deep + (LayerSpec("blstm", hidden=s(200)), drop),
    }
    if network_id not in table:
        raise ConfigurationError(f"network id must be 1-7, got {network_id}")
    return NetworkSpec(network_id, table[network_id], merge_repeated=network_id != 5)


# ---------------------------------------------------------------------------
# network


class Network:
    """A stack of layers from a ``NetworkSpec`` ending in a projection to ``n_classes``.

    ``forward`` takes a 2-D ``H x W`` line image and returns ``T' x C`` logits.
    Parameters are exposed through ``params`` as one flat name -> array dict;
    the arrays are the layers' own buffers, so in-place updates take effect.
    """

    def __init__(self, spec, n_classes, height=32, seed=0):
        self.spec = spec
        self.n_classes = n_classes
        self.height = height
        rng = np.random.default_rng(seed)
        self.layers = []
        h, c = height, 1
        features = None
        for ls in spec.layers:
            if ls.kind == "conv":
                if features is not None:
                    raise ConfigurationError("conv layers must precede recurrent layers")
                self.layers.append(Conv2D(c, ls.filters, rng))
                c = ls.filters
            elif ls.kind == "maxpool":
                if features is not None:
                    raise ConfigurationError("pool layers must precede recurrent layers")
                self.layers.append(MaxPool(ls.kernel))
                h = -(-h // ls.kernel[0])
            else:
                if features is None:
                    self.layers.append(ToSequence())
                    features = h * c
                if ls.kind == "blstm":
                    self.layers.append(BLSTM(features, ls.hidden, rng))
                    features = 2 * ls.hidden
                else:
                    self.layers.append(Dropout(ls.rate))
        if features is None:
            self.layers.append(ToSequence())
            features = h * c
        self.layers.append(Projection(features, n_classes, rng))
        self._forwarded = False

    @property
    def params(self):
        out = {}
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params.items():
                out[f"{i:02d}.{layer.kind}.{name}"] = arr
        return out

    def get_weights(self):
        return {k: v.copy() for k, v in self.params.items()}

    def set_weights(self, weights):
        params = self.params
        if set(weights) != set(params):
            raise ConfigurationError("weight names do not match the network layout")
        for k, v in weights.items():
            if params[k].shape != np.shape(v):
                raise ConfigurationError(f"{k}: shape {np.shape(v)} != {params[k].shape}")
            params[k][...] = v

    def forward(self, image, training=False, rng=None):
        image = np.asarray(image, dtype=np.float64)
        if image.ndim != 2 or image.shape[0] != self.height:
            raise ConfigurationError(f"expected a {self.height} x W image, got {image.shape}")
        x = image[:, :, None]
        for layer in self.layers:
            x = layer.forward(x, training=training, rng=rng)
        self._forwarded = True
        return x

    def predict_proba(self, image):
        return softmax(self.forward(image))

    def backward(self, dlogits):
        """Backpropagate ``dLoss/dlogits``; returns parameter grads and the input grad."""
        if not self._forwarded:
            raise UsageError("backward called without a prior forward pass")
        self._forwarded = False
        d = dlogits
        for layer in reversed(self.layers):
            d = layer.backward(d)
        grads = {}
        for i, layer in enumerate(self.layers):
            for name, g in layer.grads.items():
                grads[f"{i:02d}.{layer.kind}.{name}"] = g
        return grads, d[:, :, 0]


class Adam:
    """Bias-corrected Adam acting in place on a dict of parameter arrays."""

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.step_count = 0
        self.skipped = 0
        self._tmp = {}

    def step(self, grads):
        """Apply one update. Returns False (and leaves everything untouched) on non-finite grads."""
        for k, g in grads.items():
            if g.shape != self.params[k].shape:
                raise ConfigurationError(f"{k}: gradient shape {g.shape} != {self.params[k].shape}")
        if not all(np.isfinite(g).all() for g in grads.values()):
            self.skipped += 1
            log.warning("non-finite gradient, skipping optimizer step %d", self.step_count + 1)
            return False
        self.step_count += 1
        t = self.step_count
        b1, b2 = self.beta1, self.beta2
        step = self.lr / (1.0 - b1**t)
        inv_sqrt_bc2 = 1.0 / math.sqrt(1.0 - b2**t)
        for k, p in self.params.items():
            g = grads[k]
            m, v = self.m[k], self.v[k]
            tmp = self._tmp.get(k)
            if tmp is None:
                tmp = self._tmp[k] = np.empty_like(p)
            # p -= lr * (m / bc1) / (sqrt(v / bc2) + eps), without temporaries
            m *= b1
            np.multiply(g, 1.0 - b1, out=tmp)
            m += tmp
            v *= b2
            np.multiply(g, g, out=tmp)
            tmp *= 1.0 - b2
            v += tmp
            np.sqrt(v, out=tmp)
            tmp *= inv_sqrt_bc2
            tmp += self.eps
            np.divide(m, tmp, out=tmp)
            tmp *= step
            p -= tmp
        return True

