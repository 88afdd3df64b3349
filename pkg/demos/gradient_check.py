"""
Checking backpropagation against finite differences
===================================================

A scaled-down Network 7 (two conv/pool stages, a bidirectional LSTM and
dropout) is pushed through the CTC loss. We nudge a handful of weights by
+-1e-4 and compare the slope with the analytic gradient.
"""

import numpy as np

from ocrlab.ctc import ctc_loss
from ocrlab.nn import Network, network_spec, softmax

spec = network_spec(7, scale=0.05)
print(spec.describe())
net = Network(spec, n_classes=4, height=8, seed=0)
rng = np.random.default_rng(1)
image = rng.uniform(size=(8, 12))
labels = [1, 2, 3]


def loss():
    # a fresh generator each call keeps the dropout mask fixed
    logits = net.forward(image, training=True, rng=np.random.default_rng(5))
    return ctc_loss(softmax(logits), labels)[0]


logits = net.forward(image, training=True, rng=np.random.default_rng(5))
_, dlogits = ctc_loss(softmax(logits), labels)
grads, _ = net.backward(dlogits)

eps = 1e-4
for name, w in net.params.items():
    idx = tuple(rng.integers(0, s) for s in w.shape)
    old = w[idx]
    w[idx] = old + eps
    up = loss()
    w[idx] = old - eps
    down = loss()
    w[idx] = old
    numeric = (up - down) / (2 * eps)
    print(f"{name:18s} analytic {grads[name][idx]: .6e}  numeric {numeric: .6e}")
