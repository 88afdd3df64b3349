"""Per-line training and 5-fold prediction timings at several worker counts."""

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..ctc import ctc_loss
from ..nn import Adam, Network, softmax
from .training import predict


def _train_seconds_per_line(model, lines):
    net = Network(model.spec, model.codec.size, height=model.height)
    net.set_weights(model.weights)
    opt = Adam(net.params)
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    for s in lines:
        logits = net.forward(s.image, training=True, rng=rng)
        _, g = ctc_loss(softmax(logits), model.codec.encode(s.text), model.spec.merge_repeated)
        grads, _ = net.backward(g)
        opt.step(grads)
    return (time.perf_counter() - start) / len(lines)


def _train_job(args):
    model, lines = args
    return _train_seconds_per_line(model, lines)


def time_report(models_by_network, lines, worker_counts=(1, 2, 4, 8), batch_hint=20):
    """Mean seconds per line for training steps and for 5-fold prediction.

    ``models_by_network`` maps a network id to its list of fold models.
    Prediction time counts every fold model, i.e. each line is processed once
    per fold. Training at ``w`` workers runs ``w`` independent training
    streams, one per worker, and reports the mean per-line step time.
    Returns rows ``{"network", "phase", "workers", "seconds_per_line"}``.
    """
    lines = list(lines)
    rows = []
    for net_id in sorted(models_by_network):
        models = models_by_network[net_id]
        for w in worker_counts:
            if w <= 1:
                sec = _train_seconds_per_line(models[0], lines)
            else:
                with ProcessPoolExecutor(max_workers=w) as pool:
                    sec = float(np.mean(list(pool.map(_train_job, [(models[0], lines)] * w))))
            rows.append({"network": net_id, "phase": "train", "workers": w, "seconds_per_line": sec})
        for w in worker_counts:
            start = time.perf_counter()
            for model in models:
                predict(model, lines, batch_hint=batch_hint, workers=w)
            sec = (time.perf_counter() - start) / len(lines)
            rows.append({"network": net_id, "phase": "predict", "workers": w, "seconds_per_line": sec})
    return rows


def timing_csv(rows):
    """Table layout: one row per (network, phase), one column per worker count."""
    workers = sorted({r["workers"] for r in rows})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["network", "phase"] + [f"workers_{n}" for n in workers])
    keys = sorted({(r["network"], r["phase"]) for r in rows}, key=lambda k: (k[0], k[1] != "train"))
    for net, phase in keys:
        vals = {r["workers"]: r["seconds_per_line"] for r in rows
                if r["network"] == net and r["phase"] == phase}
        w.writerow([net, phase] + [f"{vals[n]:.5f}" if n in vals else "" for n in workers])
    return buf.getvalue()
