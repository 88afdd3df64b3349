"""Single-fold training, cross-fold orchestration and prediction."""

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..ctc import ctc_greedy_decode, ctc_loss, min_path_length
from ..errors import ConfigurationError
from ..evaluation import corpus_cer
from ..nn import Adam, Network, NetworkSpec, network_spec, softmax
from ..synthline import LINE_HEIGHT

log = logging.getLogger(__name__)

# training-set size -> iteration budget, monotone in the line count
PRESET_ITERATIONS = {60: 10000, 100: 12000, 150: 15000, 250: 20000, 500: 25000, 1000: 30000}


def preset_iterations(n_lines, iter_scale=1.0):
    if n_lines not in PRESET_ITERATIONS:
        raise ConfigurationError(
            f"no preset iteration budget for {n_lines} lines; presets: {sorted(PRESET_ITERATIONS)}"
        )
    return int(round(PRESET_ITERATIONS[n_lines] * iter_scale))


@dataclass(frozen=True)
class TrainConfig:
    network_id: int = 1
    iterations: int = 1000
    learning_rate: float = 0.001
    validation_interval: int = 1000
    seed: int = 0
    batch_size: int = 1
    network_scale: float = 1.0

    def __post_init__(self):
        if self.batch_size != 1:
            raise ConfigurationError("only batch size 1 is supported")
        if self.iterations < 0 or self.validation_interval < 1:
            raise ConfigurationError("iterations must be >= 0 and validation_interval >= 1")

    def config_hash(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def to_float32_precision(weights):
    return {k: v.astype(np.float32).astype(np.float64) for k, v in weights.items()}


@dataclass
class FoldModel:
    """The best checkpoint of one training run.

    Weights are float64 arrays holding float32-representable values, exactly
    what the model file stores, so a save/load roundtrip predicts identically.
    """

    spec: NetworkSpec
    codec: object
    weights: dict
    best_cer: float
    best_iteration: int
    config_hash: str
    height: int = LINE_HEIGHT
    history: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    used: int = 0
    _net: object = field(default=None, repr=False, compare=False)

    def network(self):
        if self._net is None:
            net = Network(self.spec, self.codec.size, height=self.height)
            net.set_weights(self.weights)
            self._net = net
        return self._net

    def weight_hash(self):
        h = hashlib.sha256()
        for k in sorted(self.weights):
            h.update(k.encode())
            h.update(self.weights[k].astype("<f4").tobytes())
        return h.hexdigest()

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_net"] = None
        return state


def _decode_lines(net, spec, codec, lines):
    out = []
    for s in lines:
        if s.image.shape[1] == 0:
            log.warning("line of width 0 yields no frames; predicting empty text")
            out.append("")
            continue
        probs = softmax(net.forward(s.image))
        out.append(codec.decode(ctc_greedy_decode(probs, spec.merge_repeated)))
    return out


def train_fold(config, train_lines, val_lines, codec, on_validate=None):
    """Train one model with Adam at batch size 1 and keep the best validation checkpoint.

    Each iteration draws one training line uniformly with replacement. The
    validation set is decoded greedily at iteration 0, every
    ``validation_interval`` iterations and after the last iteration; a
    checkpoint replaces the current best only if its CER is strictly lower.
    Lines too short for their label sequence are skipped and listed in
    ``FoldModel.skipped`` (indices into ``train_lines``).
    """
    if codec is None or codec.size < 2:
        raise ConfigurationError("training needs a codec with at least one character")
    if not val_lines:
        raise ConfigurationError("training needs a non-empty validation set")
    spec = network_spec(config.network_id, config.network_scale)
    net = Network(spec, codec.size, height=LINE_HEIGHT, seed=config.seed)
    eval_net = Network(spec, codec.size, height=LINE_HEIGHT, seed=config.seed)
    opt = Adam(net.params, lr=config.learning_rate)
    rng = np.random.default_rng([config.seed, 1])

    usable, skipped = [], []
    for i, s in enumerate(train_lines):
        labels = codec.encode(s.text)
        if spec.output_frames(s.width) < min_path_length(labels, spec.merge_repeated):
            log.warning("skipping training line %d: too short for %r", i, s.text)
            skipped.append(i)
        else:
            usable.append((s.image, labels))
    if not usable:
        raise ConfigurationError("no training line satisfies the CTC length requirement")

    best = {"cer": np.inf, "iteration": 0, "weights": None}
    history = []

    def validate(iteration):
        snapshot = to_float32_precision(net.get_weights())
        eval_net.set_weights(snapshot)
        texts = _decode_lines(eval_net, spec, codec, val_lines)
        cer = corpus_cer(zip(texts, [s.text for s in val_lines]))
        history.append((iteration, cer))
        if cer < best["cer"]:
            best.update(cer=cer, iteration=iteration, weights=snapshot)
        if on_validate is not None:
            on_validate(iteration, cer)

    validate(0)
    for it in range(1, config.iterations + 1):
        image, labels = usable[int(rng.integers(len(usable)))]
        logits = net.forward(image, training=True, rng=rng)
        _, dlogits = ctc_loss(softmax(logits), labels, spec.merge_repeated)
        grads, _ = net.backward(dlogits)
        opt.step(grads)
        if it % config.validation_interval == 0 or it == config.iterations:
            validate(it)

    return FoldModel(
        spec=spec,
        codec=codec,
        weights=best["weights"],
        best_cer=float(best["cer"]),
        best_iteration=best["iteration"],
        config_hash=config.config_hash(),
        history=history,
        skipped=skipped,
        used=len(usable),
    )


def _train_job(args):
    config, train_lines, val_lines, codec = args
    return train_fold(config, train_lines, val_lines, codec)


def cross_fold_train(config, split, samples, codec, workers=1):
    """Train one model per fold; fold ``i`` uses seed ``config.seed + i``."""
    jobs = []
    for i in range(split.k):
        cfg = replace(config, seed=config.seed + i)
        train = [samples[j] for j in split.train_indices(i)]
        val = [samples[j] for j in split.validation_indices(i)]
        jobs.append((cfg, train, val, codec))
    if workers <= 1:
        return [_train_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_train_job, jobs))


def _predict_batch(args):
    model, lines, return_probs = args
    net = model.network()
    texts, probs = [], []
    for s in lines:
        if s.image.shape[1] == 0:
            log.warning("line of width 0 yields no frames; predicting empty text")
            texts.append("")
            probs.append(np.zeros((0, model.codec.size)))
            continue
        p = softmax(net.forward(s.image))
        texts.append(model.codec.decode(ctc_greedy_decode(p, model.spec.merge_repeated)))
        if return_probs:
            probs.append(p)
    return texts, probs


def predict(model, lines, batch_hint=20, workers=1, return_probs=False):
    """Greedy-decode ``lines`` with ``model``.

    Lines are grouped into batches of ``batch_hint`` purely for throughput;
    the texts do not depend on batching or on the worker count. Returns the
    texts, and with ``return_probs`` also the per-line probability matrices.
    """
    lines = list(lines)
    batch_hint = max(1, int(batch_hint))
    batches = [lines[i : i + batch_hint] for i in range(0, len(lines), batch_hint)]
    jobs = [(model, b, return_probs) for b in batches]
    if workers <= 1 or len(jobs) <= 1:
        results = [_predict_batch(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_predict_batch, jobs))
    texts = [t for r in results for t in r[0]]
    if return_probs:
        return texts, [p for r in results for p in r[1]]
    return texts


def save_prob_matrices(path, probs):
    np.savez_compressed(path, **{f"line{i:06d}": p for i, p in enumerate(probs)})


def load_prob_matrices(path):
    with np.load(path) as data:
        return [data[k] for k in sorted(data.files)]
