"""CTC loss and greedy decoding, with and without merging of repeated labels.

Label 0 is the blank. A *path* assigns one label to every output frame. Under
the standard (merge) semantics a path matches ``_*A+_*B+_*...``: runs of the
same label collapse to one, so equal neighbours in the target need a blank
between them. Under the no-merge semantics a path matches ``_*A_*B_*...``:
every target label occupies exactly one frame and removing the blanks must
give the target verbatim.

Both variants share the usual blank-interleaved lattice of ``2L + 1`` states
and differ only in which transitions are allowed.
"""

import itertools

import numpy as np

from .errors import ConfigurationError, CtcLengthError

BLANK = 0


def min_path_length(labels, merge_repeated=True):
    labels = list(labels)
    if not merge_repeated:
        return len(labels)
    repeats = sum(1 for a, b in zip(labels, labels[1:]) if a == b)
    return len(labels) + repeats


def _lattice(labels, merge_repeated):
    """Extended label sequence plus self-loop and skip-two masks per state."""
    ext = np.zeros(2 * len(labels) + 1, dtype=np.int64)
    ext[1::2] = labels
    n = len(ext)
    is_label = np.arange(n) % 2 == 1
    skip = np.zeros(n, dtype=bool)
    skip[2:] = is_label[2:]
    if merge_repeated:
        self_loop = np.ones(n, dtype=bool)
        skip[2:] &= ext[2:] != ext[:-2]
    else:
        self_loop = ~is_label
    return ext, self_loop, skip


def _shift(a, k):
    out = np.full_like(a, -np.inf)
    out[k:] = a[: len(a) - k]
    return out


def _unshift(a, k):
    out = np.full_like(a, -np.inf)
    out[: len(a) - k] = a[k:]
    return out


def ctc_loss(probs, labels, merge_repeated=True, line_id=None):
    """Negative log-likelihood of ``labels`` under per-frame distributions ``probs``.

    Parameters
    ----------
    probs : ndarray, shape (T, C)
        Row-stochastic matrix, column 0 is the blank.
    labels : sequence of int
        Target label indices in ``[1, C-1]``.
    merge_repeated : bool
        Select the standard (True) or no-merge (False) path semantics.
    line_id : optional
        Included in the error message when the sequence is too short.

    Returns
    -------
    loss : float
        ``-ln P(labels | probs)``.
    grad : ndarray, shape (T, C)
        Gradient of the loss with respect to the pre-softmax logits that
        produced ``probs`` (i.e. ``probs - posterior label occupancy``).
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = [int(k) for k in labels]
    t_len, n_classes = probs.shape
    if any(k < 1 or k >= n_classes for k in labels):
        raise ConfigurationError(f"labels must lie in [1, {n_classes - 1}], got {labels}")
    need = min_path_length(labels, merge_repeated)
    if t_len < need:
        where = f" (line {line_id})" if line_id is not None else ""
        raise CtcLengthError(
            f"line too short for label sequence{where}: {t_len} frames, need {need}"
        )

    ext, self_loop, skip = _lattice(labels, merge_repeated)
    n = len(ext)
    with np.errstate(divide="ignore"):
        lp = np.log(probs)[:, ext]

    neg = -np.inf
    alpha = np.full((t_len, n), neg)
    alpha[0, 0] = lp[0, 0]
    if n > 1:
        alpha[0, 1] = lp[0, 1]
    for t in range(1, t_len):
        a = alpha[t - 1]
        acc = np.logaddexp(np.where(self_loop, a, neg), _shift(a, 1))
        acc = np.logaddexp(acc, np.where(skip, _shift(a, 2), neg))
        alpha[t] = acc + lp[t]

    # beta excludes the emission at its own frame, so alpha * beta is path mass
    beta = np.full((t_len, n), neg)
    beta[-1, -1] = 0.0
    if n > 1:
        beta[-1, -2] = 0.0
    skip_from = _unshift(np.where(skip, 0.0, neg), 2)
    for t in range(t_len - 2, -1, -1):
        e = lp[t + 1] + beta[t + 1]
        acc = np.logaddexp(np.where(self_loop, e, neg), _unshift(e, 1))
        beta[t] = np.logaddexp(acc, _unshift(e, 2) + skip_from)

    log_p = np.logaddexp(alpha[-1, -1], alpha[-1, -2]) if n > 1 else alpha[-1, -1]
    loss = -float(log_p)
    if not np.isfinite(log_p):
        return loss, np.full_like(probs, np.nan)
    occupancy = np.exp(alpha + beta - log_p)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), ext] = 1.0
    grad = probs - occupancy @ onehot
    return loss, grad


def collapse(path, merge_repeated=True):
    """Map a frame-level path to its label sequence."""
    out = []
    prev = None
    for k in path:
        k = int(k)
        if k != BLANK and not (merge_repeated and k == prev):
            out.append(k)
        prev = k
    return out


def ctc_greedy_decode(probs, merge_repeated=True):
    """Per-frame argmax (lowest index wins ties), then collapse and drop blanks."""
    probs = np.asarray(probs)
    if probs.shape[0] == 0:
        return []
    return collapse(probs.argmax(axis=1), merge_repeated)


def ctc_brute_force(probs, labels, merge_repeated=True, max_paths=10**7):
    """Sum the probability of every path that collapses to ``labels``.

    Test oracle only: enumerates all ``C ** T`` paths.
    """
    probs = np.asarray(probs, dtype=np.float64)
    t_len, n_classes = probs.shape
    if n_classes**t_len > max_paths:
        raise ConfigurationError(
            f"brute force refuses {n_classes}^{t_len} paths (limit {max_paths})"
        )
    target = [int(k) for k in labels]
    total = 0.0
    for path in itertools.product(range(n_classes), repeat=t_len):
        if collapse(path, merge_repeated) == target:
            total += float(np.prod(probs[np.arange(t_len), path]))
    return total
