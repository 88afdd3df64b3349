"""Character error rates, confusion tables and relative improvements.

Corpus CER is micro-averaged: summed edit distances over summed ground-truth
lengths. In confusion pairs, the gap (``None``) stands for the missing side:
``(None, "r")`` is a deleted ``r``, ``("r", None)`` an inserted one.
"""

import csv
from collections import Counter
from dataclasses import dataclass, field

from .errors import ConfigurationError

GAP = None

AVERAGING_NOTE = "CER micro-averaged: sum of edit distances / sum of ground-truth lengths"


def edit_distance(a, b):
    """Levenshtein distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass
class EditOps:
    substitutions: int = 0
    insertions: int = 0
    deletions: int = 0
    pairs: list = field(default_factory=list)  # (predicted, true) per error

    @property
    def distance(self):
        return self.substitutions + self.insertions + self.deletions


def edit_ops(predicted, truth):
    """Minimal-cost alignment errors between ``predicted`` and ``truth``.

    Among equally cheap alignments the backtrace prefers substitution, then
    insertion, then deletion.
    """
    n, m = len(predicted), len(truth)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(
                d[i - 1][j - 1] + (predicted[i - 1] != truth[j - 1]),
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
            )
    ops = EditOps()
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + (predicted[i - 1] != truth[j - 1]):
            if predicted[i - 1] != truth[j - 1]:
                ops.substitutions += 1
                ops.pairs.append((predicted[i - 1], truth[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops.insertions += 1
            ops.pairs.append((predicted[i - 1], GAP))
            i -= 1
        else:
            ops.deletions += 1
            ops.pairs.append((GAP, truth[j - 1]))
            j -= 1
    ops.pairs.reverse()
    return ops


def cer(predicted, truth):
    """Edit distance divided by the ground-truth length."""
    if not truth:
        if not predicted:
            return 0.0
        raise ConfigurationError("CER of a non-empty prediction against empty truth is undefined")
    return edit_distance(predicted, truth) / len(truth)


def corpus_cer(pairs):
    """Micro-averaged CER over ``(predicted, truth)`` pairs."""
    errors = total = 0
    for predicted, truth in pairs:
        errors += edit_distance(predicted, truth)
        total += len(truth)
    if total == 0:
        raise ConfigurationError("corpus CER needs at least one non-empty ground truth")
    return errors / total


@dataclass
class ConfusionTable:
    counts: Counter

    @property
    def total(self):
        return sum(self.counts.values())

    def rows(self, top_k=None):
        """``(count, predicted, true)`` sorted by count, then by the unit pair."""
        key = lambda item: (-item[1], _render(item[0][0]), _render(item[0][1]))
        ordered = sorted(self.counts.items(), key=key)
        if top_k is not None:
            ordered = ordered[:top_k]
        return [(n, p, t) for (p, t), n in ordered]

    def to_csv(self, path, top_k=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["count", "predicted", "true"])
            for n, p, t in self.rows(top_k):
                w.writerow([n, _render(p), _render(t)])


def _render(unit):
    if unit is GAP:
        return "_"
    if unit == " ":
        return "SPACE"
    return unit


def confusion(pairs, top_k=None):
    """Count every (predicted, true) error unit over a corpus.

    ``top_k`` truncates the table to its most frequent entries.
    """
    counts = Counter()
    for predicted, truth in pairs:
        counts.update(edit_ops(predicted, truth).pairs)
    table = ConfusionTable(counts)
    if top_k is not None:
        table = ConfusionTable(Counter({(p, t): n for n, p, t in table.rows(top_k)}))
    return table


def relative_improvement(baseline_cer, new_cer):
    """Percent reduction of the error rate relative to the baseline."""
    if baseline_cer <= 0:
        raise ConfigurationError("relative improvement needs a positive baseline CER")
    return 100.0 * (baseline_cer - new_cer) / baseline_cer
